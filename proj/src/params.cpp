#include "medlat/params.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "medlat/index_set.hpp"
#include "medlat/numeric.hpp"
#include "medlat/primes.hpp"

namespace medlat {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kTauFloor = 1e-9;
constexpr double kTauCeil = 1e9;
constexpr double kRootTol = 1e-12;
constexpr double kDegenerateTol = 1e-8;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_p(double tau, std::uint64_t n, const Problem& problem) {
  return log_p_factor(tau, std::log(static_cast<double>(n)), problem.smoothness, problem.weights);
}

double log_nstar(double tau, std::uint64_t n, const Problem& problem) {
  return std::log(static_cast<double>(n - 1)) - 1.0 / tau - log_p(tau, n, problem);
}

BisectionOptions root_options() {
  BisectionOptions o;
  o.abs_tol = 0.0;
  o.rel_tol = kRootTol;
  o.max_iter = 400;
  return o;
}

// Zero of an increasing function of tau, bracketed by halving/doubling from 1.
template <typename Fn>
double increasing_root(Fn&& fn, const char* what) {
  double lo = 1.0;
  while (fn(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < kTauFloor) throw std::runtime_error(std::string(what) + ": lower bracket left [1e-9, 1e9]");
  }
  double hi = 1.0;
  while (fn(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > kTauCeil) throw std::runtime_error(std::string(what) + ": upper bracket left [1e-9, 1e9]");
  }
  return bisect_increasing(fn, lo, hi, root_options());
}

}  // namespace

BudgetSpec::BudgetSpec(std::uint64_t m, double d) : m_max(m), delta(d) {
  if (m_max < 2) throw std::invalid_argument("M_max must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double r_window_center(std::uint64_t n, double delta) {
  return 2.0 * std::log1p(static_cast<double>(n - 1) / (4.0 * kE)) - 2.0 * std::log(delta);
}

double budget_cost(std::uint64_t n, double delta) {
  return static_cast<double>(n) * (r_window_center(n, delta) + 1.0);
}

std::uint64_t find_Nmax(const BudgetSpec& budget) {
  const auto m = static_cast<double>(budget.m_max);
  if (budget_cost(2, budget.delta) > m)
    throw std::domain_error("budget too small: N = 2 already needs " + format_double(budget_cost(2, budget.delta)) +
                            " evaluations");
  // Largest integer N with cost(N) <= M; cost is strictly increasing.
  std::uint64_t lo = 2;
  std::uint64_t hi = budget.m_max;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (budget_cost(mid, budget.delta) <= m)
      lo = mid;
    else
      hi = mid - 1;
  }
  return prev_prime(lo);
}

unsigned choose_R_window(std::uint64_t n, double delta) {
  const double c = r_window_center(n, delta);
  auto k = static_cast<long long>(std::floor(c + 1.0));
  if (k % 2 == 0) --k;
  if (k < 1) k = 1;
  return static_cast<unsigned>(k);
}

unsigned choose_R_budget(std::uint64_t n, std::uint64_t m_max) {
  if (n == 0) throw std::invalid_argument("N must be positive");
  if (m_max < n) throw std::invalid_argument("M_max < N leaves no room for a single repetition");
  std::uint64_t r = m_max / n;
  if (r % 2 == 0) --r;
  return static_cast<unsigned>(r);
}

double tau_log_derivative(double tau, double c, std::uint64_t n, const Problem& problem) {
  const double log_n = std::log(static_cast<double>(n));
  const auto roots = problem.weights.root(problem.alpha(), problem.dim());
  CompensatedSum s;
  s += -c / tau;
  for (double g : roots) s += 2.0 * g * tau * log_n / (1.0 + 2.0 * g * (1.0 + tau * log_n));
  return s.value();
}

double window_objective(double tau, std::uint64_t n, const Problem& problem) {
  return 4.0 * kE / tau + log_p(tau, n, problem) - std::log(static_cast<double>(n - 1)) + 4.0 * kE;
}

TauRoots tau_roots(std::uint64_t n, const Problem& problem) {
  if (n < 3 || !is_prime(n)) throw std::invalid_argument("tau_roots needs a prime N >= 3");
  TauRoots out;
  out.tau0 = increasing_root([&](double t) { return tau_log_derivative(t, 4.0 * kE, n, problem); }, "tau0");
  out.tau0_prime = increasing_root([&](double t) { return tau_log_derivative(t, 1.0, n, problem); }, "tau0'");

  const double scale = std::max(1.0, std::log(static_cast<double>(n - 1)));
  out.objective_at_tau0 = window_objective(out.tau0, n, problem);
  out.window_feasible = out.objective_at_tau0 <= kDegenerateTol * scale;
  out.tau1 = kNaN;
  out.tau2 = kNaN;
  if (!out.window_feasible) return out;
  if (std::abs(out.objective_at_tau0) <= kDegenerateTol * scale) {
    out.degenerate = true;
    out.tau1 = out.tau2 = out.tau0;
    return out;
  }
  auto phi = [&](double t) { return window_objective(t, n, problem); };
  double lo = out.tau0;
  while (phi(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < kTauFloor) throw std::runtime_error("tau1: lower bracket left [1e-9, 1e9]");
  }
  out.tau1 = bisect_increasing([&](double t) { return -phi(t); }, lo, out.tau0, root_options());
  double hi = out.tau0;
  while (phi(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > kTauCeil) throw std::runtime_error("tau2: upper bracket left [1e-9, 1e9]");
  }
  out.tau2 = bisect_increasing(phi, out.tau0, hi, root_options());
  return out;
}

double choose_tau(const TauRoots& roots) {
  if (!roots.window_feasible) return roots.tau0_prime;
  if (roots.degenerate) return roots.tau0;
  return std::max(roots.tau0_prime, roots.tau1);
}

SelectedParams select_params(const BudgetSpec& budget, const Problem& problem, RRule rule) {
  SelectedParams p;
  p.m_max = budget.m_max;
  p.delta = budget.delta;
  p.r_rule = rule;
  p.n_max = find_Nmax(budget);
  if (p.n_max < 3) {
    p.reason = "N_max = 2 is too small for parameter selection";
    p.roots.tau1 = p.roots.tau2 = kNaN;
    return p;
  }
  p.roots = tau_roots(p.n_max, problem);
  p.tau_star = choose_tau(p.roots);
  p.R = rule == RRule::Budget ? choose_R_budget(p.n_max, budget.m_max) : choose_R_window(p.n_max, budget.delta);
  p.p_n = std::exp(log_p(p.tau_star, p.n_max, problem));
  p.n_star = std::exp(log_nstar(p.tau_star, p.n_max, problem));
  p.feasible = p.n_star >= 1.0;
  std::string reason;
  if (!p.roots.window_feasible)
    reason = "tau window empty (objective at tau0 = " + format_double(p.roots.objective_at_tau0) +
             " > 0), M_max likely too small; using tau0'";
  if (!p.feasible) {
    if (!reason.empty()) reason += "; ";
    reason += "N_* < 1";
  }
  p.reason = reason;
  return p;
}

double theorem1_bound(std::uint64_t n, double tau, double n_star, double alpha, double f_norm_sq) {
  if (n < 3) throw std::domain_error("theorem1_bound needs N >= 3");
  const double nm1 = static_cast<double>(n - 1);
  const double factor = 2.0 / tau + 1.0 + 2.0 * static_cast<double>(n) * std::log(nm1) / nm1;
  return f_norm_sq * std::exp(-2.0 * alpha * std::log(n_star)) * factor;
}

double corollary2_constant(std::uint64_t n, double tau, double delta, double alpha) {
  if (n < 3) throw std::domain_error("corollary2_constant needs N >= 3");
  const double nn = static_cast<double>(n);
  const double nm1 = nn - 1.0;
  const double log_c = 2.0 * alpha * std::log(nn / nm1) + 2.0 * alpha * std::log(r_window_center(n, delta) + 1.0);
  return std::exp(log_c) * (2.0 / tau + 1.0 + 2.0 * nn * std::log(nm1) / nm1);
}

double corollary2_bound(std::uint64_t n, unsigned repetitions, double tau, double delta, const Problem& problem,
                        double f_norm_sq) {
  const double a = problem.alpha();
  const double m = static_cast<double>(n) * repetitions;
  const double log_rest = -2.0 * a * std::log(m) + 2.0 * a / tau + 2.0 * a * log_p(tau, n, problem);
  return corollary2_constant(n, tau, delta, a) * f_norm_sq * std::exp(log_rest);
}

bool ConditionReport::all_hold() const {
  for (const auto& c : checks)
    if (!c.holds) return false;
  return true;
}

const ConditionCheck& ConditionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + name);
}

ConditionReport check_conditions(std::uint64_t n, unsigned repetitions, double tau, double delta,
                                 const Problem& problem) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double log_ns = log_nstar(tau, n, problem);
  const double n_star = std::exp(log_ns);
  const double denom = 1.0 + tau * log_ns;
  const double ratio = denom > 0.0 ? 4.0 * (1.0 + tau) / denom : inf;
  const double card = denom > 0.0 ? 1.0 + (nn - 1.0) / denom : inf;
  const double half = std::ceil(repetitions / 2.0);

  ConditionReport r;
  r.checks.push_back({"N_star_at_least_one", n_star, 1.0, ">=", n_star >= 1.0});
  r.checks.push_back({"N_star_below_half_N", n_star, nn / 2.0, "<", n_star < nn / 2.0});
  r.checks.push_back({"less_than_one", ratio, 1.0, "<", ratio < 1.0});
  const double lhs_r = ratio < inf ? card * std::pow(ratio, half) : inf;
  r.checks.push_back({"choose_R_first", lhs_r, delta, "<=", lhs_r <= delta});
  const double lhs_c = std::log(nn - 1.0);
  const double rhs_c = log_p(tau, n, problem) + (4.0 / tau + 4.0) * kE;
  r.checks.push_back({"less_than_c", lhs_c, rhs_c, ">=", lhs_c >= rhs_c});
  const double lhs_rc = (repetitions + 1) / 2.0;
  const double rhs_rc = std::log1p((nn - 1.0) / (4.0 * kE)) - std::log(delta);
  r.checks.push_back({"choose_R_c", lhs_rc, rhs_rc, ">=", lhs_rc >= rhs_rc});
  return r;
}

namespace {

double g_sum(const WeightSequence& w, double alpha, std::size_t dim) {
  CompensatedSum s;
  for (std::size_t j = 1; j <= dim; ++j) s += std::pow(w.gamma(j), 1.0 / (2.0 * alpha));
  return 2.0 * s.value();
}

}  // namespace

TractabilityReport tractability_diagnostics(const WeightSequence& weights, double alpha, std::size_t dim, double eta,
                                            std::span<const std::uint64_t> sample_n) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (!(alpha > 0.5)) throw std::invalid_argument("alpha must exceed 1/2");
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  TractabilityReport rep;
  rep.eta = eta;
  rep.g_d = g_sum(weights, alpha, dim);
  rep.tau = eta / rep.g_d;

  // Every supported generator has a closed-form tail: explicit lists and
  // constants repeat a positive value forever, polynomial weights give a
  // p-series with p = beta / (2 alpha).
  const double inf = std::numeric_limits<double>::infinity();
  if (weights.kind() == WeightSequence::Kind::Polynomial) {
    const double p = weights.parameter() / (2.0 * alpha);
    if (p > 1.0) {
      rep.classification = TractabilityCase::Summable;
      rep.g_inf = 2.0 * zeta(p);
    } else {
      rep.classification = std::abs(p - 1.0) <= 1e-12 ? TractabilityCase::Logarithmic : TractabilityCase::Neither;
      rep.g_inf = inf;
    }
  } else {
    rep.classification = TractabilityCase::Neither;
    rep.g_inf = inf;
  }
  // Empirical D with G_d <= D log d on d = 2, 4, ..., 2^20.
  CompensatedSum s;
  std::size_t j = 0;
  for (std::size_t d = 2; d <= (std::size_t{1} << 20U); d *= 2) {
    while (j < d) s += std::pow(weights.gamma(++j), 1.0 / (2.0 * alpha));
    rep.log_d_constant = std::max(rep.log_d_constant, 2.0 * s.value() / std::log(static_cast<double>(d)));
  }

  const Problem problem(SmoothnessParams(alpha, dim), weights.weights(dim));
  rep.worst_log_margin = inf;
  for (auto n : sample_n) {
    if (n < 2) throw std::invalid_argument("sampled N must be >= 2");
    const double lhs = log_p(rep.tau, n, problem);
    const double rhs = rep.g_d + eta * std::log(static_cast<double>(n));
    ++rep.inequality_checks;
    if (lhs > rhs) ++rep.inequality_violations;
    rep.worst_log_margin = std::min(rep.worst_log_margin, rhs - lhs);
  }
  return rep;
}

std::string to_string(TractabilityCase c) {
  switch (c) {
    case TractabilityCase::Summable:
      return "case1_summable";
    case TractabilityCase::Logarithmic:
      return "case2_log_d";
    case TractabilityCase::Neither:
      return "neither";
  }
  return "neither";
}

const char* to_string(RRule r) { return r == RRule::Budget ? "budget" : "window"; }

std::string to_key_value(const SelectedParams& p) {
  std::ostringstream os;
  os << "#M_max=" << p.m_max << '\n'
     << "#delta=" << format_double(p.delta) << '\n'
     << "#N_max=" << p.n_max << '\n'
     << "#R=" << p.R << '\n'
     << "#r_rule=" << to_string(p.r_rule) << '\n'
     << "#tau_star=" << format_double(p.tau_star) << '\n'
     << "#tau0=" << format_double(p.roots.tau0) << '\n'
     << "#tau0_prime=" << format_double(p.roots.tau0_prime) << '\n'
     << "#tau1=" << format_double(p.roots.tau1) << '\n'
     << "#tau2=" << format_double(p.roots.tau2) << '\n'
     << "#window_feasible=" << (p.roots.window_feasible ? 1 : 0) << '\n'
     << "#P_N=" << format_double(p.p_n) << '\n'
     << "#N_star=" << format_double(p.n_star) << '\n'
     << "#feasible=" << (p.feasible ? 1 : 0) << '\n'
     << "#reason=" << p.reason << '\n';
  return os.str();
}

std::string to_key_value(const ConditionReport& r) {
  std::ostringstream os;
  for (const auto& c : r.checks)
    os << "#cond." << c.name << '=' << (c.holds ? 1 : 0) << ' ' << format_double(c.lhs) << ' ' << c.relation << ' '
       << format_double(c.rhs) << '\n';
  return os.str();
}

}  // namespace medlat
