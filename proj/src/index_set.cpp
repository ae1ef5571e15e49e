#include "medlat/index_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "medlat/numeric.hpp"
#include "medlat/primes.hpp"

namespace medlat {

namespace {

constexpr double kTieTolerance = 1e-12;

double membership_threshold(double radius) {
  const double log_l = std::log(radius);
  return log_l + kTieTolerance * std::max(1.0, std::abs(log_l));
}

// log(g_j) / (2 alpha) for each coordinate.
std::vector<double> log_roots(const SmoothnessParams& params, const ProductWeights& weights) {
  if (weights.size() < params.dim()) throw std::invalid_argument("weights do not cover dimension");
  std::vector<double> out(params.dim());
  for (std::size_t j = 0; j < params.dim(); ++j) out[j] = std::log(weights[j]) / (2.0 * params.alpha());
  return out;
}

class Enumerator {
 public:
  Enumerator(double threshold, std::vector<double> log_root)
      : threshold_(threshold), log_root_(std::move(log_root)), current_(log_root_.size(), 0) {}

  std::vector<FrequencyIndex> run() {
    recurse(0, 0.0);
    return std::move(out_);
  }

 private:
  double cost(std::size_t j, std::int64_t k) const { return std::log(static_cast<double>(k)) - log_root_[j]; }

  // Largest k >= 0 with spent + cost(j, k) <= threshold (k = 0 always admissible).
  std::int64_t max_component(std::size_t j, double spent) const {
    const double slack = threshold_ - spent + log_root_[j];
    if (slack < 0.0) return 0;
    auto k = static_cast<std::int64_t>(std::floor(std::exp(slack)));
    while (k >= 1 && spent + cost(j, k) > threshold_) --k;
    while (spent + cost(j, k + 1) <= threshold_) ++k;
    return k;
  }

  void recurse(std::size_t j, double spent) {
    if (j == current_.size()) {
      out_.emplace_back(current_);
      return;
    }
    const std::int64_t k_max = max_component(j, spent);
    for (std::int64_t v = -k_max; v <= k_max; ++v) {
      current_[j] = v;
      recurse(j + 1, v == 0 ? spent : spent + cost(j, v < 0 ? -v : v));
    }
    current_[j] = 0;
  }

  double threshold_;
  std::vector<double> log_root_;
  std::vector<std::int64_t> current_;
  std::vector<FrequencyIndex> out_;
};

}  // namespace

HyperbolicCross::HyperbolicCross(double radius, SmoothnessParams params, ProductWeights weights,
                                 std::vector<FrequencyIndex> sorted_indices)
    : radius_(radius), params_(params), weights_(std::move(weights)), indices_(std::move(sorted_indices)) {
  lookup_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i].dim() != params_.dim()) throw std::invalid_argument("index dimension mismatch");
    if (i > 0 && !(indices_[i - 1] < indices_[i])) throw std::invalid_argument("indices must be strictly sorted");
    lookup_.emplace(indices_[i], i);
  }
}

std::optional<std::size_t> HyperbolicCross::position(const FrequencyIndex& h) const {
  auto it = lookup_.find(h);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void HyperbolicCross::write_csv(std::ostream& os) const {
  for (std::size_t j = 0; j < params_.dim(); ++j) os << (j ? "," : "") << "h_" << (j + 1);
  os << '\n';
  for (const auto& h : indices_) {
    for (std::size_t j = 0; j < h.dim(); ++j) os << (j ? "," : "") << h[j];
    os << '\n';
  }
}

bool in_hyperbolic_cross(const FrequencyIndex& h, double radius, const SmoothnessParams& params,
                         const ProductWeights& weights) {
  if (h.dim() != params.dim()) throw std::invalid_argument("index dimension mismatch");
  if (!(radius >= 1.0)) return false;
  const auto lr = log_roots(params, weights);
  const double threshold = membership_threshold(radius);
  double spent = 0.0;
  for (std::size_t j = 0; j < h.dim(); ++j) {
    if (h[j] == 0) continue;
    spent += std::log(std::abs(static_cast<double>(h[j]))) - lr[j];
  }
  return spent <= threshold;
}

HyperbolicCross enumerate(double radius, const SmoothnessParams& params, const ProductWeights& weights,
                          const EnumerationOptions& options) {
  if (!(radius >= 0.0)) throw std::invalid_argument("enumerate: radius must be non-negative");
  if (weights.size() < params.dim()) throw std::invalid_argument("enumerate: weights do not cover dimension");
  if (radius < 1.0) return HyperbolicCross(radius, params, weights, {});

  double projected = std::numeric_limits<double>::infinity();
  for (double tau : {0.25, 0.5, 1.0, 2.0, 4.0})
    projected = std::min(projected, bound_basic(radius, tau, params, weights));
  if (projected > options.max_cardinality)
    throw std::length_error("hyperbolic cross cardinality bound " + std::to_string(projected) +
                            " exceeds the configured cap");

  Enumerator e(membership_threshold(radius), log_roots(params, weights));
  return HyperbolicCross(radius, params, weights, e.run());
}

double log_p_factor(double tau, double log_arg, const SmoothnessParams& params, const ProductWeights& weights) {
  const auto roots = weights.root(params.alpha(), params.dim());
  CompensatedSum s;
  for (double g : roots) s += std::log1p(2.0 * g * (1.0 + tau * log_arg));
  return s.value();
}

PartialZetaSum partial_zeta(double radius, double q) {
  if (!(q >= 1.0)) throw std::domain_error("partial zeta needs q >= 1");
  if (!(radius >= 1.0)) throw std::domain_error("partial zeta needs L >= 1");
  const auto top = static_cast<std::int64_t>(std::floor(radius));
  CompensatedSum value;
  CompensatedSum deriv;
  for (std::int64_t n = top; n >= 1; --n) {
    const double ln = std::log(static_cast<double>(n));
    const double term = std::exp(-q * ln);
    value += term;
    deriv += -ln * term;
  }
  return {radius, q, value.value(), deriv.value()};
}

double bound_basic(double radius, double tau, const SmoothnessParams& params, const ProductWeights& weights) {
  if (!(radius >= 1.0)) throw std::domain_error("bound_basic needs L >= 1");
  if (!(tau > 0.0)) throw std::domain_error("bound_basic needs tau > 0");
  const double log_l = std::log(radius);
  const double log_term = log_l + 1.0 / tau - std::log1p(tau * log_l) + log_p_factor(tau, log_l, params, weights);
  return 1.0 + std::exp(log_term);
}

namespace {

// log of L^q / S prod_j (1 + 2 g_j^{q/(2 alpha)} S) for a zeta-like value S.
double log_cardinality_term(double log_l, double q, double s, std::span<const double> log_root) {
  double out = q * log_l - std::log(s);
  for (double lr : log_root) out += std::log1p(2.0 * std::exp(q * lr) * s);
  return out;
}

}  // namespace

double bound_min_q(double radius, const SmoothnessParams& params, const ProductWeights& weights,
                   std::span<const double> q_grid) {
  if (!(radius >= 1.0)) throw std::domain_error("bound_min_q needs L >= 1");
  if (q_grid.empty()) throw std::invalid_argument("bound_min_q needs a non-empty q grid");
  const auto lr = log_roots(params, weights);
  const double log_l = std::log(radius);
  double best = std::numeric_limits<double>::infinity();
  for (double q : q_grid) {
    if (!(q > 1.0)) throw std::domain_error("bound_min_q: every q must exceed 1");
    best = std::min(best, log_cardinality_term(log_l, q, zeta(q), lr));
  }
  return 1.0 + std::exp(best);
}

RefinedBound bound_refined_detail(double radius, const SmoothnessParams& params, const ProductWeights& weights) {
  if (!(radius >= 1.0)) throw std::domain_error("bound_refined needs L >= 1");
  const auto lr = log_roots(params, weights);
  const double log_l = std::log(radius);
  const double two_alpha = 2.0 * params.alpha();

  auto weight_sum = [&](double q, double h) {
    double s = 0.0;
    for (double l : lr) {
      const double t = 2.0 * std::exp(q * l) * h;
      s += t / (1.0 + t);
    }
    return s;
  };
  // Left side of the stationarity condition; it equals log L at the minimiser.
  auto stationarity = [&](double q) {
    const auto hz = partial_zeta(radius, q);
    double ws = 0.0;
    double wlog = 0.0;
    for (double l : lr) {
      const double t = 2.0 * std::exp(q * l) * hz.value;
      const double w = t / (1.0 + t);
      ws += w;
      wlog += w * l * two_alpha;  // w_j log g_j
    }
    return -(hz.derivative / hz.value) * (ws - 1.0) - wlog / two_alpha;
  };
  auto log_objective = [&](double q) { return log_cardinality_term(log_l, q, partial_zeta(radius, q).value, lr); };

  constexpr double kQCap = 1024.0;
  BisectionOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 0.0;
  opt.max_iter = 200;

  // q_bar: where the weight sum crosses 1.  Degenerates to 1 if it starts below.
  double q_bar = 1.0;
  if (weight_sum(1.0, partial_zeta(radius, 1.0).value) > 1.0) {
    double hi = 2.0;
    while (hi < kQCap && weight_sum(hi, partial_zeta(radius, hi).value) >= 1.0) hi *= 2.0;
    if (weight_sum(hi, partial_zeta(radius, hi).value) >= 1.0) {
      q_bar = kQCap;
    } else {
      q_bar = bisect_increasing([&](double q) { return 1.0 - weight_sum(q, partial_zeta(radius, q).value); },
                                1.0, hi, opt);
    }
  }

  double q_star = 1.0;
  double log_value = 0.0;
  const double g_lo = stationarity(1.0) - log_l;
  if (g_lo <= 0.0) {
    q_star = 1.0;
    log_value = log_objective(1.0);
  } else if (stationarity(q_bar) - log_l > 0.0) {
    const double at_lo = log_objective(1.0);
    const double at_hi = log_objective(q_bar);
    q_star = at_lo <= at_hi ? 1.0 : q_bar;
    log_value = std::min(at_lo, at_hi);
  } else {
    q_star = bisect_increasing([&](double q) { return log_l - stationarity(q); }, 1.0, q_bar, opt);
    log_value = log_objective(q_star);
  }
  return {1.0 + std::exp(log_value), q_star, q_bar};
}

double bound_refined(double radius, const SmoothnessParams& params, const ProductWeights& weights) {
  return bound_refined_detail(radius, params, weights).value;
}

double corollary_cap(std::uint64_t n, double tau, double n_star) {
  if (!is_prime(n)) throw std::invalid_argument("corollary_cap: N must be prime");
  if (!(n_star >= 1.0)) throw std::domain_error("corollary_cap needs N_* >= 1");
  if (!(tau > 0.0)) throw std::domain_error("corollary_cap needs tau > 0");
  return 1.0 + static_cast<double>(n - 1) / (1.0 + tau * std::log(n_star));
}

}  // namespace medlat
