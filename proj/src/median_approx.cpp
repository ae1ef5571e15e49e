#include "medlat/median_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "medlat/numeric.hpp"
#include "medlat/parallel.hpp"
#include "medlat/primes.hpp"

namespace medlat {

namespace {

constexpr std::uint64_t kConcentrationSalt = 0x1e44a2c0ffee0001ULL;
constexpr std::uint64_t kAmplificationSalt = 0x1e44a2c0ffee0003ULL;

double middle(std::vector<double>& v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double log_nstar(double tau, const SmoothnessParams& params, const ProductWeights& weights, std::uint64_t n) {
  if (!(tau > 0.0)) throw std::domain_error("tau must be positive");
  if (n < 2) throw std::domain_error("N must be >= 2");
  const double log_n = std::log(static_cast<double>(n));
  return std::log(static_cast<double>(n - 1)) - 1.0 / tau - log_p_factor(tau, log_n, params, weights);
}

}  // namespace

std::complex<double> complex_median(std::span<const std::complex<double>> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  if (values.size() % 2 == 0) throw std::invalid_argument("median needs an odd number of values");
  std::vector<double> re(values.size());
  std::vector<double> im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return {middle(re), middle(im)};
}

double compute_PN(double tau, const SmoothnessParams& params, const ProductWeights& weights, std::uint64_t n) {
  if (!(tau > 0.0)) throw std::domain_error("tau must be positive");
  if (n < 2) throw std::domain_error("N must be >= 2");
  return std::exp(log_p_factor(tau, std::log(static_cast<double>(n)), params, weights));
}

double compute_Nstar(double tau, const SmoothnessParams& params, const ProductWeights& weights, std::uint64_t n) {
  return std::exp(log_nstar(tau, params, weights, n));
}

AlgorithmParams AlgorithmParams::make(std::uint64_t n, unsigned repetitions, double tau, const Problem& problem,
                                      std::uint64_t master_seed) {
  if (!is_prime(n)) throw std::invalid_argument("N = " + std::to_string(n) + " is not prime");
  if (repetitions == 0 || repetitions % 2 == 0) throw std::invalid_argument("R must be a positive odd integer");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  AlgorithmParams p;
  p.n = n;
  p.repetitions = repetitions;
  p.tau = tau;
  p.p_n = compute_PN(tau, problem.smoothness, problem.weights, n);
  p.n_star = compute_Nstar(tau, problem.smoothness, problem.weights, n);
  p.master_seed = master_seed;
  return p;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t r) { return hash_combine(master_seed, r); }

std::pair<GeneratingVector, RandomShift> draw_repetition(const LatticeConfig& config, std::uint64_t master_seed,
                                                         std::uint64_t r) {
  const std::uint64_t seed = repetition_seed(master_seed, r);
  RandomStream zs(seed, 0, StreamTag::GeneratingVector);
  RandomStream ds(seed, 0, StreamTag::Shift);
  auto z = draw_generating_vector(config, zs);
  auto delta = draw_shift(config, ds);
  return {std::move(z), std::move(delta)};
}

MedianApproximation::MedianApproximation(HyperbolicCross index_set, std::vector<std::complex<double>> coefficients,
                                         AlgorithmParams params, std::vector<std::uint64_t> repetition_seeds,
                                         std::uint64_t eval_count)
    : index_set_(std::move(index_set)),
      coefficients_(std::move(coefficients)),
      params_(params),
      repetition_seeds_(std::move(repetition_seeds)),
      eval_count_(eval_count) {
  if (coefficients_.size() != index_set_.size())
    throw std::invalid_argument("one coefficient per index is required");
}

std::optional<std::complex<double>> MedianApproximation::coefficient(const FrequencyIndex& h) const {
  const auto pos = index_set_.position(h);
  if (!pos) return std::nullopt;
  return coefficients_[*pos];
}

EvaluationResult MedianApproximation::evaluate(std::span<const double> x) const {
  if (x.size() != index_set_.params().dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  CompensatedSum re;
  CompensatedSum im;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    const auto& h = index_set_[i];
    double t = 0.0;
    for (std::size_t j = 0; j < h.dim(); ++j)
      if (h[j] != 0) t += std::fmod(static_cast<double>(h[j]) * x[j], 1.0);
    const double angle = 2.0 * std::numbers::pi * std::fmod(t, 1.0);
    const std::complex<double> term = coefficients_[i] * std::complex<double>(std::cos(angle), std::sin(angle));
    re += term.real();
    im += term.imag();
  }
  return {re.value(), im.value()};
}

void MedianApproximation::write(std::ostream& os) const {
  const auto& sp = index_set_.params();
  os << "#N=" << params_.n << '\n'
     << "#R=" << params_.repetitions << '\n'
     << "#tau=" << format_double(params_.tau) << '\n'
     << "#N_star=" << format_double(params_.n_star) << '\n'
     << "#seed=" << params_.master_seed << '\n'
     << "#d=" << sp.dim() << '\n'
     << "#alpha=" << format_double(sp.alpha()) << '\n'
     << "#gamma=";
  const auto gammas = index_set_.weights().values();
  for (std::size_t j = 0; j < sp.dim(); ++j) os << (j ? "," : "") << format_double(gammas[j]);
  os << '\n';
  for (std::size_t j = 0; j < sp.dim(); ++j) os << "h_" << (j + 1) << ',';
  os << "re,im\n";
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    for (std::size_t j = 0; j < sp.dim(); ++j) os << index_set_[i][j] << ',';
    os << format_double(coefficients_[i].real()) << ',' << format_double(coefficients_[i].imag()) << '\n';
  }
}

MedianApproximation run(const RealFunction& f, const AlgorithmParams& params, const Problem& problem,
                        const RunOptions& options) {
  if (!(params.n_star >= 1.0))
    throw std::domain_error("N_* = " + format_double(params.n_star) +
                            " < 1: budget too small for these weights and tau");
  if (params.repetitions % 2 == 0) throw std::invalid_argument("R must be odd");
  EnumerationOptions eo;
  eo.max_cardinality = options.max_cardinality;
  HyperbolicCross index_set = enumerate(params.n_star, problem.smoothness, problem.weights, eo);

  const LatticeConfig config(params.n, problem.dim());
  const RootsOfUnity roots(params.n);
  const std::size_t reps = params.repetitions;
  std::vector<std::vector<std::complex<double>>> estimates(reps);
  std::vector<std::uint64_t> calls(reps, 0);
  std::vector<std::uint64_t> seeds(reps);

  parallel_for(reps, options.workers, [&](std::size_t r) {
    seeds[r] = repetition_seed(params.master_seed, r);
    const auto [z, delta] = draw_repetition(config, params.master_seed, r);
    std::uint64_t count = 0;
    const RealFunction counted = [&](std::span<const double> x) {
      ++count;
      return f(x);
    };
    const auto samples = sample_nodes(counted, config, z, delta);
    estimates[r] = estimate_from_samples(std::span<const double>(samples), roots, z, delta, index_set.indices());
    calls[r] = count;
  });

  std::vector<std::complex<double>> coefficients(index_set.size());
  std::vector<std::complex<double>> column(reps);
  for (std::size_t i = 0; i < index_set.size(); ++i) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = estimates[r][i];
    coefficients[i] = complex_median(column);
  }
  std::uint64_t total = 0;
  for (auto c : calls) total += c;
  return MedianApproximation(std::move(index_set), std::move(coefficients), params, std::move(seeds), total);
}

namespace {

double tail_sum(const FrequencyIndex& h, const SpectralOracle& f, std::uint64_t n, std::int64_t radius) {
  const std::size_t d = h.dim();
  if (radius <= 0) return 0.0;
  std::vector<std::int64_t> m(d, -radius);
  const auto step = static_cast<std::int64_t>(n);
  CompensatedSum s;
  for (;;) {
    bool zero = true;
    FrequencyIndex shifted = h;
    for (std::size_t j = 0; j < d; ++j) {
      shifted[j] += m[j] * step;
      zero = zero && m[j] == 0;
    }
    if (!zero) s += std::norm(f.coefficient(shifted));
    std::size_t j = 0;
    while (j < d && m[j] == radius) m[j++] = -radius;
    if (j == d) break;
    ++m[j];
  }
  return s.value();
}

}  // namespace

EpsilonBound epsilon_bound(const FrequencyIndex& h, const SpectralOracle& f, const AlgorithmParams& params,
                           const Problem& problem, std::int64_t tail_radius, double korobov_norm_sq) {
  if (h.dim() != problem.dim() || f.dim() != problem.dim())
    throw std::invalid_argument("epsilon_bound: dimension mismatch");
  const double log_ns = std::log(params.n_star);
  const double factor = 1.0 / params.tau + log_ns;
  const double trunc =
      korobov_norm_sq * std::exp(-2.0 * problem.alpha() * log_ns) / static_cast<double>(params.n - 1);

  EpsilonBound out;
  out.korobov_norm_sq = korobov_norm_sq;
  out.tail = tail_sum(h, f, params.n, tail_radius);
  out.epsilon_sq = factor * (trunc + out.tail);
  if (tail_radius >= 2) {
    const double coarse = factor * (trunc + tail_sum(h, f, params.n, tail_radius / 2));
    out.tail_change = out.epsilon_sq > 0.0 ? (out.epsilon_sq - coarse) / out.epsilon_sq : 0.0;
    if (out.tail_change >= 1e-4)
      out.warning = "epsilon tail at h=" + to_string(h) + " changed by " + format_double(out.tail_change) +
                    " between radius " + std::to_string(tail_radius / 2) + " and " + std::to_string(tail_radius);
  }
  return out;
}

EpsilonBound epsilon_bound(const FrequencyIndex& h, const SpectralOracle& f, const AlgorithmParams& params,
                           const Problem& problem, std::int64_t tail_radius) {
  const double norm = f.korobov_norm_sq(problem.smoothness, problem.weights, kKorobovNormRadius);
  return epsilon_bound(h, f, params, problem, tail_radius, norm);
}

double VerificationReport::allowance(std::size_t trials) const {
  const double p = std::clamp(bound, 0.0, 1.0);
  return bound + 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

struct Thresholds {
  std::vector<double> eps_sq;
  std::vector<std::complex<double>> truth;
  std::vector<std::string> warnings;
};

Thresholds thresholds(const SpectralOracle& f, const AlgorithmParams& params, const Problem& problem,
                      std::span<const FrequencyIndex> targets, std::int64_t tail_radius) {
  const double norm = f.korobov_norm_sq(problem.smoothness, problem.weights, kKorobovNormRadius);
  Thresholds t;
  for (const auto& h : targets) {
    const auto e = epsilon_bound(h, f, params, problem, tail_radius, norm);
    t.eps_sq.push_back(e.epsilon_sq);
    t.truth.push_back(f.coefficient(h));
    if (!e.warning.empty()) t.warnings.push_back(e.warning);
  }
  return t;
}

VerificationReport exceedance(const SpectralOracle& f, const AlgorithmParams& params, const Problem& problem,
                              std::span<const FrequencyIndex> targets, const VerificationOptions& options,
                              unsigned repetitions, double threshold_scale, double bound, std::uint64_t salt) {
  if (!(params.n_star >= 1.0)) throw std::domain_error("verification needs N_* >= 1");
  if (options.trials == 0) throw std::invalid_argument("verification needs at least one trial");
  VerificationReport report;
  report.bound = bound;
  report.applicable = std::isfinite(bound) && bound >= 0.0 && bound < 1.0;
  if (!report.applicable)
    report.notice = "probability bound " + format_double(bound) + " is not below 1; check is vacuous";

  const auto th = thresholds(f, params, problem, targets, options.tail_radius);
  report.warnings = th.warnings;
  const LatticeConfig config(params.n, problem.dim());
  const RootsOfUnity roots(params.n);
  const RealFunction fn = [&f](std::span<const double> x) { return f.evaluate(x); };
  const std::uint64_t base = hash_combine(options.seed, salt);

  std::vector<std::vector<char>> hit(options.trials, std::vector<char>(targets.size(), 0));
  parallel_for(options.trials, options.workers, [&](std::size_t t) {
    const std::uint64_t trial_seed = hash_combine(base, t);
    std::vector<std::vector<std::complex<double>>> est(repetitions);
    for (unsigned r = 0; r < repetitions; ++r) {
      const auto [z, delta] = draw_repetition(config, trial_seed, r);
      const auto samples = sample_nodes(fn, config, z, delta);
      est[r] = estimate_from_samples(std::span<const double>(samples), roots, z, delta, targets);
    }
    std::vector<std::complex<double>> column(repetitions);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (unsigned r = 0; r < repetitions; ++r) column[r] = est[r][i];
      const auto c = complex_median(column);
      hit[t][i] = std::norm(c - th.truth[i]) > threshold_scale * th.eps_sq[i] ? 1 : 0;
    }
  });

  for (std::size_t i = 0; i < targets.size(); ++i) {
    ExceedanceRow row;
    row.h = targets[i];
    row.threshold = threshold_scale * th.eps_sq[i];
    row.trials = options.trials;
    for (std::size_t t = 0; t < options.trials; ++t) row.exceed += static_cast<std::size_t>(hit[t][i]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

double concentration_ratio(const AlgorithmParams& params) {
  const double denom = 1.0 + params.tau * std::log(params.n_star);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return (1.0 + params.tau) / denom;
}

}  // namespace

VerificationReport verify_concentration(const SpectralOracle& f, const AlgorithmParams& params, const Problem& problem,
                                        std::span<const FrequencyIndex> targets,
                                        const VerificationOptions& options) {
  return exceedance(f, params, problem, targets, options, 1, 1.0, concentration_ratio(params), kConcentrationSalt);
}

VerificationReport verify_median_amplification(const SpectralOracle& f, const AlgorithmParams& params,
                                               const Problem& problem, std::span<const FrequencyIndex> targets,
                                               const VerificationOptions& options) {
  if (params.repetitions % 2 == 0) throw std::invalid_argument("R must be odd");
  const double bound = std::pow(4.0 * concentration_ratio(params), static_cast<double>((params.repetitions + 1) / 2));
  return exceedance(f, params, problem, targets, options, params.repetitions, 2.0, bound, kAmplificationSalt);
}

}  // namespace medlat
