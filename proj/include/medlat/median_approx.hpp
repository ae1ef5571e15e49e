#pragma once

// The median lattice algorithm: R independent shifted-lattice estimates per
// frequency in A_d(N_*), combined by a componentwise complex median.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"
#include "medlat/lattice.hpp"

namespace medlat {

/// Median of the real parts plus i times the median of the imaginary parts.
/// Throws std::invalid_argument for empty or even-length input.
std::complex<double> complex_median(std::span<const std::complex<double>> values);

/// P_N = prod_j (1 + 2 g_j^{1/(2 alpha)} (1 + tau log N)).
double compute_PN(double tau, const SmoothnessParams& params, const ProductWeights& weights, std::uint64_t n);
/// N_* = (N - 1) / (exp(1/tau) P_N), evaluated in log space.
double compute_Nstar(double tau, const SmoothnessParams& params, const ProductWeights& weights, std::uint64_t n);

struct AlgorithmParams {
  std::uint64_t n = 0;
  unsigned repetitions = 1;  // R, odd
  double tau = 1.0;
  double p_n = 0.0;
  double n_star = 0.0;
  std::uint64_t master_seed = 0;

  /// Validates N prime, R odd and tau > 0, then fills P_N and N_*.
  static AlgorithmParams make(std::uint64_t n, unsigned repetitions, double tau, const Problem& problem,
                              std::uint64_t master_seed);
};

/// Seed recorded for repetition r; all streams of that repetition derive from it.
std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t r);

/// Draws the lattice of repetition r.
std::pair<GeneratingVector, RandomShift> draw_repetition(const LatticeConfig& config, std::uint64_t master_seed,
                                                         std::uint64_t r);

struct EvaluationResult {
  double value;
  double imag;  // should vanish for real inputs
};

class MedianApproximation {
 public:
  MedianApproximation(HyperbolicCross index_set, std::vector<std::complex<double>> coefficients,
                      AlgorithmParams params, std::vector<std::uint64_t> repetition_seeds, std::uint64_t eval_count);

  const HyperbolicCross& index_set() const { return index_set_; }
  std::span<const std::complex<double>> coefficients() const { return coefficients_; }
  std::optional<std::complex<double>> coefficient(const FrequencyIndex& h) const;
  const AlgorithmParams& params() const { return params_; }
  const std::vector<std::uint64_t>& repetition_seeds() const { return repetition_seeds_; }
  std::uint64_t eval_count() const { return eval_count_; }

  EvaluationResult evaluate(std::span<const double> x) const;

  /// Header lines "#key=value" then one row per index: h_1..h_d, re, im.
  void write(std::ostream& os) const;

 private:
  HyperbolicCross index_set_;
  std::vector<std::complex<double>> coefficients_;
  AlgorithmParams params_;
  std::vector<std::uint64_t> repetition_seeds_;
  std::uint64_t eval_count_;
};

struct RunOptions {
  unsigned workers = 1;
  double max_cardinality = 1e8;
};

/// Runs the algorithm.  f must be safe to call concurrently when workers > 1.
/// Throws std::domain_error when N_* < 1.
MedianApproximation run(const RealFunction& f, const AlgorithmParams& params, const Problem& problem,
                        const RunOptions& options = {});

/// Korobov norm truncation radius used by the verification bounds.
inline constexpr std::int64_t kKorobovNormRadius = 4096;

struct EpsilonBound {
  double epsilon_sq = 0.0;
  double tail = 0.0;
  double korobov_norm_sq = 0.0;
  /// Relative change of epsilon^2 against half the tail radius.
  double tail_change = 0.0;
  std::string warning;
};

/// epsilon(h)^2 = (1/tau + log N_*)(|f|^2 / (N_*^{2 alpha} (N - 1)) + sum over l in N Z^d \ 0,
/// |l/N|_inf <= tail_radius, of |f^(l + h)|^2).
EpsilonBound epsilon_bound(const FrequencyIndex& h, const SpectralOracle& f, const AlgorithmParams& params,
                           const Problem& problem, std::int64_t tail_radius = 8);
/// Same with a precomputed Korobov norm.
EpsilonBound epsilon_bound(const FrequencyIndex& h, const SpectralOracle& f, const AlgorithmParams& params,
                           const Problem& problem, std::int64_t tail_radius, double korobov_norm_sq);

struct ExceedanceRow {
  FrequencyIndex h;
  double threshold = 0.0;  // epsilon^2 or 2 epsilon^2
  std::size_t exceed = 0;
  std::size_t trials = 0;
  double rate() const { return trials ? static_cast<double>(exceed) / static_cast<double>(trials) : 0.0; }
};

struct VerificationReport {
  double bound = 0.0;  // probability bound
  bool applicable = true;
  std::string notice;
  std::vector<ExceedanceRow> rows;
  std::vector<std::string> warnings;

  /// bound + 3 sqrt(p (1 - p) / trials) with p = bound.
  double allowance(std::size_t trials) const;
};

struct VerificationOptions {
  std::size_t trials = 2000;
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::int64_t tail_radius = 8;
};

/// Single-lattice exceedance of epsilon(h)^2 for each target.
/// Bound (1 + tau) / (1 + tau log N_*).
VerificationReport verify_concentration(const SpectralOracle& f, const AlgorithmParams& params, const Problem& problem,
                                        std::span<const FrequencyIndex> targets,
                                        const VerificationOptions& options = {});

/// Exceedance of 2 epsilon(h)^2 by the median over params.repetitions lattices.
/// Bound (4 (1 + tau) / (1 + tau log N_*))^{ceil(R/2)}.
VerificationReport verify_median_amplification(const SpectralOracle& f, const AlgorithmParams& params,
                                               const Problem& problem, std::span<const FrequencyIndex> targets,
                                               const VerificationOptions& options = {});

}  // namespace medlat
