#pragma once

// Randomly shifted rank-1 lattices and the lattice estimator of Fourier
// coefficients.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "medlat/index_set.hpp"
#include "medlat/korobov.hpp"
#include "medlat/random.hpp"

namespace medlat {

using RealFunction = std::function<double(std::span<const double>)>;
using ComplexFunction = std::function<std::complex<double>(std::span<const double>)>;

class LatticeConfig {
 public:
  /// Throws std::invalid_argument unless n is prime and dim >= 1.
  LatticeConfig(std::uint64_t n, std::size_t dim);
  std::uint64_t n() const { return n_; }
  std::size_t dim() const { return dim_; }

 private:
  std::uint64_t n_;
  std::size_t dim_;
};

struct GeneratingVector {
  std::vector<std::uint64_t> z;
};

struct RandomShift {
  std::vector<double> delta;
};

GeneratingVector draw_generating_vector(const LatticeConfig& config, RandomStream& stream);
RandomShift draw_shift(const LatticeConfig& config, RandomStream& stream);

/// h . z mod N in [0, N), exact for any 64-bit components.
std::uint64_t dot_mod(const FrequencyIndex& h, const GeneratingVector& z, std::uint64_t n);

/// True iff z . l = 0 (mod N).
bool dual_membership(const FrequencyIndex& l, const LatticeConfig& config, const GeneratingVector& z);

/// Node k of the shifted lattice, {k z / N + delta}, written into `out`.
void lattice_point(std::uint64_t k, const LatticeConfig& config, const GeneratingVector& z, const RandomShift& shift,
                   std::span<double> out);

/// Table of exp(-2 pi i k / N), k = 0..N-1.
class RootsOfUnity {
 public:
  explicit RootsOfUnity(std::uint64_t n);
  std::uint64_t n() const { return static_cast<std::uint64_t>(table_.size()); }
  std::complex<double> operator[](std::uint64_t k) const { return table_[k]; }

 private:
  std::vector<std::complex<double>> table_;
};

/// f at the N nodes, in node order.  Calls f exactly N times.
std::vector<double> sample_nodes(const RealFunction& f, const LatticeConfig& config, const GeneratingVector& z,
                                 const RandomShift& shift);
std::vector<std::complex<double>> sample_nodes(const ComplexFunction& f, const LatticeConfig& config,
                                               const GeneratingVector& z, const RandomShift& shift);

/// (1/N) sum_k f(x_k) exp(-2 pi i h . x_k) for every target, from cached node values.
/// The result is aligned with `targets`.
std::vector<std::complex<double>> estimate_from_samples(std::span<const double> samples, const RootsOfUnity& roots,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets);
std::vector<std::complex<double>> estimate_from_samples(std::span<const std::complex<double>> samples,
                                                        const RootsOfUnity& roots, const GeneratingVector& z,
                                                        const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets);

/// Convenience wrappers that sample f once and estimate all targets.
std::vector<std::complex<double>> estimate_coefficients(const RealFunction& f, const LatticeConfig& config,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets);
std::vector<std::complex<double>> estimate_coefficients(const ComplexFunction& f, const LatticeConfig& config,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets);

}  // namespace medlat
