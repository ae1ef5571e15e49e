#include "medlat/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "medlat/primes.hpp"

namespace medlat {

LatticeConfig::LatticeConfig(std::uint64_t n, std::size_t dim) : n_(n), dim_(dim) {
  if (!is_prime(n)) throw std::invalid_argument("lattice size " + std::to_string(n) + " is not prime");
  if (dim == 0) throw std::invalid_argument("lattice dimension must be >= 1");
}

GeneratingVector draw_generating_vector(const LatticeConfig& config, RandomStream& stream) {
  GeneratingVector g;
  g.z.resize(config.dim());
  for (auto& zj : g.z) zj = stream.uniform_int(1, config.n() - 1);
  return g;
}

RandomShift draw_shift(const LatticeConfig& config, RandomStream& stream) {
  RandomShift s;
  s.delta.resize(config.dim());
  for (auto& d : s.delta) d = stream.uniform01();
  return s;
}

std::uint64_t dot_mod(const FrequencyIndex& h, const GeneratingVector& z, std::uint64_t n) {
  if (h.dim() != z.z.size()) throw std::invalid_argument("dot_mod: dimension mismatch");
  std::uint64_t acc = 0;
  for (std::size_t j = 0; j < h.dim(); ++j) {
    const std::int64_t hj = h[j];
    const std::uint64_t mag = hj < 0 ? 0 - static_cast<std::uint64_t>(hj) : static_cast<std::uint64_t>(hj);
    std::uint64_t term = mul_mod(mag % n, z.z[j] % n, n);
    if (hj < 0 && term != 0) term = n - term;
    acc += term;
    if (acc >= n) acc -= n;
  }
  return acc;
}

bool dual_membership(const FrequencyIndex& l, const LatticeConfig& config, const GeneratingVector& z) {
  return dot_mod(l, z, config.n()) == 0;
}

void lattice_point(std::uint64_t k, const LatticeConfig& config, const GeneratingVector& z, const RandomShift& shift,
                   std::span<double> out) {
  const auto n = static_cast<double>(config.n());
  for (std::size_t j = 0; j < config.dim(); ++j) {
    double x = static_cast<double>(mul_mod(k, z.z[j], config.n())) / n + shift.delta[j];
    if (x >= 1.0) x -= 1.0;
    out[j] = x;
  }
}

RootsOfUnity::RootsOfUnity(std::uint64_t n) : table_(n) {
  if (n == 0) throw std::invalid_argument("roots of unity need n >= 1");
  // Evaluated directly; symmetric argument keeps |angle| <= pi.
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto signed_k = k <= n / 2 ? static_cast<double>(k) : -static_cast<double>(n - k);
    const double angle = -step * signed_k;
    table_[k] = {std::cos(angle), std::sin(angle)};
  }
}

namespace {

// exp(-2 pi i h . delta), with the argument reduced mod 1 term by term.
std::complex<double> shift_phase(const FrequencyIndex& h, const RandomShift& shift) {
  double t = 0.0;
  for (std::size_t j = 0; j < h.dim(); ++j) {
    if (h[j] == 0) continue;
    t += std::fmod(static_cast<double>(h[j]) * shift.delta[j], 1.0);
  }
  t = std::fmod(t, 1.0);
  const double angle = -2.0 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

template <typename T>
std::vector<T> sample_impl(const std::function<T(std::span<const double>)>& f, const LatticeConfig& config,
                           const GeneratingVector& z, const RandomShift& shift) {
  if (z.z.size() != config.dim() || shift.delta.size() != config.dim())
    throw std::invalid_argument("sample_nodes: dimension mismatch");
  std::vector<T> values(config.n());
  std::vector<double> x(config.dim());
  for (std::uint64_t k = 0; k < config.n(); ++k) {
    lattice_point(k, config, z, shift, x);
    values[k] = f(x);
  }
  return values;
}

template <typename T>
std::vector<std::complex<double>> estimate_impl(std::span<const T> samples, const RootsOfUnity& roots,
                                                const GeneratingVector& z, const RandomShift& shift,
                                                std::span<const FrequencyIndex> targets) {
  const std::uint64_t n = roots.n();
  if (samples.size() != n) throw std::invalid_argument("estimate: sample count differs from N");
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<std::complex<double>> out;
  out.reserve(targets.size());
  for (const auto& h : targets) {
    const std::uint64_t m = dot_mod(h, z, n);
    std::complex<double> acc = 0.0;
    std::uint64_t idx = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      acc += samples[k] * roots[idx];
      idx += m;
      if (idx >= n) idx -= n;
    }
    out.push_back(acc * inv_n * shift_phase(h, shift));
  }
  return out;
}

}  // namespace

std::vector<double> sample_nodes(const RealFunction& f, const LatticeConfig& config, const GeneratingVector& z,
                                 const RandomShift& shift) {
  return sample_impl<double>(f, config, z, shift);
}

std::vector<std::complex<double>> sample_nodes(const ComplexFunction& f, const LatticeConfig& config,
                                               const GeneratingVector& z, const RandomShift& shift) {
  return sample_impl<std::complex<double>>(f, config, z, shift);
}

std::vector<std::complex<double>> estimate_from_samples(std::span<const double> samples, const RootsOfUnity& roots,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets) {
  return estimate_impl(samples, roots, z, shift, targets);
}

std::vector<std::complex<double>> estimate_from_samples(std::span<const std::complex<double>> samples,
                                                        const RootsOfUnity& roots, const GeneratingVector& z,
                                                        const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets) {
  return estimate_impl(samples, roots, z, shift, targets);
}

std::vector<std::complex<double>> estimate_coefficients(const RealFunction& f, const LatticeConfig& config,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets) {
  const auto samples = sample_nodes(f, config, z, shift);
  return estimate_from_samples(std::span<const double>(samples), RootsOfUnity(config.n()), z, shift, targets);
}

std::vector<std::complex<double>> estimate_coefficients(const ComplexFunction& f, const LatticeConfig& config,
                                                        const GeneratingVector& z, const RandomShift& shift,
                                                        std::span<const FrequencyIndex> targets) {
  const auto samples = sample_nodes(f, config, z, shift);
  return estimate_from_samples(std::span<const std::complex<double>>(samples), RootsOfUnity(config.n()), z, shift,
                               targets);
}

}  // namespace medlat
