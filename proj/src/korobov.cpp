#include "medlat/korobov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "medlat/numeric.hpp"

namespace medlat {

FrequencyIndex FrequencyIndex::operator-() const {
  FrequencyIndex out(*this);
  for (auto& v : out.c_) v = -v;
  return out;
}

FrequencyIndex FrequencyIndex::operator+(const FrequencyIndex& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("frequency index dimension mismatch");
  FrequencyIndex out(*this);
  for (std::size_t j = 0; j < c_.size(); ++j) out.c_[j] += other.c_[j];
  return out;
}

std::int64_t FrequencyIndex::max_abs() const {
  std::int64_t m = 0;
  for (auto v : c_) m = std::max<std::int64_t>(m, v < 0 ? -v : v);
  return m;
}

bool FrequencyIndex::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](std::int64_t v) { return v == 0; });
}

std::size_t FrequencyIndexHash::operator()(const FrequencyIndex& h) const noexcept {
  std::uint64_t acc = 0x9E3779B97F4A7C15ULL;
  for (auto v : h.components()) {
    std::uint64_t x = static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (acc << 6) + (acc >> 2);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    acc ^= x ^ (x >> 31);
  }
  return static_cast<std::size_t>(acc);
}

std::string to_string(const FrequencyIndex& h) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < h.dim(); ++j) os << (j ? "," : "") << h[j];
  os << ')';
  return os.str();
}

SmoothnessParams::SmoothnessParams(double alpha, std::size_t dim) : alpha_(alpha), dim_(dim) {
  if (!(alpha > 0.5)) throw std::invalid_argument("smoothness alpha must exceed 1/2");
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
}

ProductWeights::ProductWeights(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  for (std::size_t j = 0; j < gammas_.size(); ++j) {
    const double g = gammas_[j];
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("weights must lie in (0, 1]");
    if (j > 0 && g > gammas_[j - 1]) throw std::invalid_argument("weights must be non-increasing");
  }
}

ProductWeights ProductWeights::head(std::size_t count) const {
  if (count > gammas_.size()) throw std::invalid_argument("not enough weights for dimension");
  return ProductWeights(std::vector<double>(gammas_.begin(), gammas_.begin() + count));
}

std::vector<double> ProductWeights::root(double alpha, std::size_t count) const {
  if (count > gammas_.size()) throw std::invalid_argument("not enough weights for dimension");
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = std::pow(gammas_[j], 1.0 / (2.0 * alpha));
  return out;
}

WeightSequence WeightSequence::explicit_list(std::vector<double> gammas) {
  if (gammas.empty()) throw std::invalid_argument("empty weight list");
  ProductWeights check(gammas);
  WeightSequence s;
  s.kind_ = Kind::Explicit;
  s.list_ = std::move(gammas);
  return s;
}

WeightSequence WeightSequence::polynomial(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("polynomial weight exponent must be >= 0");
  WeightSequence s;
  s.kind_ = Kind::Polynomial;
  s.param_ = beta;
  return s;
}

WeightSequence WeightSequence::constant(double value) {
  if (!(value > 0.0 && value <= 1.0)) throw std::invalid_argument("weights must lie in (0, 1]");
  WeightSequence s;
  s.kind_ = Kind::Constant;
  s.param_ = value;
  return s;
}

WeightSequence WeightSequence::parse(const std::string& spec) {
  auto number = [&](const std::string& text) {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad weight specification: " + spec);
    return v;
  };
  if (spec.rfind("poly:", 0) == 0) return polynomial(number(spec.substr(5)));
  if (spec.rfind("const:", 0) == 0) return constant(number(spec.substr(6)));
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(number(item));
  return explicit_list(std::move(values));
}

double WeightSequence::gamma(std::size_t j) const {
  if (j < 1) throw std::invalid_argument("weight index starts at 1");
  switch (kind_) {
    case Kind::Explicit:
      return list_[std::min(j, list_.size()) - 1];
    case Kind::Polynomial:
      return std::pow(static_cast<double>(j), -param_);
    case Kind::Constant:
      return param_;
  }
  return 1.0;
}

ProductWeights WeightSequence::weights(std::size_t dim) const {
  std::vector<double> g(dim);
  for (std::size_t j = 0; j < dim; ++j) g[j] = gamma(j + 1);
  return ProductWeights(std::move(g));
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Explicit:
      for (std::size_t j = 0; j < list_.size(); ++j) os << (j ? "," : "") << list_[j];
      break;
    case Kind::Polynomial:
      os << "poly:" << param_;
      break;
    case Kind::Constant:
      os << "const:" << param_;
      break;
  }
  return os.str();
}

Problem::Problem(SmoothnessParams s, ProductWeights w) : smoothness(s), weights(std::move(w)) {
  if (weights.size() < smoothness.dim()) throw std::invalid_argument("weights do not cover the dimension");
}

double r_weight(const FrequencyIndex& h, const SmoothnessParams& params, const ProductWeights& weights) {
  if (h.dim() != params.dim()) throw std::invalid_argument("r_weight: index dimension mismatch");
  if (weights.size() < params.dim()) throw std::invalid_argument("r_weight: weights do not cover dimension");
  const double two_alpha = 2.0 * params.alpha();
  double r = 1.0;
  for (std::size_t j = 0; j < h.dim(); ++j) {
    if (h[j] == 0) continue;
    const double a = std::abs(static_cast<double>(h[j]));
    r *= std::max(std::pow(a, two_alpha) / weights[j], 1.0);
  }
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

double zeta(double q) {
  if (!(q > 1.0)) throw std::domain_error("zeta: argument must exceed 1");
  // Euler-Maclaurin with cut-off n and Bernoulli corrections up to B_16.
  constexpr int n = 16;
  constexpr double bernoulli[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30,
                                  5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
  CompensatedSum sum;
  for (int k = n - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -q);
  const double nn = n;
  sum += std::pow(nn, 1.0 - q) / (q - 1.0);
  sum += 0.5 * std::pow(nn, -q);
  // term_k = B_2k / (2k)! * q (q+1) ... (q+2k-2) * n^{-q-2k+1}
  double rising = q;              // q (q+1) ... (q+2k-2)
  double factorial = 2.0;         // (2k)!
  double power = std::pow(nn, -q - 1.0);
  for (int k = 1; k <= 8; ++k) {
    sum += bernoulli[k - 1] / factorial * rising * power;
    rising *= (q + 2 * k - 1) * (q + 2 * k);
    factorial *= (2.0 * k + 1) * (2.0 * k + 2);
    power /= nn * nn;
  }
  return sum.value();
}

double worst_realization_norm_factor(const SmoothnessParams& params, const ProductWeights& weights) {
  if (weights.size() < params.dim()) throw std::invalid_argument("weights do not cover dimension");
  const double z = zeta(2.0 * params.alpha());
  double out = 1.0;
  for (std::size_t j = 0; j < params.dim(); ++j) out *= 1.0 + 2.0 * weights[j] * z;
  return out;
}

SpectralOracle SpectralOracle::product(std::vector<UnivariateOracle> factors, std::string name) {
  if (factors.empty()) throw std::invalid_argument("product oracle needs at least one factor");
  SpectralOracle f;
  f.dim_ = factors.size();
  f.name_ = std::move(name);
  f.l2_norm_sq_ = 1.0;
  for (const auto& u : factors) f.l2_norm_sq_ *= u.l2_norm_sq;
  f.factors_ = std::move(factors);
  return f;
}

SpectralOracle SpectralOracle::sparse(std::size_t dim, std::vector<Mode> modes, std::string name) {
  if (dim < 1) throw std::invalid_argument("sparse oracle needs dimension >= 1");
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.first < b.first; });
  std::vector<Mode> merged;
  for (auto& m : modes) {
    if (m.first.dim() != dim) throw std::invalid_argument("sparse oracle: mode dimension mismatch");
    if (!merged.empty() && merged.back().first == m.first)
      merged.back().second += m.second;
    else
      merged.push_back(std::move(m));
  }
  SpectralOracle f;
  f.dim_ = dim;
  f.name_ = std::move(name);
  for (const auto& [h, c] : merged) {
    auto it = std::lower_bound(merged.begin(), merged.end(), -h,
                               [](const Mode& m, const FrequencyIndex& key) { return m.first < key; });
    if (it == merged.end() || it->first != -h || std::abs(it->second - std::conj(c)) > 1e-14 * (1 + std::abs(c)))
      throw std::invalid_argument("sparse oracle must be conjugate symmetric (real valued)");
    f.l2_norm_sq_ += std::norm(c);
  }
  f.modes_ = std::move(merged);
  return f;
}

std::complex<double> SpectralOracle::coefficient(const FrequencyIndex& h) const {
  if (h.dim() != dim_) throw std::invalid_argument("coefficient: index dimension mismatch");
  if (is_product()) {
    std::complex<double> c = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      c *= factors_[j].coefficient(h[j]);
      if (c == 0.0) break;
    }
    return c;
  }
  auto it = std::lower_bound(modes_.begin(), modes_.end(), h,
                             [](const Mode& m, const FrequencyIndex& key) { return m.first < key; });
  return (it != modes_.end() && it->first == h) ? it->second : std::complex<double>(0.0);
}

double SpectralOracle::evaluate(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("evaluate: point dimension mismatch");
  if (is_product()) {
    double v = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) v *= factors_[j].value(x[j]);
    return v;
  }
  double v = 0.0;
  for (const auto& [h, c] : modes_) {
    double phase = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) phase += static_cast<double>(h[j]) * x[j];
    phase -= std::floor(phase);
    const double angle = 2.0 * std::numbers::pi * phase;
    v += c.real() * std::cos(angle) - c.imag() * std::sin(angle);
  }
  return v;
}

double SpectralOracle::korobov_norm_sq(const SmoothnessParams& params, const ProductWeights& weights,
                                       std::int64_t radius) const {
  if (radius < 0) throw std::invalid_argument("box radius must be non-negative");
  if (params.dim() != dim_) throw std::invalid_argument("korobov norm: dimension mismatch");
  if (weights.size() < dim_) throw std::invalid_argument("korobov norm: weights do not cover dimension");
  const double two_alpha = 2.0 * params.alpha();
  if (is_product()) {
    // The box and r_{2a,g} both factor over coordinates.
    double out = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      CompensatedSum s;
      for (std::int64_t h = radius; h >= -radius; --h) {
        const double a = std::abs(static_cast<double>(h));
        const double r = h == 0 ? 1.0 : std::max(std::pow(a, two_alpha) / weights[j], 1.0);
        s += std::norm(factors_[j].coefficient(h)) * r;
      }
      out *= s.value();
    }
    return out;
  }
  CompensatedSum s;
  for (const auto& [h, c] : modes_)
    if (h.max_abs() <= radius) s += std::norm(c) * r_weight(h, params, weights);
  return s.value();
}

double korobov_norm_sq_truncated(const SpectralOracle& f, const SmoothnessParams& params,
                                 const ProductWeights& weights, std::int64_t box_radius) {
  return f.korobov_norm_sq(params, weights, box_radius);
}

namespace {

constexpr double kPi = std::numbers::pi;

// Kink half-width a = 5/11 and amplitude c = 121 sqrt(33) / 100.
constexpr double kKinkHalfWidth = 5.0 / 11.0;
const double kKinkAmplitude = 121.0 * std::sqrt(33.0) / 100.0;

}  // namespace

UnivariateOracle kink_factor() {
  UnivariateOracle u;
  // With t = x - 1/2 the function is even in t and supported on |t| <= a, so
  // f^(h) = (-1)^h 4c / w^3 (sin(w a) - a w cos(w a)), w = 2 pi h.
  u.coefficient = [](std::int64_t h) -> std::complex<double> {
    const double c = kKinkAmplitude;
    const double a = kKinkHalfWidth;
    if (h == 0) return 4.0 / 3.0 * c * a * a * a;
    const double w = 2.0 * kPi * static_cast<double>(h);
    const double sign = (h % 2 == 0) ? 1.0 : -1.0;
    return sign * 4.0 * c / (w * w * w) * (std::sin(w * a) - a * w * std::cos(w * a));
  };
  u.value = [](double x) {
    const double t = x - 0.5;
    return kKinkAmplitude * std::max(25.0 / 121.0 - t * t, 0.0);
  };
  // (16/15) c^2 a^5 = 1 exactly.
  u.l2_norm_sq = 16.0 / 15.0 * kKinkAmplitude * kKinkAmplitude * std::pow(kKinkHalfWidth, 5);
  return u;
}

UnivariateOracle smooth_factor() {
  UnivariateOracle u;
  // t = x - 1/2 turns the function into t^2 sin(2 pi t), which is odd, so the
  // coefficients are purely imaginary:
  //   f^(0) = 0,  f^(+-1) = +-i (1/24 - 1/(16 pi^2)),
  //   f^(h) = i h / (pi^2 (h^2 - 1)^2) for |h| >= 2.
  u.coefficient = [](std::int64_t h) -> std::complex<double> {
    if (h == 0) return 0.0;
    if (h == 1 || h == -1) {
      const double v = 1.0 / 24.0 - 1.0 / (16.0 * kPi * kPi);
      return {0.0, h > 0 ? v : -v};
    }
    const double hd = static_cast<double>(h);
    const double q = hd * hd - 1.0;
    return {0.0, hd / (kPi * kPi * q * q)};
  };
  u.value = [](double x) {
    const double t = x - 0.5;
    return t * t * std::sin(2.0 * kPi * x - kPi);
  };
  u.l2_norm_sq = 1.0 / 160.0 - 1.0 / (32.0 * kPi * kPi) + 3.0 / (64.0 * kPi * kPi * kPi * kPi);
  return u;
}

SpectralOracle test_function_f1(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
  return SpectralOracle::product(std::vector<UnivariateOracle>(dim, kink_factor()), "f1");
}

SpectralOracle test_function_f2(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
  return SpectralOracle::product(std::vector<UnivariateOracle>(dim, smooth_factor()), "f2");
}

SpectralOracle cosine_pair(const FrequencyIndex& h0) {
  std::vector<SpectralOracle::Mode> modes{{h0, 1.0}, {-h0, 1.0}};
  return SpectralOracle::sparse(h0.dim(), std::move(modes), "exp");
}

}  // namespace medlat
