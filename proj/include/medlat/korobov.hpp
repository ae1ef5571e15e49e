#pragma once

// Weighted Korobov spaces with product weights: smoothness/weight types, the
// weight function r_{2a,g}, and test functions with exactly known spectra.

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace medlat {

/// Integer frequency vector h in Z^d.
class FrequencyIndex {
 public:
  FrequencyIndex() = default;
  explicit FrequencyIndex(std::vector<std::int64_t> components) : c_(std::move(components)) {}
  FrequencyIndex(std::initializer_list<std::int64_t> components) : c_(components) {}

  std::size_t dim() const { return c_.size(); }
  std::int64_t operator[](std::size_t j) const { return c_[j]; }
  std::int64_t& operator[](std::size_t j) { return c_[j]; }
  std::span<const std::int64_t> components() const { return c_; }

  FrequencyIndex operator-() const;
  FrequencyIndex operator+(const FrequencyIndex& other) const;
  std::int64_t max_abs() const;
  bool is_zero() const;

  // Lexicographic by components.
  friend auto operator<=>(const FrequencyIndex&, const FrequencyIndex&) = default;
  friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;

 private:
  std::vector<std::int64_t> c_;
};

struct FrequencyIndexHash {
  std::size_t operator()(const FrequencyIndex& h) const noexcept;
};

std::string to_string(const FrequencyIndex& h);

/// Smoothness alpha > 1/2 and dimension d >= 1.
class SmoothnessParams {
 public:
  SmoothnessParams(double alpha, std::size_t dim);
  double alpha() const { return alpha_; }
  std::size_t dim() const { return dim_; }

 private:
  double alpha_;
  std::size_t dim_;
};

/// Product weights 1 >= g_1 >= g_2 >= ... > 0.
class ProductWeights {
 public:
  ProductWeights() = default;
  explicit ProductWeights(std::vector<double> gammas);

  std::size_t size() const { return gammas_.size(); }
  double operator[](std::size_t j) const { return gammas_[j]; }
  std::span<const double> values() const { return gammas_; }

  /// First `count` weights.
  ProductWeights head(std::size_t count) const;
  /// g_j^{1/(2 alpha)} for the first `count` weights.
  std::vector<double> root(double alpha, std::size_t count) const;

 private:
  std::vector<double> gammas_;
};

/// Infinite weight sequence: an explicit list, g_j = j^{-beta}, or a constant.
class WeightSequence {
 public:
  enum class Kind { Explicit, Polynomial, Constant };

  static WeightSequence explicit_list(std::vector<double> gammas);
  static WeightSequence polynomial(double beta);
  static WeightSequence constant(double value);
  /// "poly:BETA", "const:VALUE" or a comma separated list.
  static WeightSequence parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  /// g_j with j >= 1.  Explicit lists repeat their last element.
  double gamma(std::size_t j) const;
  ProductWeights weights(std::size_t dim) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  double param_ = 1.0;
  std::vector<double> list_;
};

struct Problem {
  SmoothnessParams smoothness;
  ProductWeights weights;

  Problem(SmoothnessParams s, ProductWeights w);
  std::size_t dim() const { return smoothness.dim(); }
  double alpha() const { return smoothness.alpha(); }
};

/// prod_j max(|h_j|^{2 alpha} / g_j, 1).  Returns +inf on overflow.
double r_weight(const FrequencyIndex& h, const SmoothnessParams& params, const ProductWeights& weights);

/// Riemann zeta for real q > 1 (Euler-Maclaurin, ~1e-15 relative).
double zeta(double q);

/// prod_{j<=d} (1 + 2 g_j zeta(2 alpha)).
double worst_realization_norm_factor(const SmoothnessParams& params, const ProductWeights& weights);

/// One-dimensional factor of a separable test function.
struct UnivariateOracle {
  std::function<std::complex<double>(std::int64_t)> coefficient;
  std::function<double(double)> value;
  double l2_norm_sq = 0.0;
};

/// Real-valued periodic function with exactly known Fourier coefficients.
/// Either a tensor product of univariate factors or a finite sum of modes.
class SpectralOracle {
 public:
  using Mode = std::pair<FrequencyIndex, std::complex<double>>;

  static SpectralOracle product(std::vector<UnivariateOracle> factors, std::string name = "product");
  /// Modes must be closed under h -> -h with conjugate coefficients.
  static SpectralOracle sparse(std::size_t dim, std::vector<Mode> modes, std::string name = "sparse");

  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  std::complex<double> coefficient(const FrequencyIndex& h) const;
  double l2_norm_sq() const { return l2_norm_sq_; }
  double evaluate(std::span<const double> x) const;

  /// Sum over ||h||_inf <= radius of |f^(h)|^2 r_{2 alpha, g}(h).
  double korobov_norm_sq(const SmoothnessParams& params, const ProductWeights& weights,
                         std::int64_t radius) const;

  bool is_product() const { return !factors_.empty(); }
  const std::vector<UnivariateOracle>& factors() const { return factors_; }
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  SpectralOracle() = default;

  std::size_t dim_ = 0;
  std::string name_;
  double l2_norm_sq_ = 0.0;
  std::vector<UnivariateOracle> factors_;
  std::vector<Mode> modes_;
};

double korobov_norm_sq_truncated(const SpectralOracle& f, const SmoothnessParams& params,
                                 const ProductWeights& weights, std::int64_t box_radius);

/// (121 sqrt(33)/100) max(25/121 - (x - 1/2)^2, 0), unit L2 norm.
UnivariateOracle kink_factor();
/// (x - 1/2)^2 sin(2 pi x - pi).
UnivariateOracle smooth_factor();

/// Tensor product of kink_factor.
SpectralOracle test_function_f1(std::size_t dim);
/// Tensor product of smooth_factor.
SpectralOracle test_function_f2(std::size_t dim);
/// e^{2 pi i h0.x} + e^{-2 pi i h0.x} = 2 cos(2 pi h0.x).
SpectralOracle cosine_pair(const FrequencyIndex& h0);

}  // namespace medlat
