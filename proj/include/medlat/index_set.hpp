#pragma once

// Hyperbolic cross index sets A_d(L) = { h : r_{2a,g}(h) <= L^{2a} } and upper
// bounds on their cardinality.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "medlat/korobov.hpp"

namespace medlat {

struct EnumerationOptions {
  /// Enumeration refuses to start when the projected cardinality exceeds this.
  double max_cardinality = 1e8;
};

class HyperbolicCross {
 public:
  HyperbolicCross(double radius, SmoothnessParams params, ProductWeights weights,
                  std::vector<FrequencyIndex> sorted_indices);

  double radius() const { return radius_; }
  const SmoothnessParams& params() const { return params_; }
  const ProductWeights& weights() const { return weights_; }

  std::span<const FrequencyIndex> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const FrequencyIndex& operator[](std::size_t i) const { return indices_[i]; }

  bool contains(const FrequencyIndex& h) const { return lookup_.count(h) != 0; }
  std::optional<std::size_t> position(const FrequencyIndex& h) const;

  /// One row per index, columns h_1..h_d, lexicographic order.
  void write_csv(std::ostream& os) const;

 private:
  double radius_;
  SmoothnessParams params_;
  ProductWeights weights_;
  std::vector<FrequencyIndex> indices_;
  std::unordered_map<FrequencyIndex, std::size_t, FrequencyIndexHash> lookup_;
};

/// Membership test shared by the enumerator: sum over nonzero h_j of
/// log|h_j| - log(g_j)/(2 alpha) <= log L, with a 1e-12 relative tie tolerance.
/// Empty for L < 1.
bool in_hyperbolic_cross(const FrequencyIndex& h, double radius, const SmoothnessParams& params,
                         const ProductWeights& weights);

/// Depth-first enumeration of A_d(L) in lexicographic order.
HyperbolicCross enumerate(double radius, const SmoothnessParams& params, const ProductWeights& weights,
                          const EnumerationOptions& options = {});

/// log prod_j (1 + 2 g_j^{1/(2 alpha)} (1 + tau log_arg)), i.e. log P_L with log_arg = log L.
double log_p_factor(double tau, double log_arg, const SmoothnessParams& params, const ProductWeights& weights);

/// H_L(q) = sum_{n=1}^{floor L} n^{-q}.
struct PartialZetaSum {
  double radius;
  double q;
  double value;
  double derivative;  // d/dq H_L(q)
};

PartialZetaSum partial_zeta(double radius, double q);

/// 1 + L e^{1/tau} / (1 + tau log L) P_L(tau, d, g).  Needs L >= 1, tau > 0.
double bound_basic(double radius, double tau, const SmoothnessParams& params, const ProductWeights& weights);

/// 1 + min_{q in grid} L^q / zeta(q) prod_j (1 + 2 g_j^{q/(2 alpha)} zeta(q)).
double bound_min_q(double radius, const SmoothnessParams& params, const ProductWeights& weights,
                   std::span<const double> q_grid);

struct RefinedBound {
  double value;
  double q_star;
  double q_bar;
};

/// Partial-sum bound 1 + L^q / H_L(q) prod_j (1 + 2 g_j^{q/(2 alpha)} H_L(q)) at the
/// stationary point of its logarithm on [1, q_bar].
RefinedBound bound_refined_detail(double radius, const SmoothnessParams& params, const ProductWeights& weights);
double bound_refined(double radius, const SmoothnessParams& params, const ProductWeights& weights);

/// 1 + (N - 1) / (1 + tau log N_*), valid when N_* >= 1.
double corollary_cap(std::uint64_t n, double tau, double n_star);

}  // namespace medlat
