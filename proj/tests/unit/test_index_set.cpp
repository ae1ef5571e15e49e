#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "medlat/index_set.hpp"
#include "medlat/primes.hpp"

using namespace medlat;
using std::numbers::e;
using std::numbers::pi;

namespace {

// Box scan filtered by the weight function itself: r(h) <= L^{2 alpha}.
std::vector<FrequencyIndex> box_scan(double radius, const SmoothnessParams& p, const ProductWeights& w) {
  std::vector<FrequencyIndex> out;
  if (radius < 1.0) return out;
  const auto k = static_cast<std::int64_t>(std::ceil(radius));
  std::vector<std::int64_t> h(p.dim(), -k);
  const double limit = std::pow(radius, 2.0 * p.alpha()) * (1.0 + 1e-9);
  for (;;) {
    FrequencyIndex idx(h);
    if (r_weight(idx, p, w) <= limit) out.push_back(idx);
    std::size_t j = p.dim();
    while (j > 0 && h[j - 1] == k) h[--j] = -k;
    if (j == 0) break;
    ++h[j - 1];
  }
  return out;
}

struct Draw {
  SmoothnessParams params;
  ProductWeights weights;
  double radius;
};

Draw random_draw(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> alpha(0.6, 3.0);
  std::uniform_real_distribution<double> g(0.05, 1.0);
  std::uniform_real_distribution<double> l(1.0, 40.0);
  std::vector<double> gs(d);
  for (auto& x : gs) x = g(rng);
  std::sort(gs.begin(), gs.end(), std::greater<>());
  return {SmoothnessParams(alpha(rng), d), ProductWeights(gs), l(rng)};
}

}  // namespace

TEST_CASE("small index sets") {
  const ProductWeights one({1.0});
  auto a = enumerate(2.5, SmoothnessParams(1.5, 1), one);
  REQUIRE(a.size() == 5);
  CHECK(a[0] == FrequencyIndex{-2});
  CHECK(a[4] == FrequencyIndex{2});

  const ProductWeights ones({1.0, 1.0});
  CHECK(enumerate(1.0, SmoothnessParams(2.0, 2), ones).size() == 9);
  CHECK(enumerate(2.0, SmoothnessParams(0.75, 2), ones).size() == 21);
  CHECK(enumerate(2.0, SmoothnessParams(3.0, 2), ones).size() == 21);
  // frozen from tests/oracles/index_set_oracle.py
  CHECK(enumerate(10.0, SmoothnessParams(1.5, 2), ones).size() == 149);
  CHECK(enumerate(10.0, SmoothnessParams(1.0, 2), ProductWeights({1.0, 0.5})).size() == 99);
  CHECK(enumerate(6.0, SmoothnessParams(2.0, 3), ProductWeights({1.0, 1.0, 1.0})).size() == 405);
}

TEST_CASE("radius below one gives the empty set") {
  const auto a = enumerate(0.999, SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0}));
  CHECK(a.empty());
  CHECK_FALSE(in_hyperbolic_cross({0, 0}, 0.5, SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0})));
  CHECK(enumerate(0.0, SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0})).empty());
  CHECK_THROWS(enumerate(-1.0, SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0})));
}

TEST_CASE("enumeration matches a box scan, sorted and symmetric") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto dr = random_draw(rng, d);
    CAPTURE(trial);
    CAPTURE(dr.radius);
    const auto a = enumerate(dr.radius, dr.params, dr.weights);
    const auto expect = box_scan(dr.radius, dr.params, dr.weights);
    REQUIRE(a.size() == expect.size());
    CHECK(std::equal(a.indices().begin(), a.indices().end(), expect.begin()));
    CHECK(a.size() % 2 == 1);
    for (const auto& h : a.indices()) {
      CHECK(a.contains(-h));
      CHECK(in_hyperbolic_cross(h, dr.radius, dr.params, dr.weights));
    }
    CHECK(std::is_sorted(a.indices().begin(), a.indices().end()));
  }
}

TEST_CASE("nesting in the radius") {
  const SmoothnessParams p(1.2, 2);
  const ProductWeights w({1.0, 0.3});
  auto prev = enumerate(1.0, p, w);
  for (double l = 1.5; l <= 20.0; l += 0.5) {
    auto cur = enumerate(l, p, w);
    for (const auto& h : prev.indices()) CHECK(cur.contains(h));
    prev = std::move(cur);
  }
}

TEST_CASE("small weights use log-space budgets") {
  std::vector<double> gs(40, 1e-12);
  gs[0] = 1.0;
  const auto a = enumerate(30.0, SmoothnessParams(1.0, 40), ProductWeights(gs));
  // only the first coordinate can move: gamma^{1/2} = 1e-6
  CHECK(a.size() == 61);
}

TEST_CASE("memory guard") {
  EnumerationOptions opt;
  opt.max_cardinality = 1000;
  CHECK_THROWS_AS(enumerate(40.0, SmoothnessParams(1.0, 3), ProductWeights({1.0, 1.0, 1.0}), opt), std::length_error);
}

TEST_CASE("csv output") {
  const auto a = enumerate(1.0, SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0}));
  std::ostringstream os;
  a.write_csv(os);
  CHECK(os.str().rfind("h_1,h_2\n-1,-1\n-1,0\n", 0) == 0);
  CHECK(a.position({0, 0}).value() == 4);
}

TEST_CASE("bound_basic closed forms") {
  const SmoothnessParams p1(1.5, 1);
  const ProductWeights w1({1.0});
  CHECK(bound_basic(e, 1.0, p1, w1) == doctest::Approx(1 + 2.5 * e * e).epsilon(1e-14));
  const SmoothnessParams p3(2.0, 3);
  const ProductWeights w3({1.0, 0.25, 0.0625});
  const double expect = 1 + e * (1 + 2 * 1.0) * (1 + 2 * std::pow(0.25, 0.25)) * (1 + 2 * std::pow(0.0625, 0.25));
  CHECK(bound_basic(1.0, 1.0, p3, w3) == doctest::Approx(expect).epsilon(1e-14));
  // second evaluation written out by hand
  const SmoothnessParams p2(1.5, 2);
  const double lg = std::log(10.0);
  const double dual = 1 + 10 * std::exp(2.0) / (1 + 0.5 * lg) * std::pow(1 + 2 * (1 + 0.5 * lg), 2);
  CHECK(bound_basic(10.0, 0.5, p2, ProductWeights({1.0, 1.0})) == doctest::Approx(dual).epsilon(1e-12));
  CHECK_THROWS(bound_basic(0.5, 1.0, p1, w1));
}

TEST_CASE("bound_min_q closed forms") {
  const SmoothnessParams p(1.5, 1);
  const ProductWeights w({1.0});
  const double q2[] = {2.0};
  const double z2 = pi * pi / 6;
  CHECK(bound_min_q(5.0, p, w, q2) == doctest::Approx(1 + 25 / z2 * (1 + 2 * z2)).epsilon(1e-13));
  CHECK(bound_min_q(1.0, p, w, q2) == doctest::Approx(3 + 6 / (pi * pi)).epsilon(1e-13));
  const double bad[] = {1.0};
  CHECK_THROWS(bound_min_q(5.0, p, w, bad));
}

TEST_CASE("partial zeta sums") {
  const auto h = partial_zeta(10.7, 1.0);
  CHECK(h.value == doctest::Approx(7381.0 / 2520.0).epsilon(1e-15));
  double d = 0.0;
  for (int n = 1; n <= 10; ++n) d -= std::log(n) / n;
  CHECK(h.derivative == doctest::Approx(d).epsilon(1e-14));
  CHECK(partial_zeta(1.0, 3.0).value == 1.0);
}

TEST_CASE("bound_refined") {
  const auto r = bound_refined_detail(10.0, SmoothnessParams(1.5, 1), ProductWeights({1.0}));
  const double h10 = 7381.0 / 2520.0;
  CHECK(r.q_star == 1.0);
  CHECK(r.value == doctest::Approx(1 + 10 / h10 * (1 + 2 * h10)).epsilon(1e-13));
  CHECK(r.value == doctest::Approx(24.414171521474053).epsilon(1e-13));

  // The bound depends on floor(L) through H_L, so it is not monotone in L; it
  // must still dominate every smaller index set.
  const SmoothnessParams p(1.1, 2);
  const ProductWeights w({1.0, 0.7});
  std::size_t largest = 0;
  for (double l = 1.0; l <= 40.0; l += 0.25) {
    largest = std::max(largest, enumerate(l, p, w).size());
    CAPTURE(l);
    CHECK(bound_refined(l, p, w) >= static_cast<double>(largest));
  }
}

TEST_CASE("bounds dominate the cardinality on random draws") {
  std::mt19937_64 rng(7);
  const double q_grid[] = {1.1, 1.5, 2.0, 3.0};
  for (int trial = 0; trial < 30; ++trial) {
    const auto dr = random_draw(rng, 1 + trial % 3);
    const auto n = static_cast<double>(enumerate(dr.radius, dr.params, dr.weights).size());
    CAPTURE(trial);
    for (double tau : {0.1, 0.5, 1.0, 2.0}) CHECK(n <= bound_basic(dr.radius, tau, dr.params, dr.weights));
    CHECK(n <= bound_min_q(dr.radius, dr.params, dr.weights, q_grid));
    CHECK(n <= bound_refined(dr.radius, dr.params, dr.weights));
  }
}

TEST_CASE("corollary cap") {
  CHECK(corollary_cap(101, 1.0, 1.0) == doctest::Approx(101.0));
  CHECK(corollary_cap(101, 1.0, e) == doctest::Approx(51.0));
  CHECK_THROWS_AS(corollary_cap(101, 1.0, 0.99), std::domain_error);
  CHECK_THROWS_AS(corollary_cap(100, 1.0, 2.0), std::invalid_argument);
}
