#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "medlat/experiment.hpp"

using namespace medlat;

namespace {

ExperimentConfig small_config(FunctionKind kind) {
  ExperimentConfig c;
  c.function = kind;
  c.alpha = default_alpha(kind);
  c.budget_exponents = {10, 12, 14};
  c.runs = 2;
  c.seed = 42;
  return c;
}

std::string csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv(os, r, false);
  return os.str();
}

}  // namespace

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> exact;
  for (double x = 1; x <= 1e4; x *= 3) exact.emplace_back(x, std::pow(x, -2.0));
  const auto f = fit_rate(exact);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.points == exact.size());

  const std::pair<double, double> one[] = {{2.0, 1.0}};
  CHECK_THROWS_AS(fit_rate(one), std::invalid_argument);
  const std::pair<double, double> neg[] = {{1.0, 1.0}, {2.0, -1.0}, {3.0, 1.0}};
  CHECK_THROWS_AS(fit_rate(neg), std::invalid_argument);
  const std::pair<double, double> flat[] = {{2.0, 1.0}, {2.0, 3.0}, {2.0, 1.5}};
  CHECK_THROWS_AS(fit_rate(flat), std::invalid_argument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<std::pair<double, double>> noisy;
  for (int k = 0; k < 40; ++k) {
    const double x = std::pow(2.0, 1 + 0.5 * k);
    noisy.emplace_back(x, 3.0 * std::pow(x, -1.5) * (1.0 + 0.01 * noise(rng)));
  }
  const auto g = fit_rate(noisy);
  CHECK(std::abs(g.slope + 1.5) <= 0.05);
  CHECK(std::exp(g.intercept) == doctest::Approx(3.0).epsilon(0.02));
  CHECK(g.r_squared > 0.99);
}

TEST_CASE("config validation and function kinds") {
  CHECK(parse_function_kind("f1") == FunctionKind::F1);
  CHECK(parse_function_kind("exp") == FunctionKind::ExpMode);
  CHECK_THROWS_AS(parse_function_kind("f3"), std::invalid_argument);
  CHECK(default_alpha(FunctionKind::F1) == 1.5);
  CHECK(default_alpha(FunctionKind::F2) == 2.5);
  ExperimentConfig c;
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ExperimentConfig{};
  c.budget_exponents = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = ExperimentConfig{};
  c.function = FunctionKind::ExpMode;
  c.h0 = {1, 2, 3};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.h0 = {};
  CHECK(c.oracle().coefficient({1, 0}) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("parseval error") {
  const Problem pr(SmoothnessParams(1.5, 2), ProductWeights({1.0, 1.0}));
  const auto f = test_function_f2(2);
  const auto sp = select_params(BudgetSpec(1u << 14, 0.01), pr);
  const auto set = enumerate(sp.n_star, pr.smoothness, pr.weights);
  std::vector<std::complex<double>> exact;
  for (const auto& h : set.indices()) exact.push_back(f.coefficient(h));
  AlgorithmParams ap;
  const MedianApproximation ideal(set, exact, ap, {}, 0);
  const auto b = squared_error_breakdown(f, ideal);
  CHECK(b.estimation == 0.0);
  CHECK(b.truncation > 0.0);
  CHECK(b.total == b.truncation);
  double kept = 0.0;
  for (auto c : exact) kept += std::norm(c);
  CHECK(b.truncation == doctest::Approx(f.l2_norm_sq() - kept).epsilon(1e-12));

  // exact recovery of a single mode pair
  const auto pair = cosine_pair({1, 0});
  std::vector<std::complex<double>> pc;
  for (const auto& h : set.indices()) pc.push_back(pair.coefficient(h));
  CHECK(exact_squared_error(pair, MedianApproximation(set, pc, ap, {}, 0)) == 0.0);

  // an oracle whose norm is smaller than its coefficient mass
  auto bad = kink_factor();
  bad.l2_norm_sq = 0.5;
  const auto wrong = SpectralOracle::product({bad, kink_factor()});
  std::vector<std::complex<double>> wc;
  for (const auto& h : set.indices()) wc.push_back(wrong.coefficient(h));
  CHECK_THROWS_AS(exact_squared_error(wrong, MedianApproximation(set, wc, ap, {}, 0)), std::runtime_error);
}

TEST_CASE("parseval error matches a trapezoid integral in one dimension") {
  const Problem pr(SmoothnessParams(2.5, 1), ProductWeights({1.0}));
  const auto f = test_function_f2(1);
  const auto sp = select_params(BudgetSpec(1u << 12, 0.01), pr);
  REQUIRE(sp.feasible);
  const auto params = AlgorithmParams::make(sp.n_max, sp.R, sp.tau_star, pr, 17);
  const auto approx = run([&](std::span<const double> x) { return f.evaluate(x); }, params, pr);
  const double parseval = exact_squared_error(f, approx);
  constexpr int n = 1 << 16;
  double grid = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x[] = {static_cast<double>(k) / n};
    const double r = f.evaluate(x) - approx.evaluate(x).value;
    grid += r * r;
  }
  grid /= n;
  CHECK(parseval > 0.0);
  CHECK(grid == doctest::Approx(parseval).epsilon(1e-4));
}

TEST_CASE("experiment output shape and determinism") {
  auto c = small_config(FunctionKind::F2);
  c.budget_exponents = {10};
  c.runs = 3;
  const auto r = run_experiment(c);
  CHECK(r.records.size() == 3);
  const std::string text = csv(r);
  std::istringstream is(text);
  std::string line;
  std::size_t comments = 0;
  std::size_t rows = 0;
  while (std::getline(is, line)) (line[0] == '#' ? comments : rows) += 1;
  CHECK(comments == r.header.size());
  CHECK(rows == 4);
  for (const auto& rec : r.records) {
    CHECK_FALSE(rec.feasible);
    CHECK_FALSE(rec.squared_error);
    CHECK(rec.eval_count == 0);
  }
  CHECK(text.find(",,,\n") != std::string::npos);

  auto d = small_config(FunctionKind::F2);
  const std::string once = csv(run_experiment(d));
  CHECK(once == csv(run_experiment(d)));
  d.workers = 8;
  CHECK(once == csv(run_experiment(d)));
  d.parallel_budgets = true;
  CHECK(once == csv(run_experiment(d)));
  d.seed = 43;
  CHECK(once != csv(run_experiment(d)));
}

TEST_CASE("csv round trip") {
  auto c = small_config(FunctionKind::F1);
  c.timing = true;
  const auto r = run_experiment(c);
  for (bool wall : {false, true}) {
    std::ostringstream os;
    write_csv(os, r, wall);
    std::istringstream is(os.str());
    const auto back = read_csv(is);
    CHECK(back.header == r.header);
    REQUIRE(back.records.size() == r.records.size());
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      auto expect = r.records[i];
      if (!wall) expect.wall_time.reset();
      CHECK(back.records[i] == expect);
    }
  }
  std::istringstream junk("#x=1\nfoo,bar\n");
  CHECK_THROWS_AS(read_csv(junk), std::invalid_argument);
}

TEST_CASE("records respect their invariants") {
  for (auto kind : {FunctionKind::F1, FunctionKind::F2}) {
    auto c = small_config(kind);
    c.budget_exponents = {14, 15, 16};
    c.runs = 3;
    const auto r = run_experiment(c);
    const Problem pr = c.problem();
    const auto f = c.oracle();
    const double norm = korobov_norm_sq_truncated(f, pr.smoothness, pr.weights, kKorobovNormRadius);
    const double factor = worst_realization_norm_factor(pr.smoothness, pr.weights);
    for (const auto& rec : r.records) {
      CHECK(rec.m == rec.n * rec.R);
      CHECK(rec.m <= rec.m_max);
      REQUIRE(rec.feasible);
      CHECK(rec.eval_count == rec.m);
      REQUIRE(rec.squared_error);
      CHECK(*rec.squared_error >= 0.0);
      const double cap = norm * std::pow(1.0 + std::sqrt(static_cast<double>(rec.index_set_size) * factor), 2.0);
      CHECK(*rec.squared_error <= cap);
    }
  }
}

TEST_CASE("f2 errors decrease with the budget") {
  auto c = small_config(FunctionKind::F2);
  c.budget_exponents = {10, 11, 12, 13, 14, 15, 16, 17, 18};
  c.runs = 3;
  const auto r = run_experiment(c);
  std::vector<double> medians;
  for (std::size_t i = 0; i < r.records.size(); i += c.runs) {
    if (!r.records[i].squared_error) continue;
    std::vector<double> v;
    for (unsigned k = 0; k < c.runs; ++k) v.push_back(*r.records[i + k].squared_error);
    std::nth_element(v.begin(), v.begin() + 1, v.end());
    medians.push_back(v[1]);
  }
  REQUIRE(medians.size() >= 4);
  int inversions = 0;
  for (std::size_t i = 1; i < medians.size(); ++i) inversions += medians[i] > medians[i - 1];
  CHECK(inversions <= 1);
}

TEST_CASE("f2 errors stay below the main bound") {
  auto c = small_config(FunctionKind::F2);
  c.budget_exponents = {16};
  c.runs = 20;
  const auto r = run_experiment(c);
  int below = 0;
  for (const auto& rec : r.records) below += *rec.squared_error <= *rec.theorem1_bound;
  CHECK(below >= 19);
}

TEST_CASE("parameter table over budgets") {
  auto a = small_config(FunctionKind::F1);
  auto b = small_config(FunctionKind::F2);
  const auto ta = figure3_table(a);
  const auto tb = figure3_table(b);
  REQUIRE(ta.size() == 23);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].n == tb[i].n);
    CHECK(ta[i].n_star == tb[i].n_star);
    CHECK(ta[i].tau_star == tb[i].tau_star);
    CHECK(ta[i].n_star <= static_cast<double>(ta[i].n - 1));
    if (i) CHECK(ta[i].n_star >= ta[i - 1].n_star);
  }
  std::ostringstream os;
  write_figure3_csv(os, a, ta);
  CHECK(os.str().find("M_max,N,R,M,tau_star,N_star\n1024,71,13,923,") != std::string::npos);
}

TEST_CASE("svg output") {
  SvgSeries s{"f1", {{1024, 0.1}, {4096, 0.02}, {16384, 0.005}}};
  std::ostringstream os;
  write_svg(os, std::span<const SvgSeries>(&s, 1), "M", "L2 error", 1.5);
  const auto t = os.str();
  CHECK(t.rfind("<svg", 0) == 0);
  CHECK(t.find("slope -a/2") != std::string::npos);
  CHECK(t.find("</svg>") != std::string::npos);
}
