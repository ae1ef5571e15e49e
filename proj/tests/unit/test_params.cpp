#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "medlat/median_approx.hpp"
#include "medlat/params.hpp"
#include "medlat/primes.hpp"

using namespace medlat;
using std::numbers::e;

namespace {

Problem unit_problem(double alpha, std::size_t d) {
  return Problem(SmoothnessParams(alpha, d), ProductWeights(std::vector<double>(d, 1.0)));
}

bool slow_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("budget validation") {
  CHECK_THROWS_AS(BudgetSpec(1, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSpec(1024, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSpec(1024, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(find_Nmax(BudgetSpec(20, 0.01)), std::domain_error);
}

TEST_CASE("find_Nmax agrees with an exhaustive scan") {
  for (double delta : {0.01, 0.1, 0.5}) {
    std::uint64_t prev = 0;
    for (std::uint64_t m = 64; m <= 4096; m += 37) {
      std::uint64_t expect = 0;
      for (std::uint64_t n = 2; n <= m; ++n)
        if (slow_prime(n) && budget_cost(n, delta) <= static_cast<double>(m)) expect = n;
      const auto got = find_Nmax(BudgetSpec(m, delta));
      CHECK(got == expect);
      CHECK(got >= prev);
      CHECK(budget_cost(got, delta) <= static_cast<double>(m));
      CHECK(budget_cost(next_prime(got + 1), delta) > static_cast<double>(m));
      prev = got;
    }
  }
  CHECK(find_Nmax(BudgetSpec(1024, 0.01)) == 71);
  CHECK(find_Nmax(BudgetSpec(4096, 0.01)) == 241);
  CHECK(find_Nmax(BudgetSpec(65536, 0.01)) == 3049);
}

TEST_CASE("repetition rules") {
  // centre 2 log(1 + (N-1)/(4e)) + 9.21 lies near 11.5 for N = 3
  const double c = r_window_center(3, 0.01);
  const unsigned r = choose_R_window(3, 0.01);
  CHECK(r % 2 == 1);
  CHECK(static_cast<double>(r) >= c - 1.0);
  CHECK(static_cast<double>(r) <= c + 1.0);
  // delta chosen so the centre is exactly 6 (both window ends odd) and 5.4
  const auto delta_for = [](std::uint64_t n, double centre) {
    return std::exp(std::log1p((static_cast<double>(n) - 1.0) / (4.0 * e)) - centre / 2.0);
  };
  CHECK(choose_R_window(101, delta_for(101, 6.0)) == 7);
  CHECK(choose_R_window(101, delta_for(101, 5.4)) == 5);
  CHECK(choose_R_budget(101, 1000) == 9);
  CHECK(choose_R_budget(101, 1111) == 11);
  CHECK(choose_R_budget(101, 1212) == 11);
  CHECK(choose_R_budget(101, 101) == 1);
  CHECK_THROWS(choose_R_budget(101, 100));
}

TEST_CASE("golden parameter selection") {
  // values from an independent scripted reimplementation (linear N scan, sympy primality)
  const Problem pr = unit_problem(1.5, 2);
  const auto sp = select_params(BudgetSpec(1u << 14, 0.01), pr);
  CHECK(sp.n_max == 863);
  CHECK(sp.R == 17);
  CHECK(sp.m() <= sp.m_max);
  CHECK(sp.roots.tau0 == doctest::Approx(5.6500594786931195).epsilon(1e-9));
  CHECK(sp.roots.tau0_prime == doctest::Approx(0.6664612106425243).epsilon(1e-9));
  CHECK_FALSE(sp.roots.window_feasible);
  CHECK(sp.tau_star == sp.roots.tau0_prime);
  CHECK(sp.n_star == doctest::Approx(1.3325961371556772).epsilon(1e-9));
  CHECK(sp.feasible);

  const auto small = select_params(BudgetSpec(1u << 10, 0.01), pr);
  CHECK(small.n_max == 71);
  CHECK(small.R == 13);
  CHECK_FALSE(small.feasible);
  CHECK(small.reason.find("N_* < 1") != std::string::npos);

  const auto big = select_params(BudgetSpec(1u << 18, 0.01), pr);
  CHECK(big.n_max == 10903);
  CHECK(big.R == 23);
  CHECK(big.roots.tau0_prime == doctest::Approx(0.6283820532255797).epsilon(1e-9));
  CHECK(big.n_star == doctest::Approx(10.29659175289185).epsilon(1e-9));
}

TEST_CASE("tau roots: residuals, monotone objectives, asymptotics") {
  const Problem pr = unit_problem(1.5, 2);
  std::uint64_t n = 3;
  while (n < 2000000) {
    const auto r = tau_roots(n, pr);
    CHECK(std::abs(tau_log_derivative(r.tau0, 4.0 * e, n, pr)) <= 1e-8);
    CHECK(std::abs(tau_log_derivative(r.tau0_prime, 1.0, n, pr)) <= 1e-8);
    CHECK(r.tau0_prime > 0.5);
    CHECK(r.tau0 > 4.0 * e / 2.0);
    // the bisected expression is increasing on the bracket
    double prev = -INFINITY;
    for (int i = 1; i <= 10; ++i) {
      const double v = tau_log_derivative(r.tau0_prime * i / 5.0, 1.0, n, pr);
      CHECK(v > prev);
      prev = v;
    }
    n = next_prime(n * 3);
  }
  const auto far = tau_roots(1000003, pr);
  CHECK(far.tau0 / (4.0 * e / 2.0) < 1.2);
  CHECK(far.tau0_prime / 0.5 < 1.2);
  CHECK_THROWS_AS(tau_roots(2, pr), std::invalid_argument);
  CHECK_THROWS_AS(tau_roots(9, pr), std::invalid_argument);
}

TEST_CASE("tau window at large budgets") {
  const Problem pr = unit_problem(1.5, 2);
  // the window opens only once log(N - 1) clears 4e + 4e/tau0 + log P_N, around N ~ 1e11
  CHECK_FALSE(tau_roots(5466763103ULL, pr).window_feasible);
  const auto sp = select_params(BudgetSpec(std::uint64_t{1} << 46, 0.01), pr, RRule::Window);
  const auto& r = sp.roots;
  REQUIRE(r.window_feasible);
  CHECK(r.tau1 <= r.tau0);
  CHECK(r.tau0 <= r.tau2);
  const double scale = std::log(static_cast<double>(sp.n_max - 1));
  CHECK(std::abs(window_objective(r.tau1, sp.n_max, pr)) <= 1e-8 * scale);
  CHECK(std::abs(window_objective(r.tau2, sp.n_max, pr)) <= 1e-8 * scale);
  CHECK(sp.tau_star == std::max(r.tau0_prime, r.tau1));
  // N_* is maximal at tau_* among admissible tau
  for (double f : {0.99, 1.01}) {
    const double t = sp.tau_star * f;
    if (t < r.tau1 || t > r.tau2) continue;
    CHECK(compute_Nstar(t, pr.smoothness, pr.weights, sp.n_max) <= sp.n_star * (1 + 1e-10));
  }
  for (int k = 46; k <= 58; k += 4) {
    const auto s = select_params(BudgetSpec(std::uint64_t{1} << k, 0.01), pr, RRule::Window);
    const auto c = check_conditions(s.n_max, s.R, s.tau_star, 0.01, pr);
    CHECK_MESSAGE(c.all_hold(), "k = " << k << "\n" << to_key_value(c));
  }
}

TEST_CASE("error bound closed forms") {
  CHECK(theorem1_bound(101, 1.0, 2.0, 1.5, 0.0) == 0.0);
  const double a = theorem1_bound(863, 0.7, 3.0, 1.5, 2.0);
  CHECK(theorem1_bound(863, 0.7, 6.0, 1.5, 2.0) / a == doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-13));
  CHECK(theorem1_bound(863, 0.7, 6.0, 2.5, 2.0) / theorem1_bound(863, 0.7, 3.0, 2.5, 2.0) ==
        doctest::Approx(std::pow(2.0, -5.0)).epsilon(1e-13));
  // frozen from the scripted reimplementation
  const Problem pr = unit_problem(1.5, 2);
  const double ns = compute_Nstar(1.0, pr.smoothness, pr.weights, 101);
  CHECK(theorem1_bound(101, 1.0, ns, 1.5, 1.0) == doctest::Approx(826.9608160240841).epsilon(1e-12));
  CHECK(corollary2_constant(101, 1.0, 0.01, 1.5) == doctest::Approx(41546.24668423407).epsilon(1e-12));
  // budget form of the bound: C_N |f|^2 (e^{1/tau} P_N / M)^{2 alpha} with M = N R
  const double p = compute_PN(1.0, pr.smoothness, pr.weights, 101);
  const double m = 101.0 * 11.0;
  CHECK(corollary2_bound(101, 11, 1.0, 0.01, pr, 3.0) ==
        doctest::Approx(41546.24668423407 * 3.0 * std::pow(std::exp(1.0) * p / m, 3.0)).epsilon(1e-12));
}

TEST_CASE("condition report") {
  const Problem pr = unit_problem(1.5, 2);
  for (std::uint64_t n : {3ULL, 101ULL, 863ULL, 1000003ULL}) {
    for (double tau : {0.1, 0.5, 1.0 / std::log(2.0)}) {
      const auto c = check_conditions(n, 5, tau, 0.01, pr);
      CHECK(c.find("N_star_below_half_N").holds);
    }
  }
  const auto tiny = check_conditions(3, 1, 1.0, 0.01, pr);
  const auto& one = tiny.find("N_star_at_least_one");
  CHECK_FALSE(one.holds);
  CHECK(one.lhs == doctest::Approx(compute_Nstar(1.0, pr.smoothness, pr.weights, 3)));
  CHECK(one.rhs == 1.0);
  CHECK_FALSE(tiny.all_hold());
  CHECK(tiny.checks.size() == 6);
  CHECK_THROWS(tiny.find("no_such_condition"));
  const std::string kv = to_key_value(tiny);
  CHECK(kv.find("#cond.N_star_at_least_one=0 ") != std::string::npos);
}

TEST_CASE("tractability diagnostics") {
  const auto summable = tractability_diagnostics(WeightSequence::polynomial(3.0), 1.0, 10, 0.5);
  CHECK(summable.classification == TractabilityCase::Summable);
  CHECK(summable.g_inf == doctest::Approx(5.224750697370976).epsilon(1e-10));
  CHECK(summable.g_d < summable.g_inf);
  CHECK(summable.tau == doctest::Approx(0.5 / summable.g_d));

  const auto logd = tractability_diagnostics(WeightSequence::polynomial(2.0), 1.0, 10, 0.5);
  CHECK(logd.classification == TractabilityCase::Logarithmic);
  // G_d = 2 H_d, whose ratio to log d peaks at d = 2
  CHECK(logd.log_d_constant == doctest::Approx(3.0 / std::log(2.0)).epsilon(1e-12));

  const auto flat = tractability_diagnostics(WeightSequence::constant(1.0), 1.5, 10, 0.5);
  CHECK(flat.classification == TractabilityCase::Neither);
  CHECK(flat.g_d == doctest::Approx(20.0));
  CHECK(to_string(flat.classification) == "neither");
  CHECK(flat.log_d_constant == doctest::Approx(std::pow(2.0, 21) / (20 * std::log(2.0))).epsilon(1e-12));

  CHECK_THROWS_AS(tractability_diagnostics(WeightSequence::constant(1.0), 1.5, 2, 1.0), std::invalid_argument);

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(1, 50);
  std::uniform_int_distribution<std::uint64_t> nn(2, 1000000);
  std::uniform_real_distribution<double> alpha(0.6, 3.0);
  std::size_t checks = 0;
  for (int i = 0; i < 100; ++i) {
    const double eta = i % 2 ? 0.1 : 0.5;
    const std::uint64_t n[] = {nn(rng)};
    const auto w = i % 3 == 0 ? WeightSequence::constant(1.0)
                   : i % 3 == 1 ? WeightSequence::polynomial(2.0)
                                : WeightSequence::explicit_list({0.9, 0.3, 0.05});
    const auto rep = tractability_diagnostics(w, alpha(rng), dim(rng), eta, n);
    checks += rep.inequality_checks;
    CHECK(rep.inequality_violations == 0);
    CHECK(rep.worst_log_margin >= 0.0);
  }
  CHECK(checks == 100);
}
