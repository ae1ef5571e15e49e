#pragma once

// Choosing N, R and tau from a function-evaluation budget, plus the closed-form
// error bounds and the precondition report.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "medlat/korobov.hpp"

namespace medlat {

struct BudgetSpec {
  std::uint64_t m_max;
  double delta;

  /// Throws std::invalid_argument unless m_max >= 2 and 0 < delta < 1.
  BudgetSpec(std::uint64_t m_max, double delta);
};

/// Centre of the repetition-count window: 2 log(1 + (N-1)/(4e)) + 2 log(1/delta).
double r_window_center(std::uint64_t n, double delta);

/// N (2 log(1 + (N-1)/(4e)) + 2 log(1/delta) + 1).
double budget_cost(std::uint64_t n, double delta);

/// Largest prime N with budget_cost(N, delta) <= M_max.  Throws std::domain_error
/// ("budget too small") when even N = 2 does not fit.
std::uint64_t find_Nmax(const BudgetSpec& budget);

/// The odd integer in [c - 1, c + 1]; the larger one when both endpoints are odd.
unsigned choose_R_window(std::uint64_t n, double delta);
/// Largest odd R <= M_max / N, at least 1.  Throws when M_max < N.
unsigned choose_R_budget(std::uint64_t n, std::uint64_t m_max);

/// tau d/dtau of log(exp(c/tau) P_N(tau)), i.e. -c/tau + sum_j 2 g_j tau log N / (1 + 2 g_j (1 + tau log N)).
double tau_log_derivative(double tau, double c, std::uint64_t n, const Problem& problem);
/// 4e/tau + log P_N(tau) - log(N - 1) + 4e; non-positive exactly where the
/// c = 1/e sufficient condition holds.
double window_objective(double tau, std::uint64_t n, const Problem& problem);

struct TauRoots {
  double tau0 = 0.0;
  double tau0_prime = 0.0;
  bool window_feasible = false;
  double objective_at_tau0 = 0.0;
  bool degenerate = false;
  double tau1 = 0.0;  // NaN when infeasible
  double tau2 = 0.0;  // NaN when infeasible
};

/// Needs N prime >= 3.  Bisection brackets are capped to [1e-9, 1e9]; leaving
/// them is reported as std::runtime_error.
TauRoots tau_roots(std::uint64_t n, const Problem& problem);

/// max(tau0', tau1) when the window exists, otherwise tau0' (the unconstrained
/// maximiser of N_*).
double choose_tau(const TauRoots& roots);

enum class RRule { Budget, Window };

struct SelectedParams {
  std::uint64_t m_max = 0;
  double delta = 0.0;
  std::uint64_t n_max = 0;
  TauRoots roots;
  double tau_star = 0.0;
  unsigned R = 1;
  RRule r_rule = RRule::Budget;
  double p_n = 0.0;
  double n_star = 0.0;
  /// True when N_* >= 1 so the algorithm can run.
  bool feasible = false;
  std::string reason;

  std::uint64_t m() const { return n_max * R; }
};

SelectedParams select_params(const BudgetSpec& budget, const Problem& problem, RRule rule = RRule::Budget);

/// |f|^2 / N_*^{2 alpha} (2/tau + 1 + 2 N log(N-1) / (N-1)).
double theorem1_bound(std::uint64_t n, double tau, double n_star, double alpha, double f_norm_sq);
/// C_N(tau, delta, alpha).
double corollary2_constant(std::uint64_t n, double tau, double delta, double alpha);
/// C_N |f|^2 / M^{2 alpha} exp(2 alpha / tau) P_N^{2 alpha}.
double corollary2_bound(std::uint64_t n, unsigned repetitions, double tau, double delta, const Problem& problem,
                        double f_norm_sq);

struct ConditionCheck {
  std::string name;
  double lhs;
  double rhs;
  std::string relation;  // "<", "<=", ">="
  bool holds;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  bool all_hold() const;
  const ConditionCheck& find(const std::string& name) const;
};

/// Preconditions of the main error bound for (N, R, tau, delta).  Never throws
/// on violated conditions.
ConditionReport check_conditions(std::uint64_t n, unsigned repetitions, double tau, double delta,
                                 const Problem& problem);

enum class TractabilityCase { Summable, Logarithmic, Neither };

struct TractabilityReport {
  double eta = 0.0;
  double g_d = 0.0;          // 2 sum_{j<=d} g_j^{1/(2 alpha)}
  double g_inf = 0.0;        // estimate of the infinite sum (inf when divergent)
  double tau = 0.0;          // eta / G_d
  double log_d_constant = 0.0;  // max over the dimension grid of G_d / log(d) (d >= 2)
  TractabilityCase classification = TractabilityCase::Neither;
  std::size_t inequality_checks = 0;
  std::size_t inequality_violations = 0;
  double worst_log_margin = 0.0;  // min over samples of G_d + eta log N - log P_N
};

/// Computes G_d, classifies the weight sequence and checks
/// P_N(eta/G_d) <= exp(G_d) N^eta for each N in `sample_n`.
TractabilityReport tractability_diagnostics(const WeightSequence& weights, double alpha, std::size_t dim, double eta,
                                            std::span<const std::uint64_t> sample_n = {});

std::string to_string(TractabilityCase c);
const char* to_string(RRule r);

/// Flat "#key=value" lines.
std::string to_key_value(const SelectedParams& p);
std::string to_key_value(const ConditionReport& r);

}  // namespace medlat
