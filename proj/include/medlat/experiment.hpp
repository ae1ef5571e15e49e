#pragma once

// Budget sweeps of the median lattice algorithm on test functions with known
// spectra: exact L2 errors, rate fits, CSV and SVG output.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medlat/korobov.hpp"
#include "medlat/median_approx.hpp"
#include "medlat/params.hpp"

namespace medlat {

enum class FunctionKind { F1, F2, ExpMode };

FunctionKind parse_function_kind(const std::string& name);
std::string to_string(FunctionKind kind);
/// 3/2 for f1 and the exponential mode, 5/2 for f2.
double default_alpha(FunctionKind kind);

struct ExperimentConfig {
  FunctionKind function = FunctionKind::F2;
  double alpha = 2.5;
  WeightSequence weights = WeightSequence::constant(1.0);
  std::size_t dim = 2;
  double delta = 0.01;
  std::vector<int> budget_exponents = {10, 11, 12, 13, 14, 15, 16, 17, 18};
  std::uint64_t seed = 1;
  unsigned runs = 1;
  FrequencyIndex h0;  // exp mode only; defaults to (1, 0, ..., 0)
  RRule r_rule = RRule::Budget;
  unsigned workers = 1;
  bool parallel_budgets = false;
  bool timing = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  Problem problem() const;
  SpectralOracle oracle() const;
};

struct ExperimentRecord {
  std::uint64_t m_max = 0;
  unsigned run = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  std::uint64_t n = 0;
  unsigned R = 0;
  std::uint64_t m = 0;
  double tau_star = 0.0;
  double n_star = 0.0;
  std::uint64_t index_set_size = 0;
  std::uint64_t eval_count = 0;
  std::optional<double> squared_error;
  std::optional<double> truncation_error;
  std::optional<double> theorem1_bound;
  std::optional<double> wall_time;

  bool operator==(const ExperimentRecord&) const = default;
};

struct ErrorBreakdown {
  double truncation;  // |f|^2 - sum_A |f^(h)|^2
  double estimation;  // sum_A |c_h - f^(h)|^2
  double total;
};

/// Squared L2 error by Parseval.  Negative totals within 1e-12 (relative to |f|^2)
/// are rounded to 0; larger ones mean the oracle is inconsistent and throw.
ErrorBreakdown squared_error_breakdown(const SpectralOracle& f, const MedianApproximation& approx);
double exact_squared_error(const SpectralOracle& f, const MedianApproximation& approx);

struct ExperimentResult {
  std::vector<std::string> header;  // "#key=value" lines
  std::vector<ExperimentRecord> records;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& os, const ExperimentResult& result, bool with_wall_time);
/// Reads records back; comment lines go to `header`.
ExperimentResult read_csv(std::istream& is);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// OLS of log(err) on log(x).  Needs >= 3 points with positive coordinates.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct Figure3Row {
  std::uint64_t m_max;
  std::uint64_t n;
  unsigned R;
  std::uint64_t m;
  double tau_star;
  double n_star;
};

/// Parameter selection only, over `exponents` (default 10..32).
std::vector<Figure3Row> figure3_table(const ExperimentConfig& config, std::span<const int> exponents = {});
void write_figure3_csv(std::ostream& os, const ExperimentConfig& config, std::span<const Figure3Row> rows);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Log-log scatter.  When `reference_alpha` > 0, adds M^{-a/2}, M^{-3a/4} and M^{-a}
/// lines through the first point of the first series.
void write_svg(std::ostream& os, std::span<const SvgSeries> series, const std::string& x_label,
               const std::string& y_label, double reference_alpha);

}  // namespace medlat
