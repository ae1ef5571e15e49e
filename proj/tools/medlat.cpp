// medlat: run the median lattice algorithm over budget sweeps and print the
// figure data, or inspect index sets and parameter choices.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "medlat/experiment.hpp"
#include "medlat/index_set.hpp"
#include "medlat/numeric.hpp"
#include "medlat/params.hpp"

using namespace medlat;

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int a = std::stoi(item.substr(0, dash));
      const int b = std::stoi(item.substr(dash + 1));
      for (int e = a; e <= b; ++e) out.push_back(e);
    } else {
      out.push_back(std::stoi(item));
    }
  }
  return out;
}

FrequencyIndex parse_index(const std::string& text) {
  std::vector<std::int64_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoll(item));
  return FrequencyIndex(std::move(v));
}

// "-" means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct Common {
  std::optional<double> alpha;
  std::string gamma = "1";
  std::size_t dim = 2;
  double delta = 0.01;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--alpha", c.alpha, "Smoothness alpha > 1/2");
  app.add_option("--gamma", c.gamma, "Weights: comma list (last value repeats), poly:BETA or const:VALUE")
      ->capture_default_str();
  app.add_option("--dim", c.dim, "Dimension d")->capture_default_str();
  app.add_option("--delta", c.delta, "Failure probability delta")->capture_default_str();
}

Problem make_problem(const Common& c, double default_a) {
  return Problem(SmoothnessParams(c.alpha.value_or(default_a), c.dim), WeightSequence::parse(c.gamma).weights(c.dim));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Median lattice-based L2 approximation in weighted Korobov spaces"};
  app.require_subcommand(0, 1);

  Common common;
  std::string function = "f2";
  std::string budgets = "10-18";
  std::uint64_t seed = 1;
  unsigned runs = 1;
  std::string out = "-";
  int fig = 1;
  std::string svg;
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  std::string r_rule = "budget";
  bool timing = false;
  bool parallel_budgets = false;
  std::string h0;

  app.add_option("--function", function, "Test function")->check(CLI::IsMember({"f1", "f2", "exp"}))->capture_default_str();
  add_common(app, common);
  app.add_option("--budgets", budgets, "Budget exponents k (M_max = 2^k): list and ranges, e.g. 10-18 or 10,12,14")
      ->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--runs", runs, "Independent runs per budget")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", out, "CSV output path, '-' for stdout")->capture_default_str();
  app.add_option("--fig", fig, "1: error vs M, 2: error vs N_*, 3: N_* vs M (parameters only)")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  app.add_option("--svg", svg, "Also write a log-log SVG plot");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--r-rule", r_rule, "Repetition count rule")->check(CLI::IsMember({"budget", "window"}))->capture_default_str();
  app.add_flag("--timing", timing, "Add a wall_time column (makes output machine dependent)");
  app.add_flag("--parallel-budgets", parallel_budgets, "Spread budgets over threads instead of repetitions");
  app.add_option("--h0", h0, "Frequency of the exp test function, comma list (default e_1)");

  auto* index_cmd = app.add_subcommand("index-set", "Enumerate A_d(L) and print its cardinality bounds");
  Common index_common;
  double radius = 0.0;
  double tau = 1.0;
  std::string index_out = "-";
  index_cmd->add_option("--radius", radius, "L")->required();
  add_common(*index_cmd, index_common);
  index_cmd->add_option("--tau", tau, "tau for the basic bound")->capture_default_str();
  index_cmd->add_option("--out", index_out, "CSV output path, '-' for stdout")->capture_default_str();

  auto* params_cmd = app.add_subcommand("params", "Parameter selection for one budget");
  Common params_common;
  int budget_exp = 14;
  std::optional<std::uint64_t> m_max;
  params_cmd->add_option("--budget", budget_exp, "Budget exponent k, M_max = 2^k")->capture_default_str();
  params_cmd->add_option("--m-max", m_max, "Budget M_max (overrides --budget)");
  params_cmd->add_option("--r-rule", r_rule, "Repetition count rule")->check(CLI::IsMember({"budget", "window"}));
  add_common(*params_cmd, params_common);

  CLI11_PARSE(app, argc, argv);

  try {
    const RRule rule = r_rule == "window" ? RRule::Window : RRule::Budget;

    if (index_cmd->parsed()) {
      const Problem problem = make_problem(index_common, 1.5);
      const auto set = enumerate(radius, problem.smoothness, problem.weights);
      Output o(index_out);
      set.write_csv(o.stream());
      std::fprintf(stderr, "|A|=%zu\n", set.size());
      if (radius >= 1.0) {
        const double q_grid[] = {1.1, 1.5, 2.0, 3.0};
        std::fprintf(stderr, "bound_basic(tau=%g)=%s\nbound_min_q=%s\nbound_refined=%s\n", tau,
                     format_double(bound_basic(radius, tau, problem.smoothness, problem.weights)).c_str(),
                     format_double(bound_min_q(radius, problem.smoothness, problem.weights, q_grid)).c_str(),
                     format_double(bound_refined(radius, problem.smoothness, problem.weights)).c_str());
      }
      return 0;
    }

    if (params_cmd->parsed()) {
      const Problem problem = make_problem(params_common, 1.5);
      const std::uint64_t m = m_max.value_or(std::uint64_t{1} << static_cast<unsigned>(budget_exp));
      const auto sp = select_params(BudgetSpec(m, params_common.delta), problem, rule);
      std::cout << to_key_value(sp);
      if (sp.n_max >= 3) std::cout << to_key_value(check_conditions(sp.n_max, sp.R, sp.tau_star, params_common.delta, problem));
      return 0;
    }

    ExperimentConfig cfg;
    cfg.function = parse_function_kind(function);
    cfg.alpha = common.alpha.value_or(default_alpha(cfg.function));
    cfg.weights = WeightSequence::parse(common.gamma);
    cfg.dim = common.dim;
    cfg.delta = common.delta;
    cfg.budget_exponents = parse_int_list(budgets);
    cfg.seed = seed;
    cfg.runs = runs;
    cfg.r_rule = rule;
    cfg.workers = threads;
    cfg.parallel_budgets = parallel_budgets;
    cfg.timing = timing;
    if (!h0.empty()) cfg.h0 = parse_index(h0);
    cfg.validate();

    if (fig == 3) {
      std::vector<int> grid = app.count("--budgets") ? cfg.budget_exponents : std::vector<int>{};
      const auto rows = figure3_table(cfg, grid);
      Output o(out);
      write_figure3_csv(o.stream(), cfg, rows);
      if (!svg.empty()) {
        SvgSeries s{"N_*", {}};
        for (const auto& r : rows)
          if (r.n_star > 0.0) s.points.emplace_back(static_cast<double>(r.m), r.n_star);
        std::ofstream f(svg, std::ios::binary);
        write_svg(f, std::span<const SvgSeries>(&s, 1), "M", "N_*", 0.0);
      }
      return 0;
    }

    const auto result = run_experiment(cfg);
    {
      Output o(out);
      write_csv(o.stream(), result, timing);
    }

    std::vector<std::pair<double, double>> pts;
    for (const auto& r : result.records) {
      if (!r.squared_error || *r.squared_error <= 0.0) continue;
      const double x = fig == 1 ? static_cast<double>(r.m) : r.n_star;
      pts.emplace_back(x, std::sqrt(*r.squared_error));
    }
    if (pts.size() >= 3) {
      const auto fit = fit_rate(pts);
      std::fprintf(stderr, "slope of L2 error vs %s: %.4f (R^2 = %.4f, %zu points)\n", fig == 1 ? "M" : "N_*",
                   fit.slope, fit.r_squared, fit.points);
    }
    if (!svg.empty()) {
      SvgSeries s{to_string(cfg.function), pts};
      std::ofstream f(svg, std::ios::binary);
      write_svg(f, std::span<const SvgSeries>(&s, 1), fig == 1 ? "M" : "N_*", "L2 error", cfg.alpha);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "medlat: %s\n", e.what());
    return 1;
  }
  return 0;
}
