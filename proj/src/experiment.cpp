#include "medlat/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "medlat/index_set.hpp"
#include "medlat/numeric.hpp"
#include "medlat/parallel.hpp"

namespace medlat {

FunctionKind parse_function_kind(const std::string& name) {
  if (name == "f1") return FunctionKind::F1;
  if (name == "f2") return FunctionKind::F2;
  if (name == "exp") return FunctionKind::ExpMode;
  throw std::invalid_argument("unknown test function '" + name + "' (expected f1, f2 or exp)");
}

std::string to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::F1:
      return "f1";
    case FunctionKind::F2:
      return "f2";
    case FunctionKind::ExpMode:
      return "exp";
  }
  return "f1";
}

double default_alpha(FunctionKind kind) { return kind == FunctionKind::F2 ? 2.5 : 1.5; }

void ExperimentConfig::validate() const {
  if (!(alpha > 0.5)) throw std::invalid_argument("alpha must exceed 1/2");
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  if (budget_exponents.empty()) throw std::invalid_argument("no budgets given");
  for (int e : budget_exponents)
    if (e < 1 || e > 62) throw std::invalid_argument("budget exponent out of range: " + std::to_string(e));
  if (function == FunctionKind::ExpMode && h0.dim() != 0 && h0.dim() != dim)
    throw std::invalid_argument("h0 dimension differs from --dim");
}

Problem ExperimentConfig::problem() const { return Problem(SmoothnessParams(alpha, dim), weights.weights(dim)); }

SpectralOracle ExperimentConfig::oracle() const {
  switch (function) {
    case FunctionKind::F1:
      return test_function_f1(dim);
    case FunctionKind::F2:
      return test_function_f2(dim);
    case FunctionKind::ExpMode: {
      FrequencyIndex h = h0;
      if (h.dim() == 0) {
        h = FrequencyIndex(std::vector<std::int64_t>(dim, 0));
        h[0] = 1;
      }
      return cosine_pair(h);
    }
  }
  throw std::logic_error("unhandled function kind");
}

ErrorBreakdown squared_error_breakdown(const SpectralOracle& f, const MedianApproximation& approx) {
  const double norm = f.l2_norm_sq();
  CompensatedSum trunc;
  CompensatedSum est;
  trunc += norm;
  const auto& set = approx.index_set();
  const auto coeffs = approx.coefficients();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto exact = f.coefficient(set[i]);
    trunc += -std::norm(exact);
    est += std::norm(coeffs[i] - exact);
  }
  double t = trunc.value();
  const double tol = 1e-12 * std::max(1.0, norm);
  if (t < 0.0) {
    if (t < -tol)
      throw std::runtime_error("Parseval inconsistency: truncation error " + format_double(t) +
                               " is negative; oracle norm and coefficients disagree");
    t = 0.0;
  }
  return {t, est.value(), t + est.value()};
}

double exact_squared_error(const SpectralOracle& f, const MedianApproximation& approx) {
  return squared_error_breakdown(f, approx).total;
}

namespace {

std::string join_exponents(std::span<const int> e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s;
}

void append_prefixed(std::vector<std::string>& out, const std::string& block, const std::string& prefix) {
  std::istringstream is(block);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] == '#') out.push_back("#" + prefix + "." + line.substr(1));
}

std::vector<std::string> provenance(const ExperimentConfig& c, const SpectralOracle& f, double korobov_norm) {
  std::vector<std::string> h;
  h.push_back("#function=" + to_string(c.function));
  h.push_back("#oracle=" + f.name());
  h.push_back("#alpha=" + format_double(c.alpha));
  h.push_back("#dim=" + std::to_string(c.dim));
  h.push_back("#gamma=" + c.weights.describe());
  h.push_back("#delta=" + format_double(c.delta));
  h.push_back("#seed=" + std::to_string(c.seed));
  h.push_back("#runs=" + std::to_string(c.runs));
  h.push_back("#budget_exponents=" + join_exponents(c.budget_exponents));
  h.push_back(std::string("#r_rule=") + to_string(c.r_rule));
  h.push_back("#l2_norm_sq=" + format_double(f.l2_norm_sq()));
  h.push_back("#korobov_norm_sq=" + format_double(korobov_norm));
  h.push_back("#korobov_norm_radius=" + std::to_string(kKorobovNormRadius));
  return h;
}

struct BudgetOutcome {
  std::vector<std::string> header;
  std::vector<ExperimentRecord> records;
};

BudgetOutcome run_budget(const ExperimentConfig& c, const Problem& problem, const SpectralOracle& f,
                         double korobov_norm, int exponent, unsigned workers) {
  BudgetOutcome out;
  const std::uint64_t m_max = std::uint64_t{1} << static_cast<unsigned>(exponent);
  const auto sp = select_params(BudgetSpec(m_max, c.delta), problem, c.r_rule);
  const std::string prefix = "M" + std::to_string(m_max);
  append_prefixed(out.header, to_key_value(sp), prefix);
  if (sp.n_max >= 3)
    append_prefixed(out.header, to_key_value(check_conditions(sp.n_max, sp.R, sp.tau_star, c.delta, problem)),
                    prefix);

  const RealFunction fn = [&f](std::span<const double> x) { return f.evaluate(x); };
  for (unsigned rep = 0; rep < c.runs; ++rep) {
    ExperimentRecord rec;
    rec.m_max = m_max;
    rec.run = rep;
    rec.seed = hash_combine(hash_combine(c.seed, m_max), rep);
    rec.feasible = sp.feasible;
    rec.n = sp.n_max;
    rec.R = sp.R;
    rec.m = sp.m();
    rec.tau_star = sp.tau_star;
    rec.n_star = sp.n_star;
    if (sp.feasible) {
      const auto start = std::chrono::steady_clock::now();
      const auto params = AlgorithmParams::make(sp.n_max, sp.R, sp.tau_star, problem, rec.seed);
      RunOptions ro;
      ro.workers = workers;
      const auto approx = run(fn, params, problem, ro);
      const auto err = squared_error_breakdown(f, approx);
      rec.index_set_size = approx.index_set().size();
      rec.eval_count = approx.eval_count();
      rec.squared_error = err.total;
      rec.truncation_error = err.truncation;
      rec.theorem1_bound = theorem1_bound(sp.n_max, sp.tau_star, sp.n_star, c.alpha, korobov_norm);
      if (c.timing)
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Problem problem = config.problem();
  const SpectralOracle f = config.oracle();
  const double korobov_norm = f.korobov_norm_sq(problem.smoothness, problem.weights, kKorobovNormRadius);

  ExperimentResult result;
  result.header = provenance(config, f, korobov_norm);
  const auto& exps = config.budget_exponents;
  std::vector<BudgetOutcome> outcomes(exps.size());
  if (config.parallel_budgets) {
    parallel_for(exps.size(), config.workers,
                 [&](std::size_t i) { outcomes[i] = run_budget(config, problem, f, korobov_norm, exps[i], 1); });
  } else {
    for (std::size_t i = 0; i < exps.size(); ++i)
      outcomes[i] = run_budget(config, problem, f, korobov_norm, exps[i], config.workers);
  }
  for (auto& o : outcomes) {
    result.header.insert(result.header.end(), o.header.begin(), o.header.end());
    result.records.insert(result.records.end(), o.records.begin(), o.records.end());
  }
  return result;
}

namespace {

constexpr const char* kColumns[] = {"M_max", "run", "seed", "feasible", "N", "R", "M", "tau_star", "N_star",
                                    "index_set_size", "eval_count", "squared_L2_error", "truncation_error",
                                    "theorem1_bound"};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad number in CSV: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("bad integer in CSV: '" + s + "'");
  return v;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

void write_csv(std::ostream& os, const ExperimentResult& result, bool with_wall_time) {
  for (const auto& h : result.header) os << h << '\n';
  for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "," : "") << kColumns[i];
  if (with_wall_time) os << ",wall_time";
  os << '\n';
  for (const auto& r : result.records) {
    os << r.m_max << ',' << r.run << ',' << r.seed << ',' << (r.feasible ? 1 : 0) << ',' << r.n << ',' << r.R << ','
       << r.m << ',' << format_double(r.tau_star) << ',' << format_double(r.n_star) << ',' << r.index_set_size << ','
       << r.eval_count << ',' << opt(r.squared_error) << ',' << opt(r.truncation_error) << ','
       << opt(r.theorem1_bound);
    if (with_wall_time) os << ',' << opt(r.wall_time);
    os << '\n';
  }
}

ExperimentResult read_csv(std::istream& is) {
  ExperimentResult result;
  std::string line;
  bool have_columns = false;
  bool wall = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      result.header.push_back(line);
      continue;
    }
    const auto fields = split(line);
    if (!have_columns) {
      if (fields.size() < std::size(kColumns)) throw std::invalid_argument("CSV column header too short");
      for (std::size_t i = 0; i < std::size(kColumns); ++i)
        if (fields[i] != kColumns[i]) throw std::invalid_argument("unexpected CSV column '" + fields[i] + "'");
      wall = fields.size() > std::size(kColumns) && fields[std::size(kColumns)] == "wall_time";
      have_columns = true;
      continue;
    }
    const std::size_t expected = std::size(kColumns) + (wall ? 1 : 0);
    if (fields.size() != expected) throw std::invalid_argument("CSV row has " + std::to_string(fields.size()) + " fields");
    ExperimentRecord r;
    r.m_max = parse_u64(fields[0]);
    r.run = static_cast<unsigned>(parse_u64(fields[1]));
    r.seed = parse_u64(fields[2]);
    r.feasible = parse_u64(fields[3]) != 0;
    r.n = parse_u64(fields[4]);
    r.R = static_cast<unsigned>(parse_u64(fields[5]));
    r.m = parse_u64(fields[6]);
    r.tau_star = parse_double(fields[7]);
    r.n_star = parse_double(fields[8]);
    r.index_set_size = parse_u64(fields[9]);
    r.eval_count = parse_u64(fields[10]);
    r.squared_error = parse_opt(fields[11]);
    r.truncation_error = parse_opt(fields[12]);
    r.theorem1_bound = parse_opt(fields[13]);
    if (wall) r.wall_time = parse_opt(fields[14]);
    result.records.push_back(r);
  }
  if (!have_columns) throw std::invalid_argument("CSV has no column header");
  return result;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate needs at least 3 points");
  const auto n = static_cast<double>(points.size());
  double sx = 0.0;
  double sy = 0.0;
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_rate needs positive coordinates");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate needs at least two distinct x values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = points.size();
  return fit;
}

std::vector<Figure3Row> figure3_table(const ExperimentConfig& config, std::span<const int> exponents) {
  std::vector<int> grid(exponents.begin(), exponents.end());
  if (grid.empty())
    for (int e = 10; e <= 32; ++e) grid.push_back(e);
  const Problem problem = config.problem();
  std::vector<Figure3Row> rows;
  for (int e : grid) {
    const std::uint64_t m_max = std::uint64_t{1} << static_cast<unsigned>(e);
    const auto sp = select_params(BudgetSpec(m_max, config.delta), problem, config.r_rule);
    rows.push_back({m_max, sp.n_max, sp.R, sp.m(), sp.tau_star, sp.n_star});
  }
  return rows;
}

void write_figure3_csv(std::ostream& os, const ExperimentConfig& config, std::span<const Figure3Row> rows) {
  os << "#figure=3\n"
     << "#alpha=" << format_double(config.alpha) << '\n'
     << "#dim=" << config.dim << '\n'
     << "#gamma=" << config.weights.describe() << '\n'
     << "#delta=" << format_double(config.delta) << '\n'
     << "#r_rule=" << to_string(config.r_rule) << '\n'
     << "M_max,N,R,M,tau_star,N_star\n";
  for (const auto& r : rows)
    os << r.m_max << ',' << r.n << ',' << r.R << ',' << r.m << ',' << format_double(r.tau_star) << ','
       << format_double(r.n_star) << '\n';
}

void write_svg(std::ostream& os, std::span<const SvgSeries> series, const std::string& x_label,
               const std::string& y_label, double reference_alpha) {
  constexpr double kW = 640.0;
  constexpr double kH = 480.0;
  constexpr double kPad = 60.0;
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0 && y > 0.0)) continue;
      x0 = std::min(x0, std::log10(x));
      x1 = std::max(x1, std::log10(x));
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  if (!(x0 <= x1)) {
    x0 = 0.0;
    x1 = 1.0;
    y0 = 0.0;
    y1 = 1.0;
  }
  // Room for the reference lines below the data.
  const double span_x = std::max(x1 - x0, 1e-3);
  if (reference_alpha > 0.0) y0 = std::min(y0, y1 - reference_alpha * span_x - 0.5);
  const double span_y = std::max(y1 - y0, 1e-3);
  auto px = [&](double lx) { return kPad + (lx - x0) / span_x * (kW - 2 * kPad); };
  auto py = [&](double ly) { return kH - kPad - (ly - y0) / span_y * (kH - 2 * kPad); };
  char buf[160];

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                kPad, kPad, kW - 2 * kPad, kH - 2 * kPad);
  os << buf;
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">1e%d</text>\n",
                  px(d), kH - kPad + 16, d);
    os << buf;
  }
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">1e%d</text>\n",
                  kPad - 4, py(d) + 4, d);
    os << buf;
  }
  os << "<text x=\"320\" y=\"470\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n"
     << "<text x=\"16\" y=\"240\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 240)\">"
     << y_label << "</text>\n";

  if (reference_alpha > 0.0 && !series.empty() && !series.front().points.empty()) {
    const auto [rx, ry] = series.front().points.front();
    const double lx = std::log10(rx);
    const double ly = std::log10(ry);
    const double rates[] = {reference_alpha / 2.0, 0.75 * reference_alpha, reference_alpha};
    const char* names[] = {"slope -a/2", "slope -3a/4", "slope -a"};
    const char* dashes[] = {"2,3", "6,3", "10,4"};
    for (int i = 0; i < 3; ++i) {
      const double ye = ly - rates[i] * (x1 - lx);
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"gray\" stroke-dasharray=\"%s\"/>\n",
                    px(lx), py(ly), px(x1), py(ye), dashes[i]);
      os << buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"gray\">%s</text>\n",
                    px(x1) - 40, py(ye) - 4, names[i]);
      os << buf;
    }
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    for (const auto& [x, y] : series[s].points) {
      if (!(x > 0.0 && y > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3.5\" fill=\"%s\"/>\n", px(std::log10(x)),
                    py(std::log10(y)), color);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">%s</text>\n", kPad + 8,
                  kPad + 16 + 14.0 * static_cast<double>(s), color, series[s].label.c_str());
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace medlat
