#include "locus/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include "json.hpp"
#include "locus/error.hpp"
#include "locus/metrics.hpp"
#include "locus/rng.hpp"

namespace locus {

using nlohmann::json;

namespace {

constexpr const char* kCsvHeader = "sweep_value,seed,metric,trace,max_violation,iterations,converged,wall_s,status";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError("results CSV line " + std::to_string(line) + ": bad number \"" + s + "\"");
  }
  return v;
}

json solver_params_json(const SolverParams& p) {
  return {{"feas_tol", p.feas_tol},
          {"obj_tol", p.obj_tol},
          {"gap_tol", p.gap_tol},
          {"max_iters", p.max_iters},
          {"penalty", p.penalty},
          {"adaptive_penalty", p.adaptive_penalty},
          {"penalty_update_interval", p.penalty_update_interval},
          {"penalty_factor", p.penalty_factor},
          {"penalty_balance_ratio", p.penalty_balance_ratio},
          {"relaxation", p.relaxation},
          {"check_interval", p.check_interval},
          {"time_limit_seconds", p.time_limit_seconds}};
}

template <typename T>
void read_key(const json& j, const char* key, T& out, const char* what) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + ": \"" + key + "\" has the wrong type");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ParseError(std::string(what) + ": unknown key \"" + item.key() + "\"");
  }
}

SolverParams solver_params_from(const json& j) {
  const char* what = "solver";
  if (!j.is_object()) throw ParseError("solver: expected an object");
  reject_unknown(j,
                 {"feas_tol", "obj_tol", "gap_tol", "max_iters", "penalty", "adaptive_penalty",
                  "penalty_update_interval", "penalty_factor", "penalty_balance_ratio", "relaxation",
                  "check_interval", "time_limit_seconds"},
                 what);
  SolverParams p;
  read_key(j, "feas_tol", p.feas_tol, what);
  read_key(j, "obj_tol", p.obj_tol, what);
  read_key(j, "gap_tol", p.gap_tol, what);
  read_key(j, "max_iters", p.max_iters, what);
  read_key(j, "penalty", p.penalty, what);
  read_key(j, "adaptive_penalty", p.adaptive_penalty, what);
  read_key(j, "penalty_update_interval", p.penalty_update_interval, what);
  read_key(j, "penalty_factor", p.penalty_factor, what);
  read_key(j, "penalty_balance_ratio", p.penalty_balance_ratio, what);
  read_key(j, "relaxation", p.relaxation, what);
  read_key(j, "check_interval", p.check_interval, what);
  read_key(j, "time_limit_seconds", p.time_limit_seconds, what);
  return p;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kN: return "n";
    case SweepKind::kR: return "r";
    case SweepKind::kDelta: return "delta";
  }
  return "delta";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name) {
  if (name == "n") return SweepKind::kN;
  if (name == "r") return SweepKind::kR;
  if (name == "delta") return SweepKind::kDelta;
  return std::nullopt;
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::kOk: return "ok";
    case CellStatus::kDisconnected: return "disconnected";
    case CellStatus::kFailed: return "failed";
  }
  return "failed";
}

std::optional<CellStatus> parse_cell_status(std::string_view name) {
  if (name == "ok") return CellStatus::kOk;
  if (name == "disconnected") return CellStatus::kDisconnected;
  if (name == "failed") return CellStatus::kFailed;
  return std::nullopt;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 1) throw InvalidArgument("experiment: d must be >= 1");
  if (cfg.values.empty()) throw InvalidArgument("experiment: no sweep values");
  if (cfg.seeds.empty()) throw InvalidArgument("experiment: seed list is empty");
  for (std::size_t k = 0; k < cfg.values.size(); ++k) {
    if (!std::isfinite(cfg.values[k]) || cfg.values[k] <= 0.0) {
      throw InvalidArgument("experiment: sweep values must be positive and finite");
    }
    if (k > 0 && !(cfg.values[k] > cfg.values[k - 1])) {
      throw InvalidArgument("experiment: sweep values must be strictly increasing");
    }
  }
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    throw InvalidArgument("experiment: duplicate seeds");
  }
  if (cfg.kind == SweepKind::kN) {
    for (double v : cfg.values) {
      if (v != std::floor(v) || v < cfg.d + 2) throw InvalidArgument("experiment: n values must be integers >= d + 2");
    }
  } else if (cfg.n < cfg.d + 2) {
    throw InvalidArgument("experiment: n must be >= d + 2");
  }
  if (cfg.kind == SweepKind::kDelta && !cfg.r) throw InvalidArgument("experiment: delta sweep needs a fixed r");
  if (cfg.r && (!(*cfg.r > 0.0) || !std::isfinite(*cfg.r))) throw InvalidArgument("experiment: r must be positive");
  if (!(cfg.alpha > 0.0)) throw InvalidArgument("experiment: alpha must be positive");
  if (!(cfg.delta >= 0.0) || !std::isfinite(cfg.delta)) throw InvalidArgument("experiment: delta must be >= 0");
  if (!(cfg.eps_mix >= 0.0 && cfg.eps_mix <= 1.0)) throw InvalidArgument("experiment: eps_mix must lie in [0, 1]");
  if (cfg.threads < 1) throw InvalidArgument("experiment: threads must be >= 1");
}

ExperimentConfig experiment_config_from_json(std::string_view text) {
  const char* what = "experiment config";
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("experiment config: expected an object");
  reject_unknown(j,
                 {"name", "sweep", "d", "n", "r", "alpha", "delta", "eps_mix", "values", "seeds", "master_seed",
                  "solver", "threads", "record_wall_time"},
                 what);
  ExperimentConfig cfg;
  read_key(j, "name", cfg.name, what);
  std::string kind = "delta";
  read_key(j, "sweep", kind, what);
  const auto parsed = parse_sweep_kind(kind);
  if (!parsed) throw ParseError("experiment config: \"sweep\" must be one of n, r, delta");
  cfg.kind = *parsed;
  read_key(j, "d", cfg.d, what);
  read_key(j, "n", cfg.n, what);
  if (j.contains("r") && !j["r"].is_null()) {
    double r = 0.0;
    read_key(j, "r", r, what);
    cfg.r = r;
  }
  read_key(j, "alpha", cfg.alpha, what);
  read_key(j, "delta", cfg.delta, what);
  read_key(j, "eps_mix", cfg.eps_mix, what);
  read_key(j, "values", cfg.values, what);
  if (j.contains("seeds")) {
    if (j["seeds"].is_number_unsigned()) {
      const auto count = j["seeds"].get<std::uint64_t>();
      cfg.seeds.clear();
      for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(s);
    } else {
      read_key(j, "seeds", cfg.seeds, what);
    }
  }
  read_key(j, "master_seed", cfg.master_seed, what);
  if (j.contains("solver")) cfg.solver = solver_params_from(j["solver"]);
  read_key(j, "threads", cfg.threads, what);
  read_key(j, "record_wall_time", cfg.record_wall_time, what);
  validate(cfg);
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j = {{"name", cfg.name},
            {"sweep", std::string(to_string(cfg.kind))},
            {"d", cfg.d},
            {"n", cfg.n},
            {"alpha", cfg.alpha},
            {"delta", cfg.delta},
            {"eps_mix", cfg.eps_mix},
            {"values", cfg.values},
            {"seeds", cfg.seeds},
            {"master_seed", cfg.master_seed},
            {"solver", solver_params_json(cfg.solver)},
            {"threads", cfg.threads},
            {"record_wall_time", cfg.record_wall_time}};
  j["r"] = cfg.r ? json(*cfg.r) : json(nullptr);
  return j.dump(2);
}

CellParameters cell_parameters(const ExperimentConfig& cfg, double value) {
  CellParameters p{cfg.n, cfg.r.value_or(0.0), cfg.delta};
  switch (cfg.kind) {
    case SweepKind::kN:
      p.n = static_cast<int>(value);
      p.r = cfg.r ? *cfg.r : connectivity_radius(p.n, cfg.d, cfg.alpha);
      break;
    case SweepKind::kR:
      p.r = value;
      break;
    case SweepKind::kDelta:
      p.delta = value;
      break;
  }
  return p;
}

std::uint64_t cell_seed(const ExperimentConfig& cfg, double value, std::uint64_t seed) {
  std::uint64_t h = splitmix64(cfg.master_seed ^ splitmix64(static_cast<std::uint64_t>(cfg.kind) + 1));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(value));
  return splitmix64(h ^ splitmix64(seed + 0x5851f42d4c957f2dULL));
}

CellRecord run_cell(const ExperimentConfig& cfg, double value, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CellRecord rec;
  rec.sweep_value = value;
  rec.seed = seed;
  rec.metric = rec.trace = rec.max_violation = kNaN;
  try {
    const CellParameters p = cell_parameters(cfg, value);
    const Rng root(cell_seed(cfg, value, seed));
    const PointConfiguration points = sample_points(p.n, cfg.d, root.split(1).seed());
    const GeometricGraph g = build_graph(points, p.r, NeighborSearch::kGrid);
    if (!is_connected(g)) {
      rec.status = CellStatus::kDisconnected;
      rec.detail = "graph is disconnected";
    } else {
      const MeasurementSet m = mixture_noise(g, points, p.delta, cfg.eps_mix, root.split(2).seed());
      const Localization loc = localize(m, p.n, cfg.d, cfg.solver);
      rec.metric = error_metric(points.points, loc.estimate.points);
      rec.trace = loc.gram.objective;
      rec.max_violation = loc.gram.max_violation;
      rec.iterations = loc.gram.iterations;
      rec.converged = loc.gram.converged;
    }
  } catch (const std::exception& e) {
    rec.status = CellStatus::kFailed;
    rec.detail = e.what();
  }
  if (cfg.record_wall_time) rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  SweepResult res;
  res.config = cfg;
  const std::size_t total = cfg.values.size() * cfg.seeds.size();
  res.records.resize(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      res.records[k] = run_cell(cfg, cfg.values[k / cfg.seeds.size()], cfg.seeds[k % cfg.seeds.size()]);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(res.records[k], finished, total);
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(cfg.threads, total));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  res.aggregates = aggregate(res.records, cfg.values);
  std::vector<double> xs, ys;
  for (const auto& a : res.aggregates) {
    if (a.count > 0 && std::isfinite(a.mean_log_metric)) {
      xs.push_back(a.sweep_value);
      ys.push_back(std::exp(a.mean_log_metric));
    }
  }
  if (xs.size() >= 3) res.slope = loglog_slope(xs, ys);
  return res;
}

std::vector<CellAggregate> aggregate(const std::vector<CellRecord>& records, const std::vector<double>& values) {
  std::vector<CellAggregate> out;
  for (double v : values) {
    CellAggregate a;
    a.sweep_value = v;
    std::vector<double> metrics;
    for (const auto& r : records) {
      if (r.sweep_value != v) continue;
      if (r.status == CellStatus::kOk) metrics.push_back(r.metric);
      else ++a.skipped;
    }
    a.count = static_cast<int>(metrics.size());
    if (a.count == 0) {
      a.mean_metric = a.std_metric = a.mean_log_metric = a.std_log_metric = kNaN;
    } else {
      double sum = 0.0, sum_log = 0.0;
      for (double m : metrics) {
        sum += m;
        sum_log += std::log(m);
      }
      a.mean_metric = sum / a.count;
      a.mean_log_metric = sum_log / a.count;
      double ss = 0.0, ss_log = 0.0;
      for (double m : metrics) {
        ss += (m - a.mean_metric) * (m - a.mean_metric);
        ss_log += (std::log(m) - a.mean_log_metric) * (std::log(m) - a.mean_log_metric);
      }
      a.std_metric = a.count > 1 ? std::sqrt(ss / (a.count - 1)) : 0.0;
      a.std_log_metric = a.count > 1 ? std::sqrt(ss_log / (a.count - 1)) : 0.0;
    }
    out.push_back(a);
  }
  return out;
}

SlopeFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DimensionMismatch("loglog_slope: xs and ys differ in length");
  if (xs.size() < 3) throw InvalidArgument("loglog_slope: need at least 3 points");
  const auto m = static_cast<double>(xs.size());
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0) || !std::isfinite(xs[k]) || !std::isfinite(ys[k])) {
      throw InvalidArgument("loglog_slope: inputs must be positive and finite");
    }
    lx.push_back(std::log(xs[k]));
    ly.push_back(std::log(ys[k]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("loglog_slope: xs are all equal");
  SlopeFit fit;
  fit.points = static_cast<int>(lx.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double res = ly[k] - fit.intercept - fit.slope * lx[k];
    ssr += res * res;
  }
  fit.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
  return fit;
}

double reference_slope(SweepKind kind) {
  switch (kind) {
    case SweepKind::kN: return 2.0;
    case SweepKind::kR: return -4.0;
    case SweepKind::kDelta: return 1.0;
  }
  return 1.0;
}

std::string results_csv(const std::vector<CellRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += fmt(r.sweep_value) + "," + std::to_string(r.seed) + "," + fmt(r.metric) + "," + fmt(r.trace) + "," +
           fmt(r.max_violation) + "," + std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," +
           fmt(r.wall_s) + "," + std::string(to_string(r.status)) + "\n";
  }
  return out;
}

std::vector<CellRecord> parse_results_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("results CSV: unexpected header");
  std::vector<CellRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 9) throw ParseError("results CSV line " + std::to_string(lineno) + ": expected 9 columns");
    CellRecord r;
    r.sweep_value = parse_double(cols[0], lineno);
    try {
      std::size_t used = 0;
      r.seed = std::stoull(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("seed");
      r.iterations = std::stoi(cols[5], &used);
      if (used != cols[5].size()) throw std::invalid_argument("iterations");
    } catch (const std::logic_error&) {
      throw ParseError("results CSV line " + std::to_string(lineno) + ": bad integer field");
    }
    r.metric = parse_double(cols[2], lineno);
    r.trace = parse_double(cols[3], lineno);
    r.max_violation = parse_double(cols[4], lineno);
    if (cols[6] != "0" && cols[6] != "1") throw ParseError("results CSV line " + std::to_string(lineno) + ": bad converged flag");
    r.converged = cols[6] == "1";
    r.wall_s = parse_double(cols[7], lineno);
    const auto status = parse_cell_status(cols[8]);
    if (!status) throw ParseError("results CSV line " + std::to_string(lineno) + ": unknown status \"" + cols[8] + "\"");
    r.status = *status;
    out.push_back(r);
  }
  return out;
}

std::string summary_json(const SweepResult& res) {
  json aggregates = json::array();
  for (const auto& a : res.aggregates) {
    aggregates.push_back({{"sweep_value", a.sweep_value},
                          {"count", a.count},
                          {"skipped", a.skipped},
                          {"mean_metric", a.mean_metric},
                          {"std_metric", a.std_metric},
                          {"mean_log_metric", a.mean_log_metric},
                          {"std_log_metric", a.std_log_metric}});
  }
  json failures = json::array();
  int converged = 0, ok = 0;
  for (const auto& r : res.records) {
    if (r.status == CellStatus::kOk) {
      ++ok;
      converged += r.converged ? 1 : 0;
    } else {
      failures.push_back({{"sweep_value", r.sweep_value}, {"seed", r.seed},
                          {"status", std::string(to_string(r.status))}, {"detail", r.detail}});
    }
  }
  json j = {{"config", json::parse(experiment_config_to_json(res.config))},
            {"cells", res.records.size()},
            {"solved", ok},
            {"converged", converged},
            {"skipped", failures},
            {"aggregates", aggregates},
            {"reference_slope", reference_slope(res.config.kind)}};
  if (res.slope) {
    j["slope"] = {{"slope", res.slope->slope},
                  {"stderr", res.slope->stderr_slope},
                  {"intercept", res.slope->intercept},
                  {"points", res.slope->points}};
  } else {
    j["slope"] = nullptr;
  }
  return j.dump(2);
}

std::string loglog_svg(const SweepResult& res) {
  struct Pt {
    double lx, ly, lo, hi;
  };
  std::vector<Pt> pts;
  for (const auto& a : res.aggregates) {
    if (a.count == 0 || !std::isfinite(a.mean_log_metric)) continue;
    pts.push_back({std::log10(a.sweep_value), a.mean_log_metric / std::log(10.0),
                   (a.mean_log_metric - a.std_log_metric) / std::log(10.0),
                   (a.mean_log_metric + a.std_log_metric) / std::log(10.0)});
  }
  if (pts.empty()) return {};

  const double ref = reference_slope(res.config.kind);
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.lx;
    cy += p.ly;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());

  double xmin = pts.front().lx, xmax = pts.back().lx;
  if (xmax - xmin < 1e-9) {
    xmin -= 0.1;
    xmax += 0.1;
  }
  const double xpad = 0.05 * (xmax - xmin);
  xmin -= xpad;
  xmax += xpad;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& p : pts) {
    ymin = std::min(ymin, p.lo);
    ymax = std::max(ymax, p.hi);
  }
  for (double x : {xmin, xmax}) {
    ymin = std::min(ymin, cy + ref * (x - cx));
    ymax = std::max(ymax, cy + ref * (x - cx));
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 0.1;
    ymax += 0.1;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double width = 640, height = 440, left = 80, right = 20, top = 40, bottom = 60;
  auto sx = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * (width - left - right); };
  auto sy = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * (height - top - bottom); };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  const std::string xlabel = res.config.kind == SweepKind::kDelta ? "delta" : std::string(to_string(res.config.kind));
  const std::string title = (res.config.name.empty() ? std::string("sweep") : res.config.name) + ": d(X, X^) vs " + xlabel;
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << " (log scale)</text>\n";
  svg << "<text x=\"18\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (top + height - bottom) / 2 << ")\">d(X, X^) (log scale)</text>\n";

  for (const auto& a : res.aggregates) {
    if (a.count == 0) continue;
    const double x = sx(std::log10(a.sweep_value));
    svg << "<line x1=\"" << x << "\" y1=\"" << height - bottom << "\" x2=\"" << x << "\" y2=\"" << height - bottom + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">"
        << short_fmt(a.sweep_value) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double ly = ymin + (ymax - ymin) * k / 4.0;
    const double y = sy(ly);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << short_fmt(std::pow(10.0, ly))
        << "</text>\n";
  }

  svg << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(cy + ref * (xmin - cx)) << "\" x2=\"" << sx(xmax) << "\" y2=\""
      << sy(cy + ref * (xmax - cx)) << "\" stroke=\"gray\" stroke-width=\"1.5\"/>\n";
  if (res.slope) {
    const double l10 = std::log(10.0);
    auto fit_y = [&](double lx) { return (res.slope->intercept + res.slope->slope * lx * l10) / l10; };
    svg << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(fit_y(xmin)) << "\" x2=\"" << sx(xmax) << "\" y2=\""
        << sy(fit_y(xmax)) << "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (const auto& p : pts) {
    const double x = sx(p.lx);
    svg << "<line x1=\"" << x << "\" y1=\"" << sy(p.lo) << "\" x2=\"" << x << "\" y2=\"" << sy(p.hi)
        << "\" stroke=\"black\"/>\n";
    for (double ly : {p.lo, p.hi}) {
      svg << "<line x1=\"" << x - 4 << "\" y1=\"" << sy(ly) << "\" x2=\"" << x + 4 << "\" y2=\"" << sy(ly)
          << "\" stroke=\"black\"/>\n";
    }
    svg << "<circle cx=\"" << x << "\" cy=\"" << sy(p.ly) << "\" r=\"3.5\" fill=\"crimson\"/>\n";
  }

  const double lx0 = left + 12, ly0 = top + 16;
  svg << "<line x1=\"" << lx0 << "\" y1=\"" << ly0 << "\" x2=\"" << lx0 + 24 << "\" y2=\"" << ly0
      << "\" stroke=\"gray\" stroke-width=\"1.5\"/>\n";
  svg << "<text x=\"" << lx0 + 30 << "\" y=\"" << ly0 + 4 << "\">reference slope " << short_fmt(ref) << "</text>\n";
  if (res.slope) {
    svg << "<line x1=\"" << lx0 << "\" y1=\"" << ly0 + 18 << "\" x2=\"" << lx0 + 24 << "\" y2=\"" << ly0 + 18
        << "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << lx0 + 30 << "\" y=\"" << ly0 + 22 << "\">fit " << short_fmt(res.slope->slope)
        << " +/- " << short_fmt(res.slope->stderr_slope) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_report(const SweepResult& res, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  write_text_file((base / "results.csv").string(), results_csv(res.records));
  write_text_file((base / "summary.json").string(), summary_json(res));
  const std::string svg = loglog_svg(res);
  const auto plot = base / "plot.svg";
  if (!svg.empty()) {
    write_text_file(plot.string(), svg);
  } else {
    std::filesystem::remove(plot, ec);
  }
}

Matrix procrustes_align(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) throw DimensionMismatch("procrustes_align: shapes differ");
  if (x.rows() == 0) throw InvalidArgument("procrustes_align: empty configuration");
  const Eigen::RowVectorXd mx = x.colwise().mean();
  const Eigen::RowVectorXd mh = xhat.colwise().mean();
  const Matrix xc = x.rowwise() - mx;
  const Matrix hc = xhat.rowwise() - mh;
  Eigen::JacobiSVD<Matrix> svd(hc.transpose() * xc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix rotation = svd.matrixU() * svd.matrixV().transpose();
  Matrix out = hc * rotation;
  out.rowwise() += mx;
  return out;
}

std::string rigidity_report_json(const Instance& inst, StressMode mode) {
  const PointConfiguration& cfg = inst.configuration;
  const GeometricGraph& g = inst.graph;
  check_graph_matches(g, cfg);
  const int n = g.n, d = cfg.dim;
  json j = {{"n", n}, {"dim", d}, {"radius", g.radius}, {"edges", g.edge_count()}, {"connected", is_connected(g)}};

  const RigidityTest t = infinitesimal_rigidity_test(rigidity_matrix(g, cfg), d, n);
  j["rigidity"] = {{"kernel_dim", t.kernel_dim},
                   {"expected_kernel_dim", t.expected_kernel_dim},
                   {"infinitesimally_rigid", t.rigid},
                   {"rank", t.rank},
                   {"sigma_max", t.sigma_max}};

  const StressMatrix sm = stress_matrix(g, cfg, mode);
  const StressSpectrum s = stress_spectrum(sm);
  const Matrix omega(sm.omega);
  const double scale = std::max(s.sigma_max, 1e-300);
  j["stress"] = {{"mode", std::string(to_string(mode))},
                 {"cliques", sm.cliques.size()},
                 {"skipped_small_cliques", sm.skipped_small},
                 {"rank_deficient_cliques", sm.rank_deficient},
                 {"rank", s.rank},
                 {"expected_rank", n - d - 1},
                 {"sigma_max", s.sigma_max},
                 {"sigma_min_nonzero", s.sigma_min_nonzero},
                 {"min_eigenvalue", s.min_eigenvalue},
                 {"psd_margin", s.min_eigenvalue / scale},
                 {"kernel_residual", (omega * cfg.points).cwiseAbs().maxCoeff() / scale},
                 {"ones_residual", omega.rowwise().sum().cwiseAbs().maxCoeff() / scale}};
  return j.dump(2);
}

}  // namespace locus
