#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "locus/error.hpp"
#include "locus/harness.hpp"
#include "locus/metrics.hpp"

using namespace locus;
using nlohmann::json;

namespace {

ExperimentConfig small_delta_sweep() {
  ExperimentConfig cfg;
  cfg.name = "small";
  cfg.kind = SweepKind::kDelta;
  cfg.n = 20;
  cfg.r = 0.7;
  cfg.values = {0.001, 0.004, 0.016};
  cfg.seeds = {0, 1};
  cfg.solver.max_iters = 3000;
  cfg.record_wall_time = false;
  return cfg;
}

}  // namespace

TEST_CASE("sweep kind names") {
  for (auto k : {SweepKind::kN, SweepKind::kR, SweepKind::kDelta}) CHECK(parse_sweep_kind(to_string(k)) == k);
  CHECK_FALSE(parse_sweep_kind("eps").has_value());
  CHECK(reference_slope(SweepKind::kN) == 2.0);
  CHECK(reference_slope(SweepKind::kR) == -4.0);
  CHECK(reference_slope(SweepKind::kDelta) == 1.0);
}

TEST_CASE("config JSON round-trip") {
  auto cfg = small_delta_sweep();
  cfg.solver.feas_tol = 3e-6;
  const auto back = experiment_config_from_json(experiment_config_to_json(cfg));
  CHECK(back.name == cfg.name);
  CHECK(back.kind == cfg.kind);
  CHECK(back.n == cfg.n);
  CHECK(back.r == cfg.r);
  CHECK(back.values == cfg.values);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.solver.feas_tol == 3e-6);
  CHECK(back.solver.max_iters == 3000);
  CHECK(back.record_wall_time == false);
}

TEST_CASE("config parsing defaults and errors") {
  const auto cfg = experiment_config_from_json(R"({"sweep": "n", "values": [50, 100, 200], "seeds": 3})");
  CHECK(cfg.kind == SweepKind::kN);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK_FALSE(cfg.r.has_value());
  CHECK(cfg.d == 2);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "n", "values": [50], "colour": 1})"), ParseError);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "k", "values": [50]})"), ParseError);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "delta", "values": [0.1]})"), InvalidArgument);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "n", "values": [50.5]})"), InvalidArgument);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "r", "values": [0.5, 0.4, 0.6]})"), InvalidArgument);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sweep": "r", "values": [0.5], "seeds": [1, 1]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(experiment_config_from_json("{"), ParseError);
}

TEST_CASE("cell parameters follow the sweep kind") {
  ExperimentConfig cfg;
  cfg.kind = SweepKind::kN;
  cfg.values = {100};
  const auto pn = cell_parameters(cfg, 100);
  CHECK(pn.n == 100);
  CHECK(pn.r == doctest::Approx(connectivity_radius(100, 2, 3.0)));
  cfg.kind = SweepKind::kR;
  const auto pr = cell_parameters(cfg, 0.55);
  CHECK(pr.r == 0.55);
  CHECK(pr.n == cfg.n);
  CHECK(pr.delta == cfg.delta);
  cfg.kind = SweepKind::kDelta;
  cfg.r = 0.6;
  const auto pd = cell_parameters(cfg, 0.02);
  CHECK(pd.delta == 0.02);
  CHECK(pd.r == 0.6);
}

TEST_CASE("cell seeds depend only on the cell coordinates") {
  auto cfg = small_delta_sweep();
  const auto s = cell_seed(cfg, 0.004, 1);
  cfg.values = {0.004};
  cfg.seeds = {1, 7};
  CHECK(cell_seed(cfg, 0.004, 1) == s);
  CHECK(cell_seed(cfg, 0.004, 2) != s);
  CHECK(cell_seed(cfg, 0.0040000001, 1) != s);
  cfg.master_seed += 1;
  CHECK(cell_seed(cfg, 0.004, 1) != s);
}

TEST_CASE("sweeps are reproducible and independent of thread count") {
  auto cfg = small_delta_sweep();
  const auto one = run_sweep(cfg);
  cfg.threads = 3;
  const auto three = run_sweep(cfg);
  CHECK(results_csv(one.records) == results_csv(three.records));
  REQUIRE(one.records.size() == 6);
  for (const auto& r : one.records) {
    CHECK(r.status == CellStatus::kOk);
    CHECK(r.wall_s == 0.0);
    CHECK(r.metric >= 0.0);
    CHECK(r.iterations > 0);
  }
  REQUIRE(one.slope.has_value());
  CHECK(one.slope->points == 3);
}

TEST_CASE("a cell reproduces its sweep record") {
  const auto cfg = small_delta_sweep();
  const auto res = run_sweep(cfg);
  const auto cell = run_cell(cfg, 0.016, 1);
  CHECK(results_csv({cell}) == results_csv({res.records.back()}));
}

TEST_CASE("disconnected cells are skipped, not failed") {
  ExperimentConfig cfg;
  cfg.kind = SweepKind::kR;
  cfg.n = 30;
  cfg.values = {0.02};
  cfg.seeds = {0};
  const auto rec = run_cell(cfg, 0.02, 0);
  CHECK(rec.status == CellStatus::kDisconnected);
  CHECK(std::isnan(rec.metric));
  const auto agg = aggregate({rec}, {0.02});
  CHECK(agg[0].count == 0);
  CHECK(agg[0].skipped == 1);
}

TEST_CASE("aggregate statistics") {
  std::vector<CellRecord> recs(4);
  const double metrics[] = {1e-3, 4e-3, 2e-2, 8e-2};
  for (int k = 0; k < 4; ++k) {
    recs[k].sweep_value = k < 2 ? 1.0 : 2.0;
    recs[k].metric = metrics[k];
  }
  const auto agg = aggregate(recs, {1.0, 2.0});
  CHECK(agg[0].count == 2);
  CHECK(agg[0].mean_metric == doctest::Approx(2.5e-3));
  CHECK(std::exp(agg[0].mean_log_metric) == doctest::Approx(2e-3));
  CHECK(agg[1].std_metric == doctest::Approx(std::sqrt(2.0) * 3e-2));
}

TEST_CASE("log-log slope recovers power laws") {
  const std::vector<double> xs = {0.5, 0.6, 0.7, 0.8};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * std::pow(x, -4.0));
  const auto fit = loglog_slope(xs, ys);
  CHECK(fit.slope == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.stderr_slope == doctest::Approx(0.0).scale(1e-10));
  CHECK(fit.points == 4);
  CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(loglog_slope({1, 2, 3}, {1, 2}), DimensionMismatch);
  CHECK_THROWS_AS(loglog_slope({1, 2, 3}, {1, -2, 3}), InvalidArgument);
  CHECK_THROWS_AS(loglog_slope({2, 2, 2}, {1, 2, 3}), InvalidArgument);
}

TEST_CASE("results CSV round-trip") {
  CellRecord a;
  a.sweep_value = 0.005;
  a.seed = 3;
  a.metric = 1.0 / 3.0;
  a.trace = 12.5;
  a.max_violation = 1e-9;
  a.iterations = 812;
  a.converged = true;
  a.wall_s = 0.25;
  CellRecord b;
  b.sweep_value = 0.01;
  b.metric = b.trace = b.max_violation = std::nan("");
  b.status = CellStatus::kDisconnected;
  const std::string csv = results_csv({a, b});
  CHECK(csv.rfind("sweep_value,seed,metric,trace,max_violation,iterations,converged,wall_s,status\n", 0) == 0);
  const auto back = parse_results_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].metric == a.metric);
  CHECK(back[0].seed == 3);
  CHECK(back[0].converged);
  CHECK(back[0].wall_s == 0.25);
  CHECK(std::isnan(back[1].metric));
  CHECK(back[1].status == CellStatus::kDisconnected);
  CHECK(results_csv(back) == csv);
  CHECK_THROWS_AS(parse_results_csv("a,b\n"), ParseError);
}

TEST_CASE("report files") {
  const auto res = run_sweep(small_delta_sweep());
  const auto dir = std::filesystem::temp_directory_path() / "locus_test_report";
  std::filesystem::remove_all(dir);
  emit_report(res, dir.string());
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "plot.svg"));
  const auto summary = json::parse(summary_json(res));
  CHECK(summary.at("cells") == 6);
  CHECK(summary.at("reference_slope") == 1.0);
  CHECK(summary.at("slope").at("points") == 3);
  CHECK(loglog_svg(res).find("<svg") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("procrustes alignment undoes a rigid motion") {
  Rng rng(3);
  const auto cfg = sample_points(40, 3, 2);
  const auto t = random_rigid_transform(3, rng);
  const Matrix moved = apply_rigid(cfg.points, t);
  CHECK((procrustes_align(cfg.points, moved) - cfg.points).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("rigidity report") {
  const auto cfg = sample_points(60, 2, 4);
  const Instance inst{cfg, build_graph(cfg, 0.6)};
  const auto doc = json::parse(rigidity_report_json(inst, StressMode::kReduced));
  CHECK(doc.at("rigidity").at("infinitesimally_rigid") == true);
  CHECK(doc.at("rigidity").at("kernel_dim") == 3);
  CHECK(doc.at("stress").at("rank") == 57);
  CHECK(doc.at("stress").at("expected_rank") == 57);
}
