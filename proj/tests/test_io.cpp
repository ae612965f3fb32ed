#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "locus/error.hpp"
#include "locus/io.hpp"

using namespace locus;
using nlohmann::json;

TEST_CASE("configuration round-trip is exact") {
  const auto cfg = sample_points(37, 3, 123);
  const auto back = configuration_from_json(configuration_to_json(cfg));
  CHECK(back.dim == 3);
  CHECK(back.seed == 123);
  CHECK(back.points == cfg.points);
}

TEST_CASE("configuration JSON uses the documented keys") {
  const auto doc = json::parse(configuration_to_json(sample_points(2, 2, 5)));
  CHECK(doc.at("dim") == 2);
  CHECK(doc.at("seed") == 5);
  CHECK(doc.at("points").size() == 2);
  CHECK(doc.at("points")[0].size() == 2);
}

TEST_CASE("graph round-trip is exact") {
  const auto cfg = sample_points(50, 2, 1);
  const auto g = build_graph(cfg, 0.3);
  const auto back = graph_from_json(graph_to_json(g));
  CHECK(back.n == g.n);
  CHECK(back.radius == g.radius);
  CHECK(back.edges == g.edges);
  CHECK(back.true_sq_dist == g.true_sq_dist);
  const auto doc = json::parse(graph_to_json(g));
  CHECK(doc.at("edges")[0].size() == 3);
}

TEST_CASE("instance round-trip and consistency check") {
  const auto cfg = sample_points(30, 2, 3);
  const Instance inst{cfg, build_graph(cfg, 0.4)};
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.configuration.points == cfg.points);
  CHECK(back.graph.edges == inst.graph.edges);

  auto doc = json::parse(instance_to_json(inst));
  doc["graph"]["edges"][0][2] = doc["graph"]["edges"][0][2].get<double>() + 0.01;
  CHECK_THROWS_AS(instance_from_json(doc.dump()), InvalidArgument);
}

TEST_CASE("measurement round-trip is exact") {
  const auto cfg = sample_points(40, 2, 4);
  const auto g = build_graph(cfg, 0.4);
  const auto m = mixture_noise(g, cfg, 0.01, 0.2, 8);
  const auto back = measurements_from_json(measurements_to_json(m));
  CHECK(back.n == m.n);
  CHECK(back.delta == m.delta);
  CHECK(back.model == NoiseModel::kMixture);
  CHECK(back.edges == m.edges);
  CHECK(back.measured_sq == m.measured_sq);
}

TEST_CASE("measurement n defaults to one past the largest index") {
  const auto m = measurements_from_json(R"({"delta": 0.1, "model": "uniform", "edges": [[0, 4, 0.2], [1, 2, 0.3]]})");
  CHECK(m.n == 5);
  CHECK(m.model == NoiseModel::kUniformBounded);
  CHECK(m.measured_sq == std::vector<double>{0.2, 0.3});
}

TEST_CASE("malformed documents raise parse errors") {
  CHECK_THROWS_AS(configuration_from_json("{"), ParseError);
  CHECK_THROWS_AS(configuration_from_json("[]"), ParseError);
  CHECK_THROWS_AS(configuration_from_json(R"({"dim": 2, "seed": 0})"), ParseError);
  CHECK_THROWS_AS(configuration_from_json(R"({"dim": 2, "seed": 0, "points": [[0.1]]})"), ParseError);
  CHECK_THROWS_AS(configuration_from_json(R"({"dim": 2, "seed": 0, "points": [[0.1, "a"]]})"), ParseError);
  CHECK_THROWS_AS(graph_from_json(R"({"n": 2, "radius": 1, "edges": [[1, 0, 0.5]]})"), ParseError);
  CHECK_THROWS_AS(measurements_from_json(R"({"delta": 0.1, "model": "laplace", "edges": []})"), ParseError);
  CHECK_THROWS_AS(measurements_from_json(R"({"n": 2, "delta": 0.1, "model": "exact", "edges": [[0, 3, 1]]})"),
                  ParseError);
}

TEST_CASE("points outside the hypercube are rejected on load") {
  CHECK_THROWS_AS(configuration_from_json(R"({"dim": 1, "seed": 0, "points": [[0.7]]})"), InvalidArgument);
}

TEST_CASE("file helpers report the path") {
  const auto dir = std::filesystem::temp_directory_path() / "locus_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "cfg.json").string();
  write_text_file(path, "hello");
  CHECK(read_text_file(path) == "hello");
  try {
    read_text_file((dir / "missing.json").string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("localization JSON carries solver diagnostics") {
  const auto cfg = sample_points(12, 2, 2);
  const auto g = build_graph(cfg, 0.8);
  const auto loc = localize(exact_measurements(g), 12, 2);
  const auto doc = json::parse(localization_to_json(loc, true, 1e-7));
  for (const char* key : {"n", "dim", "objective", "dual_bound", "max_violation", "min_eigenvalue", "iterations",
                          "converged", "runtime_seconds", "final_penalty", "spectrum", "points", "metric", "gram"}) {
    CHECK_MESSAGE(doc.contains(key), key);
  }
  CHECK(doc.at("points").size() == 12);
  CHECK(doc.at("gram").size() == 12);
  const auto lean = json::parse(localization_to_json(loc, false));
  CHECK_FALSE(lean.contains("gram"));
  CHECK_FALSE(lean.contains("metric"));
}
