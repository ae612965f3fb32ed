#include "locus/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "locus/error.hpp"

namespace locus {

using nlohmann::json;

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

// Accessors that turn nlohmann type errors into ParseError with the key name.
const json& field(const json& obj, const char* key, const char* what) {
  if (!obj.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string(what) + ": missing \"" + key + "\"");
  return *it;
}

template <typename T>
T get(const json& obj, const char* key, const char* what) {
  const json& v = field(obj, key, what);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + ": \"" + key + "\" has the wrong type");
  }
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows, const char* what) {
  if (!rows.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n > 0 && rows[0].is_array() ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw ParseError(std::string(what) + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!row[k].is_number()) throw ParseError(std::string(what) + ": non-numeric entry");
      m(i, k) = row[k].get<double>();
    }
  }
  return m;
}

struct EdgeTriples {
  std::vector<Edge> edges;
  std::vector<double> values;
};

json edge_triples(const std::vector<Edge>& edges, const std::vector<double>& values) {
  json out = json::array();
  for (std::size_t e = 0; e < edges.size(); ++e) out.push_back({edges[e].i, edges[e].j, values[e]});
  return out;
}

EdgeTriples edge_triples_from(const json& arr, const char* what) {
  if (!arr.is_array()) throw ParseError(std::string(what) + ": \"edges\" must be an array");
  EdgeTriples out;
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
        !t[2].is_number()) {
      throw ParseError(std::string(what) + ": each edge must be [i, j, value]");
    }
    out.edges.push_back({t[0].get<int>(), t[1].get<int>()});
    out.values.push_back(t[2].get<double>());
  }
  return out;
}

json configuration_json(const PointConfiguration& cfg) {
  return {{"dim", cfg.dim}, {"seed", cfg.seed}, {"points", matrix_rows(cfg.points)}};
}

PointConfiguration configuration_from(const json& j) {
  const char* what = "configuration";
  const int dim = get<int>(j, "dim", what);
  Matrix pts = matrix_from_rows(field(j, "points", what), what);
  if (pts.rows() > 0 && pts.cols() != dim) throw ParseError("configuration: points do not have \"dim\" coordinates");
  const auto seed = j.contains("seed") ? get<std::uint64_t>(j, "seed", what) : 0;
  return make_configuration(std::move(pts), seed);
}

json graph_json(const GeometricGraph& g) {
  return {{"n", g.n}, {"dim", g.dim}, {"radius", g.radius}, {"edges", edge_triples(g.edges, g.true_sq_dist)}};
}

GeometricGraph graph_from(const json& j) {
  const char* what = "graph";
  GeometricGraph g;
  g.n = get<int>(j, "n", what);
  g.dim = j.contains("dim") ? get<int>(j, "dim", what) : 0;
  g.radius = get<double>(j, "radius", what);
  auto triples = edge_triples_from(field(j, "edges", what), what);
  g.edges = std::move(triples.edges);
  g.true_sq_dist = std::move(triples.values);
  if (g.n < 0) throw ParseError("graph: \"n\" must be >= 0");
  for (const auto& e : g.edges) {
    if (e.i < 0 || e.j >= g.n || e.i >= e.j) throw ParseError("graph: edges must satisfy 0 <= i < j < n");
  }
  return g;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error while writing " + path);
}

std::string configuration_to_json(const PointConfiguration& cfg) { return configuration_json(cfg).dump(2); }

PointConfiguration configuration_from_json(std::string_view text) {
  return configuration_from(parse(text, "configuration"));
}

std::string graph_to_json(const GeometricGraph& g) { return graph_json(g).dump(2); }

GeometricGraph graph_from_json(std::string_view text) { return graph_from(parse(text, "graph")); }

std::string instance_to_json(const Instance& inst) {
  return json{{"configuration", configuration_json(inst.configuration)}, {"graph", graph_json(inst.graph)}}.dump(2);
}

Instance instance_from_json(std::string_view text) {
  const json j = parse(text, "instance");
  Instance inst;
  inst.configuration = configuration_from(field(j, "configuration", "instance"));
  inst.graph = graph_from(field(j, "graph", "instance"));
  if (inst.graph.dim == 0) inst.graph.dim = inst.configuration.dim;
  check_graph_matches(inst.graph, inst.configuration);
  const Matrix& pts = inst.configuration.points;
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    const auto [i, k] = inst.graph.edges[e];
    const double dsq = (pts.row(i) - pts.row(k)).squaredNorm();
    if (std::abs(dsq - inst.graph.true_sq_dist[e]) > 1e-9 * std::max(1.0, dsq)) {
      throw InvalidArgument("instance: stored squared distance of edge (" + std::to_string(i) + ", " +
                            std::to_string(k) + ") does not match the points");
    }
  }
  return inst;
}

std::string measurements_to_json(const MeasurementSet& m) {
  return json{{"n", m.n},
              {"delta", m.delta},
              {"model", std::string(to_string(m.model))},
              {"edges", edge_triples(m.edges, m.measured_sq)}}
      .dump(2);
}

MeasurementSet measurements_from_json(std::string_view text) {
  const char* what = "measurements";
  const json j = parse(text, what);
  MeasurementSet m;
  m.delta = get<double>(j, "delta", what);
  const auto model_name = get<std::string>(j, "model", what);
  const auto model = parse_noise_model(model_name);
  if (!model) throw ParseError("measurements: unknown noise model \"" + model_name + "\"");
  m.model = *model;
  auto triples = edge_triples_from(field(j, "edges", what), what);
  m.edges = std::move(triples.edges);
  m.measured_sq = std::move(triples.values);
  int largest = -1;
  for (const auto& e : m.edges) largest = std::max({largest, e.i, e.j});
  m.n = j.contains("n") ? get<int>(j, "n", what) : largest + 1;
  if (largest >= m.n) throw ParseError("measurements: edge index exceeds \"n\"");
  return m;
}

std::string localization_to_json(const Localization& loc, bool include_gram, std::optional<double> metric) {
  const GramSolution& g = loc.gram;
  json retained = json::array();
  for (Eigen::Index k = 0; k < loc.estimate.retained.size(); ++k) retained.push_back(loc.estimate.retained[k]);
  json j = {{"n", g.q.rows()},
            {"dim", loc.estimate.points.cols()},
            {"objective", g.objective},
            {"dual_bound", g.dual_bound},
            {"max_violation", g.max_violation},
            {"min_eigenvalue", g.min_eigenvalue},
            {"iterations", g.iterations},
            {"converged", g.converged},
            {"runtime_seconds", g.runtime_seconds},
            {"final_penalty", g.final_penalty},
            {"spectrum", {{"retained", retained}, {"discarded", loc.estimate.discarded}}},
            {"points", matrix_rows(loc.estimate.points)}};
  if (metric) j["metric"] = *metric;
  if (include_gram) j["gram"] = matrix_rows(g.q);
  return j.dump(2);
}

}  // namespace locus
