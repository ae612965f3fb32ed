#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "locus/geometry.hpp"
#include "locus/noise.hpp"
#include "locus/solver.hpp"

namespace locus {

/// A configuration together with the graph built on it.
struct Instance {
  PointConfiguration configuration;
  GeometricGraph graph;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// {"dim", "seed", "points": [[...], ...]}
std::string configuration_to_json(const PointConfiguration& cfg);
PointConfiguration configuration_from_json(std::string_view text);

// {"n", "dim", "radius", "edges": [[i, j, dsq], ...]}
std::string graph_to_json(const GeometricGraph& g);
GeometricGraph graph_from_json(std::string_view text);

// {"configuration": {...}, "graph": {...}}. The graph's squared distances are
// checked against the points on load.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);

// {"n", "delta", "model", "edges": [[i, j, dtilde_sq], ...]}. "n" is optional
// on input and defaults to one past the largest vertex index.
std::string measurements_to_json(const MeasurementSet& m);
MeasurementSet measurements_from_json(std::string_view text);

/// Solver diagnostics, the rank-d spectrum, the estimated points and
/// (optionally) the Gram matrix. `metric` is written when a ground truth was
/// available.
std::string localization_to_json(const Localization& loc, bool include_gram, std::optional<double> metric = {});

}  // namespace locus
