#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "locus/geometry.hpp"

namespace locus {

enum class NoiseModel { kExact, kUniformBounded, kRssi, kTdoa, kBending, kMixture };

std::string_view to_string(NoiseModel model);
std::optional<NoiseModel> parse_noise_model(std::string_view name);

/// Measured squared distances on the edges of a graph. measured_sq is
/// parallel to edges; z_e = measured_sq[e] - true d^2_e.
struct MeasurementSet {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<double> measured_sq;
  double delta = 0.0;
  NoiseModel model = NoiseModel::kExact;

  std::size_t size() const { return edges.size(); }
};

/// Image of the configuration under the bending map, one point per row.
struct BendingEmbedding {
  Matrix ambient;  // n x (d + 1)
  double curvature_radius = 1.0;
};

MeasurementSet exact_measurements(const GeometricGraph& g);

/// z ~ Uniform(-delta, delta) per edge; measured values are clipped at zero.
MeasurementSet uniform_bounded(const GeometricGraph& g, double delta, std::uint64_t seed);

/// Received-signal-strength ranging: z = -d^4 eps_e with eps_e ~ U(-eps, eps).
/// The recorded budget is r^4 eps.
MeasurementSet rssi_noise(const GeometricGraph& g, double eps, std::uint64_t seed);

/// Time-difference-of-arrival ranging: z = -d^2 eps_e, budget r^2 eps.
MeasurementSet tdoa_noise(const GeometricGraph& g, double eps, std::uint64_t seed);

/// T(t) = (R sin(t1/R), t2, ..., td, R (1 - cos(t1/R))). Requires R >= 1.
BendingEmbedding bending_map(const PointConfiguration& cfg, double curvature_radius);

/// R = max{1, r^2 / sqrt(delta)}.
double bending_radius(double r, double delta);

/// d^2 - dtilde^2 for two points whose first coordinates differ by `gap`
/// under curvature radius R: gap^2 - (2 R sin(gap / 2R))^2, which is >= 0.
double bending_deficit(double gap, double curvature_radius);

/// Measurements ||T(x_i) - T(x_j)||^2 with R = bending_radius(r, delta).
/// Throws InternalError if an edge leaves the [-delta, 0] error window.
MeasurementSet bending_adversary(const GeometricGraph& g, const PointConfiguration& cfg, double delta);

/// Per edge: with probability eps_mix, z ~ Normal(0, (delta/2)^2), otherwise
/// the bending-adversary error. Gaussian draws are not truncated.
MeasurementSet mixture_noise(const GeometricGraph& g, const PointConfiguration& cfg, double delta,
                             double eps_mix, std::uint64_t seed);

/// Per-edge errors measured_sq - true_sq against the source graph.
std::vector<double> measurement_errors(const MeasurementSet& m, const GeometricGraph& g);

}  // namespace locus
