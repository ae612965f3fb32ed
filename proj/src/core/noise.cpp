#include "locus/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locus/error.hpp"
#include "locus/rng.hpp"

namespace locus {

namespace {

MeasurementSet skeleton(const GeometricGraph& g, double delta, NoiseModel model) {
  MeasurementSet m;
  m.n = g.n;
  m.edges = g.edges;
  m.measured_sq.resize(g.edges.size());
  m.delta = delta;
  m.model = model;
  return m;
}

double clip(double v) { return std::max(0.0, v); }

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and >= 0, got " << v;
    throw InvalidArgument(msg.str());
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be finite and > 0, got " << v;
    throw InvalidArgument(msg.str());
  }
}

void require_same_source(const GeometricGraph& g, const PointConfiguration& cfg) {
  if (g.n != cfg.size()) throw DimensionMismatch("graph and configuration have different vertex counts");
}

// Multiplicative ranging error z = -d^power * eps_e.
MeasurementSet ranging_noise(const GeometricGraph& g, double eps, std::uint64_t seed, int power, NoiseModel model) {
  require_nonnegative(eps, "eps");
  MeasurementSet m = skeleton(g, std::pow(g.radius, power) * eps, model);
  Rng rng(seed);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double dsq = g.true_sq_dist[e];
    const double eps_e = eps > 0.0 ? rng.uniform(-eps, eps) : 0.0;
    const double scale = power == 4 ? dsq * dsq : dsq;
    m.measured_sq[e] = clip(dsq - scale * eps_e);
  }
  return m;
}

}  // namespace

std::string_view to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::kExact: return "exact";
    case NoiseModel::kUniformBounded: return "uniform";
    case NoiseModel::kRssi: return "rssi";
    case NoiseModel::kTdoa: return "tdoa";
    case NoiseModel::kBending: return "bending";
    case NoiseModel::kMixture: return "mixture";
  }
  return "unknown";
}

std::optional<NoiseModel> parse_noise_model(std::string_view name) {
  for (auto m : {NoiseModel::kExact, NoiseModel::kUniformBounded, NoiseModel::kRssi, NoiseModel::kTdoa,
                 NoiseModel::kBending, NoiseModel::kMixture}) {
    if (name == to_string(m)) return m;
  }
  if (name == "uniform-bounded") return NoiseModel::kUniformBounded;
  return std::nullopt;
}

MeasurementSet exact_measurements(const GeometricGraph& g) {
  MeasurementSet m = skeleton(g, 0.0, NoiseModel::kExact);
  m.measured_sq = g.true_sq_dist;
  return m;
}

MeasurementSet uniform_bounded(const GeometricGraph& g, double delta, std::uint64_t seed) {
  require_positive(delta, "delta");
  MeasurementSet m = skeleton(g, delta, NoiseModel::kUniformBounded);
  Rng rng(seed);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    m.measured_sq[e] = clip(g.true_sq_dist[e] + rng.uniform(-delta, delta));
  }
  return m;
}

MeasurementSet rssi_noise(const GeometricGraph& g, double eps, std::uint64_t seed) {
  return ranging_noise(g, eps, seed, 4, NoiseModel::kRssi);
}

MeasurementSet tdoa_noise(const GeometricGraph& g, double eps, std::uint64_t seed) {
  return ranging_noise(g, eps, seed, 2, NoiseModel::kTdoa);
}

BendingEmbedding bending_map(const PointConfiguration& cfg, double curvature_radius) {
  if (!(curvature_radius >= 1.0) || !std::isfinite(curvature_radius)) {
    throw InvalidArgument("bending_map: curvature radius must be finite and >= 1");
  }
  const int n = cfg.size();
  const int d = cfg.dim;
  const double R = curvature_radius;
  BendingEmbedding out;
  out.curvature_radius = R;
  out.ambient.resize(n, d + 1);
  for (int i = 0; i < n; ++i) {
    const double angle = cfg.points(i, 0) / R;
    out.ambient(i, 0) = R * std::sin(angle);
    for (int k = 1; k < d; ++k) out.ambient(i, k) = cfg.points(i, k);
    // 1 - cos(a) = 2 sin^2(a/2) avoids cancellation for small angles.
    const double half = std::sin(0.5 * angle);
    out.ambient(i, d) = 2.0 * R * half * half;
  }
  return out;
}

double bending_radius(double r, double delta) {
  require_positive(r, "radius");
  require_positive(delta, "delta");
  return std::max(1.0, r * r / std::sqrt(delta));
}

double bending_deficit(double gap, double curvature_radius) {
  // |T(x_i) - T(x_j)|^2 restricted to the bent plane is the squared chord
  // (2R sin(gap/2R))^2; the remaining coordinates cancel in the difference.
  const double chord = 2.0 * curvature_radius * std::sin(std::abs(gap) / (2.0 * curvature_radius));
  const double a = std::abs(gap);
  // Chord never exceeds arc length; clamp rounding at the tiny-gap end.
  return std::max(0.0, (a - chord) * (a + chord));
}

MeasurementSet bending_adversary(const GeometricGraph& g, const PointConfiguration& cfg, double delta) {
  require_same_source(g, cfg);
  const double R = bending_radius(g.radius, delta);
  MeasurementSet m = skeleton(g, delta, NoiseModel::kBending);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [i, j] = g.edges[e];
    const double deficit = bending_deficit(cfg.points(i, 0) - cfg.points(j, 0), R);
    const double dsq = g.true_sq_dist[e];
    m.measured_sq[e] = clip(dsq - deficit);
    const double z = m.measured_sq[e] - dsq;
    if (z > 0.0 || -z > delta) {
      std::ostringstream msg;
      msg << "bending_adversary: edge (" << i << "," << j << ") error " << z << " outside [-" << delta << ", 0]";
      throw InternalError(msg.str());
    }
  }
  return m;
}

MeasurementSet mixture_noise(const GeometricGraph& g, const PointConfiguration& cfg, double delta, double eps_mix,
                             std::uint64_t seed) {
  if (!(eps_mix >= 0.0 && eps_mix <= 1.0)) throw InvalidArgument("mixture_noise: eps_mix must lie in [0, 1]");
  MeasurementSet m = bending_adversary(g, cfg, delta);
  m.model = NoiseModel::kMixture;
  Rng rng(seed);
  const double sigma = 0.5 * delta;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (rng.bernoulli(eps_mix)) m.measured_sq[e] = clip(g.true_sq_dist[e] + rng.normal(0.0, sigma));
  }
  return m;
}

std::vector<double> measurement_errors(const MeasurementSet& m, const GeometricGraph& g) {
  if (m.edges != g.edges) throw DimensionMismatch("measurement set and graph have different edge lists");
  std::vector<double> z(m.size());
  for (std::size_t e = 0; e < m.size(); ++e) z[e] = m.measured_sq[e] - g.true_sq_dist[e];
  return z;
}

}  // namespace locus
