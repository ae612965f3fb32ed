#include "locus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "locus/error.hpp"
#include "locus/rng.hpp"

namespace locus {

namespace {

double squared_distance(const Matrix& pts, int i, int j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < pts.cols(); ++k) {
    const double diff = pts(i, k) - pts(j, k);
    s += diff * diff;
  }
  return s;
}

void check_hypercube(const Matrix& points) {
  if (!points.allFinite()) throw NonFiniteInput("point coordinates must be finite");
  if (points.size() > 0 && (points.minCoeff() < -0.5 || points.maxCoeff() > 0.5)) {
    throw InvalidArgument("point coordinates must lie in [-0.5, 0.5]");
  }
}

std::vector<Edge> brute_force_edges(const Matrix& pts, double r2) {
  std::vector<Edge> edges;
  const int n = static_cast<int>(pts.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (squared_distance(pts, i, j) <= r2) edges.push_back({i, j});
    }
  }
  return edges;
}

// Uniform grid with cell side r: every neighbor of a point lies in one of the
// 3^d cells surrounding its own.
std::vector<Edge> grid_edges(const Matrix& pts, double r, double r2) {
  const int n = static_cast<int>(pts.rows());
  const int d = static_cast<int>(pts.cols());
  const std::int64_t per_axis = static_cast<std::int64_t>(std::ceil(1.0 / r)) + 1;

  auto cell_coord = [&](int i, int k) {
    auto c = static_cast<std::int64_t>(std::floor((pts(i, k) + 0.5) / r));
    return std::clamp<std::int64_t>(c, 0, per_axis - 1);
  };
  auto linear_id = [&](const std::vector<std::int64_t>& c) {
    std::int64_t id = 0;
    for (int k = 0; k < d; ++k) id = id * per_axis + c[k];
    return id;
  };

  std::unordered_map<std::int64_t, std::vector<int>> buckets;
  std::vector<std::int64_t> c(d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) c[k] = cell_coord(i, k);
    buckets[linear_id(c)].push_back(i);
  }

  int offsets = 1;
  for (int k = 0; k < d; ++k) offsets *= 3;

  std::vector<Edge> edges;
  std::vector<std::int64_t> nb(d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) c[k] = cell_coord(i, k);
    for (int o = 0; o < offsets; ++o) {
      int code = o;
      bool inside = true;
      for (int k = 0; k < d; ++k) {
        nb[k] = c[k] + (code % 3) - 1;
        code /= 3;
        if (nb[k] < 0 || nb[k] >= per_axis) inside = false;
      }
      if (!inside) continue;
      auto it = buckets.find(linear_id(nb));
      if (it == buckets.end()) continue;
      for (int j : it->second) {
        if (j > i && squared_distance(pts, i, j) <= r2) edges.push_back({i, j});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

Matrix dense_laplacian(const GeometricGraph& g) {
  Matrix lap = Matrix::Zero(g.n, g.n);
  for (const auto& e : g.edges) {
    lap(e.i, e.i) += 1.0;
    lap(e.j, e.j) += 1.0;
    lap(e.i, e.j) -= 1.0;
    lap(e.j, e.i) -= 1.0;
  }
  return lap;
}

}  // namespace

double Box::volume() const {
  if (lower.size() != upper.size()) throw DimensionMismatch("box bounds differ in dimension");
  double v = 1.0;
  for (Eigen::Index k = 0; k < lower.size(); ++k) v *= std::max(0.0, upper[k] - lower[k]);
  return v;
}

PointConfiguration sample_points(int n, int d, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_points: n must be >= 1");
  if (d < 1) throw InvalidArgument("sample_points: d must be >= 1");
  Rng rng(seed);
  PointConfiguration cfg;
  cfg.dim = d;
  cfg.seed = seed;
  cfg.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) cfg.points(i, k) = rng.uniform(-0.5, 0.5);
  }
  return cfg;
}

PointConfiguration make_configuration(Matrix points, std::uint64_t seed) {
  if (points.rows() < 1 || points.cols() < 1) throw InvalidArgument("configuration needs n >= 1 and d >= 1");
  check_hypercube(points);
  PointConfiguration cfg;
  cfg.dim = static_cast<int>(points.cols());
  cfg.seed = seed;
  cfg.points = std::move(points);
  return cfg;
}

GeometricGraph build_graph(const PointConfiguration& cfg, double r, NeighborSearch search) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("build_graph: radius must be positive and finite");
  const double r2 = r * r;
  GeometricGraph g;
  g.n = cfg.size();
  g.dim = cfg.dim;
  g.radius = r;
  g.edges = search == NeighborSearch::kGrid ? grid_edges(cfg.points, r, r2) : brute_force_edges(cfg.points, r2);
  g.true_sq_dist.reserve(g.edges.size());
  for (const auto& e : g.edges) g.true_sq_dist.push_back(squared_distance(cfg.points, e.i, e.j));
  return g;
}

GeometricGraph graph_from_edges(const PointConfiguration& cfg, std::vector<Edge> edges, double radius) {
  const int n = cfg.size();
  for (auto& e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") out of range for n = " +
                            std::to_string(n));
    }
    if (e.i == e.j) throw InvalidArgument("self-loop at vertex " + std::to_string(e.i));
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) throw InvalidArgument("duplicate edge");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidArgument("graph radius must be finite and >= 0");

  GeometricGraph g;
  g.n = n;
  g.dim = cfg.dim;
  g.edges = std::move(edges);
  g.true_sq_dist.reserve(g.edges.size());
  double longest = 0.0;
  for (const auto& e : g.edges) {
    g.true_sq_dist.push_back(squared_distance(cfg.points, e.i, e.j));
    longest = std::max(longest, g.true_sq_dist.back());
  }
  g.radius = radius > 0.0 ? radius : std::sqrt(longest);
  return g;
}

void check_graph_matches(const GeometricGraph& g, const PointConfiguration& cfg) {
  if (g.n != cfg.size() || g.dim != cfg.dim) {
    throw DimensionMismatch("graph (n=" + std::to_string(g.n) + ", d=" + std::to_string(g.dim) +
                            ") does not match configuration (n=" + std::to_string(cfg.size()) +
                            ", d=" + std::to_string(cfg.dim) + ")");
  }
  if (g.true_sq_dist.size() != g.edges.size()) throw DimensionMismatch("graph distance list does not match edge list");
  for (const auto& e : g.edges) {
    if (e.i < 0 || e.j >= g.n || e.i >= e.j) throw InvalidArgument("graph has an invalid edge");
  }
}

double unit_ball_volume(int d) {
  if (d < 1) throw InvalidArgument("unit_ball_volume: d must be >= 1");
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double connectivity_radius(int n, int d, double alpha) {
  if (n < 2 || d < 1) throw InvalidArgument("connectivity_radius: need n >= 2 and d >= 1");
  return alpha * std::pow(std::log(static_cast<double>(n)) / n, 1.0 / d);
}

std::vector<int> degrees(const GeometricGraph& g) {
  std::vector<int> deg(g.n, 0);
  for (const auto& e : g.edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

bool is_connected(const GeometricGraph& g) {
  if (g.n <= 1) return true;
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& e : g.edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(g.n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        frontier.push(w);
      }
    }
  }
  return visited == g.n;
}

SparseMatrix laplacian(const GeometricGraph& g) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edges.size());
  for (const auto& e : g.edges) {
    trip.emplace_back(e.i, e.i, 1.0);
    trip.emplace_back(e.j, e.j, 1.0);
    trip.emplace_back(e.i, e.j, -1.0);
    trip.emplace_back(e.j, e.i, -1.0);
  }
  SparseMatrix lap(g.n, g.n);
  lap.setFromTriplets(trip.begin(), trip.end());
  return lap;
}

double laplacian_lambda2_dense(const GeometricGraph& g) {
  if (g.n < 2 || !is_connected(g)) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_laplacian(g), Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()[1]);
}

// Lanczos on the Laplacian restricted to the complement of the all-ones
// vector, with full reorthogonalization and explicit restarts from the
// current Ritz vector. Converged when the Ritz residual is below
// rel_tol * lambda.
double laplacian_lambda2_iterative(const GeometricGraph& g, double rel_tol) {
  if (g.n < 2 || !is_connected(g)) return 0.0;
  const int n = g.n;
  const SparseMatrix lap = laplacian(g);
  const int steps = std::min(n - 1, 120);
  const int max_restarts = 200;
  // Gershgorin bound on the largest eigenvalue.
  const auto deg = degrees(g);
  const double scale = 2.0 * std::max(1, *std::max_element(deg.begin(), deg.end()));

  auto deflate = [n](Vector& v) { v.array() -= v.sum() / n; };

  Rng rng(0x1a2b3c4dULL);
  Vector start(n);
  for (int i = 0; i < n; ++i) start[i] = rng.normal(0.0, 1.0);

  double theta = 0.0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    deflate(start);
    Matrix basis(n, steps);
    Vector alpha(steps), beta(steps);
    basis.col(0) = start / start.norm();
    int m = steps;
    for (int k = 0; k < steps; ++k) {
      Vector w = lap * basis.col(k);
      deflate(w);
      alpha[k] = basis.col(k).dot(w);
      // Two passes of classical Gram-Schmidt against the basis and the
      // all-ones vector keep the basis orthonormal and inside the complement.
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
        deflate(w);
      }
      beta[k] = w.norm();
      if (k + 1 == steps) break;
      if (beta[k] <= 1e-10 * scale) {
        m = k + 1;
        break;
      }
      basis.col(k + 1) = w / beta[k];
    }

    Matrix tri = Matrix::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      tri(k, k) = alpha[k];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(tri);
    theta = es.eigenvalues()[0];
    Vector ritz = basis.leftCols(m) * es.eigenvectors().col(0);
    ritz /= ritz.norm();
    Vector residual = lap * ritz - theta * ritz;
    deflate(residual);
    if (residual.norm() <= rel_tol * std::max(theta, 1e-300)) return std::max(0.0, theta);
    start = ritz;
  }
  return std::max(0.0, theta);
}

double laplacian_lambda2(const GeometricGraph& g) {
  return g.n <= kDenseLambda2Limit ? laplacian_lambda2_dense(g) : laplacian_lambda2_iterative(g);
}

GraphDiagnostics diagnostics(const GeometricGraph& g) {
  GraphDiagnostics out;
  const auto deg = degrees(g);
  if (!deg.empty()) {
    const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
    out.min_degree = *lo;
    out.max_degree = *hi;
  }
  out.connected = is_connected(g);
  out.lambda2_laplacian = out.connected ? laplacian_lambda2(g) : 0.0;
  if (g.dim >= 1) {
    const double scale = unit_ball_volume(g.dim) * g.n * std::pow(g.radius, g.dim);
    out.degree_band = {0.5 * scale, 1.5 * scale};
    out.degrees_in_band = std::all_of(deg.begin(), deg.end(), [&](int k) {
      return k >= out.degree_band.lower && k <= out.degree_band.upper;
    });
  }
  return out;
}

bool interior_degrees_in_band(const GeometricGraph& g, const PointConfiguration& cfg) {
  check_graph_matches(g, cfg);
  const GraphDiagnostics diag = diagnostics(g);
  const auto deg = degrees(g);
  const double limit = 0.5 - g.radius;
  for (int i = 0; i < g.n; ++i) {
    if (cfg.points.row(i).cwiseAbs().maxCoeff() > limit) continue;
    if (deg[i] < diag.degree_band.lower || deg[i] > diag.degree_band.upper) return false;
  }
  return true;
}

int region_count(const PointConfiguration& cfg, const Box& region) {
  if (region.lower.size() != cfg.dim || region.upper.size() != cfg.dim) {
    throw DimensionMismatch("region_count: box dimension " + std::to_string(region.lower.size()) +
                            " does not match configuration dimension " + std::to_string(cfg.dim));
  }
  if ((region.lower.array() < -0.5).any() || (region.upper.array() > 0.5).any()) {
    throw InvalidArgument("region_count: region must lie inside the hypercube");
  }
  int count = 0;
  for (int i = 0; i < cfg.size(); ++i) {
    bool inside = true;
    for (int k = 0; k < cfg.dim && inside; ++k) {
      const double x = cfg.points(i, k);
      inside = x >= region.lower[k] && x <= region.upper[k];
    }
    count += inside ? 1 : 0;
  }
  return count;
}

double sampling_interval_halfwidth(int n, double volume, double c) {
  return std::sqrt(2.0 * c * n * volume * std::log(static_cast<double>(n)));
}

}  // namespace locus
