#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace locus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// n points in the hypercube [-0.5, 0.5]^d, one per row of `points`.
struct PointConfiguration {
  int dim = 0;
  std::uint64_t seed = 0;
  Matrix points;  // n x dim

  int size() const { return static_cast<int>(points.rows()); }
};

struct Edge {
  int i = 0;
  int j = 0;  // i < j

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// r-neighborhood graph G(n, r). Edges are sorted lexicographically.
struct GeometricGraph {
  int n = 0;
  int dim = 0;
  double radius = 0.0;
  std::vector<Edge> edges;
  std::vector<double> true_sq_dist;  // parallel to edges

  std::size_t edge_count() const { return edges.size(); }
};

struct DegreeBand {
  double lower = 0.0;
  double upper = 0.0;
};

struct GraphDiagnostics {
  int min_degree = 0;
  int max_degree = 0;
  bool connected = false;
  double lambda2_laplacian = 0.0;
  DegreeBand degree_band;
  bool degrees_in_band = false;
};

/// Axis-aligned box [lower, upper] (closed on both ends).
struct Box {
  Vector lower;
  Vector upper;

  double volume() const;
};

enum class NeighborSearch { kBruteForce, kGrid };

PointConfiguration sample_points(int n, int d, std::uint64_t seed);

/// Validates the hypercube invariant and wraps `points` as a configuration.
PointConfiguration make_configuration(Matrix points, std::uint64_t seed = 0);

/// Edge (i, j) is present iff ||x_i - x_j|| <= r. Both search strategies
/// produce the same edge set.
GeometricGraph build_graph(const PointConfiguration& cfg, double r,
                           NeighborSearch search = NeighborSearch::kBruteForce);

/// Graph with a prescribed edge list (complete graphs, paths, loaded files).
/// Edges are normalized to i < j and sorted; duplicates and self-loops are
/// rejected. A radius of 0 is replaced by the longest edge.
GeometricGraph graph_from_edges(const PointConfiguration& cfg, std::vector<Edge> edges, double radius = 0.0);

/// Throws DimensionMismatch unless g was built on cfg's vertex set.
void check_graph_matches(const GeometricGraph& g, const PointConfiguration& cfg);

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

/// alpha * (log n / n)^(1/d), the radius scale used throughout the experiments.
double connectivity_radius(int n, int d, double alpha);

std::vector<int> degrees(const GeometricGraph& g);
bool is_connected(const GeometricGraph& g);
SparseMatrix laplacian(const GeometricGraph& g);

// Second-smallest eigenvalue of the combinatorial Laplacian. The public entry
// point picks the dense path for n <= kDenseLambda2Limit.
inline constexpr int kDenseLambda2Limit = 2000;
double laplacian_lambda2(const GeometricGraph& g);
double laplacian_lambda2_dense(const GeometricGraph& g);
double laplacian_lambda2_iterative(const GeometricGraph& g, double rel_tol = 1e-8);

GraphDiagnostics diagnostics(const GeometricGraph& g);

/// Degree band check restricted to vertices whose r-ball lies inside the
/// hypercube. Boundary vertices see a truncated neighborhood and can fall
/// below the lower end of the band.
bool interior_degrees_in_band(const GeometricGraph& g, const PointConfiguration& cfg);

int region_count(const PointConfiguration& cfg, const Box& region);

/// Half-width of the high-probability interval n V +- sqrt(2 c n V log n) for
/// the number of uniform points in a region of volume V.
double sampling_interval_halfwidth(int n, double volume, double c);

}  // namespace locus
