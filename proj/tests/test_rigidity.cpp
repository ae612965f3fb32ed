#include <cmath>
#include <set>

#include "doctest.h"
#include "locus/error.hpp"
#include "locus/rigidity.hpp"
#include "locus/rng.hpp"

using namespace locus;

namespace {

GeometricGraph complete_graph(const PointConfiguration& cfg) {
  std::vector<Edge> edges;
  for (int i = 0; i < cfg.size(); ++i)
    for (int j = i + 1; j < cfg.size(); ++j) edges.push_back({i, j});
  return graph_from_edges(cfg, edges);
}

Matrix random_velocities(int n, int d, Rng& rng) {
  Matrix v(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) v(i, k) = rng.normal(0.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("rigidity matrix has the expected shape and sparsity") {
  const auto cfg = sample_points(40, 3, 2);
  const auto g = build_graph(cfg, 0.5);
  const auto rm = rigidity_matrix(g, cfg);
  CHECK(rm.matrix.rows() == static_cast<Eigen::Index>(g.edge_count()));
  CHECK(rm.matrix.cols() == 40 * 3);
  CHECK(rm.matrix.nonZeros() <= static_cast<Eigen::Index>(2 * 3 * g.edge_count()));
}

TEST_CASE("rigidity matrix is the derivative of half the squared edge lengths") {
  Rng rng(4);
  const auto cfg = sample_points(30, 2, 7);
  const auto g = build_graph(cfg, 0.45);
  const auto rm = rigidity_matrix(g, cfg);
  const Matrix v = random_velocities(30, 2, rng);
  const Vector rv = rm.matrix * stack_velocities(v);
  const double h = 1e-6;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    const auto len = [&](double t) {
      return 0.5 * ((cfg.points.row(i) + t * v.row(i)) - (cfg.points.row(j) + t * v.row(j))).squaredNorm();
    };
    CHECK(rv[e] == doctest::Approx((len(h) - len(-h)) / (2 * h)).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("trivial motions lie in the kernel") {
  Rng rng(8);
  const auto cfg = sample_points(25, 3, 1);
  const auto rm = rigidity_matrix(build_graph(cfg, 0.6), cfg);
  for (int k = 0; k < 3; ++k) {
    Matrix translation = Matrix::Zero(25, 3);
    translation.col(k).setOnes();
    CHECK((rm.matrix * stack_velocities(translation)).cwiseAbs().maxCoeff() <= 1e-14);
  }
  Matrix a = random_velocities(3, 3, rng);
  const Matrix skew = a - a.transpose();
  CHECK((rm.matrix * stack_velocities(cfg.points * skew)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("complete graph on six points is rigid") {
  const auto cfg = sample_points(6, 2, 3);
  const auto t = infinitesimal_rigidity_test(rigidity_matrix(complete_graph(cfg), cfg), 2, 6);
  CHECK(t.rigid);
  CHECK(t.kernel_dim == 3);
  CHECK(t.expected_kernel_dim == 3);
  CHECK(t.rank == 9);
}

TEST_CASE("a path is flexible") {
  const auto cfg = sample_points(3, 2, 5);
  const auto g = graph_from_edges(cfg, {{0, 1}, {1, 2}});
  const auto t = infinitesimal_rigidity_test(rigidity_matrix(g, cfg), 2, 3);
  CHECK_FALSE(t.rigid);
  CHECK(t.kernel_dim == 4);
}

TEST_CASE("collinear points are infinitesimally flexible in the plane") {
  Matrix p(3, 2);
  p << -0.3, 0.0, 0.0, 0.0, 0.3, 0.0;
  const auto cfg = make_configuration(p);
  const auto t = infinitesimal_rigidity_test(rigidity_matrix(complete_graph(cfg), cfg), 2, 3);
  CHECK_FALSE(t.rigid);
  CHECK(t.kernel_dim == 4);
}

TEST_CASE("rigidity test requires n > d") {
  const auto cfg = sample_points(2, 2, 1);
  CHECK_THROWS_AS(infinitesimal_rigidity_test(rigidity_matrix(complete_graph(cfg), cfg), 2, 2), InvalidArgument);
}

TEST_CASE("cliques contain their centre and lie within r/2") {
  const auto cfg = sample_points(120, 2, 6);
  const auto g = build_graph(cfg, 0.3);
  const auto cs = cliques(g, cfg);
  REQUIRE(cs.size() == 120);
  for (int i = 0; i < 120; ++i) {
    const std::set<int> members(cs[i].begin(), cs[i].end());
    CHECK(members.count(i) == 1);
    for (int j : cs[i]) CHECK((cfg.points.row(i) - cfg.points.row(j)).norm() <= 0.15 + 1e-15);
    for (int j = 0; j < 120; ++j) {
      if ((cfg.points.row(i) - cfg.points.row(j)).norm() <= 0.15) CHECK(members.count(j) == 1);
    }
  }
}

TEST_CASE("stress matrix annihilates the configuration and is PSD") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const int n = 100;
    const auto cfg = sample_points(n, 2, seed);
    const auto g = build_graph(cfg, 0.6);
    const auto sm = stress_matrix(g, cfg);
    const Matrix omega = Matrix(sm.omega);
    CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((omega * Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((omega * cfg.points).cwiseAbs().maxCoeff() <= 1e-10);
    const auto eig = stress_spectrum(sm);
    CHECK(eig.min_eigenvalue >= -1e-10 * eig.max_eigenvalue);
    CHECK(eig.rank == n - 3);
    // Nonzero only on pairs sharing a clique, hence on edges.
    for (int k = 0; k < sm.omega.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(sm.omega, k); it; ++it) {
        if (it.row() == it.col()) continue;
        CHECK((cfg.points.row(it.row()) - cfg.points.row(it.col())).norm() <= 0.6);
      }
    }
  }
}

TEST_CASE("stress matrix is identical across thread counts") {
  const auto cfg = sample_points(150, 2, 9);
  const auto g = build_graph(cfg, 0.5);
  const Matrix one = Matrix(stress_matrix(g, cfg, StressMode::kReduced, 1).omega);
  const Matrix four = Matrix(stress_matrix(g, cfg, StressMode::kReduced, 4).omega);
  CHECK(one == four);
}

TEST_CASE("full mode dominates reduced mode") {
  const auto cfg = sample_points(60, 2, 12);
  const auto g = build_graph(cfg, 0.6);
  const auto reduced = stress_matrix(g, cfg, StressMode::kReduced);
  const auto full = stress_matrix(g, cfg, StressMode::kFull);
  CHECK(full.cliques.size() > reduced.cliques.size());
  CHECK(full.mode == StressMode::kFull);
  const auto diff = stress_spectrum(SparseMatrix(full.omega - reduced.omega));
  CHECK(diff.min_eigenvalue >= -1e-9 * diff.max_eigenvalue);
  CHECK((Matrix(full.omega) * cfg.points).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("small cliques are skipped") {
  const auto cfg = sample_points(30, 2, 1);
  const auto g = build_graph(cfg, 0.1);
  const auto sm = stress_matrix(g, cfg);
  CHECK(sm.skipped_small > 0);
  for (const auto& c : sm.cliques) CHECK(c.size() >= 4);
}

TEST_CASE("stress mode names") {
  CHECK(parse_stress_mode("full") == StressMode::kFull);
  CHECK(parse_stress_mode(to_string(StressMode::kReduced)) == StressMode::kReduced);
  CHECK_FALSE(parse_stress_mode("partial").has_value());
}
