#include "locus/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "locus/error.hpp"

namespace locus {

namespace {

struct LocalBlock {
  std::vector<Eigen::Triplet<double>> triplets;
  int rank_deficient = 0;
};

// Orthogonal-complement projector of [u, X_Q] written as triplets on Q x Q.
void add_clique_projector(const std::vector<int>& q, const Matrix& pts, LocalBlock& out) {
  const auto m = static_cast<Eigen::Index>(q.size());
  const auto d = pts.cols();
  Matrix basis(m, d + 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    basis(a, 0) = 1.0;
    basis.row(a).tail(d) = pts.row(q[a]);
  }
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(m, d + 1)) * sv[0] * 1e-10;
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > tol) ++r;
  if (r < d + 1) ++out.rank_deficient;

  const Matrix u = svd.matrixU().leftCols(r);
  const Matrix p = Matrix::Identity(m, m) - u * u.transpose();
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) out.triplets.emplace_back(q[a], q[b], p(a, b));
}

}  // namespace

std::string_view to_string(StressMode mode) { return mode == StressMode::kFull ? "full" : "reduced"; }

std::optional<StressMode> parse_stress_mode(std::string_view name) {
  if (name == "full") return StressMode::kFull;
  if (name == "reduced") return StressMode::kReduced;
  return std::nullopt;
}

RigidityMatrix rigidity_matrix(const GeometricGraph& g, const PointConfiguration& cfg) {
  check_graph_matches(g, cfg);
  const int d = cfg.dim;
  RigidityMatrix rm;
  rm.n = g.n;
  rm.dim = d;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.edges.size() * 2 * d);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [i, j] = g.edges[e];
    for (int k = 0; k < d; ++k) {
      const double diff = cfg.points(i, k) - cfg.points(j, k);
      trip.emplace_back(static_cast<int>(e), i * d + k, diff);
      trip.emplace_back(static_cast<int>(e), j * d + k, -diff);
    }
  }
  rm.matrix.resize(static_cast<Eigen::Index>(g.edges.size()), static_cast<Eigen::Index>(g.n) * d);
  rm.matrix.setFromTriplets(trip.begin(), trip.end());
  return rm;
}

Vector stack_velocities(const Matrix& velocities) {
  const Matrix rowmajor_t = velocities.transpose();
  return Eigen::Map<const Vector>(rowmajor_t.data(), rowmajor_t.size());
}

RigidityTest infinitesimal_rigidity_test(const RigidityMatrix& rm, int d, int n) {
  if (d < 1) throw InvalidArgument("rigidity test: d must be >= 1");
  if (n <= d) {
    throw InvalidArgument("rigidity test: need n > d (got n = " + std::to_string(n) + ", d = " + std::to_string(d) + ")");
  }
  if (rm.matrix.cols() != static_cast<Eigen::Index>(n) * d) {
    throw DimensionMismatch("rigidity matrix has " + std::to_string(rm.matrix.cols()) + " columns, expected d*n = " +
                            std::to_string(n * d));
  }
  RigidityTest t;
  t.expected_kernel_dim = d * (d + 1) / 2;
  const auto cols = rm.matrix.cols();
  if (rm.matrix.rows() > 0) {
    Eigen::BDCSVD<Matrix> svd{Matrix(rm.matrix)};
    const Vector& sv = svd.singularValues();
    t.sigma_max = sv.size() > 0 ? sv[0] : 0.0;
    t.threshold = static_cast<double>(std::max(rm.matrix.rows(), cols)) * t.sigma_max * 1e-10;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] > t.threshold) ++t.rank;
    }
  }
  t.kernel_dim = static_cast<int>(cols) - t.rank;
  t.rigid = t.kernel_dim == t.expected_kernel_dim;
  return t;
}

std::vector<std::vector<int>> cliques(const GeometricGraph& g, const PointConfiguration& cfg) {
  check_graph_matches(g, cfg);
  const double half_sq = 0.25 * g.radius * g.radius;
  std::vector<std::vector<int>> c(g.n);
  for (int i = 0; i < g.n; ++i) c[i].push_back(i);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.true_sq_dist[e] <= half_sq) {
      c[g.edges[e].i].push_back(g.edges[e].j);
      c[g.edges[e].j].push_back(g.edges[e].i);
    }
  }
  for (auto& ci : c) std::sort(ci.begin(), ci.end());
  return c;
}

StressMatrix stress_matrix(const GeometricGraph& g, const PointConfiguration& cfg, StressMode mode, int threads) {
  if (threads < 1) throw InvalidArgument("stress_matrix: threads must be >= 1");
  const int d = cfg.dim;
  StressMatrix sm;
  sm.mode = mode;

  std::set<std::vector<int>> unique;
  std::vector<std::vector<int>> candidates;
  auto offer = [&](std::vector<int> q) {
    if (unique.insert(q).second) candidates.push_back(std::move(q));
  };
  for (const auto& ci : cliques(g, cfg)) {
    offer(ci);
    if (mode == StressMode::kFull && ci.size() > 1) {
      for (std::size_t k = 0; k < ci.size(); ++k) {
        std::vector<int> sub;
        sub.reserve(ci.size() - 1);
        for (std::size_t a = 0; a < ci.size(); ++a)
          if (a != k) sub.push_back(ci[a]);
        offer(std::move(sub));
      }
    }
  }
  for (auto& q : candidates) {
    if (static_cast<int>(q.size()) < d + 2) ++sm.skipped_small;
    else sm.cliques.push_back(std::move(q));
  }

  // Contiguous chunks concatenated in order keep the triplet sequence, and
  // hence the summed matrix, independent of the thread count.
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(sm.cliques.size())));
  std::vector<LocalBlock> blocks(workers);
  auto work = [&](int w) {
    const std::size_t lo = sm.cliques.size() * w / workers;
    const std::size_t hi = sm.cliques.size() * (w + 1) / workers;
    for (std::size_t k = lo; k < hi; ++k) add_clique_projector(sm.cliques[k], cfg.points, blocks[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  std::vector<Eigen::Triplet<double>> all;
  for (auto& b : blocks) {
    all.insert(all.end(), b.triplets.begin(), b.triplets.end());
    sm.rank_deficient += b.rank_deficient;
  }
  sm.omega.resize(g.n, g.n);
  sm.omega.setFromTriplets(all.begin(), all.end());
  return sm;
}

StressSpectrum stress_spectrum(const SparseMatrix& omega) {
  if (omega.rows() != omega.cols()) throw DimensionMismatch("stress matrix must be square");
  StressSpectrum s;
  if (omega.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(omega), Eigen::EigenvaluesOnly);
  const Vector& lam = es.eigenvalues();
  s.min_eigenvalue = lam[0];
  s.max_eigenvalue = lam[lam.size() - 1];
  s.sigma_max = lam.cwiseAbs().maxCoeff();
  const double tol = static_cast<double>(omega.rows()) * s.sigma_max * 1e-10;
  s.sigma_min_nonzero = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double a = std::abs(lam[k]);
    if (a > tol) {
      ++s.rank;
      if (s.sigma_min_nonzero == 0.0 || a < s.sigma_min_nonzero) s.sigma_min_nonzero = a;
    }
  }
  return s;
}

StressSpectrum stress_spectrum(const StressMatrix& sm) { return stress_spectrum(sm.omega); }

}  // namespace locus
