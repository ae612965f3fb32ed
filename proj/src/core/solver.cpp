#include "locus/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "locus/error.hpp"

namespace locus {

namespace {

using Clock = std::chrono::steady_clock;

void validate(const MeasurementSet& m, int n, const SolverParams& p) {
  if (n < 1) throw InvalidArgument("solve_sdp: n must be >= 1");
  if (m.n != 0 && m.n != n) {
    std::ostringstream msg;
    msg << "solve_sdp: measurement set describes " << m.n << " vertices, solver asked for " << n;
    throw DimensionMismatch(msg.str());
  }
  if (m.measured_sq.size() != m.edges.size()) throw DimensionMismatch("solve_sdp: measured_sq and edges differ in length");
  for (const auto& e : m.edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      std::ostringstream msg;
      msg << "solve_sdp: edge (" << e.i << "," << e.j << ") out of range for n = " << n;
      throw DimensionMismatch(msg.str());
    }
    if (e.i == e.j) throw InvalidArgument("solve_sdp: self-loop edge");
  }
  for (double v : m.measured_sq) {
    if (!std::isfinite(v)) throw NonFiniteInput("solve_sdp: measured squared distance is not finite");
  }
  if (!std::isfinite(m.delta)) throw NonFiniteInput("solve_sdp: delta is not finite");
  if (m.delta < 0.0) throw InvalidArgument("solve_sdp: delta must be >= 0");
  if (!(p.feas_tol > 0.0 && p.obj_tol > 0.0 && p.gap_tol > 0.0 && p.penalty > 0.0)) {
    throw InvalidArgument("solve_sdp: tolerances and penalty must be > 0");
  }
  if (p.max_iters < 1 || p.check_interval < 1 || p.penalty_update_interval < 1) {
    throw InvalidArgument("solve_sdp: iteration counts must be >= 1");
  }
  if (!(p.relaxation > 0.0 && p.relaxation < 2.0)) throw InvalidArgument("solve_sdp: relaxation must lie in (0, 2)");
  if (!(p.penalty_factor > 1.0)) throw InvalidArgument("solve_sdp: penalty_factor must be > 1");
  if (!(p.penalty_balance_ratio >= 1.0)) throw InvalidArgument("solve_sdp: penalty_balance_ratio must be >= 1");
}

// The linear map A(X)_e = <M_e, X> and its adjoint for one edge list.
class EdgeOperator {
 public:
  EdgeOperator(const std::vector<Edge>& edges, int n) : edges_(edges), n_(n), vertex_sum_(n) {}

  Eigen::Index size() const { return static_cast<Eigen::Index>(edges_.size()); }

  Vector apply(const Matrix& x) const { return edge_values(x, edges_); }

  // X += scale * A^T(y)
  void add_adjoint(const Vector& y, double scale, Matrix& x) const {
    for (Eigen::Index e = 0; e < size(); ++e) {
      const auto [i, j] = edges_[e];
      const double v = scale * y[e];
      x(i, i) += v;
      x(j, j) += v;
      x(i, j) -= v;
      x(j, i) -= v;
    }
  }

  Matrix adjoint(const Vector& y) const {
    Matrix x = Matrix::Zero(n_, n_);
    add_adjoint(y, 1.0, x);
    return x;
  }

  // (I + A A^T) y; (A A^T y)_e = s_i + s_j + 2 y_e with s_k = sum of y over edges at k.
  Vector normal_apply(const Vector& y) const {
    vertex_sum_.setZero();
    for (Eigen::Index e = 0; e < size(); ++e) {
      vertex_sum_[edges_[e].i] += y[e];
      vertex_sum_[edges_[e].j] += y[e];
    }
    Vector out(size());
    for (Eigen::Index e = 0; e < size(); ++e) {
      out[e] = 3.0 * y[e] + vertex_sum_[edges_[e].i] + vertex_sum_[edges_[e].j];
    }
    return out;
  }

  // Conjugate gradients on (I + A A^T) t = rhs, warm-started from t.
  void solve_normal(const Vector& rhs, Vector& t) const {
    if (size() == 0) return;
    Vector r = rhs - normal_apply(t);
    const double target = 1e-13 * std::max(rhs.norm(), 1e-300);
    if (r.norm() <= target) return;
    Vector p = r;
    double rs = r.squaredNorm();
    for (int it = 0; it < 1000 && std::sqrt(rs) > target; ++it) {
      const Vector ap = normal_apply(p);
      const double step = rs / p.dot(ap);
      t += step * p;
      r -= step * ap;
      const double rs_next = r.squaredNorm();
      p = r + (rs_next / rs) * p;
      rs = rs_next;
    }
  }

 private:
  const std::vector<Edge>& edges_;
  int n_;
  mutable Vector vertex_sum_;
};

struct PsdProjection {
  Matrix projected;
  double min_eigenvalue = 0.0;
};

PsdProjection project_psd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Vector& lam = es.eigenvalues();
  const Matrix& vec = es.eigenvectors();
  Eigen::Index first_positive = 0;
  while (first_positive < lam.size() && lam[first_positive] <= 0.0) ++first_positive;
  const Eigen::Index k = lam.size() - first_positive;
  PsdProjection out;
  out.min_eigenvalue = lam.size() > 0 ? lam[0] : 0.0;
  if (k == 0) {
    out.projected = Matrix::Zero(a.rows(), a.cols());
    return out;
  }
  const Matrix scaled = vec.rightCols(k) * lam.tail(k).cwiseSqrt().asDiagonal();
  out.projected = scaled * scaled.transpose();
  return out;
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

// Lower bound on the optimal trace from a dual estimate y:
// max b.y - delta |y|_1  s.t.  I - A^T(y) PSD. A y with
// lambda_min(I - A^T y) = -mu < 0 is made feasible by scaling with 1/(1+mu).
double dual_lower_bound(const EdgeOperator& op, const Vector& y, const MeasurementSet& m, int n) {
  Matrix slack = Matrix::Identity(n, n);
  op.add_adjoint(y, -1.0, slack);
  const double mu = std::max(0.0, -min_eigenvalue(slack));
  double value = 0.0;
  for (Eigen::Index e = 0; e < y.size(); ++e) value += m.measured_sq[e] * y[e] - m.delta * std::abs(y[e]);
  return value / (1.0 + mu);
}

}  // namespace

Vector edge_values(const Matrix& q, const std::vector<Edge>& edges) {
  Vector out(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    out[static_cast<Eigen::Index>(e)] = q(i, i) + q(j, j) - 2.0 * q(i, j);
  }
  return out;
}

double box_violation(const Matrix& q, const MeasurementSet& m) {
  const Vector vals = edge_values(q, m.edges);
  double worst = 0.0;
  for (Eigen::Index e = 0; e < vals.size(); ++e) {
    worst = std::max(worst, std::abs(vals[e] - m.measured_sq[e]) - m.delta);
  }
  return worst;
}

GramSolution solve_sdp(const MeasurementSet& m, int n, const SolverParams& params) {
  validate(m, n, params);
  const auto start = Clock::now();
  const EdgeOperator op(m.edges, n);
  const Eigen::Index n_edges = op.size();

  Vector lower(n_edges), upper(n_edges);
  for (Eigen::Index e = 0; e < n_edges; ++e) {
    lower[e] = m.measured_sq[e] - m.delta;
    upper[e] = m.measured_sq[e] + m.delta;
  }

  double rho = params.penalty;
  const double alpha = params.relaxation;
  Matrix z = Matrix::Zero(n, n);
  Matrix u = Matrix::Zero(n, n);  // scaled dual for X = Z
  Vector w = Vector::Zero(n_edges).cwiseMax(lower).cwiseMin(upper);
  Vector v = Vector::Zero(n_edges);  // scaled dual for A(X) = w
  Vector cg_state = Vector::Zero(n_edges);

  GramSolution best;
  best.max_violation = std::numeric_limits<double>::infinity();
  best.objective = std::numeric_limits<double>::infinity();
  bool have_best = false;

  double last_objective = std::numeric_limits<double>::quiet_NaN();
  double pri_rel = 0.0, dual_rel = 0.0;
  int iter = 0;
  bool converged = false;
  double dual_bound = -std::numeric_limits<double>::infinity();

  for (iter = 1; iter <= params.max_iters; ++iter) {
    // X-step: (I + A^T A) X = B, solved as X = B - A^T (I + A A^T)^{-1} A(B).
    Matrix x = z - u;
    x.diagonal().array() -= 1.0 / rho;
    op.add_adjoint(w - v, 1.0, x);
    op.solve_normal(op.apply(x), cg_state);
    op.add_adjoint(cg_state, -1.0, x);
    const Vector ax = op.apply(x);

    const Matrix x_relaxed = alpha * x + (1.0 - alpha) * z;
    const Vector ax_relaxed = alpha * ax + (1.0 - alpha) * w;

    const Matrix z_prev = z;
    const Vector w_prev = w;
    Matrix shifted = x_relaxed + u;
    shifted = 0.5 * (shifted + shifted.transpose());
    z = project_psd(shifted).projected;
    z = 0.5 * (z + z.transpose());
    w = (ax_relaxed + v).cwiseMax(lower).cwiseMin(upper);

    u += x_relaxed - z;
    v += ax_relaxed - w;

    const bool check = iter % params.check_interval == 0 || iter == params.max_iters;
    const bool rebalance = params.adaptive_penalty && iter % params.penalty_update_interval == 0;
    if (!check && !rebalance) continue;

    const double pri = std::sqrt((x - z).squaredNorm() + (ax - w).squaredNorm());
    Matrix dz = z - z_prev;
    op.add_adjoint(w - w_prev, 1.0, dz);
    const double dual = rho * dz.norm();
    const double pri_scale = std::max({std::sqrt(x.squaredNorm() + ax.squaredNorm()),
                                       std::sqrt(z.squaredNorm() + w.squaredNorm()), 1e-12});
    Matrix dual_var = u;
    op.add_adjoint(v, 1.0, dual_var);
    const double dual_scale = std::max(rho * dual_var.norm(), 1e-12);
    pri_rel = pri / pri_scale;
    dual_rel = dual / dual_scale;

    if (check) {
      const double objective = z.trace();
      const double violation = std::max(0.0, box_violation(z, m));
      // Violations below feas_tol rank equal; ties go to the smaller trace.
      const double level = std::max(violation, params.feas_tol);
      const double best_level = std::max(best.max_violation, params.feas_tol);
      const bool better = !have_best || level < best_level || (level == best_level && objective < best.objective);
      if (better) {
        best.q = z;
        best.objective = objective;
        best.max_violation = violation;
        best.iterations = iter;
        have_best = true;
      }
      const double change = std::isnan(last_objective)
                                ? std::numeric_limits<double>::infinity()
                                : std::abs(objective - last_objective) / (1.0 + std::abs(objective));
      last_objective = objective;
      if (violation <= params.feas_tol && change <= params.obj_tol) {
        const Vector y = -rho * v;
        dual_bound = dual_lower_bound(op, y, m, n);
        const double gap = (objective - dual_bound) / (1.0 + std::abs(objective));
        if (gap <= params.gap_tol) {
          converged = true;
          best.q = z;
          best.objective = objective;
          best.max_violation = violation;
          best.iterations = iter;
          break;
        }
      }
      if (params.time_limit_seconds > 0.0 &&
          std::chrono::duration<double>(Clock::now() - start).count() > params.time_limit_seconds) {
        break;
      }
    }

    if (rebalance) {
      double scale = 1.0;
      if (pri_rel > params.penalty_balance_ratio * dual_rel) scale = params.penalty_factor;
      else if (dual_rel > params.penalty_balance_ratio * pri_rel) scale = 1.0 / params.penalty_factor;
      if (scale != 1.0) {
        rho *= scale;
        u /= scale;
        v /= scale;
      }
    }
  }

  GramSolution out = std::move(best);
  out.iterations = std::min(iter, params.max_iters);
  out.converged = converged;
  out.final_penalty = rho;
  out.min_eigenvalue = min_eigenvalue(out.q);
  out.dual_bound = converged ? dual_bound : dual_lower_bound(op, -rho * v, m, n);
  out.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

EstimatedConfiguration rank_d_round(const Matrix& q, int d) {
  const auto n = q.rows();
  if (q.cols() != n) throw DimensionMismatch("rank_d_round: Q must be square");
  if (d < 1 || d >= n) {
    std::ostringstream msg;
    msg << "rank_d_round: need 1 <= d < n, got d = " << d << ", n = " << n;
    throw InvalidArgument(msg.str());
  }
  if (!q.allFinite()) throw NonFiniteInput("rank_d_round: Q has non-finite entries");
  const Matrix sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& lam = es.eigenvalues();  // ascending
  const Matrix& vec = es.eigenvectors();

  EstimatedConfiguration out;
  out.points.resize(n, d);
  out.retained.resize(d);
  for (int k = 0; k < d; ++k) {
    const Eigen::Index col = n - 1 - k;
    Vector dir = vec.col(col);
    Eigen::Index lead = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(dir[i]) > std::abs(dir[lead])) lead = i;
    }
    if (dir[lead] < 0.0) dir = -dir;
    out.retained[k] = lam[col];
    out.points.col(k) = std::sqrt(std::max(0.0, lam[col])) * dir;
  }
  out.discarded = lam[n - 1 - d];
  return out;
}

EstimatedConfiguration rank_d_round(const GramSolution& sol, int d) { return rank_d_round(sol.q, d); }

Localization localize(const MeasurementSet& m, int n, int d, const SolverParams& params) {
  if (d < 1 || d >= n) throw InvalidArgument("localize: need 1 <= d < n");
  Localization out;
  out.gram = solve_sdp(m, n, params);
  out.estimate = rank_d_round(out.gram, d);
  return out;
}

}  // namespace locus
