#pragma once

#include "locus/geometry.hpp"
#include "locus/noise.hpp"

namespace locus {

struct SolverParams {
  double feas_tol = 1e-7;   // max edge-constraint violation and PSD slack
  double obj_tol = 1e-8;    // relative change of Tr(Q) between checks
  double gap_tol = 1e-6;    // relative duality gap, (Tr Q - lower bound) / (1 + |Tr Q|)
  int max_iters = 50000;
  double penalty = 1.0;     // initial ADMM penalty rho
  bool adaptive_penalty = true;
  int penalty_update_interval = 50;
  double penalty_factor = 2.0;
  double penalty_balance_ratio = 2.0;  // rebalance when primal/dual residuals differ by more
  double relaxation = 1.6;  // over-relaxation in (0, 2)
  int check_interval = 10;
  double time_limit_seconds = 0.0;  // 0 disables the limit
};

/// Output of the trace-minimization SDP.
struct GramSolution {
  Matrix q;
  double objective = 0.0;      // Tr(Q)
  double dual_bound = 0.0;     // certified lower bound on the optimal trace
  double max_violation = 0.0;  // max_e max(0, |<M_e, Q> - dtilde^2_e| - delta)
  double min_eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_seconds = 0.0;
  double final_penalty = 0.0;
};

struct EstimatedConfiguration {
  Matrix points;      // n x d
  Vector retained;    // sigma_1 >= ... >= sigma_d (before clamping at zero)
  double discarded = 0.0;  // sigma_{d+1}, or 0 when d == n
};

struct Localization {
  GramSolution gram;
  EstimatedConfiguration estimate;
};

/// <M_e, Q> = Q_ii + Q_jj - 2 Q_ij for every edge.
Vector edge_values(const Matrix& q, const std::vector<Edge>& edges);

/// max_e max(0, |<M_e, Q> - dtilde^2_e| - delta), computed directly from Q.
double box_violation(const Matrix& q, const MeasurementSet& m);

/// minimize Tr(Q) s.t. |<M_e, Q> - dtilde^2_e| <= delta for all edges, Q PSD.
///
/// ADMM over (X free, Z PSD, w in the box) with X = Z, A(X) = w. Every
/// iteration projects onto the PSD cone with one symmetric eigendecomposition.
/// Infeasible instances never abort: the least-violation iterate is returned
/// with converged = false.
GramSolution solve_sdp(const MeasurementSet& m, int n, const SolverParams& params = {});

/// Best rank-d approximation of Q and coordinates U_d Sigma_d^{1/2}.
/// Eigenvector signs are fixed so the largest-magnitude entry is positive
/// (ties go to the lowest index).
EstimatedConfiguration rank_d_round(const Matrix& q, int d);
EstimatedConfiguration rank_d_round(const GramSolution& sol, int d);

Localization localize(const MeasurementSet& m, int n, int d, const SolverParams& params = {});

}  // namespace locus
