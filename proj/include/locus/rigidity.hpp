#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "locus/geometry.hpp"

namespace locus {

/// |E| x dn matrix; row e = (i, j) holds (x_i - x_j)^T in block i and
/// (x_j - x_i)^T in block j.
struct RigidityMatrix {
  int n = 0;
  int dim = 0;
  SparseMatrix matrix;
};

struct RigidityTest {
  bool rigid = false;
  int kernel_dim = 0;
  int expected_kernel_dim = 0;  // d(d+1)/2
  int rank = 0;
  double sigma_max = 0.0;
  double threshold = 0.0;
};

enum class StressMode { kReduced, kFull };

std::string_view to_string(StressMode mode);
std::optional<StressMode> parse_stress_mode(std::string_view name);

struct StressMatrix {
  SparseMatrix omega;
  std::vector<std::vector<int>> cliques;  // cliques that contributed
  StressMode mode = StressMode::kReduced;
  int skipped_small = 0;   // cliques with fewer than d + 2 vertices
  int rank_deficient = 0;  // cliques whose local basis had numerical rank < d + 1
};

struct StressSpectrum {
  double sigma_max = 0.0;
  double sigma_min_nonzero = 0.0;
  int rank = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

RigidityMatrix rigidity_matrix(const GeometricGraph& g, const PointConfiguration& cfg);

/// Stacks per-point velocities (n x d) into the dn-vector R acts on.
Vector stack_velocities(const Matrix& velocities);

/// Kernel dimension from singular values above max(rows, cols) sigma_max 1e-10.
/// Requires n > d.
RigidityTest infinitesimal_rigidity_test(const RigidityMatrix& rm, int d, int n);

/// C_i = {i} together with every neighbor j at distance <= r/2.
std::vector<std::vector<int>> cliques(const GeometricGraph& g, const PointConfiguration& cfg);

/// Sum over cliques Q of the projector onto the orthogonal complement of
/// span{u, x^(1), ..., x^(d)} restricted to Q. Reduced mode uses the C_i;
/// full mode adds every C_i minus one vertex. Duplicate cliques count once.
StressMatrix stress_matrix(const GeometricGraph& g, const PointConfiguration& cfg,
                           StressMode mode = StressMode::kReduced, int threads = 1);

/// Full symmetric eigensolve; rank counts |lambda| > n lambda_max 1e-10.
StressSpectrum stress_spectrum(const SparseMatrix& omega);
StressSpectrum stress_spectrum(const StressMatrix& sm);

}  // namespace locus
