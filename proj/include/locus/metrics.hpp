#pragma once

#include "locus/geometry.hpp"
#include "locus/rng.hpp"

namespace locus {

/// Y = X O + u s^T with O orthogonal.
struct RigidTransform {
  Matrix rotation;
  Vector shift;
};

/// L = I - (1/n) u u^T.
Matrix centering_matrix(int n);

/// L X X^T L, computed by subtracting column means from X.
Matrix centered_gram(const Matrix& x);

/// Same quantity via explicit multiplication by the centering matrix. Kept as
/// a cross-check for centered_gram.
Matrix centered_gram_explicit(const Matrix& x);

/// (1/n^2) || L X X^T L - L Xh Xh^T L ||_1 (entrywise l1 norm).
double error_metric(const Matrix& x, const Matrix& xhat);

/// (1/n) || L X X^T L - L Xh Xh^T L ||_F.
double frobenius_metric(const Matrix& x, const Matrix& xhat);

Matrix apply_rigid(const Matrix& x, const RigidTransform& t);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign
/// correction) and a Gaussian shift.
RigidTransform random_rigid_transform(int d, Rng& rng, double shift_scale = 1.0);

}  // namespace locus
