#include "locus/metrics.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "locus/error.hpp"

namespace locus {

namespace {

void require_same_shape(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw DimensionMismatch("configurations differ in shape: " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + " vs " + std::to_string(xhat.rows()) + "x" +
                            std::to_string(xhat.cols()));
  }
  if (x.rows() == 0) throw InvalidArgument("configurations must have at least one point");
}

}  // namespace

Matrix centering_matrix(int n) {
  if (n < 1) throw InvalidArgument("centering_matrix: n must be >= 1");
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

Matrix centered_gram(const Matrix& x) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return centered * centered.transpose();
}

Matrix centered_gram_explicit(const Matrix& x) {
  const Matrix lmat = centering_matrix(static_cast<int>(x.rows()));
  return lmat * x * x.transpose() * lmat;
}

double error_metric(const Matrix& x, const Matrix& xhat) {
  require_same_shape(x, xhat);
  const double n = static_cast<double>(x.rows());
  return (centered_gram(x) - centered_gram(xhat)).cwiseAbs().sum() / (n * n);
}

double frobenius_metric(const Matrix& x, const Matrix& xhat) {
  require_same_shape(x, xhat);
  return (centered_gram(x) - centered_gram(xhat)).norm() / static_cast<double>(x.rows());
}

Matrix apply_rigid(const Matrix& x, const RigidTransform& t) {
  const auto d = x.cols();
  if (t.rotation.rows() != d || t.rotation.cols() != d || t.shift.size() != d) {
    throw DimensionMismatch("apply_rigid: transform dimension does not match configuration");
  }
  const double defect = (t.rotation.transpose() * t.rotation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(defect <= 1e-12 * std::max<double>(1.0, static_cast<double>(d)))) {
    throw InvalidArgument("apply_rigid: rotation is not orthogonal (|O^T O - I|_max = " + std::to_string(defect) + ")");
  }
  Matrix y = x * t.rotation;
  y.rowwise() += t.shift.transpose();
  return y;
}

RigidTransform random_rigid_transform(int d, Rng& rng, double shift_scale) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal(0.0, 1.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  RigidTransform t;
  t.rotation = q;
  t.shift.resize(d);
  for (int k = 0; k < d; ++k) t.shift[k] = rng.normal(0.0, shift_scale);
  return t;
}

}  // namespace locus
