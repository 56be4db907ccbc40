#ifndef NBSEL_NUMERIC_CORE_HPP
#define NBSEL_NUMERIC_CORE_HPP

// Dense building blocks shared by every other module: the observation matrix,
// symmetric matrices, standardization and a Cholesky-based SPD toolkit.
// Everything here is templated on the scalar type; the rest of the library
// instantiates it with double.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "nbsel/errors.hpp"

namespace nbsel {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// n x p observations, one row per observation.
template <typename Scalar>
class BasicDataMatrix {
 public:
  BasicDataMatrix(Matrix<Scalar> values, bool standardized = false)
      : values_(std::move(values)), standardized_(standardized) {
    if (values_.rows() < 2)
      throw Error(ErrorKind::DomainError, "data matrix needs at least 2 observations");
    if (values_.cols() < 1)
      throw Error(ErrorKind::DomainError, "data matrix needs at least 1 variable");
    if (!values_.allFinite())
      throw Error(ErrorKind::DomainError, "data matrix contains non-finite entries");
  }

  Index n() const { return values_.rows(); }
  Index p() const { return values_.cols(); }
  bool standardized() const { return standardized_; }
  const Matrix<Scalar>& values() const { return values_; }
  auto column(Index a) const { return values_.col(a); }

 private:
  Matrix<Scalar> values_;
  bool standardized_;
};

/// Symmetric matrix. Only the lower triangle of the source is read; the upper
/// triangle is mirrored from it, so the stored matrix is exactly symmetric.
template <typename Scalar>
class BasicSymMatrix {
 public:
  BasicSymMatrix() = default;

  template <typename Derived>
  explicit BasicSymMatrix(const Eigen::MatrixBase<Derived>& source) {
    if (source.rows() != source.cols())
      throw Error(ErrorKind::DomainError, "symmetric matrix must be square");
    entries_ = source.template triangularView<Eigen::Lower>();
    entries_.template triangularView<Eigen::StrictlyUpper>() = entries_.transpose();
  }

  static BasicSymMatrix identity(Index dim) {
    return BasicSymMatrix(Matrix<Scalar>::Identity(dim, dim));
  }

  Index dim() const { return entries_.rows(); }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }
  const Matrix<Scalar>& dense() const { return entries_; }

 private:
  Matrix<Scalar> entries_;
};

using DataMatrix = BasicDataMatrix<double>;
using SymMatrix = BasicSymMatrix<double>;

/// Centers every column and scales it to n^{-1} <x, x> = 1.
template <typename Scalar>
BasicDataMatrix<Scalar> standardize(const BasicDataMatrix<Scalar>& data) {
  Matrix<Scalar> x = data.values();
  const Scalar n = static_cast<Scalar>(x.rows());
  for (Index a = 0; a < x.cols(); ++a) {
    auto col = x.col(a);
    col.array() -= col.mean();
    const Scalar variance = col.squaredNorm() / n;
    if (!(variance >= Scalar(1e-14)))
      throw Error(ErrorKind::ConstantColumn,
                  "column " + std::to_string(a) + " has zero empirical variance", a);
    col /= std::sqrt(variance);
  }
  return BasicDataMatrix<Scalar>(std::move(x), true);
}

/// Sample second-moment matrix n^{-1} X^T X.
template <typename Scalar>
BasicSymMatrix<Scalar> gram(const BasicDataMatrix<Scalar>& data) {
  Matrix<Scalar> g = Matrix<Scalar>::Zero(data.p(), data.p());
  g.template selfadjointView<Eigen::Lower>().rankUpdate(data.values().transpose(),
                                                       Scalar(1) / Scalar(data.n()));
  return BasicSymMatrix<Scalar>(g);
}

/// Lower Cholesky factor. Throws NotPositiveDefinite with the failing pivot.
template <typename Scalar>
Matrix<Scalar> cholesky(const BasicSymMatrix<Scalar>& m) {
  const Index dim = m.dim();
  const Matrix<Scalar>& a = m.dense();
  Matrix<Scalar> l = Matrix<Scalar>::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    const Scalar pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > Scalar(1e-14)))
      throw Error(ErrorKind::NotPositiveDefinite,
                  "matrix is not positive definite at pivot " + std::to_string(j), j);
    const Scalar diag = std::sqrt(pivot);
    l(j, j) = diag;
    const Index below = dim - j - 1;
    if (below > 0) {
      l.col(j).tail(below) =
          (a.col(j).tail(below) - l.bottomLeftCorner(below, j) * l.row(j).head(j).transpose()) /
          diag;
    }
  }
  return l;
}

template <typename Scalar>
BasicSymMatrix<Scalar> invert_spd(const BasicSymMatrix<Scalar>& m) {
  const Matrix<Scalar> l = cholesky(m);
  const Matrix<Scalar> l_inv = l.template triangularView<Eigen::Lower>().solve(
      Matrix<Scalar>::Identity(m.dim(), m.dim()));
  Matrix<Scalar> inv = Matrix<Scalar>::Zero(m.dim(), m.dim());
  inv.template selfadjointView<Eigen::Lower>().rankUpdate(l_inv.transpose());
  return BasicSymMatrix<Scalar>(inv);
}

template <typename Scalar>
Scalar log_det_spd(const BasicSymMatrix<Scalar>& m) {
  const Matrix<Scalar> l = cholesky(m);
  return Scalar(2) * l.diagonal().array().log().sum();
}

/// z with 1 - Phi(z) = q, for q in (0, 0.5]. Wichura's AS241 (PPND16).
double gaussian_tail_quantile(double q);

}  // namespace nbsel

#endif  // NBSEL_NUMERIC_CORE_HPP
