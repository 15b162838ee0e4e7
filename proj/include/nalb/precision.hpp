#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nalb {

// Regularized Gram matrix lambda*I + sum_s c_s v_s v_s^T maintained together
// with its inverse and log-determinant under rank-one updates, so Mahalanobis
// norms and solves stay O(d^2) per step. Dense, intended for d <= 512.
template <class Scalar = double>
struct PrecisionState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar lambda{};
  Matrix matrix;
  Matrix inverse;
  Scalar logdet{};
  long updates = 0;

  PrecisionState() = default;

  PrecisionState(Scalar lambda_in, Eigen::Index dim) : lambda(lambda_in) {
    if (!(lambda_in > Scalar(0))) {
      throw std::invalid_argument("PrecisionState: lambda must be positive");
    }
    if (dim <= 0) {
      throw std::invalid_argument("PrecisionState: dim must be positive");
    }
    matrix = Matrix::Identity(dim, dim) * lambda;
    inverse = Matrix::Identity(dim, dim) / lambda;
    logdet = Scalar(dim) * std::log(lambda);
  }

  Eigen::Index dim() const { return matrix.rows(); }
};

// x^T (state.matrix)^{-1} x via the maintained inverse.
template <class Scalar, class Derived>
Scalar mahalanobis_sq(const PrecisionState<Scalar>& state,
                      const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.dim()) {
    throw std::invalid_argument("mahalanobis_sq: dimension mismatch");
  }
  return x.dot(state.inverse * x);
}

// (state.matrix)^{-1} rhs via the maintained inverse.
template <class Scalar, class Derived>
typename PrecisionState<Scalar>::Vector solve(
    const PrecisionState<Scalar>& state, const Eigen::MatrixBase<Derived>& rhs) {
  if (rhs.size() != state.dim()) {
    throw std::invalid_argument("solve: dimension mismatch");
  }
  return state.inverse * rhs;
}

// matrix += c v v^T, with inverse (Sherman-Morrison) and logdet kept in sync.
// Every 1024 updates both matrices are re-symmetrized to damp drift.
template <class Scalar, class Derived>
void rank_one_update(PrecisionState<Scalar>& state,
                     const Eigen::MatrixBase<Derived>& v, Scalar c) {
  if (v.size() != state.dim()) {
    throw std::invalid_argument("rank_one_update: dimension mismatch");
  }
  if (c < Scalar(0)) {
    throw std::invalid_argument("rank_one_update: scale must be nonnegative");
  }
  ++state.updates;
  if (c > Scalar(0)) {
    const typename PrecisionState<Scalar>::Vector iv = state.inverse * v;
    const Scalar quad = v.dot(iv);
    const Scalar denom = Scalar(1) + c * quad;
    state.matrix.noalias() += c * v * v.transpose();
    state.inverse.noalias() -= (c / denom) * iv * iv.transpose();
    state.logdet += std::log(denom);
  }
  if (state.updates % 1024 == 0) {
    state.matrix = ((state.matrix + state.matrix.transpose()) / Scalar(2)).eval();
    state.inverse =
        ((state.inverse + state.inverse.transpose()) / Scalar(2)).eval();
  }
}

using PrecisionStated = PrecisionState<double>;

}  // namespace nalb
