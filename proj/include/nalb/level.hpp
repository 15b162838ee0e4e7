#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "nalb/precision.hpp"

namespace nalb {

using EVector = Eigen::VectorXd;
using EMatrix = Eigen::MatrixXd;

struct LevelParams {
  double rho = 1.0;     // cap on the self-normalized feature norm
  double lambda = 1.0;  // ridge regularizer
  Eigen::Index dim = 0;
};

// One weighted online ridge regression: observations (x, y) are absorbed with
// data-dependent weights w = min(1, rho / ||x||_{Sigma^{-1}}), so the weighted
// feature w*x never exceeds rho in the prior norm. Tracks both the primary
// Gram Sigma = lambda I + sum w^2 x x^T and the doubled Gram
// Sigma_bar = lambda I + 2 sum w^2 x x^T used by the secondary estimator,
// plus the scalar accumulators the confidence widths need.
struct LevelState {
  LevelParams params;
  long t = 0;
  PrecisionStated sigma;
  PrecisionStated sigma_bar;
  EVector b_vec;     // sum w^2 y x
  EVector c_vec;     // sum w^2 (x^T th_prev) x
  double q_sum = 0;  // sum w^2 y^2
  double p_sum = 0;  // sum w^2 (x^T th_prev)^2
  double loss_sum = 0;      // sum of weighted prediction losses at th_prev
  double loss_dsq_sum = 0;  // sum of loss * D^2
  EVector theta_hat;
};

struct ObserveResult {
  double weight = 0;
  double loss = 0;
  double d_sq = 0;
};

inline LevelState make_level(const LevelParams& params) {
  if (!(params.rho > 0.0) || params.rho > 1.0) {
    throw std::invalid_argument("make_level: rho must lie in (0, 1]");
  }
  LevelState s;
  s.params = params;
  s.sigma = PrecisionStated(params.lambda, params.dim);
  s.sigma_bar = PrecisionStated(params.lambda, params.dim);
  s.b_vec = EVector::Zero(params.dim);
  s.c_vec = EVector::Zero(params.dim);
  s.theta_hat = EVector::Zero(params.dim);
  return s;
}

// min(1, rho / ||x||_{Sigma^{-1}}); a zero feature gets weight 1.
template <class Derived>
double compute_weight(const LevelState& state,
                      const Eigen::MatrixBase<Derived>& x) {
  const double norm_sq = mahalanobis_sq(state.sigma, x);
  if (norm_sq <= 0.0) return 1.0;
  return std::min(1.0, state.params.rho / std::sqrt(norm_sq));
}

// (w^2 / 2) (x^T theta_hat - y)^2 at the current (pre-update) estimate.
template <class Derived>
double prediction_loss(const LevelState& state,
                       const Eigen::MatrixBase<Derived>& x, double y,
                       double w) {
  const double err = x.dot(state.theta_hat) - y;
  return 0.5 * w * w * err * err;
}

inline const EVector& point_estimate(const LevelState& state) {
  return state.theta_hat;
}

inline EVector secondary_estimate(const LevelState& state) {
  return solve(state.sigma_bar, (state.b_vec + state.c_vec).eval());
}

// min over theta of (lambda/2)||theta||^2 + sum of weighted square losses.
inline double min_primary_loss(const LevelState& state) {
  return 0.5 * state.q_sum - 0.5 * state.b_vec.dot(solve(state.sigma, state.b_vec));
}

// Same for the secondary objective, which adds the drift penalties
// sum (w^2/2)(x^T(theta - th_prev))^2 on top of the primary one.
inline double min_secondary_loss(const LevelState& state) {
  const EVector bc = state.b_vec + state.c_vec;
  return 0.5 * (state.q_sum + state.p_sum) - 0.5 * bc.dot(solve(state.sigma_bar, bc));
}

// Absorb one observation. Returns the weight, the prediction loss at the
// pre-update estimate, and D^2 = ||w x||^2 in the posterior Sigma metric
// (bounded by rho^2/(1+rho^2) <= 1/2).
template <class Derived>
ObserveResult observe(LevelState& state, const Eigen::MatrixBase<Derived>& x,
                      double y) {
  if (x.size() != state.params.dim) {
    throw std::invalid_argument("observe: dimension mismatch");
  }
  ObserveResult out;
  out.weight = compute_weight(state, x);
  out.loss = prediction_loss(state, x, y, out.weight);

  const double w_sq = out.weight * out.weight;
  const double proj = x.dot(state.theta_hat);
  state.c_vec.noalias() += w_sq * proj * x;
  state.p_sum += w_sq * proj * proj;
  state.loss_sum += out.loss;

  rank_one_update(state.sigma, x, w_sq);
  rank_one_update(state.sigma_bar, x, 2.0 * w_sq);
  state.b_vec.noalias() += w_sq * y * x;
  state.q_sum += w_sq * y * y;

  out.d_sq = mahalanobis_sq(state.sigma, (out.weight * x).eval());
  state.loss_dsq_sum += out.loss * out.d_sq;

  state.theta_hat = solve(state.sigma, state.b_vec);
  ++state.t;
  return out;
}

}  // namespace nalb
