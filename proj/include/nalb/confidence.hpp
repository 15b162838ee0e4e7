#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nalb/level.hpp"
#include "nalb/precision.hpp"

namespace nalb {

// Problem-level noise and scale parameters shared by the width formulas.
// S bounds ||theta*||, sigma0_sq is the sub-Gaussian variance parameter,
// R bounds |noise| for the bounded-noise widths, delta is the failure rate.
struct NoiseSpec {
  double S = 1.0;
  double sigma0_sq = 1.0;
  double R = 1.0;
  double delta = 0.1;
};

inline void check_spec(const NoiseSpec& spec) {
  if (!(spec.S > 0.0) || !(spec.sigma0_sq > 0.0) || !(spec.R > 0.0)) {
    throw std::invalid_argument("NoiseSpec: S, sigma0_sq, R must be positive");
  }
  if (!(spec.delta > 0.0) || spec.delta > 1.0) {
    throw std::invalid_argument("NoiseSpec: delta must lie in (0, 1]");
  }
}

// Squared-radius bookkeeping for one level of the bounded-noise set family.
// beta is the latest squared radius (may transiently dip; stored unclamped),
// beta_bar the running max including beta_zero.
struct WidthState {
  double beta_zero = 0;
  double beta = 0;
  double beta_bar = 0;
};

inline double beta_zero_value(const LevelParams& params, const NoiseSpec& spec) {
  return 0.5 * params.lambda * spec.S * spec.S;
}

inline WidthState make_width(const LevelParams& params, const NoiseSpec& spec) {
  WidthState w;
  w.beta_zero = beta_zero_value(params, spec);
  w.beta = w.beta_zero;
  w.beta_bar = w.beta_zero;
  return w;
}

// Squared radius of the sub-Gaussian set centered at theta_hat:
// (lambda/2) S^2 + sum loss*D^2 + sigma0^2 ln(1/delta).
inline double semi_gamma(const LevelState& state, const NoiseSpec& spec) {
  return 0.5 * state.params.lambda * spec.S * spec.S + state.loss_dsq_sum +
         spec.sigma0_sq * std::log(1.0 / spec.delta);
}

// Squared radius of the bounded-noise set centered at theta_hat (one of the
// 2L sets the combined rule intersects): (lambda/2) S^2 + sum loss*D^2
// + R^2 ln(2L/delta).
inline double practical_gamma_level(const LevelState& state,
                                    const NoiseSpec& spec, int big_l) {
  if (big_l < 1) throw std::invalid_argument("practical_gamma_level: L < 1");
  return 0.5 * state.params.lambda * spec.S * spec.S + state.loss_dsq_sum +
         spec.R * spec.R * std::log(2.0 * big_l / spec.delta);
}

// Doubling index: smallest k >= 1 with 2^k >= sqrt(beta_bar / beta_zero).
inline int k_index(double beta_bar, double beta_zero) {
  if (!(beta_zero > 0.0)) {
    throw std::invalid_argument("k_index: beta_zero must be positive");
  }
  if (beta_bar < beta_zero) {
    throw std::invalid_argument("k_index: beta_bar below beta_zero");
  }
  const double k = std::ceil(std::log2(std::sqrt(beta_bar / beta_zero)));
  return std::max(1, static_cast<int>(k));
}

// ln(sqrt(pi (t+1)) * 6.8 L k ln^2(1+k) / delta).
inline double xi_value(long t, int k, int big_l, double delta) {
  if (t < 0 || k < 1 || big_l < 1) {
    throw std::invalid_argument("xi_value: bad arguments");
  }
  const double lk = std::log(1.0 + k);
  return std::log(std::sqrt(M_PI * (t + 1.0)) * 6.8 * big_l * k * lk * lk /
                  delta);
}

// Squared radius of the bounded-noise set centered at the secondary estimate.
// width.beta_bar must hold the running max through the previous step.
inline double full_beta(const LevelState& state, const WidthState& width,
                        const NoiseSpec& spec, int big_l) {
  const double rho = state.params.rho;
  const int k = k_index(width.beta_bar, width.beta_zero);
  const double xi = xi_value(state.t, k, big_l, spec.delta);
  const double noise_term =
      spec.R * spec.R * std::log(2.0 * big_l / spec.delta);
  const double gap = min_primary_loss(state) - min_secondary_loss(state);
  return gap + width.beta_zero + state.loss_dsq_sum +
         std::sqrt(8.0 * rho * rho * width.beta_bar *
                   (state.loss_sum + noise_term) * xi) +
         std::pow(2.0, k) * rho * spec.R * std::sqrt(2.0 * width.beta_zero) * xi;
}

inline void commit_beta(WidthState& width, double beta_t) {
  width.beta = beta_t;
  width.beta_bar = std::max(width.beta_bar, beta_t);
}

// Norm-radius (not squared) of the self-normalized sub-Gaussian set on the
// unweighted Gram: sqrt(lambda) S + sqrt(sigma0^2 logdet-ratio
// + 2 sigma0^2 ln(1/delta)).
template <class Scalar>
double sncs_radius(const PrecisionState<Scalar>& gram, const NoiseSpec& spec) {
  const double ratio =
      std::max(0.0, gram.logdet - gram.dim() * std::log(gram.lambda));
  return std::sqrt(gram.lambda) * spec.S +
         std::sqrt(spec.sigma0_sq * ratio +
                   2.0 * spec.sigma0_sq * std::log(1.0 / spec.delta));
}

// Corrected variant that keeps the prior term inside the square root;
// dominated by sncs_radius for every input.
template <class Scalar>
double oful_c_radius(const PrecisionState<Scalar>& gram, const NoiseSpec& spec) {
  const double ratio =
      std::max(0.0, gram.logdet - gram.dim() * std::log(gram.lambda));
  return std::sqrt(gram.lambda * spec.S * spec.S + spec.sigma0_sq * ratio +
                   2.0 * spec.sigma0_sq * std::log(1.0 / spec.delta));
}

// x^T center + width * ||x||_{metric^{-1}}; width carries any sqrt(2) factor.
template <class Scalar, class DerivedC, class DerivedX>
double ucb(const Eigen::MatrixBase<DerivedC>& center, double width,
           const PrecisionState<Scalar>& metric,
           const Eigen::MatrixBase<DerivedX>& x) {
  return x.dot(center) + width * std::sqrt(mahalanobis_sq(metric, x));
}

// Width used in UCB evaluation: sqrt(2 beta) with a floor at zero so an
// empty ellipsoid degrades to its center point instead of NaN.
inline double ucb_width(double beta) {
  return std::sqrt(2.0 * std::max(0.0, beta));
}

}  // namespace nalb
