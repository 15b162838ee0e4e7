#include "nalb/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nalb {

int num_levels(long horizon, Eigen::Index dim) {
  if (horizon < 1 || dim < 1) {
    throw std::invalid_argument("num_levels: horizon and dim must be >= 1");
  }
  const double raw =
      std::ceil(0.5 * std::log2(static_cast<double>(horizon) / dim));
  return std::max(1, static_cast<int>(raw));
}

int anytime_num_levels(long t, Eigen::Index dim) {
  return num_levels(std::max<long>(2, t), dim);
}

double anytime_delta(double delta, int level) {
  if (level < 1) throw std::invalid_argument("anytime_delta: level < 1");
  return delta * 6.0 / (M_PI * M_PI * level * level);
}

std::string default_policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Oful: return "oful";
    case PolicyKind::OfulC: return "oful_c";
    case PolicyKind::Losan: return "losan";
    case PolicyKind::Lofav: return "lofav";
  }
  return "policy";
}

namespace {

double effective_lambda(const PolicyConfig& config) {
  if (config.lambda > 0.0) return config.lambda;
  return config.spec.sigma0_sq / (config.spec.S * config.spec.S);
}

LevelSlot make_slot(const PolicyConfig& config, int level, double delta_level,
                    int big_l) {
  LevelParams params;
  params.rho = std::pow(2.0, -level);
  params.lambda = (config.spec.R * config.spec.R) /
                  (config.spec.S * config.spec.S) * params.rho * params.rho;
  params.dim = config.dim;
  LevelSlot slot;
  slot.state = make_level(params);
  NoiseSpec level_spec = config.spec;
  level_spec.delta = delta_level;
  slot.width = make_width(params, level_spec);
  slot.delta_level = delta_level;
  slot.big_l = big_l;
  slot.theta_bar = EVector::Zero(config.dim);
  return slot;
}

// Bring the level set up to the count the schedule demands at step t.
void ensure_levels(PolicyState& state, long t) {
  if (state.config.kind != PolicyKind::Lofav) return;
  if (state.config.mode != LofavMode::Anytime) return;
  const int want = state.config.levels_override > 0
                       ? state.config.levels_override
                       : anytime_num_levels(t, state.config.dim);
  while (static_cast<int>(state.levels.size()) < want) {
    const int level = static_cast<int>(state.levels.size()) + 1;
    state.levels.push_back(make_slot(
        state.config, level, anytime_delta(state.config.spec.delta, level), 1));
  }
}

NoiseSpec slot_spec(const PolicyState& state, const LevelSlot& slot) {
  NoiseSpec spec = state.config.spec;
  spec.delta = slot.delta_level;
  return spec;
}

// Mahalanobis norms ||x_i|| in the metric's inverse, for all rows at once.
EVector batch_norms(const EMatrix& arms, const PrecisionStated& metric) {
  return ((arms * metric.inverse).cwiseProduct(arms))
      .rowwise()
      .sum()
      .cwiseMax(0.0)
      .cwiseSqrt();
}

void min_into(EVector& acc, const EVector& vals) {
  if (acc.size() == 0) {
    acc = vals;
  } else {
    acc = acc.cwiseMin(vals);
  }
}

// Per-arm scores for every arm row; shared by select_arm and arm_value.
EVector batch_values(const PolicyState& state, const EMatrix& arms) {
  const PolicyConfig& config = state.config;
  EVector acc;
  switch (config.kind) {
    case PolicyKind::Oful:
    case PolicyKind::OfulC: {
      const double radius = config.kind == PolicyKind::Oful
                                ? sncs_radius(state.gram, config.spec)
                                : oful_c_radius(state.gram, config.spec);
      acc = arms * state.theta_hat + radius * batch_norms(arms, state.gram);
      break;
    }
    case PolicyKind::Losan: {
      const LevelSlot& slot = state.levels.front();
      const double width =
          ucb_width(semi_gamma(slot.state, config.spec));
      acc = arms * slot.state.theta_hat +
            width * batch_norms(arms, slot.state.sigma);
      break;
    }
    case PolicyKind::Lofav: {
      for (const LevelSlot& slot : state.levels) {
        const double beta_width = ucb_width(slot.width.beta);
        min_into(acc, (arms * slot.theta_bar +
                       beta_width * batch_norms(arms, slot.state.sigma_bar))
                          .eval());
        if (config.mode != LofavMode::Plain) {
          const NoiseSpec spec = slot_spec(state, slot);
          const double gamma_width =
              ucb_width(practical_gamma_level(slot.state, spec, slot.big_l));
          min_into(acc, (arms * slot.state.theta_hat +
                         gamma_width * batch_norms(arms, slot.state.sigma))
                            .eval());
        }
      }
      break;
    }
  }
  return acc;
}

}  // namespace

PolicyState make_policy(const PolicyConfig& config) {
  check_spec(config.spec);
  if (config.dim < 1) throw std::invalid_argument("make_policy: dim < 1");
  PolicyState state;
  state.config = config;
  if (state.config.name.empty()) {
    state.config.name = default_policy_name(config.kind);
  }
  const double lambda = effective_lambda(config);
  switch (config.kind) {
    case PolicyKind::Oful:
    case PolicyKind::OfulC:
      state.gram = PrecisionStated(lambda, config.dim);
      state.b_vec = EVector::Zero(config.dim);
      state.theta_hat = EVector::Zero(config.dim);
      break;
    case PolicyKind::Losan: {
      LevelParams params;
      params.rho = 1.0;
      params.lambda = lambda;
      params.dim = config.dim;
      LevelSlot slot;
      slot.state = make_level(params);
      slot.width = make_width(params, config.spec);
      slot.delta_level = config.spec.delta;
      slot.big_l = 1;
      slot.theta_bar = EVector::Zero(config.dim);
      state.levels.push_back(std::move(slot));
      break;
    }
    case PolicyKind::Lofav: {
      if (config.mode == LofavMode::Anytime) {
        ensure_levels(state, 1);
      } else {
        if (config.levels_override <= 0 && config.horizon < 1) {
          throw std::invalid_argument(
              "make_policy: fixed-level policy needs a horizon or an explicit "
              "level count");
        }
        const int big_l = config.levels_override > 0
                              ? config.levels_override
                              : num_levels(config.horizon, config.dim);
        for (int level = 1; level <= big_l; ++level) {
          state.levels.push_back(
              make_slot(config, level, config.spec.delta, big_l));
        }
      }
      break;
    }
  }
  return state;
}

SelectResult select_arm(PolicyState& state, const EMatrix& arms) {
  if (arms.rows() < 1) throw std::invalid_argument("select_arm: no arms");
  if (arms.cols() != state.config.dim) {
    throw std::invalid_argument("select_arm: arm dimension mismatch");
  }
  ensure_levels(state, state.t + 1);
  const EVector values = batch_values(state, arms);
  Eigen::Index best = 0;
  double best_value = values[0];
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > best_value) {
      best_value = values[i];
      best = i;
    }
  }
  return {best, best_value};
}

double arm_value(const PolicyState& state, const EVector& x) {
  EMatrix arms(1, x.size());
  arms.row(0) = x.transpose();
  return batch_values(state, arms)[0];
}

void update(PolicyState& state, const EVector& x, double y) {
  if (x.size() != state.config.dim) {
    throw std::invalid_argument("update: dimension mismatch");
  }
  ensure_levels(state, state.t + 1);
  switch (state.config.kind) {
    case PolicyKind::Oful:
    case PolicyKind::OfulC:
      rank_one_update(state.gram, x, 1.0);
      state.b_vec.noalias() += y * x;
      state.theta_hat = solve(state.gram, state.b_vec);
      break;
    case PolicyKind::Losan:
      observe(state.levels.front().state, x, y);
      break;
    case PolicyKind::Lofav:
      for (LevelSlot& slot : state.levels) {
        observe(slot.state, x, y);
        const NoiseSpec spec = slot_spec(state, slot);
        commit_beta(slot.width,
                    full_beta(slot.state, slot.width, spec, slot.big_l));
        slot.theta_bar = secondary_estimate(slot.state);
      }
      break;
  }
  ++state.t;
}

}  // namespace nalb
