#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nalb/confidence.hpp"
#include "nalb/level.hpp"
#include "nalb/precision.hpp"

namespace nalb {

enum class PolicyKind { Oful, OfulC, Losan, Lofav };

// How the level-based policy combines its sets when scoring arms:
// Plain uses only the secondary-estimate ellipsoids, Practical additionally
// intersects the primary-estimate ellipsoids (2L sets total), Anytime is
// Practical with a growing level schedule and per-level failure rates.
enum class LofavMode { Practical, Plain, Anytime };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Oful;
  NoiseSpec spec;
  Eigen::Index dim = 0;
  long horizon = 0;      // required by the fixed-level policy
  double lambda = 0;     // <= 0 means the default sigma0_sq / S^2
  LofavMode mode = LofavMode::Practical;
  int levels_override = 0;  // > 0 pins the level count
  std::string name;         // label used in CSV output
};

struct LevelSlot {
  LevelState state;
  WidthState width;
  double delta_level = 0;  // failure rate this level's formulas consume
  int big_l = 1;           // L plugged into the width formulas
  EVector theta_bar;       // cached secondary estimate
};

struct PolicyState {
  PolicyConfig config;
  long t = 0;
  // unweighted ridge for the OFUL family
  PrecisionStated gram;
  EVector b_vec;
  EVector theta_hat;
  // weighted levels for the adaptive policies
  std::vector<LevelSlot> levels;
};

struct SelectResult {
  Eigen::Index index = 0;
  double max_ucb = 0;
};

// 1 or ceil(0.5 log2(n/d)) levels for a known horizon n.
int num_levels(long horizon, Eigen::Index dim);

// Level count in play at step t when the horizon is unknown.
int anytime_num_levels(long t, Eigen::Index dim);

// delta * 6 / (pi^2 l^2); summable to delta across all levels.
double anytime_delta(double delta, int level);

PolicyState make_policy(const PolicyConfig& config);

// Scores every arm (rows of `arms`) and returns the argmax with ties going
// to the lowest index, plus the winning score. May spawn levels in anytime
// mode, hence the mutable state.
SelectResult select_arm(PolicyState& state, const EMatrix& arms);

// Absorb the observation (x, y) into the policy.
void update(PolicyState& state, const EVector& x, double y);

// Reference per-arm score (the batched select_arm must match it).
double arm_value(const PolicyState& state, const EVector& x);

std::string default_policy_name(PolicyKind kind);

}  // namespace nalb
