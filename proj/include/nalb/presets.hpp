#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nalb/harness.hpp"

namespace nalb {

// Width-comparison trace: one trial pulling the single arm (1,0) for 500k
// steps under two_point(sqrt(0.1)) noise, probing each family's UCB at (1,0).
struct Fig1Outcome {
  double lofav_ucb = 0;        // combined 2L-set value (policy default)
  double lofav_plain_ucb = 0;  // secondary-ellipsoids-only value
  double sncs_ucb = 0;
};

Fig1Outcome run_fig1(std::uint64_t seed, const std::string& out_dir,
                     long horizon = 500000);

// Named experiment bundles. "fig1" is handled by run_fig1; the rest map to
// one or more ExperimentConfigs (the surrogate-feature presets run one per
// benchmark function).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
std::vector<ExperimentConfig> preset_configs(const std::string& name);

// Runs a preset end to end (CSV outputs plus a one-line summary of the
// headline metric). Returns the process exit code.
int run_preset(const std::string& name, std::optional<long> trials_override,
               std::optional<std::uint64_t> seed_override,
               const std::string& out_dir);

}  // namespace nalb
