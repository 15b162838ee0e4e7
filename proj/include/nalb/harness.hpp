#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nalb/environments.hpp"
#include "nalb/policies.hpp"

namespace nalb {

// Configuration problems (bad file, bad schema, infeasible recipe) surface as
// this type so the CLI can map them to its config-error exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceRecipe {
  std::string kind;  // sphere | hard_gap | easy_sphere | bo
  Eigen::Index dim = 0;
  Eigen::Index num_arms = 0;
  double S = 1.0;
  double sigma0 = 1.0;        // hard_gap
  std::string benchmark;      // bo
  Eigen::Index feature_dim = 0;  // bo
  double bandwidth = 0.0;        // bo; <= 0 means median heuristic
  NoiseModel noise;
};

struct PolicyRecipe {
  PolicyKind kind = PolicyKind::Oful;
  std::string name;
  NoiseSpec spec;          // delta filled from the experiment level
  double lambda = 0;       // <= 0 means the policy default
  LofavMode mode = LofavMode::Practical;
  int levels_override = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  long horizon = 0;
  long trials = 1;
  std::uint64_t seed = 0;
  double delta = 0.1;
  bool write_raw = false;
  std::string out_dir = ".";
  InstanceRecipe instance;
  std::vector<PolicyRecipe> policies;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Instance for one trial; the per-trial seed is base seed + trial index.
InstanceSpec build_instance(const ExperimentConfig& config,
                            std::uint64_t trial_seed);

struct StepRecord {
  Eigen::Index arm = 0;
  double reward = 0;
  double inst_regret = 0;
  double cum_regret = 0;
  double simple_regret = 0;
  double max_ucb = 0;
};

struct PolicySeries {
  std::string name;
  std::vector<StepRecord> steps;
};

struct TrialResult {
  long trial = 0;
  std::vector<PolicySeries> policies;
};

// One simulated trial: every policy sees the same instance and, at each step,
// the same noise draw (indexed by (trial, t), never by policy).
TrialResult run_trial(const ExperimentConfig& config, long trial);

struct SeriesStats {
  std::string policy;
  std::string metric;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct AggregateStats {
  long horizon = 0;
  long trials = 0;
  std::vector<SeriesStats> series;

  const SeriesStats& find(const std::string& policy,
                          const std::string& metric) const;
};

// Streaming mean/stderr accumulation so long runs never hold all trials.
class Aggregator {
 public:
  void add(const TrialResult& result);
  AggregateStats finalize() const;

 private:
  long horizon_ = -1;
  long trials_ = 0;
  std::vector<std::string> names_;
  // per policy, per metric, per step: sum and sum of squares
  std::vector<std::vector<std::vector<double>>> sum_, sum_sq_;
};

AggregateStats aggregate(const std::vector<TrialResult>& results);

// header t,policy,metric,mean,stderr; 17 significant digits, LF endings.
void write_csv(const AggregateStats& stats, std::ostream& out);
// header trial,t,policy,arm,reward,inst_regret,cum_regret,simple_regret,max_ucb
void write_csv_raw(const std::vector<TrialResult>& results, std::ostream& out);

void format_value(std::ostream& out, double value);

// Runs all trials, writes <name>_aggregate.csv (and raw when asked), prints
// a one-line summary per policy.
AggregateStats run_experiment(const ExperimentConfig& config);

extern const char* const kAggregateMetrics[3];

}  // namespace nalb
