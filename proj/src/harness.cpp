#include "nalb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nalb {

const char* const kAggregateMetrics[3] = {"cum_regret", "simple_regret",
                                          "max_ucb"};

namespace {

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "oful") return PolicyKind::Oful;
  if (name == "oful_c") return PolicyKind::OfulC;
  if (name == "losan") return PolicyKind::Losan;
  if (name == "lofav") return PolicyKind::Lofav;
  throw ConfigError("unknown policy kind: " + name);
}

LofavMode mode_from_name(const std::string& name) {
  if (name == "practical") return LofavMode::Practical;
  if (name == "plain") return LofavMode::Plain;
  if (name == "anytime") return LofavMode::Anytime;
  throw ConfigError("unknown mode: " + name);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    ExperimentConfig config;
    config.name = j.value("name", std::string("experiment"));
    config.horizon = j.at("horizon").get<long>();
    config.trials = j.value("trials", 1L);
    config.seed = j.value("seed", 0ull);
    config.delta = j.value("delta", 0.1);
    config.write_raw = j.value("write_raw", false);
    config.out_dir = j.value("out_dir", std::string("."));
    if (config.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (config.trials < 1) throw ConfigError("trials must be >= 1");
    if (!(config.delta > 0.0) || config.delta > 1.0) {
      throw ConfigError("delta must lie in (0, 1]");
    }

    const auto& ji = j.at("instance");
    config.instance.kind = ji.at("kind").get<std::string>();
    if (config.instance.kind != "sphere" && config.instance.kind != "hard_gap" &&
        config.instance.kind != "easy_sphere" && config.instance.kind != "bo") {
      throw ConfigError("unknown instance kind: " + config.instance.kind);
    }
    config.instance.dim = ji.value("dim", 0L);
    config.instance.num_arms = ji.value("num_arms", 0L);
    config.instance.S = ji.value("S", 1.0);
    config.instance.sigma0 = ji.value("sigma0", 1.0);
    config.instance.benchmark = ji.value("benchmark", std::string());
    config.instance.feature_dim = ji.value("feature_dim", 0L);
    config.instance.bandwidth = ji.value("bandwidth", 0.0);
    if (ji.contains("noise")) {
      config.instance.noise.kind =
          noise_kind_from_name(ji.at("noise").at("kind").get<std::string>());
      config.instance.noise.param = ji.at("noise").at("param").get<double>();
    }

    const auto& jp = j.at("policies");
    if (!jp.is_array() || jp.empty()) {
      throw ConfigError("policies must be a nonempty array");
    }
    for (const auto& p : jp) {
      PolicyRecipe recipe;
      recipe.kind = policy_kind_from_name(p.at("kind").get<std::string>());
      recipe.name = p.value("name", std::string());
      recipe.spec.S = p.value("S", 1.0);
      recipe.spec.sigma0_sq = p.value("sigma0_sq", 1.0);
      recipe.spec.R = p.value("R", 1.0);
      recipe.spec.delta = config.delta;
      recipe.lambda = p.value("lambda", 0.0);
      recipe.mode = mode_from_name(p.value("mode", std::string("practical")));
      recipe.levels_override = p.value("levels", 0);
      config.policies.push_back(recipe);
    }
    std::vector<std::string> seen;
    for (const PolicyRecipe& recipe : config.policies) {
      const std::string resolved =
          recipe.name.empty() ? default_policy_name(recipe.kind) : recipe.name;
      if (std::find(seen.begin(), seen.end(), resolved) != seen.end()) {
        throw ConfigError("duplicate policy name: " + resolved);
      }
      seen.push_back(resolved);
    }
    return config;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

InstanceSpec build_instance(const ExperimentConfig& config,
                            std::uint64_t trial_seed) {
  const InstanceRecipe& r = config.instance;
  try {
    if (r.kind == "sphere") {
      return make_sphere_instance(r.dim, r.S, r.num_arms, r.noise, trial_seed);
    }
    if (r.kind == "hard_gap") {
      return make_hard_gap_instance(r.dim, config.horizon, r.sigma0, r.S,
                                    r.num_arms, r.noise, trial_seed);
    }
    if (r.kind == "easy_sphere") {
      return make_easy_sphere_instance(r.noise, trial_seed);
    }
    if (r.kind == "bo") {
      return make_bo_instance(r.benchmark, r.num_arms, r.feature_dim, r.noise,
                              trial_seed, r.bandwidth);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance recipe: ") + e.what());
  }
  throw ConfigError("unknown instance kind: " + r.kind);
}

TrialResult run_trial(const ExperimentConfig& config, long trial) {
  const std::uint64_t trial_seed = config.seed + static_cast<std::uint64_t>(trial);
  const InstanceSpec inst = build_instance(config, trial_seed);

  TrialResult result;
  result.trial = trial;
  std::vector<PolicyState> states;
  for (const PolicyRecipe& recipe : config.policies) {
    PolicyConfig pc;
    pc.kind = recipe.kind;
    pc.spec = recipe.spec;
    pc.dim = inst.arms.cols();
    pc.horizon = config.horizon;
    pc.lambda = recipe.lambda;
    pc.mode = recipe.mode;
    pc.levels_override = recipe.levels_override;
    pc.name = recipe.name;
    try {
      states.push_back(make_policy(pc));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("policy recipe: ") + e.what());
    }
    PolicySeries series;
    series.name = states.back().config.name;
    series.steps.reserve(config.horizon);
    result.policies.push_back(std::move(series));
  }

  for (long t = 1; t <= config.horizon; ++t) {
    // One noise draw per (trial, t), shared by every policy.
    CounterRng noise_rng =
        CounterRng::derive(trial_seed, 0x4E01, static_cast<std::uint64_t>(t));
    const double noise_value = sample_noise(inst.noise, noise_rng);
    for (size_t p = 0; p < states.size(); ++p) {
      const SelectResult pick = select_arm(states[p], inst.arms);
      const PullResult pulled = pull(inst, pick.index, noise_value);
      update(states[p], inst.arms.row(pick.index).transpose(), pulled.reward);

      StepRecord rec;
      rec.arm = pick.index;
      rec.reward = pulled.reward;
      rec.inst_regret = pulled.inst_regret;
      const std::vector<StepRecord>& prev = result.policies[p].steps;
      rec.cum_regret =
          (prev.empty() ? 0.0 : prev.back().cum_regret) + pulled.inst_regret;
      rec.simple_regret =
          prev.empty() ? pulled.inst_regret
                       : std::min(prev.back().simple_regret, pulled.inst_regret);
      rec.max_ucb = pick.max_ucb;
      result.policies[p].steps.push_back(rec);
    }
  }
  return result;
}

void Aggregator::add(const TrialResult& result) {
  if (horizon_ < 0) {
    horizon_ = result.policies.empty()
                   ? 0
                   : static_cast<long>(result.policies.front().steps.size());
    for (const PolicySeries& series : result.policies) {
      if (static_cast<long>(series.steps.size()) != horizon_) {
        throw std::invalid_argument("aggregate: mismatched horizons");
      }
      names_.push_back(series.name);
    }
    sum_.assign(names_.size(),
                std::vector<std::vector<double>>(
                    3, std::vector<double>(horizon_, 0.0)));
    sum_sq_ = sum_;
  }
  if (result.policies.size() != names_.size()) {
    throw std::invalid_argument("aggregate: mismatched policy lists");
  }
  for (size_t p = 0; p < names_.size(); ++p) {
    const PolicySeries& series = result.policies[p];
    if (series.name != names_[p] ||
        static_cast<long>(series.steps.size()) != horizon_) {
      throw std::invalid_argument("aggregate: mismatched series");
    }
    for (long t = 0; t < horizon_; ++t) {
      const StepRecord& rec = series.steps[t];
      const double vals[3] = {rec.cum_regret, rec.simple_regret, rec.max_ucb};
      for (int m = 0; m < 3; ++m) {
        sum_[p][m][t] += vals[m];
        sum_sq_[p][m][t] += vals[m] * vals[m];
      }
    }
  }
  ++trials_;
}

AggregateStats Aggregator::finalize() const {
  if (trials_ < 1) throw std::invalid_argument("aggregate: no results");
  AggregateStats stats;
  stats.horizon = horizon_;
  stats.trials = trials_;
  for (size_t p = 0; p < names_.size(); ++p) {
    for (int m = 0; m < 3; ++m) {
      SeriesStats series;
      series.policy = names_[p];
      series.metric = kAggregateMetrics[m];
      series.mean.resize(horizon_);
      series.stderr_.resize(horizon_);
      for (long t = 0; t < horizon_; ++t) {
        const double mean = sum_[p][m][t] / trials_;
        series.mean[t] = mean;
        if (trials_ > 1) {
          const double var =
              std::max(0.0, (sum_sq_[p][m][t] - trials_ * mean * mean) /
                                (trials_ - 1));
          series.stderr_[t] = std::sqrt(var / trials_);
        } else {
          series.stderr_[t] = 0.0;
        }
      }
      stats.series.push_back(std::move(series));
    }
  }
  return stats;
}

AggregateStats aggregate(const std::vector<TrialResult>& results) {
  Aggregator agg;
  for (const TrialResult& r : results) agg.add(r);
  return agg.finalize();
}

const SeriesStats& AggregateStats::find(const std::string& policy,
                                        const std::string& metric) const {
  for (const SeriesStats& s : series) {
    if (s.policy == policy && s.metric == metric) return s;
  }
  throw std::invalid_argument("AggregateStats: no series " + policy + "/" +
                              metric);
}

void format_value(std::ostream& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out << buf;
}

void write_csv(const AggregateStats& stats, std::ostream& out) {
  out << "t,policy,metric,mean,stderr\n";
  for (const SeriesStats& s : stats.series) {
    for (long t = 0; t < stats.horizon; ++t) {
      out << (t + 1) << ',' << s.policy << ',' << s.metric << ',';
      format_value(out, s.mean[t]);
      out << ',';
      format_value(out, s.stderr_[t]);
      out << '\n';
    }
  }
}

void write_csv_raw(const std::vector<TrialResult>& results, std::ostream& out) {
  out << "trial,t,policy,arm,reward,inst_regret,cum_regret,simple_regret,"
         "max_ucb\n";
  for (const TrialResult& result : results) {
    const long horizon = result.policies.empty()
                             ? 0
                             : static_cast<long>(result.policies[0].steps.size());
    for (long t = 0; t < horizon; ++t) {
      for (const PolicySeries& series : result.policies) {
        const StepRecord& rec = series.steps[t];
        out << result.trial << ',' << (t + 1) << ',' << series.name << ','
            << rec.arm << ',';
        format_value(out, rec.reward);
        out << ',';
        format_value(out, rec.inst_regret);
        out << ',';
        format_value(out, rec.cum_regret);
        out << ',';
        format_value(out, rec.simple_regret);
        out << ',';
        format_value(out, rec.max_ucb);
        out << '\n';
      }
    }
  }
}

AggregateStats run_experiment(const ExperimentConfig& config) {
  if (config.policies.empty()) throw ConfigError("no policies configured");
  Aggregator agg;
  std::vector<TrialResult> raw;
  for (long trial = 0; trial < config.trials; ++trial) {
    TrialResult result = run_trial(config, trial);
    agg.add(result);
    if (config.write_raw) raw.push_back(std::move(result));
  }
  const AggregateStats stats = agg.finalize();

  std::filesystem::create_directories(config.out_dir);
  const std::string base = config.out_dir + "/" + config.name;
  {
    std::ofstream out(base + "_aggregate.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + base + "_aggregate.csv");
    write_csv(stats, out);
  }
  if (config.write_raw) {
    std::ofstream out(base + "_raw.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + base + "_raw.csv");
    write_csv_raw(raw, out);
  }

  for (const PolicyRecipe& recipe : config.policies) {
    const std::string name =
        recipe.name.empty() ? default_policy_name(recipe.kind) : recipe.name;
    const SeriesStats& s = stats.find(name, "cum_regret");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: final cum_regret %.6g +/- %.6g",
                  name.c_str(), s.mean.back(), s.stderr_.back());
    std::cout << config.name << " " << buf << "\n";
  }
  return stats;
}

}  // namespace nalb
