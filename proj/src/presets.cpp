#include "nalb/presets.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace nalb {

namespace {

std::vector<long> probe_schedule(long horizon) {
  std::vector<long> probes;
  long base = 1;
  while (base <= horizon) {
    for (long mult : {1L, 2L, 5L}) {
      const long t = base * mult;
      if (t <= horizon) probes.push_back(t);
    }
    base *= 10;
  }
  if (probes.empty() || probes.back() != horizon) probes.push_back(horizon);
  return probes;
}

PolicyRecipe basic_policy(PolicyKind kind, double S, double sigma0_sq,
                          double R, double delta, double lambda = 0.0) {
  PolicyRecipe recipe;
  recipe.kind = kind;
  recipe.spec.S = S;
  recipe.spec.sigma0_sq = sigma0_sq;
  recipe.spec.R = R;
  recipe.spec.delta = delta;
  recipe.lambda = lambda;
  return recipe;
}

ExperimentConfig fig2_config(bool bounded) {
  ExperimentConfig config;
  config.name = bounded ? "fig2b" : "fig2a";
  config.horizon = 2000;
  config.trials = 50;
  config.seed = 1;
  config.delta = 0.1;
  config.instance.kind = "sphere";
  config.instance.dim = 32;
  config.instance.num_arms = 128;
  config.instance.S = 1.0;
  config.instance.noise = bounded ? NoiseModel{NoiseKind::TwoPoint, 0.01}
                                  : NoiseModel{NoiseKind::Gaussian, 0.01};
  config.policies.push_back(basic_policy(
      bounded ? PolicyKind::Lofav : PolicyKind::Losan, 1.0, 1.0, 1.0,
      config.delta));
  config.policies.push_back(
      basic_policy(PolicyKind::Oful, 1.0, 1.0, 1.0, config.delta));
  return config;
}

std::vector<ExperimentConfig> bo_configs(bool bounded) {
  std::vector<ExperimentConfig> configs;
  for (const std::string bench : {"beale", "branin", "camel3", "zakharov4"}) {
    ExperimentConfig config;
    config.name = (bounded ? "bo_bounded_" : "bo_gaussian_") + bench;
    config.horizon = 500;
    config.trials = 50;
    config.seed = 1;
    config.delta = 0.1;
    config.instance.kind = "bo";
    config.instance.benchmark = bench;
    config.instance.num_arms = 512;
    config.instance.feature_dim = 128;
    config.instance.noise = bounded ? NoiseModel{NoiseKind::TwoPoint, 0.01}
                                    : NoiseModel{NoiseKind::Gaussian, 0.01};
    config.policies.push_back(basic_policy(
        bounded ? PolicyKind::Lofav : PolicyKind::Losan, 1.0, 1.0, 1.0,
        config.delta));
    config.policies.push_back(
        basic_policy(PolicyKind::Oful, 1.0, 1.0, 1.0, config.delta));
    configs.push_back(config);
  }
  return configs;
}

ExperimentConfig appendix_d_config(bool easy) {
  ExperimentConfig config;
  config.name = easy ? "appendix_d_easy" : "appendix_d_hard";
  config.trials = 20;
  config.seed = 1;
  config.delta = 0.1;
  const double S = easy ? 15.0 : 1.0;
  const double sigma0_sq = 1.0;
  const double lambda = 10.0 * sigma0_sq / (S * S);
  if (easy) {
    config.horizon = 10000;
    config.instance.kind = "easy_sphere";
    config.instance.noise = NoiseModel{NoiseKind::Gaussian, 1.0};
  } else {
    config.horizon = 50000;
    config.instance.kind = "hard_gap";
    config.instance.dim = 20;
    config.instance.num_arms = 400;
    config.instance.S = 1.0;
    config.instance.sigma0 = 1.0;
    config.instance.noise = NoiseModel{NoiseKind::Gaussian, 0.1};
  }
  for (PolicyKind kind :
       {PolicyKind::Losan, PolicyKind::OfulC, PolicyKind::Oful}) {
    config.policies.push_back(
        basic_policy(kind, S, sigma0_sq, 1.0, config.delta, lambda));
  }
  return config;
}

}  // namespace

Fig1Outcome run_fig1(std::uint64_t seed, const std::string& out_dir,
                     long horizon) {
  const double delta = 0.1;
  EVector probe(2);
  probe << 1.0, 0.0;
  EMatrix arms(1, 2);
  arms.row(0) = probe.transpose();

  PolicyConfig lofav_config;
  lofav_config.kind = PolicyKind::Lofav;
  lofav_config.spec = NoiseSpec{1.0, 1.0, 1.0, delta};
  lofav_config.dim = 2;
  lofav_config.horizon = horizon;
  lofav_config.levels_override = 9;
  lofav_config.mode = LofavMode::Practical;
  PolicyState lofav = make_policy(lofav_config);

  PolicyConfig sncs_config;
  sncs_config.kind = PolicyKind::Oful;
  sncs_config.spec = NoiseSpec{1.0, 1.0, 1.0, delta};
  sncs_config.dim = 2;
  sncs_config.name = "sncs";
  PolicyState sncs = make_policy(sncs_config);

  const NoiseModel noise{NoiseKind::TwoPoint, std::sqrt(0.1)};
  const std::vector<long> probes = probe_schedule(horizon);
  size_t next_probe = 0;

  struct ProbeRow {
    long t;
    double lofav, lofav_plain, sncs;
  };
  std::vector<ProbeRow> rows;
  Fig1Outcome outcome;

  const auto record = [&](long t) {
    ProbeRow row;
    row.t = t;
    row.lofav = arm_value(lofav, probe);
    PolicyState plain = lofav;
    plain.config.mode = LofavMode::Plain;
    row.lofav_plain = arm_value(plain, probe);
    row.sncs = arm_value(sncs, probe);
    rows.push_back(row);
    outcome.lofav_ucb = row.lofav;
    outcome.lofav_plain_ucb = row.lofav_plain;
    outcome.sncs_ucb = row.sncs;
  };

  for (long t = 1; t <= horizon; ++t) {
    CounterRng noise_rng =
        CounterRng::derive(seed, 0x4E01, static_cast<std::uint64_t>(t));
    const double y = 1.0 + sample_noise(noise, noise_rng);
    update(lofav, probe, y);
    update(sncs, probe, y);
    if (next_probe < probes.size() && probes[next_probe] == t) {
      record(t);
      ++next_probe;
    }
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/fig1_aggregate.csv", std::ios::binary);
    out << "t,policy,metric,mean,stderr\n";
    const auto emit = [&](long t, const char* policy, double value) {
      out << t << ',' << policy << ",max_ucb,";
      format_value(out, value);
      out << ",0\n";
    };
    for (const ProbeRow& row : rows) {
      emit(row.t, "lofav", row.lofav);
      emit(row.t, "lofav_plain", row.lofav_plain);
      emit(row.t, "sncs", row.sncs);
    }
  }
  return outcome;
}

std::vector<std::string> preset_names() {
  return {"fig1",       "fig2a",      "fig2b",          "bo_gaussian",
          "bo_bounded", "appendix_d_hard", "appendix_d_easy"};
}

bool is_preset(const std::string& name) {
  for (const std::string& p : preset_names()) {
    if (p == name) return true;
  }
  return false;
}

std::vector<ExperimentConfig> preset_configs(const std::string& name) {
  if (name == "fig2a") return {fig2_config(false)};
  if (name == "fig2b") return {fig2_config(true)};
  if (name == "bo_gaussian") return bo_configs(false);
  if (name == "bo_bounded") return bo_configs(true);
  if (name == "appendix_d_hard") return {appendix_d_config(false)};
  if (name == "appendix_d_easy") return {appendix_d_config(true)};
  throw ConfigError("unknown preset: " + name);
}

int run_preset(const std::string& name, std::optional<long> trials_override,
               std::optional<std::uint64_t> seed_override,
               const std::string& out_dir) {
  if (name == "fig1") {
    const Fig1Outcome outcome =
        run_fig1(seed_override.value_or(1), out_dir.empty() ? "." : out_dir);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "fig1: ucb at (1,0): lofav %.6f (plain %.6f), sncs %.6f",
                  outcome.lofav_ucb, outcome.lofav_plain_ucb, outcome.sncs_ucb);
    std::cout << buf << "\n";
    return 0;
  }
  for (ExperimentConfig config : preset_configs(name)) {
    if (trials_override) config.trials = *trials_override;
    if (seed_override) config.seed = *seed_override;
    if (!out_dir.empty()) config.out_dir = out_dir;
    run_experiment(config);
  }
  return 0;
}

}  // namespace nalb
