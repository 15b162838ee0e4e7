#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nalb/harness.hpp"

using nalb::AggregateStats;
using nalb::ConfigError;
using nalb::ExperimentConfig;
using nalb::TrialResult;

namespace {

const char* kSmallConfig = R"json({
  "name": "smoke",
  "horizon": 40,
  "trials": 3,
  "seed": 5,
  "delta": 0.1,
  "instance": {
    "kind": "sphere",
    "dim": 4,
    "num_arms": 8,
    "S": 1.0,
    "noise": {"kind": "gaussian", "param": 0.2}
  },
  "policies": [
    {"kind": "losan", "sigma0_sq": 0.04},
    {"kind": "oful", "sigma0_sq": 0.04}
  ]
})json";

std::string swapped(const std::string& from, const std::string& to) {
  std::string s = kSmallConfig;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("config parsing accepts the reference document") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  CHECK(config.name == "smoke");
  CHECK(config.horizon == 40);
  CHECK(config.trials == 3);
  CHECK(config.seed == 5);
  CHECK(config.delta == doctest::Approx(0.1));
  CHECK(config.instance.kind == "sphere");
  CHECK(config.instance.dim == 4);
  CHECK(config.instance.num_arms == 8);
  CHECK(config.instance.noise.kind == nalb::NoiseKind::Gaussian);
  CHECK(config.instance.noise.param == doctest::Approx(0.2));
  REQUIRE(config.policies.size() == 2);
  CHECK(config.policies[0].kind == nalb::PolicyKind::Losan);
  CHECK(config.policies[1].kind == nalb::PolicyKind::Oful);
  CHECK(config.policies[0].spec.delta == doctest::Approx(0.1));
  CHECK(config.policies[0].spec.sigma0_sq == doctest::Approx(0.04));
  CHECK(config.policies[0].spec.S == doctest::Approx(1.0));
}

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_THROWS_AS(nalb::parse_config("{"), ConfigError);
  CHECK_THROWS_AS(nalb::parse_config("{}"), ConfigError);
  CHECK_THROWS_AS(nalb::parse_config(swapped("\"horizon\": 40", "\"horizon\": 0")),
                  ConfigError);
  CHECK_THROWS_AS(nalb::parse_config(swapped("\"trials\": 3", "\"trials\": -1")),
                  ConfigError);
  CHECK_THROWS_AS(nalb::parse_config(swapped("\"delta\": 0.1", "\"delta\": 0.0")),
                  ConfigError);
  CHECK_THROWS_AS(
      nalb::parse_config(swapped(
          "{\"kind\": \"losan\", \"sigma0_sq\": 0.04},\n    {\"kind\": \"oful\", \"sigma0_sq\": 0.04}",
          "")),
      ConfigError);
  CHECK_THROWS_AS(
      nalb::parse_config(swapped("\"kind\": \"losan\"", "\"kind\": \"thompson\"")),
      ConfigError);
  CHECK_THROWS_AS(
      nalb::parse_config(swapped("\"kind\": \"gaussian\"", "\"kind\": \"levy\"")),
      ConfigError);
  CHECK_THROWS_AS(
      nalb::parse_config(swapped("\"kind\": \"sphere\"", "\"kind\": \"maze\"")),
      ConfigError);
}

TEST_CASE("resolved policy names must be unique") {
  CHECK_THROWS_AS(
      nalb::parse_config(swapped("{\"kind\": \"oful\", \"sigma0_sq\": 0.04}",
                                 "{\"kind\": \"losan\", \"sigma0_sq\": 0.04}")),
      ConfigError);
  // distinct explicit names keep two copies of one algorithm legal
  const ExperimentConfig ok = nalb::parse_config(
      swapped("{\"kind\": \"oful\", \"sigma0_sq\": 0.04}",
              "{\"kind\": \"losan\", \"sigma0_sq\": 0.04, \"name\": \"losan2\"}"));
  CHECK(ok.policies[1].name == "losan2");
}

TEST_CASE("unknown instance kinds fail at build time") {
  const ExperimentConfig config =
      nalb::parse_config(swapped("\"kind\": \"sphere\"", "\"kind\": \"bo\""));
  // bo without a benchmark name is rejected when the instance is built
  CHECK_THROWS_AS(nalb::build_instance(config, 1), ConfigError);
}

TEST_CASE("trials are deterministic functions of the configuration") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult a = nalb::run_trial(config, 1);
  const TrialResult b = nalb::run_trial(config, 1);
  std::ostringstream sa, sb;
  nalb::write_csv_raw({a}, sa);
  nalb::write_csv_raw({b}, sb);
  CHECK(sa.str() == sb.str());
  const TrialResult c = nalb::run_trial(config, 2);
  std::ostringstream sc;
  nalb::write_csv_raw({c}, sc);
  CHECK(sa.str() != sc.str());
}

TEST_CASE("a single noiseless arm accrues zero regret") {
  const char* cfg = R"json({
    "name": "single",
    "horizon": 25,
    "trials": 1,
    "seed": 3,
    "instance": {
      "kind": "sphere", "dim": 3, "num_arms": 1, "S": 1.0,
      "noise": {"kind": "gaussian", "param": 0.0}
    },
    "policies": [{"kind": "losan"}]
  })json";
  const ExperimentConfig config = nalb::parse_config(cfg);
  const TrialResult trial = nalb::run_trial(config, 0);
  REQUIRE(trial.policies.size() == 1);
  const auto& steps = trial.policies[0].steps;
  REQUIRE(steps.size() == 25);
  for (const auto& rec : steps) {
    CHECK(rec.arm == 0);
    CHECK(rec.inst_regret == 0.0);
    CHECK(rec.cum_regret == 0.0);
    CHECK(rec.simple_regret == 0.0);
  }
}

TEST_CASE("per-step accounting is internally consistent") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult trial = nalb::run_trial(config, 0);
  for (const auto& series : trial.policies) {
    double cum = 0.0;
    double simple = 1e300;
    REQUIRE(series.steps.size() == 40);
    for (const auto& rec : series.steps) {
      cum += rec.inst_regret;
      simple = std::min(simple, rec.inst_regret);
      CHECK(rec.cum_regret == doctest::Approx(cum).epsilon(1e-12));
      CHECK(rec.simple_regret == doctest::Approx(simple).epsilon(1e-12));
      CHECK(rec.inst_regret >= 0.0);
    }
  }
}

TEST_CASE("policies inside one trial share the reward stream") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult trial = nalb::run_trial(config, 1);
  REQUIRE(trial.policies.size() == 2);
  const auto& a = trial.policies[0].steps;
  const auto& b = trial.policies[1].steps;
  REQUIRE(a.size() == b.size());
  int shared = 0;
  for (size_t t = 0; t < a.size(); ++t) {
    if (a[t].arm == b[t].arm) {
      CHECK(a[t].reward == b[t].reward);
      ++shared;
    }
  }
  CHECK(shared > 0);
}

TEST_CASE("aggregation reports means and standard errors per step") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  std::vector<TrialResult> trials;
  for (long i = 0; i < config.trials; ++i) {
    trials.push_back(nalb::run_trial(config, i));
  }
  const AggregateStats agg = nalb::aggregate(trials);
  CHECK(agg.horizon == 40);
  CHECK(agg.trials == 3);
  const auto& cum = agg.find("losan", "cum_regret");
  REQUIRE(cum.mean.size() == 40);

  double manual = 0.0;
  for (const auto& trial : trials) {
    manual += trial.policies[0].steps.back().cum_regret;
  }
  manual /= 3.0;
  CHECK(cum.mean.back() == doctest::Approx(manual).epsilon(1e-12));

  double sq = 0.0;
  for (const auto& trial : trials) {
    const double v = trial.policies[0].steps.back().cum_regret - manual;
    sq += v * v;
  }
  const double se = std::sqrt(sq / 2.0) / std::sqrt(3.0);
  CHECK(cum.stderr_.back() == doctest::Approx(se).epsilon(1e-10));

  nalb::Aggregator stream;
  for (const auto& trial : trials) stream.add(trial);
  const AggregateStats agg2 = stream.finalize();
  const auto& cum2 = agg2.find("losan", "cum_regret");
  for (long t = 0; t < 40; ++t) {
    CHECK(cum2.mean[t] == doctest::Approx(cum.mean[t]).epsilon(1e-12));
    CHECK(cum2.stderr_[t] == doctest::Approx(cum.stderr_[t]).epsilon(1e-10));
  }

  CHECK_THROWS_AS(agg.find("nobody", "cum_regret"), std::invalid_argument);
  CHECK_THROWS_AS(agg.find("losan", "entropy"), std::invalid_argument);
}

TEST_CASE("a single trial reports zero standard error") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult trial = nalb::run_trial(config, 0);
  const AggregateStats agg = nalb::aggregate({trial});
  CHECK(agg.trials == 1);
  for (const auto& series : agg.series) {
    for (const double se : series.stderr_) CHECK(se == 0.0);
  }
}

TEST_CASE("csv output uses the documented headers and digit budget") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult trial = nalb::run_trial(config, 0);
  const AggregateStats agg = nalb::aggregate({trial});

  std::ostringstream agg_out;
  nalb::write_csv(agg, agg_out);
  std::istringstream lines(agg_out.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,policy,metric,mean,stderr");
  long rows = 0;
  std::string first_data;
  while (std::getline(lines, line)) {
    if (rows == 0) first_data = line;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == 40 * 2 * 3);  // horizon x policies x metrics
  CHECK(first_data.rfind("1,losan,cum_regret,", 0) == 0);

  std::ostringstream raw_out;
  nalb::write_csv_raw({trial}, raw_out);
  std::istringstream raw_lines(raw_out.str());
  REQUIRE(std::getline(raw_lines, line));
  CHECK(line ==
        "trial,t,policy,arm,reward,inst_regret,cum_regret,simple_regret,max_ucb");
  long raw_rows = 0;
  while (std::getline(raw_lines, line)) ++raw_rows;
  CHECK(raw_rows == 40 * 2);

  // 17 significant digits survive a parse round trip
  auto printed = [](double v) {
    std::ostringstream os;
    nalb::format_value(os, v);
    return os.str();
  };
  const double value = trial.policies[0].steps[5].reward;
  CHECK(std::stod(printed(value)) == value);
  CHECK(printed(0.1) == "0.10000000000000001");
  CHECK(printed(1.0) == "1");
}

TEST_CASE("aggregate ordering is series-major then time") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  std::vector<TrialResult> trials;
  for (long i = 0; i < config.trials; ++i) {
    trials.push_back(nalb::run_trial(config, i));
  }
  const AggregateStats agg = nalb::aggregate(trials);
  std::ostringstream out;
  nalb::write_csv(agg, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::string> keys;
  long expected_t = 1;
  std::string current_key;
  while (std::getline(lines, line)) {
    const auto p1 = line.find(',');
    const auto p3 = line.find(',', line.find(',', p1 + 1) + 1);
    const std::string t_text = line.substr(0, p1);
    const std::string key = line.substr(p1 + 1, p3 - p1 - 1);
    if (key != current_key) {
      if (!current_key.empty()) CHECK(expected_t == 41);
      keys.push_back(key);
      current_key = key;
      expected_t = 1;
    }
    CHECK(std::stol(t_text) == expected_t);
    ++expected_t;
  }
  CHECK(expected_t == 41);
  REQUIRE(keys.size() == 6);
  CHECK(keys[0] == "losan,cum_regret");
  CHECK(keys[1] == "losan,simple_regret");
  CHECK(keys[2] == "losan,max_ucb");
  CHECK(keys[3] == "oful,cum_regret");
}

TEST_CASE("aggregation rejects inconsistent trial shapes") {
  const ExperimentConfig config = nalb::parse_config(kSmallConfig);
  const TrialResult trial = nalb::run_trial(config, 0);
  TrialResult shorter = trial;
  shorter.policies[0].steps.pop_back();
  CHECK_THROWS_AS(nalb::aggregate({trial, shorter}), std::invalid_argument);
  TrialResult fewer = trial;
  fewer.policies.pop_back();
  CHECK_THROWS_AS(nalb::aggregate({trial, fewer}), std::invalid_argument);
}
