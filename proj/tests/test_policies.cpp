#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nalb/policies.hpp"
#include "nalb/rng.hpp"

using nalb::CounterRng;
using nalb::EMatrix;
using nalb::EVector;
using nalb::LofavMode;
using nalb::NoiseSpec;
using nalb::PolicyConfig;
using nalb::PolicyKind;
using nalb::PolicyState;

namespace {

PolicyConfig base_config(PolicyKind kind, Eigen::Index dim, long horizon = 0) {
  PolicyConfig config;
  config.kind = kind;
  config.spec = NoiseSpec{1.0, 1.0, 1.0, 0.1};
  config.dim = dim;
  config.horizon = horizon;
  return config;
}

EVector vec2(double a, double b) {
  EVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("level count for a known horizon") {
  CHECK(nalb::num_levels(50000, 20) == 6);
  CHECK(nalb::num_levels(32, 32) == 1);
  CHECK(nalb::num_levels(320, 20) == 2);
  CHECK(nalb::num_levels(1, 5) == 1);
  CHECK_THROWS_AS(nalb::num_levels(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(nalb::num_levels(10, 0), std::invalid_argument);
}

TEST_CASE("anytime schedule grows without a horizon") {
  CHECK(nalb::anytime_num_levels(1, 20) == 1);
  CHECK(nalb::anytime_num_levels(20, 20) == 1);
  CHECK(nalb::anytime_num_levels(50000, 20) == 6);
  CHECK(nalb::anytime_delta(0.1, 1) ==
        doctest::Approx(0.6 / (M_PI * M_PI)).epsilon(1e-14));
  CHECK(nalb::anytime_delta(0.1, 1) ==
        doctest::Approx(0.060792710185402).epsilon(1e-10));
  double total = 0;
  for (int level = 1; level <= 2000; ++level) {
    total += nalb::anytime_delta(0.1, level);
  }
  CHECK(total <= 0.1);
  CHECK(total >= 0.0999);  // Basel sum approaches delta from below
}

TEST_CASE("policy construction validates inputs and defaults lambda") {
  CHECK_THROWS_AS(nalb::make_policy(base_config(PolicyKind::Oful, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(nalb::make_policy(base_config(PolicyKind::Lofav, 2)),
                  std::invalid_argument);  // no horizon, no level override

  PolicyConfig losan = base_config(PolicyKind::Losan, 2);
  losan.spec.S = 2.0;
  losan.spec.sigma0_sq = 0.5;
  PolicyState s = nalb::make_policy(losan);
  CHECK(s.levels.front().state.params.lambda == doctest::Approx(0.125));
  CHECK(s.levels.front().state.params.rho == doctest::Approx(1.0));

  losan.lambda = 10.0 * 0.5 / 4.0;
  s = nalb::make_policy(losan);
  CHECK(s.levels.front().state.params.lambda == doctest::Approx(1.25));

  PolicyConfig oful = base_config(PolicyKind::Oful, 3);
  oful.spec.S = 2.0;
  PolicyState o = nalb::make_policy(oful);
  CHECK(o.gram.lambda == doctest::Approx(0.25));
}

TEST_CASE("fixed-level construction uses geometric caps and regularizers") {
  PolicyConfig config = base_config(PolicyKind::Lofav, 2, 2048);
  config.spec.R = 2.0;  // num_levels(2048, 2) = 5
  PolicyState s = nalb::make_policy(config);
  REQUIRE(s.levels.size() == 5);
  for (size_t i = 0; i < s.levels.size(); ++i) {
    const double rho = std::pow(2.0, -double(i + 1));
    CHECK(s.levels[i].state.params.rho == doctest::Approx(rho));
    CHECK(s.levels[i].state.params.lambda ==
          doctest::Approx(4.0 * rho * rho));
    CHECK(s.levels[i].big_l == 5);
    CHECK(s.levels[i].delta_level == doctest::Approx(0.1));
  }
}

TEST_CASE("first-step level weights follow the geometric cap") {
  PolicyConfig config = base_config(PolicyKind::Lofav, 2, 2048);
  PolicyState s = nalb::make_policy(config);
  const EVector x = vec2(1, 0);
  for (size_t i = 0; i < s.levels.size(); ++i) {
    CHECK(nalb::compute_weight(s.levels[i].state, x) ==
          doctest::Approx(std::pow(4.0, -double(i + 1))).epsilon(1e-12));
  }
}

TEST_CASE("unweighted ridge update") {
  PolicyConfig config = base_config(PolicyKind::Oful, 2);
  config.lambda = 1.0;
  PolicyState s = nalb::make_policy(config);
  nalb::update(s, vec2(1, 0), 1.0);
  CHECK(s.theta_hat[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.theta_hat[1] == doctest::Approx(0.0));
  CHECK(s.t == 1);
}

TEST_CASE("argmax prefers informative arms and breaks ties low") {
  PolicyConfig config = base_config(PolicyKind::Losan, 2);
  PolicyState s = nalb::make_policy(config);
  EMatrix arms(2, 2);
  arms << 1, 0, 0.5, 0;
  const nalb::SelectResult pick = nalb::select_arm(s, arms);
  CHECK(pick.index == 0);
  CHECK(pick.max_ucb > 0.0);

  EMatrix dup(3, 2);
  dup << 0.6, 0, 0.6, 0, 0.3, 0.1;
  PolicyState s2 = nalb::make_policy(config);
  CHECK(nalb::select_arm(s2, dup).index == 0);
}

TEST_CASE("select_arm validates the pool") {
  PolicyConfig config = base_config(PolicyKind::Losan, 2);
  PolicyState s = nalb::make_policy(config);
  EMatrix none(0, 2);
  CHECK_THROWS_AS(nalb::select_arm(s, none), std::invalid_argument);
  EMatrix wrong(1, 3);
  wrong << 1, 0, 0;
  CHECK_THROWS_AS(nalb::select_arm(s, wrong), std::invalid_argument);
}

TEST_CASE("batched scores agree with the single-arm reference") {
  CounterRng rng(12);
  PolicyConfig config = base_config(PolicyKind::Lofav, 3, 500);
  PolicyState s = nalb::make_policy(config);
  EMatrix arms(6, 3);
  for (int i = 0; i < 6; ++i) {
    EVector a(3);
    for (int j = 0; j < 3; ++j) a[j] = rng.normal();
    arms.row(i) = (a / std::max(1.0, a.norm())).transpose();
  }
  for (int t = 0; t < 25; ++t) {
    const nalb::SelectResult pick = nalb::select_arm(s, arms);
    double best = -1e300;
    Eigen::Index best_idx = 0;
    for (Eigen::Index i = 0; i < arms.rows(); ++i) {
      const double v = nalb::arm_value(s, arms.row(i).transpose());
      if (v > best) {
        best = v;
        best_idx = i;
      }
    }
    CHECK(pick.index == best_idx);
    CHECK(pick.max_ucb == doctest::Approx(best).epsilon(1e-12));
    nalb::update(s, arms.row(pick.index).transpose(),
                 rng.uniform(-1.0, 1.0));
  }
}

TEST_CASE("intersecting more sets never raises the score") {
  CounterRng rng(44);
  PolicyConfig config = base_config(PolicyKind::Lofav, 3, 500);
  config.mode = LofavMode::Practical;
  PolicyState s = nalb::make_policy(config);
  for (int t = 0; t < 40; ++t) {
    EVector x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.normal();
    x /= std::max(1.0, x.norm());
    nalb::update(s, x, rng.uniform(-1.0, 1.0));
  }
  PolicyState plain = s;
  plain.config.mode = LofavMode::Plain;
  for (int k = 0; k < 30; ++k) {
    EVector x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.normal();
    x /= std::max(1.0, x.norm());
    CHECK(nalb::arm_value(s, x) <= nalb::arm_value(plain, x) + 1e-12);
  }
}

TEST_CASE("a residual-free observation adds no prediction loss") {
  PolicyConfig config = base_config(PolicyKind::Losan, 2);
  PolicyState s = nalb::make_policy(config);
  nalb::update(s, vec2(1, 0), 1.0);
  const double loss_before = s.levels.front().state.loss_sum;
  const EVector x = vec2(1, 0);
  const double y = x.dot(s.levels.front().state.theta_hat);
  nalb::update(s, x, y);
  CHECK(s.levels.front().state.loss_sum == doctest::Approx(loss_before));
}

TEST_CASE("anytime mode spawns fresh levels on schedule") {
  PolicyConfig config = base_config(PolicyKind::Lofav, 2);
  config.mode = LofavMode::Anytime;
  PolicyState s = nalb::make_policy(config);
  CHECK(s.levels.size() == 1);
  CHECK(s.levels[0].delta_level == doctest::Approx(nalb::anytime_delta(0.1, 1)));
  CHECK(s.levels[0].big_l == 1);

  CounterRng rng(3);
  for (int t = 1; t <= 8; ++t) {
    EVector x(2);
    x << rng.normal(), rng.normal();
    x /= std::max(1.0, x.norm());
    nalb::update(s, x, rng.uniform(-1.0, 1.0));
  }
  CHECK(s.levels.size() == 1);  // anytime_num_levels(8, 2) = 1

  EVector x = vec2(1, 0);
  nalb::update(s, x, 0.5);  // t = 9: anytime_num_levels(9, 2) = 2
  REQUIRE(s.levels.size() == 2);
  CHECK(s.levels[1].state.t == 1);  // spawned empty, then absorbed this step
  CHECK(s.levels[0].state.t == 9);
  CHECK(s.levels[1].delta_level ==
        doctest::Approx(nalb::anytime_delta(0.1, 2)));
}

TEST_CASE("identical configurations yield bit-identical trajectories") {
  CounterRng rng(71);
  EMatrix arms(5, 3);
  for (int i = 0; i < 5; ++i) {
    EVector a(3);
    for (int j = 0; j < 3; ++j) a[j] = rng.normal();
    arms.row(i) = (a / std::max(1.0, a.norm())).transpose();
  }
  PolicyConfig config = base_config(PolicyKind::Lofav, 3, 300);
  PolicyState a = nalb::make_policy(config);
  PolicyState b = nalb::make_policy(config);
  CounterRng noise(9);
  for (int t = 0; t < 60; ++t) {
    const nalb::SelectResult pa = nalb::select_arm(a, arms);
    const nalb::SelectResult pb = nalb::select_arm(b, arms);
    CHECK(pa.index == pb.index);
    CHECK(pa.max_ucb == pb.max_ucb);
    const double y = noise.uniform(-1.0, 1.0);
    nalb::update(a, arms.row(pa.index).transpose(), y);
    nalb::update(b, arms.row(pb.index).transpose(), y);
  }
}
