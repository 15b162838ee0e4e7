#include "nalb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "nalb/confidence.hpp"
#include "nalb/environments.hpp"
#include "nalb/level.hpp"
#include "nalb/policies.hpp"
#include "nalb/rng.hpp"

namespace nalb {

namespace {

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

EVector ball_vector(Eigen::Index d, CounterRng& rng) {
  EVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm > 0.0) v *= rng.next_double() / norm;  // uniform radius in [0,1)
  return v;
}

struct TraceStep {
  EVector x;
  double y = 0;
  double w = 0;
  double loss = 0;
  double d_sq = 0;
  EVector theta_prev;
};

struct Trace {
  LevelState state;
  std::vector<TraceStep> steps;
};

Trace random_trace(CounterRng& rng, Eigen::Index d, double lambda, double rho,
                   long steps) {
  LevelParams params;
  params.rho = rho;
  params.lambda = lambda;
  params.dim = d;
  Trace trace;
  trace.state = make_level(params);
  EVector theta(d);
  for (Eigen::Index i = 0; i < d; ++i) theta[i] = rng.normal();
  for (long s = 0; s < steps; ++s) {
    TraceStep step;
    step.x = ball_vector(d, rng);
    step.y = step.x.dot(theta) + rng.uniform(-0.5, 0.5);
    step.theta_prev = trace.state.theta_hat;
    const ObserveResult obs = observe(trace.state, step.x, step.y);
    step.w = obs.weight;
    step.loss = obs.loss;
    step.d_sq = obs.d_sq;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

double weighted_loss(const TraceStep& step, const EVector& theta) {
  const double err = step.x.dot(theta) - step.y;
  return 0.5 * step.w * step.w * err * err;
}

// (a) online-to-offline regret decomposition, exact for every trace.
CheckResult check_regret_equality(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 1, 0);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    const double lambda = rng.uniform(0.1, 4.0);
    const double rho = std::pow(2.0, -static_cast<double>(rng.next_u64() % 3));
    const Trace trace = random_trace(rng, d, lambda, rho, 60);

    EVector probe(d);
    for (Eigen::Index i = 0; i < d; ++i) probe[i] = rng.normal();

    double lhs = trace.state.loss_sum;
    for (const TraceStep& step : trace.steps) lhs -= weighted_loss(step, probe);
    const EVector diff = probe - trace.state.theta_hat;
    const double rhs = 0.5 * lambda * probe.squaredNorm() +
                       trace.state.loss_dsq_sum -
                       0.5 * diff.dot(trace.state.sigma.matrix * diff);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  return {"regret_equality", worst <= 1e-6,
          fmt("max relative residual %.3g over 100 traces (tol 1e-6)", worst)};
}

// (b) sum of posterior norms <= logdet ratio <= d ln(1 + X^2 t / (d lambda)).
CheckResult check_potential_chain(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 2, 0);
  double worst_gap = -1e300;
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 5);
    const double lambda = rng.uniform(0.05, 2.0);
    const double rho = std::pow(2.0, -static_cast<double>(rng.next_u64() % 3));
    const Trace trace = random_trace(rng, d, lambda, rho, 200);

    double d_sq_sum = 0;
    double max_feat_sq = 0;
    for (const TraceStep& step : trace.steps) {
      d_sq_sum += step.d_sq;
      max_feat_sq = std::max(max_feat_sq, step.w * step.w * step.x.squaredNorm());
    }
    const double logdet_ratio =
        trace.state.sigma.logdet - d * std::log(lambda);
    const double upper =
        d * std::log(1.0 + max_feat_sq * trace.steps.size() / (d * lambda));
    worst_gap = std::max(worst_gap, d_sq_sum - logdet_ratio);
    worst_gap = std::max(worst_gap, logdet_ratio - upper);
  }
  return {"potential_chain", worst_gap <= 1e-8,
          fmt("max chain violation %.3g over 50 traces (tol 1e-8)", worst_gap)};
}

// (c) count of steps whose prior norm exceeds L^2 is capped by
// 3 (d/L^2) ln(1 + 2 X^2 / (L^2 lambda)), even on repeated arms.
CheckResult check_potential_count(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 3, 0);
  double worst = -1e300;
  for (int rep = 0; rep < 60; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 5);
    const double lambda = rng.uniform(0.01, 1.0);
    const double cap_sq = std::pow(2.0, -static_cast<double>(rng.next_u64() % 3));
    PrecisionStated gram(lambda, d);
    long count = 0;
    long steps = 0;
    const auto feed = [&](const EVector& x) {
      if (mahalanobis_sq(gram, x) >= cap_sq) ++count;
      rank_one_update(gram, x, 1.0);
      ++steps;
    };
    // adversarial block: hammer each basis vector in turn
    for (Eigen::Index j = 0; j < d; ++j) {
      EVector e = EVector::Zero(d);
      e[j] = 1.0;
      for (int k = 0; k < 40; ++k) feed(e);
    }
    for (int k = 0; k < 100; ++k) {
      EVector x = ball_vector(d, rng);
      if (x.norm() > 0) x /= x.norm();
      feed(x);
    }
    const double bound =
        3.0 * (d / cap_sq) * std::log(1.0 + 2.0 / (cap_sq * lambda));
    worst = std::max(worst, static_cast<double>(count) - bound);
  }
  return {"potential_count", worst <= 0.0,
          fmt("max count minus bound %.3g over 60 traces (must be <= 0)",
              worst)};
}

// (d) closed-form minimizers and minima versus dense replay.
CheckResult check_secondary_closed_form(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 4, 0);
  double worst = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    const double lambda = rng.uniform(0.1, 3.0);
    const double rho = std::pow(2.0, -static_cast<double>(rng.next_u64() % 3));
    const Trace trace = random_trace(rng, d, lambda, rho, 80);

    EMatrix gram_bar = lambda * EMatrix::Identity(d, d);
    EVector rhs = EVector::Zero(d);
    for (const TraceStep& step : trace.steps) {
      const double w_sq = step.w * step.w;
      gram_bar.noalias() += 2.0 * w_sq * step.x * step.x.transpose();
      rhs.noalias() += w_sq * (step.y + step.x.dot(step.theta_prev)) * step.x;
    }
    const EVector theta_bar_dense = gram_bar.ldlt().solve(rhs);
    const EVector theta_bar = secondary_estimate(trace.state);
    worst = std::max(worst, (theta_bar - theta_bar_dense).norm() /
                                std::max(1.0, theta_bar_dense.norm()));

    // replayed objective values at the dense minimizers
    double k_val = 0.5 * lambda * theta_bar_dense.squaredNorm();
    for (const TraceStep& step : trace.steps) {
      k_val += weighted_loss(step, theta_bar_dense);
      const double drift = step.x.dot(theta_bar_dense - step.theta_prev);
      k_val += 0.5 * step.w * step.w * drift * drift;
    }
    worst = std::max(worst, std::abs(k_val - min_secondary_loss(trace.state)) /
                                std::max(1.0, std::abs(k_val)));

    double l_val = 0.5 * lambda * trace.state.theta_hat.squaredNorm();
    for (const TraceStep& step : trace.steps) {
      l_val += weighted_loss(step, trace.state.theta_hat);
    }
    worst = std::max(worst, std::abs(l_val - min_primary_loss(trace.state)) /
                                std::max(1.0, std::abs(l_val)));

    if (min_primary_loss(trace.state) >
        min_secondary_loss(trace.state) + 1e-9) {
      worst = std::max(worst, 1.0);
    }
  }
  return {"secondary_closed_form", worst <= 1e-6,
          fmt("max relative error %.3g over 40 traces (tol 1e-6)", worst)};
}

// (f) posterior norms never exceed rho^2/(1+rho^2) <= 1/2.
CheckResult check_dsq_cap(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 5, 0);
  double worst = -1e300;
  for (int rep = 0; rep < 60; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    const double lambda = rng.uniform(0.05, 2.0);
    const double rho = std::pow(2.0, -static_cast<double>(rng.next_u64() % 4));
    const Trace trace = random_trace(rng, d, lambda, rho, 120);
    const double cap = rho * rho / (1.0 + rho * rho);
    for (const TraceStep& step : trace.steps) {
      worst = std::max(worst, step.d_sq - cap);
    }
  }
  return {"dsq_cap", worst <= 1e-12,
          fmt("max D^2 minus rho^2/(1+rho^2) is %.3g (tol 1e-12)", worst)};
}

// (g) the corrected radius never exceeds the two-term radius.
CheckResult check_radius_dominance(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, 6, 0);
  double worst = -1e300;
  for (int outer = 0; outer < 100; ++outer) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.next_u64() % 16);
    const double lambda = rng.uniform(0.01, 10.0);
    PrecisionStated gram(lambda, d);
    const long updates = static_cast<long>(rng.next_u64() % 50);
    for (long u = 0; u < updates; ++u) {
      rank_one_update(gram, ball_vector(d, rng), rng.uniform(0.0, 4.0));
    }
    for (int inner = 0; inner < 100; ++inner) {
      NoiseSpec spec;
      spec.S = rng.uniform(0.1, 20.0);
      spec.sigma0_sq = rng.uniform(0.001, 10.0);
      spec.R = rng.uniform(0.1, 5.0);
      spec.delta = rng.uniform(0.001, 1.0);
      worst = std::max(worst, oful_c_radius(gram, spec) - sncs_radius(gram, spec));
    }
  }
  return {"radius_dominance", worst <= 1e-12,
          fmt("max corrected minus plain radius %.3g over 1e4 draws", worst)};
}

}  // namespace

VerifyReport verify_identities(std::uint64_t seed) {
  VerifyReport report;
  report.checks.push_back(check_regret_equality(seed));
  report.checks.push_back(check_potential_chain(seed));
  report.checks.push_back(check_potential_count(seed));
  report.checks.push_back(check_secondary_closed_form(seed));
  report.checks.push_back(check_dsq_cap(seed));
  report.checks.push_back(check_radius_dominance(seed));
  return report;
}

CoverageResult verify_coverage(std::uint64_t seed, long traces) {
  CoverageResult result;
  result.traces = traces;
  const long horizon = 2000;
  const double delta = 0.1;

  for (long i = 0; i < traces; ++i) {
    // sub-Gaussian family: LOSAN under over-specified Gaussian noise
    {
      const InstanceSpec inst = make_sphere_instance(
          3, 1.0, 8, NoiseModel{NoiseKind::Gaussian, 0.3},
          CounterRng::mix64(seed) + static_cast<std::uint64_t>(i));
      PolicyConfig pc;
      pc.kind = PolicyKind::Losan;
      pc.spec = NoiseSpec{1.0, 1.0, 1.0, delta};
      pc.dim = 3;
      PolicyState policy = make_policy(pc);
      CounterRng noise_rng = CounterRng::derive(seed, 0xE1, i);
      bool ok = true;
      for (long t = 1; t <= horizon && ok; ++t) {
        const SelectResult pick = select_arm(policy, inst.arms);
        const PullResult pulled =
            pull(inst, pick.index, sample_noise(inst.noise, noise_rng));
        update(policy, inst.arms.row(pick.index).transpose(), pulled.reward);
        const LevelState& level = policy.levels.front().state;
        const EVector diff = level.theta_hat - inst.theta_star;
        const double quad = 0.5 * diff.dot(level.sigma.matrix * diff);
        if (quad > semi_gamma(level, pc.spec) * (1.0 + 1e-12)) ok = false;
      }
      if (ok) ++result.semi_hits;
    }
    // bounded family: the level policy under two-point noise
    {
      const InstanceSpec inst = make_sphere_instance(
          3, 1.0, 8, NoiseModel{NoiseKind::TwoPoint, 0.3},
          CounterRng::mix64(seed ^ 0x5A5A) + static_cast<std::uint64_t>(i));
      PolicyConfig pc;
      pc.kind = PolicyKind::Lofav;
      pc.spec = NoiseSpec{1.0, 1.0, 1.0, delta};
      pc.dim = 3;
      pc.horizon = horizon;
      PolicyState policy = make_policy(pc);
      CounterRng noise_rng = CounterRng::derive(seed, 0xE2, i);
      bool ok = true;
      for (long t = 1; t <= horizon && ok; ++t) {
        const SelectResult pick = select_arm(policy, inst.arms);
        const PullResult pulled =
            pull(inst, pick.index, sample_noise(inst.noise, noise_rng));
        update(policy, inst.arms.row(pick.index).transpose(), pulled.reward);
        for (const LevelSlot& slot : policy.levels) {
          const EVector diff = slot.theta_bar - inst.theta_star;
          const double quad =
              0.5 * diff.dot(slot.state.sigma_bar.matrix * diff);
          if (quad > slot.width.beta * (1.0 + 1e-12) &&
              quad > slot.width.beta + 1e-12) {
            ok = false;
            break;
          }
        }
      }
      if (ok) ++result.full_hits;
    }
  }
  return result;
}

VerifyReport verify_suite(std::uint64_t seed, bool verbose) {
  VerifyReport report = verify_identities(seed);
  const CoverageResult cov = verify_coverage(seed);
  report.checks.push_back(
      {"coverage_semi", cov.semi_rate() >= 0.85,
       fmt("coverage %.3f over %g traces (need >= 0.85)", cov.semi_rate(),
           static_cast<double>(cov.traces))});
  report.checks.push_back(
      {"coverage_full", cov.full_rate() >= 0.85,
       fmt("coverage %.3f over %g traces (need >= 0.85)", cov.full_rate(),
           static_cast<double>(cov.traces))});
  if (verbose) {
    for (const CheckResult& check : report.checks) {
      std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << ": "
                << check.detail << "\n";
    }
  }
  return report;
}

}  // namespace nalb
