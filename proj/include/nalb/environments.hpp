#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

#include "nalb/level.hpp"
#include "nalb/rng.hpp"

namespace nalb {

enum class NoiseKind { Gaussian, TwoPoint, Uniform };

// gaussian: N(0, param^2); two_point: +/-param equiprobably;
// uniform: U[-param, param].
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double param = 1.0;
};

double sample_noise(const NoiseModel& model, CounterRng& rng);
double noise_variance(const NoiseModel& model);
std::string noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// A fixed arm pool with per-arm mean rewards. Linear instances derive the
// means from theta_star; the surrogate-feature instances store them directly
// (theta_star left empty).
struct InstanceSpec {
  std::string kind;
  std::uint64_t seed = 0;
  EMatrix arms;  // one arm per row
  EVector theta_star;
  EVector means;
  NoiseModel noise;
  // derived metadata
  Eigen::Index best_index = 0;
  double best_mean = 0;
  double delta_min = 0;  // smallest positive gap (0 if none)
  double delta_max = 0;
  double mean_bound = 0;  // max |mean|
};

void refresh_metadata(InstanceSpec& inst);

struct PullResult {
  double reward = 0;
  double inst_regret = 0;
};

// Reward of the chosen arm with the (externally drawn) noise value added;
// the noise is passed in so concurrent policies can share one stream.
PullResult pull(const InstanceSpec& inst, Eigen::Index arm, double noise_value);

// theta* uniform on the radius-S sphere, unit arms.
InstanceSpec make_sphere_instance(Eigen::Index dim, double S,
                                  Eigen::Index num_arms, NoiseModel noise,
                                  std::uint64_t seed);

// theta* = (S, 0, ..., 0); one optimal arm e_1 and num_arms-1 arms whose gap
// is exactly delta = 4 sqrt(sigma0^2 d^2 / horizon).
InstanceSpec make_hard_gap_instance(Eigen::Index dim, long horizon,
                                    double sigma0, double S,
                                    Eigen::Index num_arms, NoiseModel noise,
                                    std::uint64_t seed);

// d=20, ||theta*|| = 15, 800 unit arms.
InstanceSpec make_easy_sphere_instance(NoiseModel noise, std::uint64_t seed);

// Random cosine features phi(x)_i = sqrt(1/D) cos(w_i^T x + b_i) with
// w ~ N(0, I)/bandwidth and b ~ U[0, 2pi); 2 phi(x)^T phi(x') approximates
// the Gaussian kernel exp(-||x - x'||^2 / (2 bandwidth^2)).
struct RffConfig {
  Eigen::Index input_dim = 0;
  Eigen::Index feature_dim = 0;
  double bandwidth = 1.0;
  EMatrix freqs;   // feature_dim x input_dim
  EVector phases;  // feature_dim
};

RffConfig make_rff(Eigen::Index input_dim, Eigen::Index feature_dim,
                   double bandwidth, std::uint64_t seed);
EVector rff_features(const RffConfig& rff, const EVector& x);

// Test functions on their standard search domains.
double benchmark_eval(const std::string& name, const EVector& x);
Eigen::Index benchmark_dim(const std::string& name);
std::pair<EVector, EVector> benchmark_domain(const std::string& name);

// Arm pool of random-feature embeddings of uniform domain samples; the mean
// reward of an arm is the negated function value rescaled affinely to
// [-1, 1] over the pool. bandwidth <= 0 means the median pairwise distance.
InstanceSpec make_bo_instance(const std::string& benchmark,
                              Eigen::Index num_arms, Eigen::Index feature_dim,
                              NoiseModel noise, std::uint64_t seed,
                              double bandwidth = 0.0);

std::string dump_instance_json(const InstanceSpec& inst);
InstanceSpec load_instance_json(const std::string& text);

}  // namespace nalb
