#include "nalb/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace nalb {

namespace {

EVector gaussian_vector(Eigen::Index n, CounterRng& rng) {
  EVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

EVector unit_sphere(Eigen::Index n, CounterRng& rng) {
  EVector v = gaussian_vector(n, rng);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_vector(n, rng);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace

double sample_noise(const NoiseModel& model, CounterRng& rng) {
  if (!(model.param >= 0.0)) {
    throw std::invalid_argument("sample_noise: negative noise parameter");
  }
  switch (model.kind) {
    case NoiseKind::Gaussian: return model.param * rng.normal();
    case NoiseKind::TwoPoint:
      return rng.next_double() < 0.5 ? -model.param : model.param;
    case NoiseKind::Uniform: return rng.uniform(-model.param, model.param);
  }
  throw std::logic_error("sample_noise: unknown kind");
}

double noise_variance(const NoiseModel& model) {
  switch (model.kind) {
    case NoiseKind::Gaussian: return model.param * model.param;
    case NoiseKind::TwoPoint: return model.param * model.param;
    case NoiseKind::Uniform: return model.param * model.param / 3.0;
  }
  throw std::logic_error("noise_variance: unknown kind");
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::TwoPoint: return "two_point";
    case NoiseKind::Uniform: return "uniform";
  }
  throw std::logic_error("noise_kind_name: unknown kind");
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "two_point") return NoiseKind::TwoPoint;
  if (name == "uniform") return NoiseKind::Uniform;
  throw std::invalid_argument("unknown noise kind: " + name);
}

void refresh_metadata(InstanceSpec& inst) {
  if (inst.means.size() != inst.arms.rows() || inst.means.size() == 0) {
    throw std::invalid_argument("refresh_metadata: bad means length");
  }
  inst.best_index = 0;
  for (Eigen::Index i = 1; i < inst.means.size(); ++i) {
    if (inst.means[i] > inst.means[inst.best_index]) inst.best_index = i;
  }
  inst.best_mean = inst.means[inst.best_index];
  inst.mean_bound = inst.means.cwiseAbs().maxCoeff();
  inst.delta_min = 0;
  inst.delta_max = 0;
  bool any = false;
  for (Eigen::Index i = 0; i < inst.means.size(); ++i) {
    const double gap = inst.best_mean - inst.means[i];
    if (gap <= 0.0) continue;
    if (!any || gap < inst.delta_min) inst.delta_min = gap;
    if (gap > inst.delta_max) inst.delta_max = gap;
    any = true;
  }
}

PullResult pull(const InstanceSpec& inst, Eigen::Index arm,
                double noise_value) {
  if (arm < 0 || arm >= inst.arms.rows()) {
    throw std::invalid_argument("pull: arm index out of range");
  }
  PullResult out;
  out.reward = inst.means[arm] + noise_value;
  out.inst_regret = inst.best_mean - inst.means[arm];
  return out;
}

InstanceSpec make_sphere_instance(Eigen::Index dim, double S,
                                  Eigen::Index num_arms, NoiseModel noise,
                                  std::uint64_t seed) {
  if (dim < 1 || num_arms < 1) {
    throw std::invalid_argument("make_sphere_instance: bad sizes");
  }
  if (!(S > 0.0)) throw std::invalid_argument("make_sphere_instance: S <= 0");
  InstanceSpec inst;
  inst.kind = "sphere";
  inst.seed = seed;
  inst.noise = noise;
  CounterRng rng = CounterRng::derive(seed, 0xA11, 0);
  inst.theta_star = S * unit_sphere(dim, rng);
  inst.arms.resize(num_arms, dim);
  for (Eigen::Index i = 0; i < num_arms; ++i) {
    inst.arms.row(i) = unit_sphere(dim, rng).transpose();
  }
  inst.means = inst.arms * inst.theta_star;
  refresh_metadata(inst);
  return inst;
}

InstanceSpec make_hard_gap_instance(Eigen::Index dim, long horizon,
                                    double sigma0, double S,
                                    Eigen::Index num_arms, NoiseModel noise,
                                    std::uint64_t seed) {
  if (dim < 2 || num_arms < 2 || horizon < 1 || !(sigma0 > 0.0) || !(S > 0.0)) {
    throw std::invalid_argument("make_hard_gap_instance: bad parameters");
  }
  const double delta =
      4.0 * std::sqrt(sigma0 * sigma0 * static_cast<double>(dim) * dim /
                      static_cast<double>(horizon));
  if (delta >= S) {
    throw std::invalid_argument(
        "make_hard_gap_instance: gap exceeds the parameter scale; raise the "
        "horizon or S");
  }
  InstanceSpec inst;
  inst.kind = "hard_gap";
  inst.seed = seed;
  inst.noise = noise;
  inst.theta_star = EVector::Zero(dim);
  inst.theta_star[0] = S;
  CounterRng rng = CounterRng::derive(seed, 0xA22, 0);
  inst.arms = EMatrix::Zero(num_arms, dim);
  inst.arms(0, 0) = 1.0;
  const double head = 1.0 - delta / S;
  const double tail = std::sqrt(std::max(0.0, 1.0 - head * head));
  for (Eigen::Index i = 1; i < num_arms; ++i) {
    inst.arms(i, 0) = head;
    inst.arms.row(i).tail(dim - 1) = tail * unit_sphere(dim - 1, rng).transpose();
  }
  inst.means = inst.arms * inst.theta_star;
  refresh_metadata(inst);
  return inst;
}

InstanceSpec make_easy_sphere_instance(NoiseModel noise, std::uint64_t seed) {
  // One aligned optimum among the 800; with random arms alone the smallest
  // gap collapses to the top-two spacing (~0.7 here), an order of magnitude
  // below the intended high signal-to-noise regime.
  InstanceSpec inst = make_sphere_instance(20, 15.0, 800, noise, seed);
  inst.kind = "easy_sphere";
  inst.arms.row(0) = (inst.theta_star / inst.theta_star.norm()).transpose();
  inst.means = inst.arms * inst.theta_star;
  refresh_metadata(inst);
  return inst;
}

RffConfig make_rff(Eigen::Index input_dim, Eigen::Index feature_dim,
                   double bandwidth, std::uint64_t seed) {
  if (input_dim < 1 || feature_dim < 1 || !(bandwidth > 0.0)) {
    throw std::invalid_argument("make_rff: bad parameters");
  }
  RffConfig rff;
  rff.input_dim = input_dim;
  rff.feature_dim = feature_dim;
  rff.bandwidth = bandwidth;
  CounterRng rng = CounterRng::derive(seed, 0xF0F, 0);
  rff.freqs.resize(feature_dim, input_dim);
  for (Eigen::Index i = 0; i < feature_dim; ++i) {
    for (Eigen::Index j = 0; j < input_dim; ++j) {
      rff.freqs(i, j) = rng.normal() / bandwidth;
    }
  }
  rff.phases.resize(feature_dim);
  for (Eigen::Index i = 0; i < feature_dim; ++i) {
    rff.phases[i] = rng.uniform(0.0, 2.0 * M_PI);
  }
  return rff;
}

EVector rff_features(const RffConfig& rff, const EVector& x) {
  if (x.size() != rff.input_dim) {
    throw std::invalid_argument("rff_features: dimension mismatch");
  }
  const double scale = std::sqrt(1.0 / static_cast<double>(rff.feature_dim));
  return (((rff.freqs * x + rff.phases).array().cos()) * scale).matrix();
}

Eigen::Index benchmark_dim(const std::string& name) {
  if (name == "beale" || name == "branin" || name == "camel3") return 2;
  if (name == "zakharov4") return 4;
  throw std::invalid_argument("unknown benchmark: " + name);
}

std::pair<EVector, EVector> benchmark_domain(const std::string& name) {
  const Eigen::Index d = benchmark_dim(name);
  EVector lo(d), hi(d);
  if (name == "beale") {
    lo.setConstant(-4.5);
    hi.setConstant(4.5);
  } else if (name == "branin") {
    lo << -5.0, 0.0;
    hi << 10.0, 15.0;
  } else if (name == "camel3") {
    lo.setConstant(-5.0);
    hi.setConstant(5.0);
  } else {
    lo.setConstant(-5.0);
    hi.setConstant(10.0);
  }
  return {lo, hi};
}

double benchmark_eval(const std::string& name, const EVector& x) {
  if (x.size() != benchmark_dim(name)) {
    throw std::invalid_argument("benchmark_eval: dimension mismatch");
  }
  if (name == "beale") {
    const double a = x[0], b = x[1];
    const double t1 = 1.5 - a + a * b;
    const double t2 = 2.25 - a + a * b * b;
    const double t3 = 2.625 - a + a * b * b * b;
    return t1 * t1 + t2 * t2 + t3 * t3;
  }
  if (name == "branin") {
    const double a = 1.0;
    const double b = 5.1 / (4.0 * M_PI * M_PI);
    const double c = 5.0 / M_PI;
    const double r = 6.0;
    const double s = 10.0;
    const double t = 1.0 / (8.0 * M_PI);
    const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
  }
  if (name == "camel3") {
    const double a = x[0], b = x[1];
    return 2.0 * a * a - 1.05 * std::pow(a, 4) + std::pow(a, 6) / 6.0 +
           a * b + b * b;
  }
  // zakharov4
  double sq = 0, lin = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    lin += 0.5 * (i + 1.0) * x[i];
  }
  return sq + lin * lin + std::pow(lin, 4);
}

InstanceSpec make_bo_instance(const std::string& benchmark,
                              Eigen::Index num_arms, Eigen::Index feature_dim,
                              NoiseModel noise, std::uint64_t seed,
                              double bandwidth) {
  if (num_arms < 2 || feature_dim < 1) {
    throw std::invalid_argument("make_bo_instance: bad sizes");
  }
  const Eigen::Index d = benchmark_dim(benchmark);
  const auto [lo, hi] = benchmark_domain(benchmark);
  CounterRng rng = CounterRng::derive(seed, 0xB0, 0);
  EMatrix points(num_arms, d);
  EVector values(num_arms);
  for (Eigen::Index i = 0; i < num_arms; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      points(i, j) = rng.uniform(lo[j], hi[j]);
    }
    values[i] = benchmark_eval(benchmark, points.row(i).transpose());
  }

  double bw = bandwidth;
  if (!(bw > 0.0)) {
    std::vector<double> dists;
    dists.reserve(static_cast<size_t>(num_arms) * (num_arms - 1) / 2);
    for (Eigen::Index i = 0; i < num_arms; ++i) {
      for (Eigen::Index j = i + 1; j < num_arms; ++j) {
        dists.push_back((points.row(i) - points.row(j)).norm());
      }
    }
    const size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    bw = dists[mid];
    if (!(bw > 0.0)) bw = 1.0;
  }
  const RffConfig rff = make_rff(d, feature_dim, bw, seed);

  InstanceSpec inst;
  inst.kind = "bo:" + benchmark;
  inst.seed = seed;
  inst.noise = noise;
  inst.arms.resize(num_arms, feature_dim);
  for (Eigen::Index i = 0; i < num_arms; ++i) {
    inst.arms.row(i) = rff_features(rff, points.row(i).transpose()).transpose();
  }
  // Higher is better: negate, then rescale affinely onto [-1, 1].
  const double g_lo = -values.maxCoeff();
  const double g_hi = -values.minCoeff();
  inst.means.resize(num_arms);
  for (Eigen::Index i = 0; i < num_arms; ++i) {
    const double g = -values[i];
    inst.means[i] =
        g_hi > g_lo ? 2.0 * (g - g_lo) / (g_hi - g_lo) - 1.0 : 0.0;
  }
  refresh_metadata(inst);
  return inst;
}

std::string dump_instance_json(const InstanceSpec& inst) {
  nlohmann::json j;
  j["kind"] = inst.kind;
  j["seed"] = inst.seed;
  j["noise"] = {{"kind", noise_kind_name(inst.noise.kind)},
                {"param", inst.noise.param}};
  j["theta_star"] = std::vector<double>(
      inst.theta_star.data(), inst.theta_star.data() + inst.theta_star.size());
  j["arms"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < inst.arms.rows(); ++i) {
    const EVector row = inst.arms.row(i).transpose();
    j["arms"].push_back(
        std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["means"] = std::vector<double>(inst.means.data(),
                                   inst.means.data() + inst.means.size());
  return j.dump(2);
}

InstanceSpec load_instance_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("load_instance_json: ") + e.what());
  }
  InstanceSpec inst;
  try {
    inst.kind = j.at("kind").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.noise.kind = noise_kind_from_name(j.at("noise").at("kind"));
    inst.noise.param = j.at("noise").at("param").get<double>();
    const auto theta = j.at("theta_star").get<std::vector<double>>();
    inst.theta_star = Eigen::Map<const EVector>(theta.data(), theta.size());
    const auto& arms = j.at("arms");
    if (arms.empty()) throw std::invalid_argument("load_instance_json: no arms");
    const Eigen::Index num_arms = arms.size();
    const Eigen::Index dim = arms[0].size();
    inst.arms.resize(num_arms, dim);
    for (Eigen::Index i = 0; i < num_arms; ++i) {
      const auto row = arms[i].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != dim) {
        throw std::invalid_argument("load_instance_json: ragged arms");
      }
      inst.arms.row(i) = Eigen::Map<const EVector>(row.data(), dim).transpose();
    }
    const auto means = j.at("means").get<std::vector<double>>();
    inst.means = Eigen::Map<const EVector>(means.data(), means.size());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("load_instance_json: ") + e.what());
  }
  refresh_metadata(inst);
  return inst;
}

}  // namespace nalb
