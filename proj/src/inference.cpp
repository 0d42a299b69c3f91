#include "bayesid/inference.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/metrics.hpp"
#include "parallel.hpp"

namespace bayesid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr int kCoords = kParamsPerLink;  // natural coordinates per link
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * kPi);

// Independent seed per stream (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Natural coordinates of one parameter set; mechanical azimuth in [0, 2 pi).
VectorXd to_natural(const RobotParams& params, double noise_c, SamplingSpace space,
                    const std::vector<Vector3d>& axes, const std::vector<Matrix3d>& tensor_rotations) {
  const int n = static_cast<int>(params.size());
  VectorXd u(kCoords * n + 1);
  for (int k = 0; k < n; ++k) {
    const auto& p = params[k];
    if (space == SamplingSpace::inertial) {
      u.segment(kCoords * k, kCoords) = inertial_vector(p, tensor_rotations[k]);
      continue;
    }
    const Spherical s = com_cartesian_to_spherical(p.com, axes[k]);
    const auto I = p.inertia_components();
    u.segment(kCoords * k, kCoords) << p.mass, s.radius, s.polar, s.azimuth, I[0], I[1], I[2], I[3], I[4],
        I[5], p.rotor;
  }
  u(kCoords * n) = noise_c;
  return u;
}

}  // namespace

std::string_view to_string(SamplingSpace space) {
  return space == SamplingSpace::inertial ? "inertial" : "mechanical";
}

SamplingSpace sampling_space_from_string(std::string_view name) {
  if (name == "mechanical") return SamplingSpace::mechanical;
  if (name == "inertial") return SamplingSpace::inertial;
  throw ConfigurationError("unknown sampling space \"" + std::string(name) + "\"");
}

// --- SamplingTransform ---------------------------------------------------

SamplingTransform SamplingTransform::from_catalog(const PriorCatalog& catalog, const RobotDescription& robot,
                                                  std::uint64_t seed, int n_draws, SamplingSpace space) {
  if (catalog.n_links() != robot.n_joints()) throw ContractViolation("transform: catalog does not match robot");
  if (n_draws < 2) throw ContractViolation("transform: need at least 2 prior draws");
  SamplingTransform t;
  for (int k = 0; k < robot.n_joints(); ++k) {
    t.axes_.push_back(robot.link_translation(k));
    t.tensor_rotations_.push_back(robot.links[k].inertia_rotation());
  }
  t.space_ = space;
  t.cartesian_ = catalog.com_parametrization == ComParametrization::cartesian;

  const Eigen::Index size = kCoords * robot.n_joints() + 1;
  MatrixXd U(n_draws, size);
  Rng rng(seed);
  for (int i = 0; i < n_draws; ++i) {
    const PriorDraw d = sample_unconstrained(catalog, robot, rng);
    U.row(i) = to_natural(d.params, d.noise_c, space, t.axes_, t.tensor_rotations_).transpose();
  }

  t.loc_.resize(size);
  t.scale_.resize(size);
  for (Eigen::Index c = 0; c < size; ++c) {
    const VectorXd col = U.col(c);
    if (space == SamplingSpace::mechanical && c + 1 < size && c % kCoords == 3) {
      const double s = col.array().sin().mean(), co = col.array().cos().mean();
      double mean = std::atan2(s, co);
      if (mean < 0.0) mean += 2.0 * kPi;
      const double R = std::min(1.0, std::hypot(s, co));
      const double spread = (col.array() - col(0)).abs().maxCoeff();
      t.loc_(c) = mean;
      t.scale_(c) = spread == 0.0 ? 0.0 : std::min(kPi / std::sqrt(3.0), std::sqrt(-2.0 * std::log(std::max(R, 1e-300))));
      if (spread == 0.0) t.loc_(c) = col(0);
    } else {
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() / double(n_draws - 1));
      const bool pinned = (col.array() == col(0)).all();
      t.loc_(c) = pinned ? col(0) : mean;
      t.scale_(c) = pinned ? 0.0 : sd;
    }
    if (t.scale_(c) > 0.0) t.free_.push_back(c);
  }
  return t;
}

VectorXd SamplingTransform::natural(const VectorXd& z) const {
  if (z.size() != dim())
    throw ContractViolation("transform: expected " + std::to_string(dim()) + " sampling coordinates");
  VectorXd u = loc_;
  for (Eigen::Index i = 0; i < dim(); ++i) u(free_[i]) = loc_(free_[i]) + scale_(free_[i]) * z(i);
  return u;
}

SamplingTransform::Decoded SamplingTransform::decode(const VectorXd& z) const {
  const VectorXd u = natural(z);
  Decoded out;
  out.params.resize(axes_.size());
  for (int k = 0; k < n_links(); ++k) {
    const Eigen::Matrix<double, kCoords, 1> v = u.segment(kCoords * k, kCoords);
    if (space_ == SamplingSpace::inertial) {
      const double m = v(0);
      if (!(m > 0.0)) out.in_domain = false;
      const Vector3d com = v.segment<3>(1) / m;
      const Vector3d c_t = tensor_rotations_[k].transpose() * com;
      Matrix3d origin;
      origin << v(4), v(5), v(6), v(5), v(7), v(8), v(6), v(8), v(9);
      LinkInertialParams p;
      p.mass = m;
      p.com = com;
      p.inertia = origin - m * (c_t.squaredNorm() * Matrix3d::Identity() - c_t * c_t.transpose());
      p.rotor = v(10);
      out.params[k] = p;
      continue;
    }
    const double radius = v(1), polar = v(2), azimuth = v(3);
    const double az_loc = loc_(kCoords * k + 3);
    if (!(radius >= 0.0) || !(polar >= 0.0 && polar <= kPi)) out.in_domain = false;
    if (scale_(kCoords * k + 3) > 0.0 && !(azimuth >= az_loc - kPi && azimuth < az_loc + kPi)) out.in_domain = false;
    const Vector3d com = com_spherical_to_cartesian(radius, polar, azimuth, axes_[k]);
    out.params[k] = LinkInertialParams::from_components(v(0), com, {v(4), v(5), v(6), v(7), v(8), v(9)}, v(10));
  }
  out.noise_c = u(u.size() - 1);
  return out;
}

VectorXd SamplingTransform::encode(const RobotParams& params, double noise_c) const {
  if (static_cast<int>(params.size()) != n_links()) throw ContractViolation("transform: wrong number of links");
  VectorXd u = to_natural(params, noise_c, space_, axes_, tensor_rotations_);
  if (space_ == SamplingSpace::mechanical) {
    for (int k = 0; k < n_links(); ++k) {
      const Eigen::Index c = kCoords * k + 3;
      const double lo = loc_(c) - kPi;
      double shifted = std::fmod(u(c) - lo, 2.0 * kPi);
      if (shifted < 0.0) shifted += 2.0 * kPi;
      u(c) = lo + shifted;
    }
  }
  VectorXd z(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) z(i) = (u(free_[i]) - loc_(free_[i])) / scale_(free_[i]);
  return z;
}

double SamplingTransform::log_jacobian(const VectorXd& z) const {
  const VectorXd u = natural(z);
  double lj = 0.0;
  for (int k = 0; k < n_links(); ++k) {
    if (space_ == SamplingSpace::mechanical) {
      if (!cartesian_) continue;
      const double radius = u(kCoords * k + 1), polar = u(kCoords * k + 2);
      lj += 2.0 * std::log(radius) + std::log(std::sin(polar));
      continue;
    }
    const double m = u(kCoords * k);
    lj -= 3.0 * std::log(m);
    if (!cartesian_) {
      const Spherical s = com_cartesian_to_spherical(u.segment<3>(kCoords * k + 1) / m, axes_[k]);
      lj -= 2.0 * std::log(s.radius) + std::log(std::sin(s.polar));
    }
  }
  return std::isnan(lj) ? -kInf : lj;
}

std::vector<std::string> SamplingTransform::labels() const {
  static const char* mechanical[kCoords] = {"m",   "radius", "polar", "azimuth", "Ixx", "Ixy",
                                            "Ixz", "Iyy",    "Iyz",   "Izz",     "J"};
  static const char* inertial[kCoords] = {"m",    "mrx",  "mry",  "mrz",  "Ixx_o", "Ixy_o",
                                          "Ixz_o", "Iyy_o", "Iyz_o", "Izz_o", "J"};
  const auto names = space_ == SamplingSpace::inertial ? inertial : mechanical;
  std::vector<std::string> out;
  for (Eigen::Index c : free_) {
    if (c == loc_.size() - 1) out.push_back("c");
    else out.push_back(names[c % kCoords] + std::to_string(c / kCoords + 1));
  }
  return out;
}

// --- Likelihood and posterior --------------------------------------------

namespace {

double gaussian_log_likelihood(const VectorXd& model, const VectorXd& measured, double noise_c) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < measured.size(); ++i) {
    const double sd = noise_c * measured(i);
    const double r = (model(i) - measured(i)) / sd;
    ll += -0.5 * r * r - std::log(sd) - kLogSqrt2Pi;
  }
  return ll;
}

}  // namespace

double log_likelihood(const MeasurementDataset& data, const RobotDescription& robot, const RobotParams& params,
                      double noise_c) {
  if (!(noise_c > 0.0)) throw ContractViolation("log_likelihood: noise coefficient must be > 0");
  data.validate(robot.n_joints());
  VectorXd model(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = data.entries[i];
    model(static_cast<Eigen::Index>(i)) = apparent_inertia(robot, params, e.pose)(e.axis - 1);
  }
  return gaussian_log_likelihood(model, data.inertias(), noise_c);
}

Posterior::Posterior(const RobotDescription& robot, PriorCatalog catalog, const MeasurementDataset& data,
                     SamplingTransform transform, FeasibilityChecker checker)
    : robot_(robot), catalog_(std::move(catalog)), transform_(std::move(transform)), checker_(std::move(checker)) {
  data.validate(robot.n_joints());
  if (catalog_.n_links() != robot.n_joints()) throw ContractViolation("posterior: catalog does not match robot");
  measured_ = data.inertias();
  data_regressor_ = data.empty() ? MatrixXd(0, kParamsPerLink * robot.n_joints()) : dataset_regressor(robot, data);
}

double Posterior::log_prior(const RobotParams& params, double noise_c) const {
  return prior_log_density(catalog_, robot_, params, noise_c, checker_);
}

double Posterior::log_likelihood(const RobotParams& params, double noise_c) const {
  if (measured_.size() == 0) return 0.0;
  if (!(noise_c > 0.0)) return -kInf;
  const VectorXd model = data_regressor_ * stack_inertial(robot_, params);
  return gaussian_log_likelihood(model, measured_, noise_c);
}

double Posterior::log_density(const VectorXd& z) const {
  const auto d = transform_.decode(z);
  if (!d.in_domain) return -kInf;
  double lp = log_prior(d.params, d.noise_c);
  if (!std::isfinite(lp)) return -kInf;
  lp += transform_.log_jacobian(z);
  if (!std::isfinite(lp)) return -kInf;
  lp += log_likelihood(d.params, d.noise_c);
  return std::isnan(lp) ? -kInf : lp;
}

double log_posterior(const VectorXd& z, const MeasurementDataset& data, const PriorCatalog& catalog,
                     const RobotDescription& robot, const SamplingTransform& transform) {
  const Posterior post(robot, catalog, data, transform, FeasibilityChecker::with_random_poses(robot));
  return post.log_density(z);
}

// --- Predictive draws ----------------------------------------------------

RobotParams PredictiveDraws::params(Eigen::Index draw) const { return unflatten_mechanical(mp.row(draw).transpose()); }

std::vector<PredictiveSummary> summarize(const MatrixXd& draws, const std::vector<std::string>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != draws.cols())
    throw ContractViolation("summarize: label count does not match the columns");
  if (draws.rows() == 0) throw ContractViolation("summarize: no draws");
  std::vector<PredictiveSummary> out;
  for (Eigen::Index c = 0; c < draws.cols(); ++c) {
    const VectorXd col = draws.col(c);
    PredictiveSummary s;
    s.target = labels[c];
    s.mean = col.mean();
    s.median = quantile(col, 0.5);
    const auto ci = confidence_interval(col, 0.95);
    s.lo = std::min(ci.lo, s.median);
    s.hi = std::max(ci.hi, s.median);
    s.count = static_cast<long>(col.size());
    out.push_back(s);
  }
  return out;
}

int configured_threads() {
  if (const char* env = std::getenv("BAYESID_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void push_forward(PredictiveDraws& draws, const RobotDescription& robot, const BaseParamMap& map,
                  const PoseList& poses) {
  const int n = robot.n_joints();
  const Eigen::Index N = draws.mp.rows();
  const MatrixXd Y = poses.empty() ? MatrixXd(0, kParamsPerLink * n) : stacked_regressor(robot, poses);
  draws.bp.resize(N, map.count);
  draws.x.resize(N, Y.rows());
  detail::parallel_for(N, configured_threads(), [&](long i) {
    const VectorXd stacked = stack_inertial(robot, draws.params(i));
    draws.bp.row(i) = (map.combination * stacked).transpose();
    if (Y.rows() > 0) draws.x.row(i) = (Y * stacked).transpose();
  });
  draws.mp_labels = mechanical_labels(n);
  draws.bp_labels = map.labels;
  draws.x_labels.clear();
  for (std::size_t p = 0; p < poses.size(); ++p)
    for (int a = 0; a < n; ++a) draws.x_labels.push_back("pose" + std::to_string(p + 1) + "_axis" + std::to_string(a + 1));
}

// --- Inference -----------------------------------------------------------

InferenceResult infer(const MeasurementDataset& data, const PriorCatalog& catalog, const RobotDescription& robot,
                      const BaseParamMap& map, const InferenceConfig& config) {
  robot.validate();
  if (config.n_iter < 1) throw ContractViolation("infer: n_iter must be >= 1");
  if (config.max_stored_draws < 10) throw ContractViolation("infer: max_stored_draws must be >= 10");

  SamplingTransform transform =
      SamplingTransform::from_catalog(catalog, robot, derive_seed(config.seed, 1), config.transform_draws, config.space);
  const Posterior posterior(robot, catalog, data, transform, FeasibilityChecker::with_random_poses(robot));

  // Start from the best of the first feasible prior draws.
  Rng init_rng(derive_seed(config.seed, 2));
  VectorXd best;
  double best_lp = -kInf;
  int found = 0;
  for (long attempt = 0; attempt < config.max_init_attempts && found < config.init_candidates; ++attempt) {
    PriorDraw d;
    try {
      d = sample_unconstrained(catalog, robot, init_rng);
    } catch (const InfeasibleCatalogError& e) {
      throw InitializationError(std::string("infer: ") + e.what());
    }
    const VectorXd z = transform.encode(d.params, d.noise_c);
    const double lp = posterior.log_density(z);
    if (!std::isfinite(lp)) continue;
    ++found;
    if (lp > best_lp) {
      best_lp = lp;
      best = z;
    }
  }
  if (found == 0)
    throw InitializationError("infer: no feasible initial state in " + std::to_string(config.max_init_attempts) +
                              " prior draws");

  AdaptConfig adapt = config.adapt;
  const long post_burn = config.n_iter - adapt.resolved_burn_in(config.n_iter);
  adapt.thin = std::max(adapt.thin, (post_burn + config.max_stored_draws - 1) / config.max_stored_draws);

  InferenceResult out;
  Rng chain_rng(derive_seed(config.seed, 3));
  if (transform.dim() == 0) {
    // Every coordinate is pinned: the chain is the single admissible point.
    out.chain.draws.resize(1, 0);
    out.chain.log_target = VectorXd::Constant(1, best_lp);
    out.chain.acceptance_rate = 1.0;
    out.chain.n_iter = 1;
  } else {
    out.chain = metropolis_run([&](const VectorXd& z) { return posterior.log_density(z); }, best, config.n_iter,
                               adapt, chain_rng);
  }
  out.chain.seed = config.seed;
  out.coordinate_labels = transform.labels();

  const int n = robot.n_joints();
  const Eigen::Index N = out.chain.size();
  out.draws.mp.resize(N, kParamsPerLink * n);
  out.draws.noise_c.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto d = transform.decode(out.chain.draws.row(i).transpose());
    out.draws.mp.row(i) = flatten_mechanical(d.params).transpose();
    out.draws.noise_c(i) = d.noise_c;
    if (!d.in_domain || !std::isfinite(posterior.checker().log_factor(d.params))) out.all_feasible = false;
  }
  push_forward(out.draws, robot, map, config.summary_poses);
  if (out.chain.size() >= 10)
    out.ess = check_ess_gate(out.chain, adapt, out.coordinate_labels);
  return out;
}

ZeroShotResult zero_shot_predict(const PriorCatalog& catalog, const RobotDescription& robot, const BaseParamMap& map,
                                 const PoseList& poses, long n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ContractViolation("zero_shot_predict: n_samples must be >= 1000");
  robot.validate();
  ZeroShotResult out;
  const int n = robot.n_joints();

  bool factorised = true;
  for (auto s : catalog.soft_constraints)
    if (s == SoftConstraint::total_mass) factorised = false;

  if (!factorised) {
    InferenceConfig cfg;
    cfg.seed = seed;
    cfg.max_stored_draws = n_samples;
    cfg.n_iter = 25 * n_samples;
    cfg.adapt.burn_in = 5 * n_samples;
    const InferenceResult r = infer(MeasurementDataset{}, catalog, robot, map, cfg);
    out.method = "mcmc";
    out.draws.mp = r.draws.mp.topRows(std::min<Eigen::Index>(n_samples, r.draws.mp.rows()));
    out.attempts = r.chain.n_iter;
    out.rejection_rate = 1.0 - r.chain.acceptance_rate;
    push_forward(out.draws, robot, map, poses);
    return out;
  }

  out.method = "rejection";
  const FeasibilityChecker checker = FeasibilityChecker::with_random_poses(robot);
  Rng rng(seed);
  const int threads = configured_threads();
  constexpr long kBatch = 2048;
  std::vector<RobotParams> accepted;
  accepted.reserve(static_cast<std::size_t>(n_samples));
  long attempts = 0;
  std::vector<PriorDraw> batch(kBatch);
  std::vector<char> ok(kBatch);
  while (static_cast<long>(accepted.size()) < n_samples) {
    for (auto& d : batch) d = sample_unconstrained(catalog, robot, rng);
    detail::parallel_for(kBatch, threads, [&](long i) { ok[i] = std::isfinite(checker.log_factor(batch[i].params)); });
    for (long i = 0; i < kBatch && static_cast<long>(accepted.size()) < n_samples; ++i) {
      ++attempts;
      if (ok[i]) accepted.push_back(batch[i].params);
    }
    const double rate = 1.0 - double(accepted.size()) / double(attempts);
    if (attempts >= 10000 && rate > 0.999)
      throw InfeasibleCatalogError("zero_shot_predict: feasibility rejects " + std::to_string(100.0 * rate) +
                                       "% of prior draws",
                                   rate);
  }
  out.attempts = attempts;
  out.rejection_rate = 1.0 - double(accepted.size()) / double(attempts);
  out.draws.mp.resize(n_samples, kParamsPerLink * n);
  for (long i = 0; i < n_samples; ++i) out.draws.mp.row(i) = flatten_mechanical(accepted[i]).transpose();
  push_forward(out.draws, robot, map, poses);
  return out;
}

}  // namespace bayesid
