#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bayesid/base_params.hpp"
#include "bayesid/data.hpp"
#include "bayesid/priors.hpp"
#include "bayesid/robot.hpp"
#include "bayesid/sampler.hpp"

namespace bayesid {

/// Coordinates the chain moves in.
/// mechanical: per link [m, radius, polar, azimuth, Ixx, Ixy, Ixz, Iyy, Iyz,
///   Izz, J] with the CoM in spherical form about the link translation.
/// inertial: per link the linear inertial vector [m, m rx, m ry, m rz, origin
///   tensor (6), J], in which the apparent inertia is linear.
enum class SamplingSpace { mechanical, inertial };

std::string_view to_string(SamplingSpace space);
SamplingSpace sampling_space_from_string(std::string_view name);

/// Map between mechanical parameters and the sampling space.
///
/// The noise coefficient c is appended to the natural coordinates of the
/// chosen space. Each sampled coordinate is u = loc + scale * z. Coordinates
/// without prior spread (point masses) are pinned and not sampled. In the
/// mechanical space the azimuth is sampled on the window [loc - pi, loc + pi)
/// so the target stays proper.
class SamplingTransform {
 public:
  /// Location and scale estimated from `n_draws` draws of the catalog.
  static SamplingTransform from_catalog(const PriorCatalog& catalog, const RobotDescription& robot,
                                        std::uint64_t seed = 0, int n_draws = 2000,
                                        SamplingSpace space = SamplingSpace::mechanical);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(free_.size()); }
  int n_links() const { return static_cast<int>(axes_.size()); }
  SamplingSpace space() const { return space_; }

  struct Decoded {
    RobotParams params;
    double noise_c = 0.0;
    /// mechanical: radius >= 0, polar in [0, pi], azimuth in window.
    /// inertial: m > 0.
    bool in_domain = true;
  };

  Decoded decode(const VectorXd& z) const;
  VectorXd encode(const RobotParams& params, double noise_c) const;

  /// Log-Jacobian turning the catalog density into a density over the
  /// sampling coordinates. mechanical space: log(radius^2 sin(polar)) per link
  /// for Cartesian catalogs, 0 for spherical ones. inertial space:
  /// -3 log m per link, minus log(radius^2 sin(polar)) for spherical catalogs.
  double log_jacobian(const VectorXd& z) const;

  /// Names of the sampled coordinates, e.g. "m1", "radius1", "c".
  std::vector<std::string> labels() const;

  const VectorXd& loc() const { return loc_; }
  const VectorXd& scale() const { return scale_; }

 private:
  VectorXd natural(const VectorXd& z) const;

  std::vector<Vector3d> axes_;  // link translations
  std::vector<Matrix3d> tensor_rotations_;
  SamplingSpace space_ = SamplingSpace::mechanical;
  bool cartesian_ = true;
  VectorXd loc_, scale_;        // over all natural coordinates
  std::vector<Eigen::Index> free_;
};

/// Sum over entries of log Normal(X_model; mu, (c mu)^2). Throws
/// ValidationError when a measured inertia is not positive.
double log_likelihood(const MeasurementDataset& data, const RobotDescription& robot,
                      const RobotParams& params, double noise_c);

/// Prior, constraint factors, Jacobian and likelihood with the dataset and
/// check-pose regressors cached.
class Posterior {
 public:
  Posterior(const RobotDescription& robot, PriorCatalog catalog, const MeasurementDataset& data,
            SamplingTransform transform, FeasibilityChecker checker);

  /// -infinity outside the domain or the feasible region.
  double log_density(const VectorXd& z) const;
  double log_prior(const RobotParams& params, double noise_c) const;
  double log_likelihood(const RobotParams& params, double noise_c) const;

  const SamplingTransform& transform() const { return transform_; }
  const FeasibilityChecker& checker() const { return checker_; }
  const RobotDescription& robot() const { return robot_; }

 private:
  RobotDescription robot_;
  PriorCatalog catalog_;
  SamplingTransform transform_;
  FeasibilityChecker checker_;
  MatrixXd data_regressor_;
  VectorXd measured_;
};

/// One-shot evaluation; builds the caches on every call.
double log_posterior(const VectorXd& z, const MeasurementDataset& data, const PriorCatalog& catalog,
                     const RobotDescription& robot, const SamplingTransform& transform);

struct PredictiveSummary {
  std::string target;
  double mean = 0.0;
  double median = 0.0;
  double lo = 0.0;  // 2.5 percentile
  double hi = 0.0;  // 97.5 percentile
  long count = 0;
};

/// Draws pushed to mechanical, base-parameter and inertia space.
struct PredictiveDraws {
  MatrixXd mp;   // draws x 11 n, mechanical order (m, rx, ry, rz, Ixx..Izz, J)
  VectorXd noise_c;  // empty in zero-shot mode
  MatrixXd bp;   // draws x base-parameter count
  MatrixXd x;    // draws x (poses * n), pose-major
  std::vector<std::string> mp_labels, bp_labels, x_labels;

  Eigen::Index size() const { return mp.rows(); }
  RobotParams params(Eigen::Index draw) const;
};

/// Mean, median and central 95% interval per column.
std::vector<PredictiveSummary> summarize(const MatrixXd& draws, const std::vector<std::string>& labels);

/// Fills bp and x from mp (x at `poses`).
void push_forward(PredictiveDraws& draws, const RobotDescription& robot, const BaseParamMap& map,
                  const PoseList& poses);

/// Worker count from BAYESID_THREADS (default: hardware concurrency).
int configured_threads();

struct InferenceConfig {
  long n_iter = 200000;
  AdaptConfig adapt;
  std::uint64_t seed = 0;
  int init_candidates = 200;
  long max_init_attempts = 10000;
  /// Thinning is raised so that at most this many draws are stored.
  long max_stored_draws = 10000;
  int transform_draws = 2000;
  SamplingSpace space = SamplingSpace::mechanical;
  PoseList summary_poses;
};

struct InferenceResult {
  ChainSamples chain;
  std::vector<std::string> coordinate_labels;
  PredictiveDraws draws;
  EssGateReport ess;
  bool all_feasible = true;
};

/// Adaptive-Metropolis posterior sampling. The dataset may be empty.
/// Throws InitializationError when no feasible start is found.
InferenceResult infer(const MeasurementDataset& data, const PriorCatalog& catalog, const RobotDescription& robot,
                      const BaseParamMap& map, const InferenceConfig& config);

struct ZeroShotResult {
  PredictiveDraws draws;
  long attempts = 0;
  double rejection_rate = 0.0;
  std::string method;  // "rejection" or "mcmc"
};

/// Prior predictive draws. Factorised catalogs use rejection on the
/// feasibility factor; catalogs with soft factors are sampled by Metropolis
/// with an empty dataset. Requires n_samples >= 1000. Throws
/// InfeasibleCatalogError when more than 99.9% of draws are rejected.
ZeroShotResult zero_shot_predict(const PriorCatalog& catalog, const RobotDescription& robot,
                                 const BaseParamMap& map, const PoseList& poses, long n_samples,
                                 std::uint64_t seed);

}  // namespace bayesid
