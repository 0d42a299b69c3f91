#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "bayesid/robot.hpp"
#include "bayesid/types.hpp"

namespace bayesid {

/// One apparent-inertia measurement of one axis at one pose.
struct Measurement {
  Pose pose;
  int axis = 1;  // 1-based
  double inertia = 0.0;
};

enum class Provenance { synthetic, imported };

struct MeasurementDataset {
  std::vector<Measurement> entries;
  Provenance provenance = Provenance::imported;
  std::optional<RobotParams> truth;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Distinct poses in order of first appearance.
  PoseList unique_poses() const;
  /// Throws ValidationError on non-positive inertia, bad axis or pose size.
  void validate(int n_joints) const;
  /// Subset holding every entry measured at the first `n_poses` distinct poses.
  MeasurementDataset first_poses(std::size_t n_poses) const;
  VectorXd inertias() const;
};

struct SyntheticConfig {
  int n_poses = 147;
  double noise_c = 0.02;
  double pose_lo = -std::numbers::pi;
  double pose_hi = std::numbers::pi;

  void validate() const;
};

/// All axes at n_poses random poses; inertia = X_true (1 + c z) with z
/// standard normal, redrawn while the result is not positive. Throws
/// ValidationError when the truth fails the feasibility check.
MeasurementDataset generate_synthetic(const RobotDescription& robot, const RobotParams& truth,
                                      const SyntheticConfig& config, Rng& rng);

/// Random partition by pose: `n_train` distinct poses (with all their axes)
/// go to the first set, the remaining poses to the second. Seeded.
std::pair<MeasurementDataset, MeasurementDataset> split(const MeasurementDataset& dataset,
                                                        std::size_t n_train, std::uint64_t seed);

/// CSV columns pose_q1..pose_qn, axis, inertia.
MeasurementDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const MeasurementDataset& dataset, const std::filesystem::path& path);

}  // namespace bayesid
