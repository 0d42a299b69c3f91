#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bayesid/robot.hpp"
#include "bayesid/types.hpp"

namespace bayesid {

/// Map from the stacked inertial vector (11 n) to independent base parameters.
///
/// Lambda = combination * stack_inertial(params), and for every pose
///   regressor(q).cols(independent) * Lambda == regressor(q) * stack_inertial(params).
struct BaseParamMap {
  int n_joints = 0;
  int count = 0;
  std::vector<int> independent;  // stacked column kept for each base parameter
  std::vector<int> dependent;    // regrouped or unobservable columns
  MatrixXd combination;          // count x 11 n
  std::vector<std::string> labels;

  /// Human-readable grouping, e.g. "J6 + Izz6".
  std::string describe(int i) const;

  /// Index of the base parameter whose kept column is the rotor inertia of
  /// `joint` (0-based), or -1 when the rotor column was regrouped.
  int rotor_group(int joint) const;
};

struct BaseParamOptions {
  int n_sample_poses = 1000;
  std::uint64_t seed = 0;
  double rank_tolerance = 1e-9;
};

/// Numeric base-parameter extraction over random poses.
///
/// Columns of the stacked regressor are visited in a fixed priority order
/// (rotor inertias first, then each link's entries from the tip inwards in
/// the order m, m r, Ixx..Izz) and kept when they add a direction the kept
/// set does not span. Regrouping coefficients come from least squares on the
/// kept columns. A second, independent pose sample must reproduce the rank,
/// otherwise DiagnosticError.
BaseParamMap extract_base_params(const RobotDescription& robot, const BaseParamOptions& options = {});

/// Base parameter values for a mechanical parameter set.
VectorXd base_param_values(const BaseParamMap& map, const RobotDescription& robot,
                           const RobotParams& params);
VectorXd base_param_values(const BaseParamMap& map, const VectorXd& stacked_inertial);

/// Regressor restricted to the kept columns (n x count).
MatrixXd reduced_regressor(const RobotDescription& robot, const BaseParamMap& map, const Pose& pose);
MatrixXd stacked_reduced_regressor(const RobotDescription& robot, const BaseParamMap& map,
                                   const PoseList& poses);

/// 2-norm condition number. Returns +infinity when the matrix has fewer
/// numerically independent columns than columns (rank deficiency is a
/// supported regime, not an error).
double condition_number(const MatrixXd& A);
double condition_number(const RobotDescription& robot, const PoseList& poses, const BaseParamMap& map);

}  // namespace bayesid
