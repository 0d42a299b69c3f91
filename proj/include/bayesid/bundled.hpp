#pragma once

// Reference 6-DOF heavy-payload robot shipped with the library: kinematics,
// CAD-like parameters, a synthetic ground truth and the empirical donor
// statistics used for its empirical prior.

#include "bayesid/priors.hpp"
#include "bayesid/robot.hpp"

namespace bayesid {

RobotDescription bundled_robot();

/// CAD-like parameters (rotor inertia at the nominal values).
RobotParams bundled_cad_params();

/// Synthetic ground truth: the CAD parameters with rotor inertia 1.25 J_i,
/// standing in for gear inertia missing from the CAD model.
RobotParams bundled_truth_params();

/// Per-axis empirical statistics for the bundled robot (masses already scaled
/// to its datasheet mass).
EmpiricalTable bundled_empirical_table();

}  // namespace bayesid
