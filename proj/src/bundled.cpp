#include "bayesid/bundled.hpp"

#include <array>
#include <numbers>

namespace bayesid {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr std::array<double, 6> kNominalRotor{217.16, 635.076, 86.192, 29.752, 14.580, 6.362};

}  // namespace

RobotDescription bundled_robot() {
  RobotDescription r;
  r.name = "bundled_6dof";
  const auto joint = [](Vector3d axis, Vector3d t, Vector3d rpy = Vector3d::Zero()) {
    JointDescription j;
    j.axis = axis;
    j.translation = t;
    j.rpy = rpy;
    return j;
  };
  r.joints = {
      joint(Vector3d::UnitZ(), {0.0, 0.0, 0.65}),
      joint(Vector3d::UnitY(), {0.35, 0.0, 0.45}),
      joint(Vector3d::UnitY(), {0.0, 0.0, 1.15}),
      joint(Vector3d::UnitX(), {0.25, 0.0, 0.1}),
      joint(Vector3d::UnitY(), {0.95, 0.0, 0.0}),
      joint(Vector3d::UnitY(), {0.2, 0.0, 0.0}, {0.0, 0.0, -kHalfPi}),
  };
  r.flange_translation = {0.0, 0.12, 0.0};

  // Tensor frames put the tensor z-axis on the joint axis of the link.
  const std::array<Vector3d, 6> tensor_rpy{Vector3d(0, 0, 0),        Vector3d(-kHalfPi, 0, 0),
                                           Vector3d(-kHalfPi, 0, 0), Vector3d(0, kHalfPi, 0),
                                           Vector3d(-kHalfPi, 0, 0), Vector3d(-kHalfPi, 0, 0)};
  const std::array<double, 6> com_bound{0.6, 1.0, 0.6, 1.2, 0.4, 0.6};
  for (int k = 0; k < 6; ++k) {
    LinkDescription l;
    l.com_bound = com_bound[k];
    l.nominal_rotor_inertia = kNominalRotor[k];
    l.inertia_rpy = tensor_rpy[k];
    r.links.push_back(l);
  }
  r.total_mass = 1050.0;
  r.base_mass = 310.0;
  return r;
}

RobotParams bundled_cad_params() {
  const std::array<double, 6> mass{360, 130, 140, 60, 28, 22};
  const std::array<Vector3d, 6> com{Vector3d(0.12, 0.02, 0.20), Vector3d(0.03, -0.02, 0.48),
                                    Vector3d(0.10, 0.01, 0.06), Vector3d(0.52, 0.01, 0.02),
                                    Vector3d(0.07, 0.005, 0.015), Vector3d(0.01, 0.09, 0.02)};
  const std::array<std::array<double, 6>, 6> tensor{{
      {20, 0.5, -1.0, 24, 0.3, 18},
      {16, 0.2, -0.4, 3, 0.1, 15},
      {8, 0.1, -0.2, 7, 0.05, 9},
      {9, 0.02, 0.05, 9.5, -0.03, 1.2},
      {0.25, 0.005, -0.004, 0.22, 0.002, 0.18},
      {0.12, 0.002, 0.001, 0.10, -0.003, 0.15},
  }};
  RobotParams out;
  for (int k = 0; k < 6; ++k)
    out.push_back(LinkInertialParams::from_components(mass[k], com[k], tensor[k], kNominalRotor[k]));
  return out;
}

RobotParams bundled_truth_params() {
  RobotParams out = bundled_cad_params();
  for (int k = 0; k < 6; ++k) out[k].rotor = 1.25 * kNominalRotor[k];
  return out;
}

EmpiricalTable bundled_empirical_table() {
  // mass mu/sigma, CoM length mu/sigma, rotor mu/sigma, tensor diag/off spread
  const double rows[6][8] = {
      {344.92, 138.55, 0.2388, 0.0404, 217.160, 217.16, 20.771, 32.968},
      {121.57, 80.92, 0.4824, 0.0670, 635.076, 635.08, 16.158, 18.388},
      {153.91, 86.77, 0.1261, 0.0606, 86.192, 86.192, 97.039, 0.3628},
      {55.47, 40.28, 0.5393, 0.3040, 29.752, 29.752, 23.289, 0.0660},
      {26.27, 15.24, 0.0787, 0.0437, 14.580, 14.580, 0.2113, 0.0101},
      {25.99, 26.62, 0.2293, 0.2309, 6.362, 63.620, 0.2801, 0.0041},
  };
  EmpiricalTable t;
  for (const auto& r : rows) {
    EmpiricalAxisStats s;
    s.mass_mu = r[0];
    s.mass_sigma = r[1];
    s.com_mu = r[2];
    s.com_sigma = r[3];
    s.rotor_mu = r[4];
    s.rotor_sigma = r[5];
    s.inertia_diag_sigma = r[6];
    s.inertia_off_sigma = r[7];
    t.axes.push_back(s);
  }
  return t;
}

}  // namespace bayesid
