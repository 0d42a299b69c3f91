#pragma once

// Joint-space inertia of a serial chain of revolute joints.
//
// The mass matrix is assembled with the composite-rigid-body method in the
// base frame: every link's spatial inertia is expressed about the base
// origin, composite inertias are accumulated from the tip, and
//   M(i, j) = S_i^T Ic_max(i,j) S_j
// with S_i = [z_i; o_i x z_i] the Plücker axis of joint i. Reflected rotor
// inertia J_i is added to M(i, i).

#include <span>
#include <vector>

#include "bayesid/errors.hpp"
#include "bayesid/robot.hpp"
#include "bayesid/types.hpp"

namespace bayesid {

/// Link frames of a chain at one pose, in base coordinates.
struct ChainKinematics {
  std::vector<Matrix3d> rotation;  // link k -> base
  std::vector<Vector3d> origin;    // joint k origin
  std::vector<Vector6<double>> motion_axis;
};

ChainKinematics forward_kinematics(const RobotDescription& robot, const Pose& pose);

namespace detail {

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> S;
  S << Scalar(0), -v(2), v(1),  //
      v(2), Scalar(0), -v(0),   //
      -v(1), v(0), Scalar(0);
  return S;
}

/// Spatial inertia (angular-first) about the base origin of a link given its
/// linear inertial vector.
template <typename Scalar>
Matrix6<Scalar> spatial_inertia(const Eigen::Matrix<Scalar, kParamsPerLink, 1>& pi,
                                const Matrix3d& link_rotation, const Vector3d& link_origin,
                                const Matrix3d& tensor_rotation) {
  const Scalar m = pi(0);
  const Vector3<Scalar> h_link = pi.template segment<3>(1);
  Matrix3<Scalar> tensor;
  tensor << pi(4), pi(5), pi(6),  //
      pi(5), pi(7), pi(8),        //
      pi(6), pi(8), pi(9);

  const Matrix3<Scalar> R = (link_rotation * tensor_rotation).template cast<Scalar>();
  const Matrix3<Scalar> Rl = link_rotation.template cast<Scalar>();
  const Vector3<Scalar> o = link_origin.template cast<Scalar>();

  const Vector3<Scalar> h_rel = Rl * h_link;
  const Matrix3<Scalar> So = skew<Scalar>(o);
  const Matrix3<Scalar> Sh = skew<Scalar>(h_rel);
  // Parallel-axis shift from the link origin to the base origin, linear in pi.
  const Matrix3<Scalar> I0 = R * tensor * R.transpose() + m * (So.transpose() * So) +
                             So.transpose() * Sh + Sh.transpose() * So;
  const Vector3<Scalar> h = h_rel + m * o;

  Matrix6<Scalar> I;
  I.template topLeftCorner<3, 3>() = I0;
  I.template topRightCorner<3, 3>() = skew<Scalar>(h);
  I.template bottomLeftCorner<3, 3>() = skew<Scalar>(h).transpose();
  I.template bottomRightCorner<3, 3>() = m * Matrix3<Scalar>::Identity();
  return I;
}

inline void check_pose(const RobotDescription& robot, const Pose& pose) {
  if (pose.size() != robot.n_joints())
    throw ContractViolation("pose has " + std::to_string(pose.size()) + " entries, robot has " +
                            std::to_string(robot.n_joints()) + " joints");
}

}  // namespace detail

/// Mass matrix from stacked linear inertial parameters (11 n x 1).
template <typename Scalar>
MatrixX<Scalar> mass_matrix_inertial(const RobotDescription& robot, const ChainKinematics& kin,
                                     const Eigen::Ref<const VectorX<Scalar>>& stacked) {
  const int n = robot.n_joints();
  if (stacked.size() != kParamsPerLink * n)
    throw ContractViolation("mass_matrix: expected " + std::to_string(kParamsPerLink * n) +
                            " inertial parameters");
  MatrixX<Scalar> M = MatrixX<Scalar>::Zero(n, n);
  Matrix6<Scalar> composite = Matrix6<Scalar>::Zero();
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::Matrix<Scalar, kParamsPerLink, 1> pi = stacked.template segment<kParamsPerLink>(kParamsPerLink * k);
    composite += detail::spatial_inertia<Scalar>(pi, kin.rotation[k], kin.origin[k],
                                                 robot.links[k].inertia_rotation());
    const Vector6<Scalar> force = composite * kin.motion_axis[k].template cast<Scalar>();
    for (int j = 0; j <= k; ++j) {
      const Scalar v = kin.motion_axis[j].template cast<Scalar>().dot(force);
      M(j, k) = v;
      M(k, j) = v;
    }
    M(k, k) += pi(kParamsPerLink - 1);
  }
  return M;
}

template <typename Scalar>
VectorX<Scalar> stack_inertial(const RobotDescription& robot,
                               std::span<const LinkInertia<Scalar>> params) {
  VectorX<Scalar> out(kParamsPerLink * robot.n_joints());
  for (int k = 0; k < robot.n_joints(); ++k)
    out.template segment<kParamsPerLink>(kParamsPerLink * k) =
        inertial_vector(params[k], robot.links[k].inertia_rotation());
  return out;
}

/// Joint-space mass matrix M(q) including reflected rotor inertia.
template <typename Scalar>
MatrixX<Scalar> mass_matrix(const RobotDescription& robot,
                            std::span<const LinkInertia<Scalar>> params, const Pose& pose) {
  if (static_cast<int>(params.size()) != robot.n_joints())
    throw ContractViolation("mass_matrix: expected " + std::to_string(robot.n_joints()) +
                            " parameter sets, got " + std::to_string(params.size()));
  detail::check_pose(robot, pose);
  const ChainKinematics kin = forward_kinematics(robot, pose);
  const VectorX<Scalar> stacked = stack_inertial<Scalar>(robot, params);
  return mass_matrix_inertial<Scalar>(robot, kin, stacked);
}

inline MatrixXd mass_matrix(const RobotDescription& robot, const RobotParams& params,
                            const Pose& pose) {
  return mass_matrix<double>(robot, std::span<const LinkInertialParams>(params), pose);
}

/// Pose-dependent apparent inertia per axis: X_k = M_kk(q).
template <typename Scalar>
VectorX<Scalar> apparent_inertia(const RobotDescription& robot,
                                 std::span<const LinkInertia<Scalar>> params, const Pose& pose) {
  return mass_matrix<Scalar>(robot, params, pose).diagonal();
}

inline VectorXd apparent_inertia(const RobotDescription& robot, const RobotParams& params,
                                 const Pose& pose) {
  return apparent_inertia<double>(robot, std::span<const LinkInertialParams>(params), pose);
}

/// Full regressor Y(q), n x 11 n, with X(q) = Y(q) * stack_inertial(params).
/// Column c is the apparent inertia of the unit inertial vector e_c.
MatrixXd regressor(const RobotDescription& robot, const Pose& pose);

/// Rows of several poses stacked pose-major (row = pose * n + axis).
MatrixXd stacked_regressor(const RobotDescription& robot, const PoseList& poses);

/// Uniform poses on [-pi, pi] per joint.
PoseList random_poses(const RobotDescription& robot, int count, Rng& rng);

}  // namespace bayesid
