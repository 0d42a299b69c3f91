#include "bayesid/dynamics.hpp"

#include <numbers>

#include <Eigen/Geometry>

namespace bayesid {

ChainKinematics forward_kinematics(const RobotDescription& robot, const Pose& pose) {
  detail::check_pose(robot, pose);
  if (!pose.q.allFinite()) throw ContractViolation("pose contains non-finite values");
  const int n = robot.n_joints();
  ChainKinematics kin;
  kin.rotation.reserve(n);
  kin.origin.reserve(n);
  kin.motion_axis.reserve(n);

  Matrix3d R = Matrix3d::Identity();
  Vector3d p = Vector3d::Zero();
  for (int k = 0; k < n; ++k) {
    const auto& joint = robot.joints[k];
    p += R * joint.translation;
    R = R * joint.rotation();
    const Vector3d z = R * joint.axis;
    R = R * Eigen::AngleAxisd(pose.q(k), joint.axis).toRotationMatrix();
    kin.rotation.push_back(R);
    kin.origin.push_back(p);
    Vector6<double> s;
    s << z, p.cross(z);
    kin.motion_axis.push_back(s);
  }
  return kin;
}

MatrixXd regressor(const RobotDescription& robot, const Pose& pose) {
  const int n = robot.n_joints();
  const int cols = kParamsPerLink * n;
  const ChainKinematics kin = forward_kinematics(robot, pose);
  MatrixXd Y(n, cols);
  VectorXd unit = VectorXd::Zero(cols);
  for (int c = 0; c < cols; ++c) {
    unit(c) = 1.0;
    Y.col(c) = mass_matrix_inertial<double>(robot, kin, unit).diagonal();
    unit(c) = 0.0;
  }
  return Y;
}

MatrixXd stacked_regressor(const RobotDescription& robot, const PoseList& poses) {
  const int n = robot.n_joints();
  MatrixXd Y(n * static_cast<Eigen::Index>(poses.size()), kParamsPerLink * n);
  for (std::size_t i = 0; i < poses.size(); ++i)
    Y.middleRows(n * static_cast<Eigen::Index>(i), n) = regressor(robot, poses[i]);
  return Y;
}

PoseList random_poses(const RobotDescription& robot, int count, Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  PoseList out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    VectorXd q(robot.n_joints());
    for (int k = 0; k < robot.n_joints(); ++k) q(k) = angle(rng);
    out.emplace_back(std::move(q));
  }
  return out;
}

}  // namespace bayesid
