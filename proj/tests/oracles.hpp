#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's dynamics; only the robot description data is shared.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "bayesid/robot.hpp"
#include "bayesid/types.hpp"

namespace oracle {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline Matrix3d rot_x(double a) {
  Matrix3d R;
  R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return R;
}
inline Matrix3d rot_y(double a) {
  Matrix3d R;
  R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return R;
}
inline Matrix3d rot_z(double a) {
  Matrix3d R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return R;
}
inline Matrix3d rpy(const Vector3d& v) { return rot_z(v(2)) * rot_y(v(1)) * rot_x(v(0)); }

// Rodrigues' formula for a unit axis.
inline Matrix3d rot_axis(const Vector3d& axis, double a) {
  const Vector3d u = axis.normalized();
  Matrix3d K;
  K << 0, -u(2), u(1), u(2), 0, -u(0), -u(1), u(0), 0;
  return Matrix3d::Identity() + std::sin(a) * K + (1 - std::cos(a)) * K * K;
}

inline Matrix4d homogeneous(const Matrix3d& R, const Vector3d& p) {
  Matrix4d T = Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = R;
  T.topRightCorner<3, 1>() = p;
  return T;
}

struct Frames {
  std::vector<Matrix4d> link;   // base <- link k (after the joint rotation)
  std::vector<Vector3d> axis;   // joint axis in base coordinates
};

inline Frames frames(const bayesid::RobotDescription& robot, const VectorXd& q) {
  Frames f;
  Matrix4d T = Matrix4d::Identity();
  for (int k = 0; k < robot.n_joints(); ++k) {
    const auto& j = robot.joints[k];
    T = T * homogeneous(Matrix3d::Identity(), j.translation) * homogeneous(rpy(j.rpy), Vector3d::Zero());
    f.axis.push_back(T.topLeftCorner<3, 3>() * j.axis.normalized());
    T = T * homogeneous(rot_axis(j.axis, q(k)), Vector3d::Zero());
    f.link.push_back(T);
  }
  return f;
}

// M = sum_k m_k Jv^T Jv + Jw^T I_k Jw, plus the rotor inertia on the diagonal.
inline MatrixXd mass_matrix(const bayesid::RobotDescription& robot, const bayesid::RobotParams& params,
                            const VectorXd& q) {
  const int n = robot.n_joints();
  const Frames f = frames(robot, q);
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const Matrix3d Rk = f.link[k].topLeftCorner<3, 3>();
    const Vector3d com = f.link[k].topRightCorner<3, 1>() + Rk * params[k].com;
    MatrixXd Jv = MatrixXd::Zero(3, n), Jw = MatrixXd::Zero(3, n);
    for (int j = 0; j <= k; ++j) {
      const Vector3d o = f.link[j].topRightCorner<3, 1>();
      Jw.col(j) = f.axis[j];
      Jv.col(j) = f.axis[j].cross(com - o);
    }
    const Matrix3d Rt = Rk * rpy(robot.links[k].inertia_rpy);
    const Matrix3d I = Rt * params[k].inertia * Rt.transpose();
    M += params[k].mass * Jv.transpose() * Jv + Jw.transpose() * I * Jw;
    M(k, k) += params[k].rotor;
  }
  return M;
}

// Physically consistent link: principal moments obeying the triangle
// inequality, rotated by a random orientation; CoM inside `bound`.
template <typename Rng>
bayesid::LinkInertialParams random_link(Rng& rng, double bound, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bayesid::LinkInertialParams p;
  p.mass = scale * (1.0 + 50.0 * u(rng));
  Vector3d r(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
  p.com = r.normalized() * bound * 0.9 * u(rng);
  const double a = 0.1 + u(rng), b = 0.1 + u(rng);
  const double c = std::abs(a - b) + (a + b - std::abs(a - b)) * (0.05 + 0.9 * u(rng));
  Eigen::Quaterniond qr(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
  const Matrix3d R = qr.normalized().toRotationMatrix();
  p.inertia = scale * R * Vector3d(a, b, c).asDiagonal() * R.transpose();
  p.rotor = scale * (0.5 + u(rng));
  return p;
}

template <typename Rng>
bayesid::RobotParams random_params(const bayesid::RobotDescription& robot, Rng& rng) {
  bayesid::RobotParams out;
  for (const auto& l : robot.links) out.push_back(random_link(rng, l.com_bound));
  return out;
}

template <typename Rng>
VectorXd random_q(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = u(rng);
  return q;
}

inline double rel_err(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / b.norm(); }
inline double rel_err(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace oracle
