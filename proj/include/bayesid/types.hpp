#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace bayesid {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

/// Linear inertial parameters per link: m, m*r (3), origin tensor (6), rotor J.
inline constexpr int kParamsPerLink = 11;

/// Shared random engine type. One stream per thread of execution.
using Rng = std::mt19937_64;

/// Joint configuration in radians.
struct Pose {
  VectorXd q;

  Pose() = default;
  explicit Pose(VectorXd values) : q(std::move(values)) {}
  Eigen::Index size() const { return q.size(); }
  bool operator==(const Pose& other) const {
    return q.size() == other.q.size() && q == other.q;
  }
};

using PoseList = std::vector<Pose>;

}  // namespace bayesid
