#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <json.hpp>

#include "bayesid/types.hpp"

namespace bayesid {

/// Mechanical parameters of one body.
///
/// `com` is the centre of mass in the link frame (origin at the joint).
/// `inertia` is the rotational inertia about the centre of mass, expressed in
/// the link's tensor frame (see LinkDescription::inertia_rpy). `rotor` is the
/// motor inertia reflected to the joint.
template <typename Scalar>
struct LinkInertia {
  Scalar mass{0};
  Vector3<Scalar> com = Vector3<Scalar>::Zero();
  Matrix3<Scalar> inertia = Matrix3<Scalar>::Zero();
  Scalar rotor{0};

  /// Tensor from its six independent entries (xx, xy, xz, yy, yz, zz).
  static LinkInertia from_components(Scalar m, const Vector3<Scalar>& r,
                                     const std::array<Scalar, 6>& I, Scalar J) {
    LinkInertia out;
    out.mass = m;
    out.com = r;
    out.inertia << I[0], I[1], I[2],  //
        I[1], I[3], I[4],             //
        I[2], I[4], I[5];
    out.rotor = J;
    return out;
  }

  std::array<Scalar, 6> inertia_components() const {
    return {inertia(0, 0), inertia(0, 1), inertia(0, 2),
            inertia(1, 1), inertia(1, 2), inertia(2, 2)};
  }

  template <typename Other>
  LinkInertia<Other> cast() const {
    LinkInertia<Other> out;
    out.mass = Other(mass);
    out.com = com.template cast<Other>();
    out.inertia = inertia.template cast<Other>();
    out.rotor = Other(rotor);
    return out;
  }
};

using LinkInertialParams = LinkInertia<double>;
using RobotParams = std::vector<LinkInertialParams>;

struct JointDescription {
  Vector3d axis = Vector3d::UnitZ();          // rotation axis in the joint frame
  Vector3d translation = Vector3d::Zero();    // parent link frame -> joint frame
  Vector3d rpy = Vector3d::Zero();            // fixed orientation, roll-pitch-yaw

  Matrix3d rotation() const;
};

struct LinkDescription {
  double com_bound = 1.0;              // |r| upper bound (m)
  double nominal_rotor_inertia = 0.0;  // datasheet J_i (kg m^2)
  Vector3d inertia_rpy = Vector3d::Zero();

  /// Rotation taking tensor-frame coordinates to link-frame coordinates.
  Matrix3d inertia_rotation() const;
};

/// Kinematic chain of a serial robot with revolute joints.
struct RobotDescription {
  std::string name;
  std::vector<JointDescription> joints;
  std::vector<LinkDescription> links;
  /// Vector from the last joint to the flange, in the last link frame.
  Vector3d flange_translation = Vector3d::Zero();
  double total_mass = 0.0;  // datasheet mass of the whole robot
  double base_mass = 0.0;   // part of total_mass not carried by the links

  int n_joints() const { return static_cast<int>(joints.size()); }

  /// Link k's translation vector (to the next joint, or to the flange for the
  /// last link), expressed in link k's frame. 0-based index.
  Vector3d link_translation(int k) const;

  std::vector<double> nominal_rotor_inertias() const;

  /// Throws ValidationError when the description breaks an invariant.
  void validate() const;
};

Matrix3d rotation_from_rpy(const Vector3d& rpy);

/// Linear inertial parameter vector of one link:
/// [m, m rx, m ry, m rz, Ixx, Ixy, Ixz, Iyy, Iyz, Izz, J]
/// where the first moment is in the link frame and the tensor is taken about
/// the link origin in the tensor frame. Mass matrix entries are linear in it.
template <typename Scalar>
Eigen::Matrix<Scalar, kParamsPerLink, 1> inertial_vector(const LinkInertia<Scalar>& link,
                                                         const Matrix3d& tensor_rotation) {
  const Vector3<Scalar> c_t = tensor_rotation.transpose().template cast<Scalar>() * link.com;
  const Matrix3<Scalar> origin_tensor =
      link.inertia + link.mass * (c_t.squaredNorm() * Matrix3<Scalar>::Identity() -
                                  c_t * c_t.transpose());
  Eigen::Matrix<Scalar, kParamsPerLink, 1> pi;
  pi << link.mass, link.mass * link.com(0), link.mass * link.com(1), link.mass * link.com(2),
      origin_tensor(0, 0), origin_tensor(0, 1), origin_tensor(0, 2), origin_tensor(1, 1),
      origin_tensor(1, 2), origin_tensor(2, 2), link.rotor;
  return pi;
}

/// Stacked inertial vector of all links (11 n entries, link-major).
VectorXd stack_inertial(const RobotDescription& robot, const RobotParams& params);

/// Parameter names in stacked order, e.g. "m3", "mrx3", "Izz6", "J1".
std::vector<std::string> inertial_labels(int n_joints);

/// Mechanical parameter names per link in the order m, rx, ry, rz, Ixx..Izz, J.
std::vector<std::string> mechanical_labels(int n_joints);

/// Mechanical parameters flattened link-major (11 n).
VectorXd flatten_mechanical(const RobotParams& params);
RobotParams unflatten_mechanical(const VectorXd& flat);

// JSON schema (schema_version 1):
//   robot:  {schema_version, name, joints:[{axis, translation, rotation}],
//            links:[{com_bound, nominal_rotor_inertia, inertia_rotation?}],
//            flange_translation?, metadata:{total_mass, base_mass?}}
//   params: {schema_version, links:[{mass, com:[3], inertia:[xx,xy,xz,yy,yz,zz],
//            rotor_inertia}]}
// Rotations are roll-pitch-yaw triples in radians.
nlohmann::json robot_to_json(const RobotDescription& robot);
RobotDescription robot_from_json(const nlohmann::json& j);
RobotDescription load_robot(const std::filesystem::path& path);
void save_robot(const RobotDescription& robot, const std::filesystem::path& path);

nlohmann::json params_to_json(const RobotParams& params);
RobotParams params_from_json(const nlohmann::json& j);
RobotParams load_params(const std::filesystem::path& path);
void save_params(const RobotParams& params, const std::filesystem::path& path);

}  // namespace bayesid
