#include "bayesid/robot.hpp"

#include <cmath>

#include "bayesid/errors.hpp"
#include "json_io.hpp"

namespace bayesid {

using nlohmann::json;

Matrix3d rotation_from_rpy(const Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy(2), Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy(1), Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy(0), Vector3d::UnitX()))
      .toRotationMatrix();
}

Matrix3d JointDescription::rotation() const { return rotation_from_rpy(rpy); }

Matrix3d LinkDescription::inertia_rotation() const { return rotation_from_rpy(inertia_rpy); }

Vector3d RobotDescription::link_translation(int k) const {
  if (k < 0 || k >= n_joints()) throw ContractViolation("link index out of range");
  if (k + 1 < n_joints()) return joints[k + 1].translation;
  return flange_translation;
}

std::vector<double> RobotDescription::nominal_rotor_inertias() const {
  std::vector<double> out;
  out.reserve(links.size());
  for (const auto& l : links) out.push_back(l.nominal_rotor_inertia);
  return out;
}

void RobotDescription::validate() const {
  if (joints.empty()) throw ValidationError("robot: at least one joint is required");
  if (links.size() != joints.size())
    throw ValidationError("robot: links and joints must have the same length");
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const auto& jt = joints[k];
    if (!jt.axis.allFinite() || !jt.translation.allFinite() || !jt.rpy.allFinite())
      throw ValidationError("robot: joint " + std::to_string(k + 1) + " has non-finite entries");
    if (std::abs(jt.axis.norm() - 1.0) > 1e-9)
      throw ValidationError("robot: joint " + std::to_string(k + 1) + " axis must be a unit vector");
    const Matrix3d R = jt.rotation();
    if (!(R.transpose() * R).isIdentity(1e-9))
      throw ValidationError("robot: joint " + std::to_string(k + 1) + " rotation is not rigid");
    if (!(links[k].com_bound > 0.0))
      throw ValidationError("robot: link " + std::to_string(k + 1) + " com_bound must be > 0");
    if (!(links[k].nominal_rotor_inertia >= 0.0))
      throw ValidationError("robot: link " + std::to_string(k + 1) +
                            " nominal_rotor_inertia must be >= 0");
  }
  if (!(total_mass >= 0.0) || !(base_mass >= 0.0))
    throw ValidationError("robot: masses in metadata must be >= 0");
}

VectorXd stack_inertial(const RobotDescription& robot, const RobotParams& params) {
  if (static_cast<int>(params.size()) != robot.n_joints())
    throw ContractViolation("stack_inertial: expected one parameter set per joint");
  VectorXd out(kParamsPerLink * robot.n_joints());
  for (int k = 0; k < robot.n_joints(); ++k)
    out.segment<kParamsPerLink>(kParamsPerLink * k) =
        inertial_vector(params[k], robot.links[k].inertia_rotation());
  return out;
}

std::vector<std::string> inertial_labels(int n_joints) {
  static const char* names[kParamsPerLink] = {"m",   "mrx", "mry", "mrz", "Ixx", "Ixy",
                                              "Ixz", "Iyy", "Iyz", "Izz", "J"};
  std::vector<std::string> out;
  for (int k = 1; k <= n_joints; ++k)
    for (const char* n : names) out.push_back(n + std::to_string(k));
  return out;
}

std::vector<std::string> mechanical_labels(int n_joints) {
  static const char* names[kParamsPerLink] = {"m",   "rx",  "ry",  "rz",  "Ixx", "Ixy",
                                              "Ixz", "Iyy", "Iyz", "Izz", "J"};
  std::vector<std::string> out;
  for (int k = 1; k <= n_joints; ++k)
    for (const char* n : names) out.push_back(n + std::to_string(k));
  return out;
}

VectorXd flatten_mechanical(const RobotParams& params) {
  VectorXd out(kParamsPerLink * static_cast<Eigen::Index>(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    const auto I = p.inertia_components();
    out.segment<kParamsPerLink>(kParamsPerLink * k) << p.mass, p.com(0), p.com(1), p.com(2),
        I[0], I[1], I[2], I[3], I[4], I[5], p.rotor;
  }
  return out;
}

RobotParams unflatten_mechanical(const VectorXd& flat) {
  if (flat.size() % kParamsPerLink != 0)
    throw ContractViolation("unflatten_mechanical: length must be a multiple of 11");
  RobotParams out;
  for (Eigen::Index k = 0; k < flat.size() / kParamsPerLink; ++k) {
    const auto s = flat.segment<kParamsPerLink>(kParamsPerLink * k);
    out.push_back(LinkInertialParams::from_components(
        s(0), Vector3d(s(1), s(2), s(3)), {s(4), s(5), s(6), s(7), s(8), s(9)}, s(10)));
  }
  return out;
}

json robot_to_json(const RobotDescription& robot) {
  json joints = json::array();
  for (const auto& jt : robot.joints)
    joints.push_back({{"axis", detail::vec3_to_json(jt.axis)},
                      {"translation", detail::vec3_to_json(jt.translation)},
                      {"rotation", detail::vec3_to_json(jt.rpy)}});
  json links = json::array();
  for (const auto& l : robot.links)
    links.push_back({{"com_bound", l.com_bound},
                     {"nominal_rotor_inertia", l.nominal_rotor_inertia},
                     {"inertia_rotation", detail::vec3_to_json(l.inertia_rpy)}});
  return {{"schema_version", detail::kSchemaVersion},
          {"name", robot.name},
          {"joints", joints},
          {"links", links},
          {"flange_translation", detail::vec3_to_json(robot.flange_translation)},
          {"metadata", {{"total_mass", robot.total_mass}, {"base_mass", robot.base_mass}}}};
}

RobotDescription robot_from_json(const json& j) {
  detail::check_schema(j, "robot");
  RobotDescription robot;
  try {
    robot.name = j.value("name", std::string{});
    for (const auto& jj : j.at("joints")) {
      JointDescription jt;
      jt.axis = detail::vec3_from_json(jj.at("axis"), "axis");
      jt.translation = detail::vec3_from_json(jj.at("translation"), "translation");
      if (jj.contains("rotation")) jt.rpy = detail::vec3_from_json(jj.at("rotation"), "rotation");
      robot.joints.push_back(jt);
    }
    for (const auto& jl : j.at("links")) {
      LinkDescription l;
      l.com_bound = detail::real_from_json(jl.at("com_bound"));
      l.nominal_rotor_inertia = detail::real_from_json(jl.at("nominal_rotor_inertia"));
      if (jl.contains("inertia_rotation"))
        l.inertia_rpy = detail::vec3_from_json(jl.at("inertia_rotation"), "inertia_rotation");
      robot.links.push_back(l);
    }
    if (j.contains("flange_translation"))
      robot.flange_translation = detail::vec3_from_json(j.at("flange_translation"), "flange_translation");
    const auto& meta = j.at("metadata");
    robot.total_mass = detail::real_from_json(meta.at("total_mass"));
    if (meta.contains("base_mass")) robot.base_mass = detail::real_from_json(meta.at("base_mass"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("robot: ") + e.what());
  }
  robot.validate();
  return robot;
}

RobotDescription load_robot(const std::filesystem::path& path) {
  return robot_from_json(detail::read_json(path));
}

void save_robot(const RobotDescription& robot, const std::filesystem::path& path) {
  detail::write_json(robot_to_json(robot), path);
}

json params_to_json(const RobotParams& params) {
  json links = json::array();
  for (const auto& p : params) {
    const auto I = p.inertia_components();
    links.push_back({{"mass", p.mass},
                     {"com", detail::vec3_to_json(p.com)},
                     {"inertia", {I[0], I[1], I[2], I[3], I[4], I[5]}},
                     {"rotor_inertia", p.rotor}});
  }
  return {{"schema_version", detail::kSchemaVersion}, {"links", links}};
}

RobotParams params_from_json(const json& j) {
  detail::check_schema(j, "params");
  RobotParams out;
  try {
    for (const auto& jl : j.at("links")) {
      const auto& ji = jl.at("inertia");
      if (!ji.is_array() || ji.size() != 6)
        throw ValidationError("params: inertia must have 6 entries");
      std::array<double, 6> I{};
      for (int i = 0; i < 6; ++i) I[i] = detail::real_from_json(ji[i]);
      out.push_back(LinkInertialParams::from_components(
          detail::real_from_json(jl.at("mass")), detail::vec3_from_json(jl.at("com"), "com"), I,
          detail::real_from_json(jl.at("rotor_inertia"))));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  return out;
}

RobotParams load_params(const std::filesystem::path& path) {
  return params_from_json(detail::read_json(path));
}

void save_params(const RobotParams& params, const std::filesystem::path& path) {
  detail::write_json(params_to_json(params), path);
}

}  // namespace bayesid
