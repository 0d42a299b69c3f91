#include "bayesid/base_params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"

namespace bayesid {
namespace {

std::vector<int> priority_order(int n) {
  std::vector<int> order;
  order.reserve(kParamsPerLink * n);
  for (int k = 0; k < n; ++k) order.push_back(kParamsPerLink * k + kParamsPerLink - 1);
  for (int k = n - 1; k >= 0; --k)
    for (int p = 0; p < kParamsPerLink - 1; ++p) order.push_back(kParamsPerLink * k + p);
  return order;
}

// Greedy column selection by Gram-Schmidt with re-orthogonalisation.
std::vector<int> select_independent(const MatrixXd& Y, const std::vector<int>& order, double tol) {
  const double max_norm = Y.colwise().norm().maxCoeff();
  std::vector<int> kept;
  MatrixXd basis(Y.rows(), 0);
  for (int c : order) {
    const double norm = Y.col(c).norm();
    if (norm <= 1e-12 * max_norm) continue;
    VectorXd v = Y.col(c) / norm;
    for (int pass = 0; pass < 2; ++pass)
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
    const double residual = v.norm();
    if (residual > tol) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v / residual;
      kept.push_back(c);
    }
  }
  return kept;
}

double snap(double x) {
  constexpr double tol = 1e-10;
  if (std::abs(x) < tol) return 0.0;
  for (int d = 1; d <= 12; ++d) {
    const double r = std::round(x * d);
    if (std::abs(x * d - r) < tol * d) return r / d;
  }
  return x;
}

}  // namespace

BaseParamMap extract_base_params(const RobotDescription& robot, const BaseParamOptions& options) {
  const int n = robot.n_joints();
  const int cols = kParamsPerLink * n;
  if (options.n_sample_poses < 1) throw ContractViolation("extract_base_params: need >= 1 pose");

  Rng rng(options.seed);
  const MatrixXd Y = stacked_regressor(robot, random_poses(robot, options.n_sample_poses, rng));
  Rng check_rng(options.seed ^ 0x9E3779B97F4A7C15ULL);
  const MatrixXd Y_check =
      stacked_regressor(robot, random_poses(robot, options.n_sample_poses, check_rng));

  const auto order = priority_order(n);
  const auto kept = select_independent(Y, order, options.rank_tolerance);
  const auto kept_check = select_independent(Y_check, order, options.rank_tolerance);
  if (kept != kept_check) {
    std::ostringstream msg;
    msg << "extract_base_params: rank differs across pose samples (" << kept.size() << " vs "
        << kept_check.size() << ")";
    throw DiagnosticError(msg.str());
  }

  BaseParamMap map;
  map.n_joints = n;
  map.count = static_cast<int>(kept.size());
  map.independent = kept;
  std::vector<bool> is_kept(cols, false);
  for (int c : kept) is_kept[c] = true;
  for (int c = 0; c < cols; ++c)
    if (!is_kept[c]) map.dependent.push_back(c);

  MatrixXd Yb(Y.rows(), map.count);
  for (int i = 0; i < map.count; ++i) Yb.col(i) = Y.col(kept[i]);
  MatrixXd Yd(Y.rows(), static_cast<Eigen::Index>(map.dependent.size()));
  for (std::size_t i = 0; i < map.dependent.size(); ++i) Yd.col(i) = Y.col(map.dependent[i]);

  const MatrixXd K = Yb.colPivHouseholderQr().solve(Yd);

  map.combination = MatrixXd::Zero(map.count, cols);
  for (int i = 0; i < map.count; ++i) {
    map.combination(i, kept[i]) = 1.0;
    for (std::size_t d = 0; d < map.dependent.size(); ++d)
      map.combination(i, map.dependent[d]) = snap(K(i, d));
  }

  const auto names = inertial_labels(n);
  for (int c : kept) map.labels.push_back(names[c]);
  return map;
}

std::string BaseParamMap::describe(int i) const {
  if (i < 0 || i >= count) throw ContractViolation("base parameter index out of range");
  const auto names = inertial_labels(n_joints);
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (Eigen::Index c = 0; c < combination.cols(); ++c) {
    const double w = combination(i, c);
    if (w == 0.0) continue;
    if (!first) out << (w < 0 ? " - " : " + ");
    else if (w < 0) out << "-";
    const double a = std::abs(w);
    if (a != 1.0) out << a << "*";
    out << names[c];
    first = false;
  }
  return out.str();
}

int BaseParamMap::rotor_group(int joint) const {
  const int col = kParamsPerLink * joint + kParamsPerLink - 1;
  for (int i = 0; i < count; ++i)
    if (independent[i] == col) return i;
  return -1;
}

VectorXd base_param_values(const BaseParamMap& map, const VectorXd& stacked_inertial) {
  if (stacked_inertial.size() != map.combination.cols())
    throw ContractViolation("base_param_values: inertial vector has wrong length");
  return map.combination * stacked_inertial;
}

VectorXd base_param_values(const BaseParamMap& map, const RobotDescription& robot,
                           const RobotParams& params) {
  if (robot.n_joints() != map.n_joints)
    throw ContractViolation("base_param_values: map was built for another robot");
  return base_param_values(map, stack_inertial(robot, params));
}

MatrixXd reduced_regressor(const RobotDescription& robot, const BaseParamMap& map, const Pose& pose) {
  const MatrixXd Y = regressor(robot, pose);
  MatrixXd out(Y.rows(), map.count);
  for (int i = 0; i < map.count; ++i) out.col(i) = Y.col(map.independent[i]);
  return out;
}

MatrixXd stacked_reduced_regressor(const RobotDescription& robot, const BaseParamMap& map,
                                   const PoseList& poses) {
  const int n = robot.n_joints();
  MatrixXd out(n * static_cast<Eigen::Index>(poses.size()), map.count);
  for (std::size_t i = 0; i < poses.size(); ++i)
    out.middleRows(n * static_cast<Eigen::Index>(i), n) = reduced_regressor(robot, map, poses[i]);
  return out;
}

double condition_number(const MatrixXd& A) {
  if (A.size() == 0) throw ContractViolation("condition_number: empty matrix");
  if (A.rows() < A.cols()) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<MatrixXd> svd(A);
  const VectorXd s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  const double tol = std::numeric_limits<double>::epsilon() * std::max(A.rows(), A.cols()) * smax;
  if (!(smin > tol)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double condition_number(const RobotDescription& robot, const PoseList& poses, const BaseParamMap& map) {
  if (poses.empty()) throw ContractViolation("condition_number: need at least one pose");
  return condition_number(stacked_reduced_regressor(robot, map, poses));
}

}  // namespace bayesid
