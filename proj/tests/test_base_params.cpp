#include <doctest.h>

#include <Eigen/SVD>

#include "bayesid/base_params.hpp"
#include "bayesid/bundled.hpp"
#include "bayesid/dynamics.hpp"
#include "oracles.hpp"

using namespace bayesid;

namespace {

const BaseParamMap& bundled_map() {
  static const BaseParamMap map = extract_base_params(bundled_robot());
  return map;
}

int svd_rank(const MatrixXd& A) {
  Eigen::JacobiSVD<MatrixXd> svd(A);
  const VectorXd s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * s(0)) ++r;
  return r;
}

}  // namespace

TEST_CASE("base parameter count equals the numeric rank of the stacked regressor") {
  const auto robot = bundled_robot();
  std::mt19937_64 rng(10);
  const MatrixXd S = stacked_regressor(robot, random_poses(robot, 300, rng));
  CHECK(bundled_map().count == svd_rank(S));
  CHECK(bundled_map().count == 32);
  CHECK(bundled_map().combination.rows() == 32);
  CHECK(bundled_map().combination.cols() == 66);
  CHECK(bundled_map().independent.size() + bundled_map().dependent.size() == 66u);
}

TEST_CASE("reduced regressor times base parameters reproduces the full product") {
  const auto robot = bundled_robot();
  const auto& map = bundled_map();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const auto params = oracle::random_params(robot, rng);
    const Pose q(oracle::random_q(6, rng));
    const VectorXd full = regressor(robot, q) * stack_inertial(robot, params);
    const VectorXd reduced = reduced_regressor(robot, map, q) * base_param_values(map, robot, params);
    CHECK(oracle::rel_err(reduced, full) < 1e-8);
  }
}

TEST_CASE("kept columns are the identity block of the combination") {
  const auto& map = bundled_map();
  for (int i = 0; i < map.count; ++i)
    for (int j = 0; j < map.count; ++j)
      CHECK(map.combination(i, map.independent[j]) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("extraction is stable across pose seeds") {
  const auto robot = bundled_robot();
  for (std::uint64_t seed : {1u, 2u}) {
    BaseParamOptions opt;
    opt.seed = seed;
    const auto m = extract_base_params(robot, opt);
    CHECK(m.count == bundled_map().count);
    CHECK(m.independent == bundled_map().independent);
    CHECK((m.combination - bundled_map().combination).norm() < 1e-9);
  }
}

TEST_CASE("planar two-link arm has four base parameters") {
  // Two parallel z-axes with only the diagonal of M observed.
  RobotDescription r;
  r.joints.resize(2);
  r.joints[1].translation = Vector3d(0.5, 0, 0);
  r.links.resize(2);
  r.flange_translation = Vector3d(0.4, 0, 0);
  const auto map = extract_base_params(r);
  std::mt19937_64 rng(5);
  const MatrixXd S = stacked_regressor(r, random_poses(r, 50, rng));
  CHECK(map.count == svd_rank(S));
  // X1 = const + a cos(q2) + b sin(q2) and X2 = const: four directions.
  CHECK(map.count == 4);
}

TEST_CASE("condition number") {
  const auto robot = bundled_robot();
  std::mt19937_64 rng(12);
  const PoseList poses = random_poses(robot, 75, rng);
  const double c = condition_number(robot, poses, bundled_map());
  CHECK(std::isfinite(c));
  CHECK(c > 1.0);
  // Rank deficient: one pose cannot determine 32 parameters.
  CHECK(std::isinf(condition_number(robot, PoseList{poses[0]}, bundled_map())));
  MatrixXd A = MatrixXd::Identity(3, 3);
  A(2, 2) = 0.01;
  CHECK(condition_number(A) == doctest::Approx(100.0));
}
