#include <doctest.h>

#include <random>

#include "bayesid/base_params.hpp"
#include "bayesid/bundled.hpp"
#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/metrics.hpp"

using namespace bayesid;

namespace {

VectorXd uniform_draws(int n, double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

}  // namespace

TEST_CASE("MAE percent") {
  VectorXd B(4);
  B << 1, 2, 3, 4;
  CHECK(mae_percent(B, B) == 0.0);
  CHECK(mae_percent(1.1 * B, B) == doctest::Approx(10.0));
  CHECK(mae_percent(Eigen::Vector2d(1, 3), Eigen::Vector2d(2, 2)) == doctest::Approx(50.0));
  CHECK(mae_percent(3.0 * (1.1 * B), 3.0 * B) == doctest::Approx(mae_percent(1.1 * B, B)));
  CHECK_THROWS_AS(mae_percent(B, VectorXd::Zero(4)), UndefinedMetricError);
  CHECK_THROWS_AS(mae_percent(B, VectorXd::Ones(3)), ContractViolation);
}

TEST_CASE("cosine similarity") {
  const Eigen::Vector3d a(1, 2, 3);
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, -a) == doctest::Approx(-1.0));
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 2)) == doctest::Approx(0.0));
  CHECK(cosine_similarity(5.0 * a, Eigen::Vector3d(3, 1, 2)) ==
        doctest::Approx(cosine_similarity(a, Eigen::Vector3d(3, 1, 2))));
  CHECK_THROWS_AS(cosine_similarity(a, Eigen::Vector3d::Zero()), UndefinedMetricError);
}

TEST_CASE("RMSE percent") {
  VectorXd m(3);
  m << 3, 4, 5;
  CHECK(rmse_percent(m, m) == 0.0);
  const double rms = std::sqrt((9 + 16 + 25) / 3.0);
  CHECK(rmse_percent(m.array() + 0.5, m) == doctest::Approx(100 * 0.5 / rms));
  CHECK(rmse_percent(1.05 * m, m) == doctest::Approx(5.0));
  CHECK_THROWS_AS(rmse_percent(m, VectorXd::Zero(3)), UndefinedMetricError);
}

TEST_CASE("total variation distance") {
  const VectorXd a = uniform_draws(200000, 0, 1, 1);
  const VectorXd b = uniform_draws(200000, 0.5, 1.5, 2);
  CHECK(tvd(a, a) == 0.0);
  CHECK(tvd(a, a.array() + 5.0) == doctest::Approx(1.0));
  CHECK(tvd(a, b) == doctest::Approx(0.5).epsilon(0.06));
  CHECK(tvd(a, b) == doctest::Approx(tvd(b, a)));
  CHECK(tvd(3.0 * a, 3.0 * b) == doctest::Approx(tvd(a, b)).epsilon(1e-12));
  CHECK(tvd(VectorXd::Constant(3, 1.0), VectorXd::Constant(4, 1.0)) == 0.0);
  CHECK_THROWS_AS(tvd(a, VectorXd()), ContractViolation);
  CHECK_THROWS_AS(tvd(a, b, 1), ContractViolation);
}

TEST_CASE("confidence intervals") {
  const auto c = confidence_interval(VectorXd::Constant(100, 2.5));
  CHECK(c.lo == 2.5);
  CHECK(c.hi == 2.5);
  CHECK_FALSE(c.warning.has_value());
  const auto u = confidence_interval(uniform_draws(100000, 0, 1, 3));
  CHECK(u.lo == doctest::Approx(0.025).epsilon(0.01 / 0.025));
  CHECK(u.hi == doctest::Approx(0.975).epsilon(0.01));
  VectorXd x(5);
  x << 4, 1, 5, 2, 3;
  const auto full = confidence_interval(x, 1.0);
  CHECK(full.lo == 1.0);
  CHECK(full.hi == 5.0);
  CHECK(full.warning.has_value());
  CHECK(quantile(x, 0.5) == 3.0);
  CHECK(quantile(x, 0.25) == 2.0);
}

TEST_CASE("OLS recovers noiseless base parameters") {
  const auto robot = bundled_robot();
  const auto map = extract_base_params(robot);
  Rng rng(4);
  const auto data = generate_synthetic(robot, bundled_truth_params(), SyntheticConfig{75, 0.0}, rng);
  const auto fit = ols_fit(robot, data, map);
  const VectorXd truth = base_param_values(map, robot, bundled_truth_params());
  CHECK((fit.base_params - truth).norm() / truth.norm() < 1e-8);
  CHECK(fit.rank == map.count);
  CHECK(fit.rmse_percent < 1e-8);
}

TEST_CASE("OLS residuals satisfy the normal equations") {
  const auto robot = bundled_robot();
  const auto map = extract_base_params(robot);
  Rng rng(5);
  const auto data = generate_synthetic(robot, bundled_truth_params(), SyntheticConfig{75, 0.02}, rng);
  const auto fit = ols_fit(robot, data, map);
  const MatrixXd A = dataset_reduced_regressor(robot, data, map);
  const VectorXd g = A.transpose() * fit.residuals;
  CHECK(g.norm() <= 1e-8 * (A.transpose() * data.inertias()).norm());
}

TEST_CASE("OLS on duplicated poses is rank deficient") {
  const auto robot = bundled_robot();
  const auto map = extract_base_params(robot);
  Rng rng(6);
  const auto one = generate_synthetic(robot, bundled_truth_params(), SyntheticConfig{1, 0.0}, rng);
  MeasurementDataset dup;
  for (int i = 0; i < 20; ++i) dup.entries.insert(dup.entries.end(), one.entries.begin(), one.entries.end());
  try {
    ols_fit(robot, dup, map);
    FAIL("expected a rank-deficiency error");
  } catch (const RankDeficientError& e) {
    CHECK(e.rank() < e.columns());
    CHECK(e.columns() == map.count);
  }
}
