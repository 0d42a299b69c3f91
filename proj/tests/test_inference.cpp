#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include <Eigen/LU>

#include "bayesid/base_params.hpp"
#include "bayesid/bundled.hpp"
#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/inference.hpp"

using namespace bayesid;

namespace {

PriorCatalog catalog(PriorType t, double cad_spread = 0.1) {
  PriorInputs in;
  in.empirical = bundled_empirical_table();
  in.cad = bundled_cad_params();
  in.cad_spread = cad_spread;
  return build_prior(t, bundled_robot(), in);
}

const BaseParamMap& bundled_map() {
  static const BaseParamMap map = extract_base_params(bundled_robot());
  return map;
}

// Catalog coordinates of a decoded state: per link m, CoM (Cartesian or
// spherical), six tensor entries, J; then c.
VectorXd catalog_coordinates(const SamplingTransform& t, const VectorXd& z, bool spherical) {
  const auto robot = bundled_robot();
  const auto d = t.decode(z);
  VectorXd u = VectorXd(67);
  for (int k = 0; k < 6; ++k) {
    const auto& p = d.params[k];
    Vector3d c = p.com;
    if (spherical) {
      const auto s = com_cartesian_to_spherical(p.com, robot.link_translation(k));
      c = Vector3d(s.radius, s.polar, s.azimuth);
    }
    const auto I = p.inertia_components();
    u.segment(11 * k, 11) << p.mass, c(0), c(1), c(2), I[0], I[1], I[2], I[3], I[4], I[5], p.rotor;
  }
  u(66) = d.noise_c;
  return u;
}

double numeric_log_det(const SamplingTransform& t, const VectorXd& z, bool spherical) {
  const Eigen::Index n = z.size();
  MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-6;
    VectorXd a = z, b = z;
    a(i) += h;
    b(i) -= h;
    J.col(i) = (catalog_coordinates(t, a, spherical) - catalog_coordinates(t, b, spherical)) / (2 * h);
  }
  return std::log(std::abs(J.partialPivLu().determinant()));
}

}  // namespace

TEST_CASE("transform encode and decode are inverse") {
  const auto robot = bundled_robot();
  for (auto space : {SamplingSpace::mechanical, SamplingSpace::inertial})
    for (auto type : {PriorType::diffuse, PriorType::empirical, PriorType::cad}) {
      const auto t = SamplingTransform::from_catalog(catalog(type), robot, 1, 500, space);
      CHECK(t.dim() == 67);
      CHECK(t.labels().size() == 67u);
      const auto truth = bundled_truth_params();
      const VectorXd z = t.encode(truth, 0.02);
      const auto d = t.decode(z);
      CHECK(d.in_domain);
      CHECK(d.noise_c == doctest::Approx(0.02).epsilon(1e-12));
      CHECK((flatten_mechanical(d.params) - flatten_mechanical(truth)).norm() < 1e-10);
    }
}

TEST_CASE("log-Jacobian matches the numeric determinant up to a constant") {
  const auto robot = bundled_robot();
  std::mt19937_64 rng(3);
  for (auto space : {SamplingSpace::mechanical, SamplingSpace::inertial})
    for (auto type : {PriorType::diffuse, PriorType::empirical}) {
      const bool spherical = type == PriorType::empirical;
      const auto cat = catalog(type);
      const auto t = SamplingTransform::from_catalog(cat, robot, 2, 500, space);
      Rng draw_rng(8);
      const VectorXd z1 = t.encode(sample_unconstrained(cat, robot, draw_rng).params, 0.05);
      const VectorXd z2 = t.encode(sample_unconstrained(cat, robot, draw_rng).params, 0.08);
      const double analytic = t.log_jacobian(z1) - t.log_jacobian(z2);
      const double numeric = numeric_log_det(t, z1, spherical) - numeric_log_det(t, z2, spherical);
      CHECK(analytic == doctest::Approx(numeric).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("point-mass catalogs pin every mechanical coordinate") {
  const auto t = SamplingTransform::from_catalog(catalog(PriorType::cad, 0.0), bundled_robot());
  CHECK(t.dim() == 1);  // only c remains
  CHECK(t.labels() == std::vector<std::string>{"c"});
}

TEST_CASE("log-likelihood of one measurement") {
  const auto robot = bundled_robot();
  const auto truth = bundled_truth_params();
  const Pose q(VectorXd::LinSpaced(6, -0.5, 0.5));
  const double X = apparent_inertia(robot, truth, q)(2);
  MeasurementDataset d;
  d.entries.push_back({q, 3, 1.1 * X});
  const double c = 0.05;
  const double sd = c * 1.1 * X;
  const double expected = -0.5 * std::pow((X - 1.1 * X) / sd, 2) - std::log(sd) - 0.5 * std::log(2 * M_PI);
  CHECK(log_likelihood(d, robot, truth, c) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(log_likelihood(d, robot, truth, 0.0), ContractViolation);
}

TEST_CASE("posterior density is prior + Jacobian + likelihood") {
  const auto robot = bundled_robot();
  const auto cat = catalog(PriorType::empirical);
  Rng rng(1);
  const auto data = generate_synthetic(robot, bundled_truth_params(), SyntheticConfig{5, 0.02}, rng);
  const auto t = SamplingTransform::from_catalog(cat, robot, 1, 500);
  const Posterior post(robot, cat, data, t, FeasibilityChecker::with_random_poses(robot));
  const VectorXd z = t.encode(bundled_truth_params(), 0.03);
  const double expected = post.log_prior(bundled_truth_params(), 0.03) + t.log_jacobian(z) +
                          log_likelihood(data, robot, bundled_truth_params(), 0.03);
  CHECK(post.log_density(z) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(log_posterior(z, data, cat, robot, t) == doctest::Approx(expected).epsilon(1e-10));
  // Outside the feasible region.
  auto bad = bundled_truth_params();
  bad[0].mass = 2000;
  CHECK(post.log_density(t.encode(bad, 0.03)) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("inference on an empty dataset samples the prior") {
  const auto robot = bundled_robot();
  InferenceConfig cfg;
  cfg.n_iter = 4000;
  cfg.seed = 2;
  cfg.summary_poses = {Pose(VectorXd::Zero(6))};
  const auto r = infer(MeasurementDataset{}, catalog(PriorType::cad), robot, bundled_map(), cfg);
  CHECK(r.all_feasible);
  CHECK(r.draws.size() == r.chain.size());
  CHECK(r.draws.bp.cols() == bundled_map().count);
  CHECK(r.draws.x.cols() == 6);
  CHECK(r.draws.x_labels[0] == "pose1_axis1");
  CHECK(r.ess.ess.size() == 67u);
  CHECK(r.coordinate_labels.front() == "m1");
  CHECK(r.coordinate_labels.back() == "c");
}

TEST_CASE("inference with every parameter pinned") {
  const auto robot = bundled_robot();
  InferenceConfig cfg;
  cfg.n_iter = 2000;
  Rng rng(1);
  const auto data = generate_synthetic(robot, bundled_cad_params(), SyntheticConfig{3, 0.02}, rng);
  const auto r = infer(data, catalog(PriorType::cad, 0.0), robot, bundled_map(), cfg);
  CHECK(r.all_feasible);
  const VectorXd cad = flatten_mechanical(bundled_cad_params());
  double worst = 0;
  for (Eigen::Index i = 0; i < r.draws.size(); ++i)
    worst = std::max(worst, (r.draws.mp.row(i).transpose() - cad).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-12 * cad.cwiseAbs().maxCoeff());
}

TEST_CASE("zero-shot draws") {
  const auto robot = bundled_robot();
  const PoseList poses{Pose(VectorXd::Zero(6))};
  const auto point = zero_shot_predict(catalog(PriorType::cad, 0.0), robot, bundled_map(), poses, 1000, 1);
  CHECK(point.method == "rejection");
  CHECK(point.rejection_rate == 0.0);
  const auto s = summarize(point.draws.x, point.draws.x_labels);
  for (const auto& e : s) CHECK(e.lo == e.hi);

  const auto cad = zero_shot_predict(catalog(PriorType::cad), robot, bundled_map(), poses, 2000, 1);
  CHECK(cad.draws.size() == 2000);
  CHECK(cad.rejection_rate > 0.0);
  CHECK(cad.rejection_rate < 0.9);
  CHECK_THROWS_AS(zero_shot_predict(catalog(PriorType::cad), robot, bundled_map(), poses, 999, 1),
                  ContractViolation);
}

TEST_CASE("zero-shot results do not depend on the worker count") {
  const auto robot = bundled_robot();
  const PoseList poses{Pose(VectorXd::Ones(6))};
  setenv("BAYESID_THREADS", "1", 1);
  const auto a = zero_shot_predict(catalog(PriorType::empirical), robot, bundled_map(), poses, 1000, 3);
  setenv("BAYESID_THREADS", "4", 1);
  const auto b = zero_shot_predict(catalog(PriorType::empirical), robot, bundled_map(), poses, 1000, 3);
  unsetenv("BAYESID_THREADS");
  CHECK(a.draws.mp == b.draws.mp);
  CHECK(a.draws.x == b.draws.x);
  CHECK(configured_threads() >= 1);
}

TEST_CASE("summaries") {
  MatrixXd d(5, 1);
  d << 1, 2, 3, 4, 5;
  const auto s = summarize(d, {"a"});
  CHECK(s[0].mean == 3.0);
  CHECK(s[0].median == 3.0);
  CHECK(s[0].lo == doctest::Approx(1.1));
  CHECK(s[0].hi == doctest::Approx(4.9));
  CHECK_THROWS_AS(summarize(d, {}), ContractViolation);
  CHECK_THROWS_AS(sampling_space_from_string("polar"), ConfigurationError);
  CHECK(to_string(SamplingSpace::inertial) == "inertial");
}
