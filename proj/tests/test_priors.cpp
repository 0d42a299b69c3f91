#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bayesid/bundled.hpp"
#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/priors.hpp"
#include "oracles.hpp"

using namespace bayesid;
namespace fs = std::filesystem;

namespace {

PriorCatalog catalog(PriorType t) {
  PriorInputs in;
  in.empirical = bundled_empirical_table();
  in.cad = bundled_cad_params();
  return build_prior(t, bundled_robot(), in);
}

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bayesid_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("empirical catalog reproduces the published table") {
  const auto c = catalog(PriorType::empirical);
  CHECK(c.com_parametrization == ComParametrization::spherical);
  CHECK(c.polar_cap == doctest::Approx(M_PI / 2));
  const auto& m6 = c.links[5].mass;
  CHECK(m6.kind == DistributionKind::TruncNormal);
  CHECK(m6.mu == 25.99);
  CHECK(m6.sigma == 26.62);
  CHECK(m6.a == 0.0);
  CHECK(m6.b == 1050.0);
  CHECK(c.links[0].mass.mu == 344.92);
  CHECK(c.links[0].mass.sigma == 138.55);
  CHECK(c.links[1].com[0].mu == 0.4824);
  CHECK(c.links[5].rotor.mu == 6.362);
  CHECK(c.links[5].rotor.sigma == 63.620);
  CHECK(c.links[0].inertia[1].kind == DistributionKind::Normal);
  CHECK(c.links[0].inertia[1].sigma == 32.968);
  // Diagonal lognormal carries the half-normal moments of the table spread.
  const auto& d = c.links[2].inertia[0];
  CHECK(d.kind == DistributionKind::Lognormal);
  CHECK(d.mean() == doctest::Approx(97.039 * std::sqrt(2 / M_PI)).epsilon(1e-12));
}

TEST_CASE("diffuse catalog carries the datasheet bounds") {
  const auto c = catalog(PriorType::diffuse);
  const auto robot = bundled_robot();
  for (int k = 0; k < 6; ++k) {
    const auto& l = c.links[k];
    CHECK(l.mass == DistributionSpec::uniform(0, 1050));
    for (const auto& s : l.com) CHECK(s == DistributionSpec::uniform(-1, 1));
    const double J = robot.links[k].nominal_rotor_inertia;
    CHECK(l.rotor == DistributionSpec::uniform(J, 2 * J));
    for (int i : {0, 3, 5}) CHECK(l.inertia[i] == DistributionSpec::uniform(0, 50));
    for (int i : {1, 2, 4}) CHECK(l.inertia[i] == DistributionSpec::uniform(-2, 2));
  }
  CHECK(c.soft_constraints.empty());
}

TEST_CASE("informed catalog adds the soft factors and the polar cap") {
  const auto c = catalog(PriorType::informed_diffuse);
  CHECK(c.soft_constraints.size() == 2);
  CHECK(c.polar_cap == doctest::Approx(M_PI / 2));
  CHECK(prior_type_from_string("informed") == PriorType::informed_diffuse);
}

TEST_CASE("cad catalog is centred on the CAD values") {
  const auto c = catalog(PriorType::cad);
  const auto cad = bundled_cad_params();
  CHECK(c.links[0].mass == DistributionSpec::normal(360, 36));
  CHECK(c.links[3].com[0].mu == cad[3].com(0));
  PriorInputs in;
  in.cad = cad;
  in.cad_spread = 0.0;
  const auto point = build_prior(PriorType::cad, bundled_robot(), in);
  CHECK(point.links[2].inertia[4].kind == DistributionKind::Point);
}

TEST_CASE("missing inputs are configuration errors") {
  CHECK_THROWS_AS(build_prior(PriorType::empirical, bundled_robot()), ConfigurationError);
  CHECK_THROWS_AS(build_prior(PriorType::cad, bundled_robot()), ConfigurationError);
}

TEST_CASE("catalogs round-trip through JSON bit-identically") {
  for (auto t : {PriorType::diffuse, PriorType::informed_diffuse, PriorType::empirical, PriorType::cad}) {
    const auto c = catalog(t);
    const auto path = temp_path("catalog.json");
    save_catalog(c, path);
    const auto back = load_catalog(path);
    CHECK(back == c);
    const auto path2 = temp_path("catalog2.json");
    save_catalog(back, path2);
    std::ifstream a(path), b(path2);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
}

TEST_CASE("catalog schema errors") {
  auto j = catalog_to_json(catalog(PriorType::diffuse));
  j["schema_version"] = 99;
  CHECK_THROWS_AS(catalog_from_json(j), ValidationError);
}

TEST_CASE("spherical CoM conversion round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const Vector3d axis(u(rng), u(rng), u(rng));
    const Vector3d r(u(rng), u(rng), u(rng));
    const auto s = com_cartesian_to_spherical(r, axis);
    CHECK(s.radius == doctest::Approx(r.norm()).epsilon(1e-12));
    CHECK(s.polar >= 0.0);
    CHECK(s.polar <= M_PI);
    CHECK(s.azimuth >= 0.0);
    CHECK(s.azimuth < 2 * M_PI);
    // Polar angle is measured from the translation axis.
    CHECK(std::cos(s.polar) == doctest::Approx(r.normalized().dot(axis.normalized())).epsilon(1e-10));
    CHECK((com_spherical_to_cartesian(s.radius, s.polar, s.azimuth, axis) - r).norm() < 1e-12);
  }
  const Matrix3d F = spherical_frame(Vector3d(0.3, 0.0, 0.1));
  CHECK((F.transpose() * F - Matrix3d::Identity()).norm() < 1e-12);
  CHECK(F.determinant() == doctest::Approx(1.0));
}

TEST_CASE("physical link conditions") {
  auto l = LinkInertialParams::from_components(2.0, Vector3d(0.1, 0, 0), {1, 0, 0, 1, 0, 1.5}, 0.1);
  CHECK(link_is_physical(l, 0.5));
  CHECK_FALSE(link_is_physical(l, 0.05));  // CoM outside the bound
  auto t = l;
  t.inertia(2, 2) = 2.5;  // Ixx + Iyy < Izz
  CHECK_FALSE(link_is_physical(t, 0.5));
  auto m = l;
  m.mass = 0.0;
  CHECK_FALSE(link_is_physical(m, 0.5));
  auto pd = l;
  pd.inertia(0, 1) = pd.inertia(1, 0) = 1.2;  // not positive definite
  CHECK_FALSE(link_is_physical(pd, 0.5));
  auto j = l;
  j.rotor = -1.0;
  CHECK_FALSE(link_is_physical(j, 0.5));
}

TEST_CASE("feasibility factor") {
  const auto robot = bundled_robot();
  const auto checker = FeasibilityChecker::with_random_poses(robot);
  CHECK(checker.log_factor(bundled_cad_params()) == 0.0);
  CHECK(checker.log_factor(bundled_truth_params()) == 0.0);
  auto bad = bundled_cad_params();
  bad[2].inertia(0, 0) = -1;
  CHECK(checker.log_factor(bad) == -std::numeric_limits<double>::infinity());
  CHECK(feasibility_log_factor(bundled_cad_params(), robot, checker.poses()) == 0.0);
}

TEST_CASE("total-mass soft factor is a normal density on the mass balance") {
  const auto robot = bundled_robot();
  auto p = bundled_cad_params();
  double links = 0;
  for (const auto& l : p) links += l.mass;
  const double sd = 0.1 * robot.total_mass;
  const double dev = links + robot.base_mass - robot.total_mass;
  const double expected = -0.5 * (dev / sd) * (dev / sd) - std::log(sd * std::sqrt(2 * M_PI));
  CHECK(soft_constraint_log_factor(p, robot, SoftConstraint::total_mass) == doctest::Approx(expected));
  CHECK(soft_constraint_log_factor(p, robot, SoftConstraint::com_alignment) == 0.0);
}

TEST_CASE("unconstrained draws respect the hard bounds") {
  const auto robot = bundled_robot();
  for (auto t : {PriorType::diffuse, PriorType::empirical, PriorType::cad}) {
    const auto c = catalog(t);
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      const auto d = sample_unconstrained(c, robot, rng);
      CHECK(std::isfinite(per_parameter_log_density(c, robot, d.params, d.noise_c)));
      for (int k = 0; k < 6; ++k) {
        CHECK(c.links[k].bounds.mass.contains(d.params[k].mass));
        CHECK(d.params[k].com.norm() <= c.links[k].bounds.radius + 1e-12);
        if (c.com_parametrization == ComParametrization::spherical) {
          const auto s = com_cartesian_to_spherical(d.params[k].com, robot.link_translation(k));
          CHECK(s.polar <= c.polar_cap + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("empirical statistics from donor CAD models") {
  // Two one-axis donors with datasheet mass 100 and 300: scale = 200 / 200 = 1.
  DonorRobot a, b;
  a.axes.push_back({1, 10.0, 0.2, {1.0, 2.0, 3.0}, {0.1, -0.1, 0.2}, 100.0});
  b.axes.push_back({1, 30.0, 0.4, {2.0, 1.0, 1.0}, {0.0, 0.3, -0.2}, 300.0});
  const auto t = empirical_prior_from_cad({a, b}, 200.0, {5.0});
  REQUIRE(t.axes.size() == 1);
  const auto& s = t.axes[0];
  CHECK(s.mass_mu == doctest::Approx(20.0));
  CHECK(s.mass_sigma == doctest::Approx(std::sqrt(200.0)));  // sample sd of {10, 30}
  CHECK(s.com_mu == doctest::Approx(0.3));
  CHECK(s.com_sigma == doctest::Approx(std::sqrt(0.02)));
  CHECK(s.inertia_diag_sigma == doctest::Approx(std::sqrt((1 + 4 + 9 + 4 + 1 + 1) / 6.0)));
  CHECK(s.inertia_off_sigma == doctest::Approx(std::sqrt((0.01 + 0.01 + 0.04 + 0 + 0.09 + 0.04) / 6.0)));
  CHECK(s.rotor_mu == 5.0);
  CHECK(s.rotor_sigma == 5.0);
  CHECK_THROWS_AS(empirical_prior_from_cad({a}, 200.0, {5.0}), ConfigurationError);
}

TEST_CASE("donor CSV parsing") {
  const auto path = temp_path("donors.csv");
  {
    std::ofstream out(path);
    out << "axis,mass,com_length,idiag1,idiag2,idiag3,ioff1,ioff2,ioff3,datasheet_mass\n"
        << "1,10,0.2,1,2,3,0.1,-0.1,0.2,100\n"
        << "1,30,0.4,2,1,1,0,0.3,-0.2,300\n";
  }
  const auto donors = load_donor_csv(path);
  CHECK(donors.size() == 2);
  {
    std::ofstream out(path);
    out << "axis,mass,com_length,idiag1,idiag2,idiag3,ioff1,ioff2,ioff3,datasheet_mass\n"
        << "1,10,0.2,1,2,x,0.1,-0.1,0.2,100\n";
  }
  try {
    load_donor_csv(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == "idiag3");
  }
}
