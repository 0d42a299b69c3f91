#include "bayesid/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "csv.hpp"
#include "json_io.hpp"

namespace bayesid {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr int kMaxDrawAttempts = 100000;

std::array<double, 3> diag_of(const std::array<double, 6>& I) { return {I[0], I[3], I[5]}; }
std::array<double, 3> off_of(const std::array<double, 6>& I) { return {I[1], I[2], I[4]}; }
bool is_diag_index(int i) { return i == 0 || i == 3 || i == 5; }

// Draw from `spec` restricted to `box`, by rejection when the spec's own
// support is wider than the box.
double draw_within(const DistributionSpec& spec, const Interval& box, Rng& rng) {
  for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
    const double x = sample(spec, rng);
    if (box.contains(x)) return x;
  }
  throw InfeasibleCatalogError(
      "prior spec " + std::string(to_string(spec.kind)) + " has almost no mass inside its bounds", 1.0);
}

void require_links(const PriorCatalog& catalog, const RobotDescription& robot) {
  if (catalog.n_links() != robot.n_joints())
    throw ContractViolation("prior catalog has " + std::to_string(catalog.n_links()) +
                            " links, robot has " + std::to_string(robot.n_joints()));
}

double sample_sd(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double rms_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

std::string_view to_string(PriorType type) {
  switch (type) {
    case PriorType::diffuse: return "diffuse";
    case PriorType::informed_diffuse: return "informed_diffuse";
    case PriorType::empirical: return "empirical";
    case PriorType::cad: return "cad";
  }
  return "?";
}

PriorType prior_type_from_string(std::string_view name) {
  if (name == "diffuse") return PriorType::diffuse;
  if (name == "informed_diffuse" || name == "informed") return PriorType::informed_diffuse;
  if (name == "empirical") return PriorType::empirical;
  if (name == "cad") return PriorType::cad;
  throw ConfigurationError("unknown prior type \"" + std::string(name) + "\"");
}

std::string_view to_string(SoftConstraint kind) {
  switch (kind) {
    case SoftConstraint::total_mass: return "total_mass";
    case SoftConstraint::com_alignment: return "com_alignment";
  }
  return "?";
}

SoftConstraint soft_constraint_from_string(std::string_view name) {
  if (name == "total_mass") return SoftConstraint::total_mass;
  if (name == "com_alignment") return SoftConstraint::com_alignment;
  throw ContractViolation("unknown soft constraint \"" + std::string(name) + "\"");
}

DistributionSpec default_noise_prior() { return DistributionSpec::trunc_normal(0.05, 0.05, 1e-4, 1.0); }

std::vector<LinkBounds> datasheet_bounds(const RobotDescription& robot) {
  std::vector<LinkBounds> out;
  for (const auto& link : robot.links) {
    LinkBounds b;
    b.mass = {0.0, robot.total_mass};
    b.com_component = {-1.0, 1.0};
    b.radius = std::min(std::sqrt(3.0), link.com_bound);
    b.inertia_diag = {0.0, 50.0};
    b.inertia_off = {-2.0, 2.0};
    b.rotor = {link.nominal_rotor_inertia, 2.0 * link.nominal_rotor_inertia};
    out.push_back(b);
  }
  return out;
}

// --- Catalog construction ------------------------------------------------

namespace {

PriorCatalog diffuse_catalog(const RobotDescription& robot) {
  if (!(robot.total_mass > 0.0))
    throw ConfigurationError("diffuse prior: robot metadata needs total_mass > 0");
  PriorCatalog cat;
  cat.type = PriorType::diffuse;
  cat.com_parametrization = ComParametrization::cartesian;
  cat.polar_cap = kPi;
  cat.noise = default_noise_prior();
  cat.total_mass = robot.total_mass;
  cat.base_mass = robot.base_mass;
  const auto bounds = datasheet_bounds(robot);
  for (int k = 0; k < robot.n_joints(); ++k) {
    const LinkBounds& b = bounds[k];
    if (!(b.rotor.lo > 0.0))
      throw ConfigurationError("diffuse prior: link " + std::to_string(k + 1) +
                               " needs nominal_rotor_inertia > 0");
    LinkPrior lp;
    lp.bounds = b;
    lp.mass = DistributionSpec::uniform(b.mass.lo, b.mass.hi);
    for (auto& c : lp.com) c = DistributionSpec::uniform(b.com_component.lo, b.com_component.hi);
    for (int i = 0; i < 6; ++i)
      lp.inertia[i] = is_diag_index(i) ? DistributionSpec::uniform(b.inertia_diag.lo, b.inertia_diag.hi)
                                       : DistributionSpec::uniform(b.inertia_off.lo, b.inertia_off.hi);
    lp.rotor = DistributionSpec::uniform(b.rotor.lo, b.rotor.hi);
    cat.links.push_back(lp);
  }
  return cat;
}

PriorCatalog empirical_catalog(const RobotDescription& robot, const EmpiricalTable& table) {
  if (static_cast<int>(table.axes.size()) != robot.n_joints())
    throw ConfigurationError("empirical prior: table has " + std::to_string(table.axes.size()) +
                             " axes, robot has " + std::to_string(robot.n_joints()));
  PriorCatalog cat = diffuse_catalog(robot);
  cat.type = PriorType::empirical;
  cat.com_parametrization = ComParametrization::spherical;
  cat.polar_cap = 0.5 * kPi;
  const double half_normal_mean = std::sqrt(2.0 / kPi);
  const double half_normal_sd = std::sqrt(1.0 - 2.0 / kPi);
  for (int k = 0; k < robot.n_joints(); ++k) {
    const EmpiricalAxisStats& s = table.axes[k];
    LinkPrior& lp = cat.links[k];
    const LinkBounds& b = lp.bounds;
    lp.mass = DistributionSpec::trunc_normal(s.mass_mu, s.mass_sigma, b.mass.lo, b.mass.hi);
    lp.com[0] = DistributionSpec::trunc_normal(s.com_mu, s.com_sigma, 0.0, b.radius);
    lp.com[1] = DistributionSpec::uniform(0.0, cat.polar_cap);
    lp.com[2] = DistributionSpec::uniform(0.0, 2.0 * kPi);
    // The table spreads of the tensor entries are zero-centred; the diagonal
    // gets the lognormal with the moments of the matching half-normal.
    const auto diag = DistributionSpec::lognormal_from_moments(s.inertia_diag_sigma * half_normal_mean,
                                                               s.inertia_diag_sigma * half_normal_sd);
    for (int i = 0; i < 6; ++i)
      lp.inertia[i] = is_diag_index(i) ? diag : DistributionSpec::normal(0.0, s.inertia_off_sigma);
    lp.rotor = DistributionSpec::trunc_normal(s.rotor_mu, s.rotor_sigma, b.rotor.lo, b.rotor.hi);
  }
  return cat;
}

PriorCatalog cad_catalog(const RobotDescription& robot, const RobotParams& cad, double spread) {
  if (static_cast<int>(cad.size()) != robot.n_joints())
    throw ConfigurationError("cad prior: " + std::to_string(cad.size()) + " parameter sets for " +
                             std::to_string(robot.n_joints()) + " links");
  if (!(spread >= 0.0) || !std::isfinite(spread))
    throw ConfigurationError("cad prior: spread must be finite and >= 0");
  PriorCatalog cat = diffuse_catalog(robot);
  cat.type = PriorType::cad;
  const auto around = [spread](double mean, double sigma) {
    return spread == 0.0 ? DistributionSpec::point(mean) : DistributionSpec::normal(mean, sigma);
  };
  for (int k = 0; k < robot.n_joints(); ++k) {
    const LinkInertialParams& p = cad[k];
    LinkPrior& lp = cat.links[k];
    const auto I = p.inertia_components();
    double largest = 0.0;
    for (double v : I) largest = std::max(largest, std::abs(v));
    const double tensor_floor = std::max(1e-3 * largest, 1e-9);
    const double com_floor = std::max(0.2 * spread * p.com.norm(), 1e-3);
    lp.mass = around(p.mass, std::max(spread * std::abs(p.mass), 1e-9));
    for (int i = 0; i < 3; ++i) lp.com[i] = around(p.com(i), std::max(spread * std::abs(p.com(i)), com_floor));
    for (int i = 0; i < 6; ++i) lp.inertia[i] = around(I[i], std::max(spread * std::abs(I[i]), tensor_floor));
    lp.rotor = around(p.rotor, std::max(spread * std::abs(p.rotor), 1e-9));
  }
  return cat;
}

}  // namespace

PriorCatalog build_prior(PriorType type, const RobotDescription& robot, const PriorInputs& inputs) {
  robot.validate();
  switch (type) {
    case PriorType::diffuse: return diffuse_catalog(robot);
    case PriorType::informed_diffuse: {
      PriorCatalog cat = diffuse_catalog(robot);
      cat.type = PriorType::informed_diffuse;
      cat.polar_cap = 0.5 * kPi;
      cat.soft_constraints = {SoftConstraint::total_mass, SoftConstraint::com_alignment};
      return cat;
    }
    case PriorType::empirical:
      if (!inputs.empirical) throw ConfigurationError("empirical prior requires an empirical table");
      return empirical_catalog(robot, *inputs.empirical);
    case PriorType::cad:
      if (!inputs.cad) throw ConfigurationError("cad prior requires CAD parameters");
      return cad_catalog(robot, *inputs.cad, inputs.cad_spread);
  }
  throw ContractViolation("build_prior: unknown prior type");
}

// --- Empirical table from donors -----------------------------------------

EmpiricalTable empirical_prior_from_cad(const std::vector<DonorRobot>& donors, double target_total_mass,
                                        const std::vector<double>& nominal_rotor_inertia) {
  if (donors.size() < 2) throw ConfigurationError("empirical prior needs at least two donor robots");
  const std::size_t n_axes = donors.front().axes.size();
  for (const auto& d : donors)
    if (d.axes.size() != n_axes)
      throw ConfigurationError("donor robots have different axis counts");
  if (nominal_rotor_inertia.size() != n_axes)
    throw ConfigurationError("nominal rotor inertias do not match the donor axis count");
  if (!(target_total_mass > 0.0)) throw ConfigurationError("target total mass must be > 0");

  std::vector<double> datasheet;
  for (const auto& d : donors) datasheet.push_back(d.axes.front().datasheet_mass);
  const double mean_datasheet = mean_of(datasheet);
  if (!(mean_datasheet > 0.0)) throw ConfigurationError("donor datasheet masses must be > 0");
  const double scale = target_total_mass / mean_datasheet;

  EmpiricalTable table;
  const auto floored = [&table](double sigma, double mu, const std::string& what) {
    if (sigma > 0.0) return sigma;
    table.warnings.push_back(what + ": zero spread across donors, floored at 1% of the mean");
    const double f = 0.01 * std::abs(mu);
    return f > 0.0 ? f : 1e-6;
  };

  for (std::size_t a = 0; a < n_axes; ++a) {
    std::vector<double> mass, com, diag, off;
    for (const auto& d : donors) {
      const DonorAxis& ax = d.axes[a];
      mass.push_back(ax.mass * scale);
      com.push_back(ax.com_length);
      diag.insert(diag.end(), ax.inertia_diag.begin(), ax.inertia_diag.end());
      off.insert(off.end(), ax.inertia_off.begin(), ax.inertia_off.end());
    }
    const std::string axis = "axis " + std::to_string(a + 1);
    EmpiricalAxisStats s;
    s.mass_mu = mean_of(mass);
    s.mass_sigma = floored(sample_sd(mass, s.mass_mu), s.mass_mu, axis + " mass");
    s.com_mu = mean_of(com);
    s.com_sigma = floored(sample_sd(com, s.com_mu), s.com_mu, axis + " CoM length");
    s.inertia_diag_sigma = floored(rms_of(diag), 0.0, axis + " tensor diagonal");
    s.inertia_off_sigma = floored(rms_of(off), 0.0, axis + " tensor off-diagonal");
    s.rotor_mu = nominal_rotor_inertia[a];
    s.rotor_sigma = floored(nominal_rotor_inertia[a], 0.0, axis + " rotor inertia");
    table.axes.push_back(s);
  }
  return table;
}

std::vector<DonorRobot> load_donor_csv(const std::filesystem::path& path) {
  const auto t = detail::CsvTable::read(path);
  for (const char* c : {"axis", "mass", "com_length", "idiag1", "idiag2", "idiag3", "ioff1", "ioff2",
                        "ioff3", "datasheet_mass"})
    t.require(c);
  std::vector<DonorRobot> donors;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    DonorAxis ax;
    ax.axis = t.integer(r, "axis");
    ax.mass = t.real(r, "mass");
    ax.com_length = t.real(r, "com_length");
    for (int i = 0; i < 3; ++i) {
      ax.inertia_diag[i] = t.real(r, "idiag" + std::to_string(i + 1));
      ax.inertia_off[i] = t.real(r, "ioff" + std::to_string(i + 1));
    }
    ax.datasheet_mass = t.real(r, "datasheet_mass");
    if (ax.axis < 1) throw ParseError(path.string() + ":" + std::to_string(t.line(r)) + ": axis must be >= 1",
                                      t.line(r), "axis");
    if (ax.axis == 1 || donors.empty()) donors.emplace_back();
    auto& current = donors.back().axes;
    if (ax.axis != static_cast<int>(current.size()) + 1)
      throw ParseError(path.string() + ":" + std::to_string(t.line(r)) + ": axes must run 1, 2, ...",
                       t.line(r), "axis");
    current.push_back(ax);
  }
  if (donors.empty()) throw ParseError(path.string() + ": no donor rows", 1, "");
  return donors;
}

// --- Spherical CoM -------------------------------------------------------

Matrix3d spherical_frame(const Vector3d& axis) {
  Vector3d z = Vector3d::UnitZ();
  if (axis.norm() > 0.0) z = axis.normalized();
  Eigen::Index least = 0;
  z.cwiseAbs().minCoeff(&least);
  Vector3d x = Vector3d::Unit(least);
  x = (x - z * z.dot(x)).normalized();
  const Vector3d y = z.cross(x);
  Matrix3d F;
  F.col(0) = x;
  F.col(1) = y;
  F.col(2) = z;
  return F;
}

Vector3d com_spherical_to_cartesian(double radius, double polar, double azimuth, const Vector3d& axis) {
  const double s = std::sin(polar);
  const Vector3d local(radius * s * std::cos(azimuth), radius * s * std::sin(azimuth),
                       radius * std::cos(polar));
  return spherical_frame(axis) * local;
}

Spherical com_cartesian_to_spherical(const Vector3d& com, const Vector3d& axis) {
  const Vector3d local = spherical_frame(axis).transpose() * com;
  Spherical s;
  s.radius = local.norm();
  s.polar = std::atan2(std::hypot(local(0), local(1)), local(2));
  double phi = std::atan2(local(1), local(0));
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  s.azimuth = phi;
  return s;
}

// --- Constraint factors --------------------------------------------------

bool link_is_physical(const LinkInertialParams& link, double com_bound) {
  if (!std::isfinite(link.mass) || !link.com.allFinite() || !link.inertia.allFinite() ||
      !std::isfinite(link.rotor))
    return false;
  if (!(link.mass > 0.0) || !(link.rotor > 0.0)) return false;
  const double xx = link.inertia(0, 0), yy = link.inertia(1, 1), zz = link.inertia(2, 2);
  if (!(xx > 0.0 && yy > 0.0 && zz > 0.0)) return false;
  if (xx + yy < zz || yy + zz < xx || zz + xx < yy) return false;
  if (!(link.com.norm() <= com_bound)) return false;
  Eigen::LLT<Matrix3d> llt(link.inertia);
  return llt.info() == Eigen::Success;
}

FeasibilityChecker::FeasibilityChecker(const RobotDescription& robot, PoseList check_poses)
    : robot_(robot), poses_(std::move(check_poses)) {
  if (poses_.empty()) throw ContractViolation("feasibility check needs at least one pose");
  regressor_ = stacked_regressor(robot, poses_);
}

FeasibilityChecker FeasibilityChecker::with_random_poses(const RobotDescription& robot, int count,
                                                         std::uint64_t seed) {
  Rng rng(seed);
  return FeasibilityChecker(robot, random_poses(robot, count, rng));
}

double FeasibilityChecker::log_factor(const RobotParams& params) const {
  if (static_cast<int>(params.size()) != robot_.n_joints())
    throw ContractViolation("feasibility check: parameter count does not match the robot");
  for (int k = 0; k < robot_.n_joints(); ++k)
    if (!link_is_physical(params[k], robot_.links[k].com_bound)) return -kInf;
  const VectorXd X = regressor_ * stack_inertial(robot_, params);
  return (X.array() > 0.0).all() ? 0.0 : -kInf;
}

double feasibility_log_factor(const RobotParams& params, const RobotDescription& robot,
                              const PoseList& check_poses) {
  return FeasibilityChecker(robot, check_poses).log_factor(params);
}

double soft_constraint_log_factor(const RobotParams& params, const RobotDescription& robot,
                                  SoftConstraint kind) {
  switch (kind) {
    case SoftConstraint::total_mass: {
      if (!(robot.total_mass > 0.0))
        throw ContractViolation("total_mass factor needs total_mass > 0 in the robot metadata");
      double sum = robot.base_mass;
      for (const auto& p : params) sum += p.mass;
      return log_pdf(DistributionSpec::normal(0.0, 0.1 * robot.total_mass), sum - robot.total_mass);
    }
    case SoftConstraint::com_alignment: return 0.0;
  }
  throw ContractViolation("unknown soft constraint");
}

// --- Catalog evaluation --------------------------------------------------

double per_parameter_log_density(const PriorCatalog& catalog, const RobotDescription& robot,
                                 const RobotParams& params, double noise_c) {
  require_links(catalog, robot);
  if (params.size() != catalog.links.size())
    throw ContractViolation("prior density: parameter count does not match the catalog");
  double lp = log_pdf(catalog.noise, noise_c);
  for (int k = 0; k < catalog.n_links() && std::isfinite(lp); ++k) {
    const LinkPrior& spec = catalog.links[k];
    const LinkBounds& b = spec.bounds;
    const LinkInertialParams& p = params[k];
    if (!b.mass.contains(p.mass) || !b.rotor.contains(p.rotor)) return -kInf;
    for (int i = 0; i < 3; ++i)
      if (!b.com_component.contains(p.com(i))) return -kInf;
    const auto I = p.inertia_components();
    for (double v : diag_of(I))
      if (!b.inertia_diag.contains(v)) return -kInf;
    for (double v : off_of(I))
      if (!b.inertia_off.contains(v)) return -kInf;
    const Spherical sph = com_cartesian_to_spherical(p.com, robot.link_translation(k));
    if (!(sph.radius <= b.radius) || !(sph.polar <= catalog.polar_cap)) return -kInf;

    lp += log_pdf(spec.mass, p.mass) + log_pdf(spec.rotor, p.rotor);
    if (catalog.com_parametrization == ComParametrization::spherical)
      lp += log_pdf(spec.com[0], sph.radius) + log_pdf(spec.com[1], sph.polar) +
            log_pdf(spec.com[2], sph.azimuth);
    else
      for (int i = 0; i < 3; ++i) lp += log_pdf(spec.com[i], p.com(i));
    for (int i = 0; i < 6; ++i) lp += log_pdf(spec.inertia[i], I[i]);
  }
  return std::isnan(lp) ? -kInf : lp;
}

double prior_log_density(const PriorCatalog& catalog, const RobotDescription& robot,
                         const RobotParams& params, double noise_c, const FeasibilityChecker& checker) {
  double lp = per_parameter_log_density(catalog, robot, params, noise_c);
  if (!std::isfinite(lp)) return -kInf;
  lp += checker.log_factor(params);
  if (!std::isfinite(lp)) return -kInf;
  for (SoftConstraint kind : catalog.soft_constraints) lp += soft_constraint_log_factor(params, robot, kind);
  return lp;
}

PriorDraw sample_unconstrained(const PriorCatalog& catalog, const RobotDescription& robot, Rng& rng) {
  require_links(catalog, robot);
  PriorDraw draw;
  draw.params.resize(catalog.links.size());
  for (int k = 0; k < catalog.n_links(); ++k) {
    const LinkPrior& spec = catalog.links[k];
    const LinkBounds& b = spec.bounds;
    LinkInertialParams& p = draw.params[k];
    p.mass = draw_within(spec.mass, b.mass, rng);

    const Vector3d axis = robot.link_translation(k);
    bool placed = false;
    for (int attempt = 0; attempt < kMaxDrawAttempts && !placed; ++attempt) {
      Vector3d r;
      if (catalog.com_parametrization == ComParametrization::spherical) {
        r = com_spherical_to_cartesian(sample(spec.com[0], rng), sample(spec.com[1], rng),
                                       sample(spec.com[2], rng), axis);
      } else {
        for (int i = 0; i < 3; ++i) r(i) = sample(spec.com[i], rng);
      }
      const Spherical sph = com_cartesian_to_spherical(r, axis);
      placed = sph.radius <= b.radius && sph.polar <= catalog.polar_cap &&
               (r.array() >= b.com_component.lo).all() && (r.array() <= b.com_component.hi).all();
      if (placed) p.com = r;
    }
    if (!placed)
      throw InfeasibleCatalogError("link " + std::to_string(k + 1) + ": CoM prior has almost no mass inside its bounds",
                                   1.0);

    std::array<double, 6> I{};
    for (int i = 0; i < 6; ++i)
      I[i] = draw_within(spec.inertia[i], is_diag_index(i) ? b.inertia_diag : b.inertia_off, rng);
    const double J = draw_within(spec.rotor, b.rotor, rng);
    p = LinkInertialParams::from_components(p.mass, p.com, I, J);
  }
  draw.noise_c = sample(catalog.noise, rng);
  return draw;
}

// --- Serialisation -------------------------------------------------------

namespace {

json spec_to_json(const DistributionSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"mu", detail::real_to_json(s.mu)},
          {"sigma", detail::real_to_json(s.sigma)},
          {"a", detail::real_to_json(s.a)},
          {"b", detail::real_to_json(s.b)}};
}

DistributionSpec spec_from_json(const json& j) {
  DistributionSpec s;
  try {
    s.kind = distribution_kind_from_string(j.at("kind").get<std::string>());
  } catch (const ContractViolation& e) {
    throw ValidationError(e.what());
  }
  s.mu = detail::real_from_json(j.at("mu"));
  s.sigma = detail::real_from_json(j.at("sigma"));
  s.a = detail::real_from_json(j.at("a"));
  s.b = detail::real_from_json(j.at("b"));
  try {
    s.validate();
  } catch (const ContractViolation& e) {
    throw ValidationError(std::string("catalog: ") + e.what());
  }
  return s;
}

json interval_to_json(const Interval& i) { return {detail::real_to_json(i.lo), detail::real_to_json(i.hi)}; }

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("catalog: bounds must be [lo, hi] pairs");
  return {detail::real_from_json(j[0]), detail::real_from_json(j[1])};
}

std::string_view to_string(ComParametrization c) {
  return c == ComParametrization::spherical ? "spherical" : "cartesian";
}

}  // namespace

json catalog_to_json(const PriorCatalog& catalog) {
  json links = json::array();
  for (const auto& lp : catalog.links) {
    json com = json::array(), inertia = json::array();
    for (const auto& s : lp.com) com.push_back(spec_to_json(s));
    for (const auto& s : lp.inertia) inertia.push_back(spec_to_json(s));
    const LinkBounds& b = lp.bounds;
    links.push_back({{"mass", spec_to_json(lp.mass)},
                     {"com", com},
                     {"inertia", inertia},
                     {"rotor", spec_to_json(lp.rotor)},
                     {"bounds",
                      {{"mass", interval_to_json(b.mass)},
                       {"com_component", interval_to_json(b.com_component)},
                       {"radius", detail::real_to_json(b.radius)},
                       {"inertia_diag", interval_to_json(b.inertia_diag)},
                       {"inertia_off", interval_to_json(b.inertia_off)},
                       {"rotor", interval_to_json(b.rotor)}}}});
  }
  json soft = json::array();
  for (auto s : catalog.soft_constraints) soft.push_back(std::string(to_string(s)));
  return {{"schema_version", detail::kSchemaVersion},
          {"prior_type", std::string(to_string(catalog.type))},
          {"com_parametrization", std::string(to_string(catalog.com_parametrization))},
          {"polar_cap", catalog.polar_cap},
          {"total_mass", catalog.total_mass},
          {"base_mass", catalog.base_mass},
          {"soft_factors", soft},
          {"noise", spec_to_json(catalog.noise)},
          {"links", links}};
}

PriorCatalog catalog_from_json(const json& j) {
  detail::check_schema(j, "catalog");
  PriorCatalog cat;
  try {
    try {
      cat.type = prior_type_from_string(j.at("prior_type").get<std::string>());
    } catch (const ConfigurationError& e) {
      throw ValidationError(e.what());
    }
    const auto cp = j.at("com_parametrization").get<std::string>();
    if (cp == "spherical") cat.com_parametrization = ComParametrization::spherical;
    else if (cp == "cartesian") cat.com_parametrization = ComParametrization::cartesian;
    else throw ValidationError("catalog: unknown com_parametrization \"" + cp + "\"");
    cat.polar_cap = detail::real_from_json(j.at("polar_cap"));
    cat.total_mass = detail::real_from_json(j.at("total_mass"));
    cat.base_mass = detail::real_from_json(j.value("base_mass", json(0.0)));
    for (const auto& s : j.value("soft_factors", json::array())) {
      try {
        cat.soft_constraints.push_back(soft_constraint_from_string(s.get<std::string>()));
      } catch (const ContractViolation& e) {
        throw ValidationError(e.what());
      }
    }
    cat.noise = spec_from_json(j.at("noise"));
    for (const auto& jl : j.at("links")) {
      LinkPrior lp;
      lp.mass = spec_from_json(jl.at("mass"));
      const auto& com = jl.at("com");
      const auto& inertia = jl.at("inertia");
      if (com.size() != 3 || inertia.size() != 6)
        throw ValidationError("catalog: each link needs 3 CoM and 6 tensor specs");
      for (int i = 0; i < 3; ++i) lp.com[i] = spec_from_json(com[i]);
      for (int i = 0; i < 6; ++i) lp.inertia[i] = spec_from_json(inertia[i]);
      lp.rotor = spec_from_json(jl.at("rotor"));
      const auto& b = jl.at("bounds");
      lp.bounds.mass = interval_from_json(b.at("mass"));
      lp.bounds.com_component = interval_from_json(b.at("com_component"));
      lp.bounds.radius = detail::real_from_json(b.at("radius"));
      lp.bounds.inertia_diag = interval_from_json(b.at("inertia_diag"));
      lp.bounds.inertia_off = interval_from_json(b.at("inertia_off"));
      lp.bounds.rotor = interval_from_json(b.at("rotor"));
      cat.links.push_back(lp);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("catalog: ") + e.what());
  }
  if (cat.links.empty()) throw ValidationError("catalog: no links");
  return cat;
}

PriorCatalog load_catalog(const std::filesystem::path& path) { return catalog_from_json(detail::read_json(path)); }

void save_catalog(const PriorCatalog& catalog, const std::filesystem::path& path) {
  detail::write_json(catalog_to_json(catalog), path);
}

}  // namespace bayesid
