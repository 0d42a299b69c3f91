#pragma once

#include <array>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bayesid/distributions.hpp"
#include "bayesid/robot.hpp"
#include "bayesid/types.hpp"

namespace bayesid {

enum class PriorType { diffuse, informed_diffuse, empirical, cad };

std::string_view to_string(PriorType type);
PriorType prior_type_from_string(std::string_view name);

/// How the CoM coordinates of a catalog are described.
/// spherical: specs for (radius, polar, azimuth) about the link translation axis.
/// cartesian: specs for (rx, ry, rz) in the link frame.
enum class ComParametrization { spherical, cartesian };

enum class SoftConstraint { total_mass, com_alignment };

std::string_view to_string(SoftConstraint kind);
SoftConstraint soft_constraint_from_string(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Hard support shared by every catalog of a robot (datasheet-derived bounds).
struct LinkBounds {
  Interval mass{0.0, 1050.0};
  Interval com_component{-1.0, 1.0};
  double radius = 1.0;
  Interval inertia_diag{0.0, 50.0};
  Interval inertia_off{-2.0, 2.0};
  Interval rotor{0.0, 1.0};
  bool operator==(const LinkBounds&) const = default;
};

struct LinkPrior {
  DistributionSpec mass;
  std::array<DistributionSpec, 3> com;      // see ComParametrization
  std::array<DistributionSpec, 6> inertia;  // xx, xy, xz, yy, yz, zz
  DistributionSpec rotor;
  LinkBounds bounds;
  bool operator==(const LinkPrior&) const = default;
};

/// Per-parameter priors of one robot plus the joint factors that couple them.
struct PriorCatalog {
  PriorType type = PriorType::diffuse;
  ComParametrization com_parametrization = ComParametrization::cartesian;
  double polar_cap = std::numbers::pi;  // max angle between CoM and translation
  std::vector<LinkPrior> links;
  DistributionSpec noise;  // proportional noise coefficient c
  std::vector<SoftConstraint> soft_constraints;
  double total_mass = 0.0;
  double base_mass = 0.0;

  int n_links() const { return static_cast<int>(links.size()); }
  bool operator==(const PriorCatalog&) const = default;
};

/// Per-axis statistics of the empirical donor population.
struct EmpiricalAxisStats {
  double mass_mu = 0, mass_sigma = 0;
  double com_mu = 0, com_sigma = 0;
  double rotor_mu = 0, rotor_sigma = 0;
  double inertia_diag_sigma = 0;  // zero-centred spread of diagonal entries
  double inertia_off_sigma = 0;   // zero-mean spread of off-diagonal entries
};

struct EmpiricalTable {
  std::vector<EmpiricalAxisStats> axes;
  std::vector<std::string> warnings;
};

/// One axis of a donor robot's CAD model.
struct DonorAxis {
  int axis = 0;  // 1-based
  double mass = 0;
  double com_length = 0;
  std::array<double, 3> inertia_diag{};
  std::array<double, 3> inertia_off{};
  double datasheet_mass = 0;
};

struct DonorRobot {
  std::vector<DonorAxis> axes;
};

struct PriorInputs {
  std::optional<EmpiricalTable> empirical;
  std::optional<RobotParams> cad;
  /// Relative spread of the CAD catalog; 0 gives point masses at the CAD values.
  double cad_spread = 0.1;
};

/// Prior on the noise coefficient c shared by every catalog.
DistributionSpec default_noise_prior();

/// Datasheet bounds of a robot: link mass up to the total mass, CoM
/// components in [-1, 1] m, radius capped by the link bound, rotor inertia in
/// [J_i, 2 J_i], tensor diagonal in [0, 50] and off-diagonal in [-2, 2].
std::vector<LinkBounds> datasheet_bounds(const RobotDescription& robot);

/// Builds one of the four catalogs. Throws ConfigurationError when the
/// empirical table (empirical) or CAD parameters (cad) are missing.
PriorCatalog build_prior(PriorType type, const RobotDescription& robot, const PriorInputs& inputs = {});

/// Per-axis statistics from donor CAD models. Masses are scaled by
/// target_total_mass / mean donor datasheet mass before the statistics; rotor
/// inertia is centred on the target's nominal value with equal spread.
EmpiricalTable empirical_prior_from_cad(const std::vector<DonorRobot>& donors,
                                        double target_total_mass,
                                        const std::vector<double>& nominal_rotor_inertia);

/// Donor CSV: axis, mass, com_length, idiag1..3, ioff1..3, datasheet_mass.
/// A new donor starts whenever axis returns to 1.
std::vector<DonorRobot> load_donor_csv(const std::filesystem::path& path);

// --- CoM parametrisation -------------------------------------------------

struct Spherical {
  double radius = 0;
  double polar = 0;
  double azimuth = 0;
};

/// Orthonormal frame whose z-axis follows `axis` (link-frame z when axis is 0).
Matrix3d spherical_frame(const Vector3d& axis);
Vector3d com_spherical_to_cartesian(double radius, double polar, double azimuth, const Vector3d& axis);
/// Inverse of com_spherical_to_cartesian with polar in [0, pi], azimuth in [0, 2 pi).
Spherical com_cartesian_to_spherical(const Vector3d& com, const Vector3d& axis);

// --- Constraint factors --------------------------------------------------

/// Per-link physical conditions without the pose-dependent inertia check.
bool link_is_physical(const LinkInertialParams& link, double com_bound);

/// 0 when every feasibility condition holds, -infinity otherwise:
/// m, J > 0; tensor diagonal > 0, triangle inequalities, positive definite;
/// |r| within the link bound; apparent inertia > 0 at every check pose.
double feasibility_log_factor(const RobotParams& params, const RobotDescription& robot,
                              const PoseList& check_poses);

/// Same as feasibility_log_factor with the check-pose regressor cached.
class FeasibilityChecker {
 public:
  FeasibilityChecker(const RobotDescription& robot, PoseList check_poses);
  /// Default: 20 poses drawn from `seed`.
  static FeasibilityChecker with_random_poses(const RobotDescription& robot, int count = 20,
                                              std::uint64_t seed = 20);

  double log_factor(const RobotParams& params) const;
  const PoseList& poses() const { return poses_; }

 private:
  RobotDescription robot_;
  PoseList poses_;
  MatrixXd regressor_;
};

/// total_mass: Normal log-density of (sum of link masses + base mass - total
/// mass) with standard deviation 10% of the total mass. com_alignment: 0; the
/// alignment is carried by the catalog's polar cap.
double soft_constraint_log_factor(const RobotParams& params, const RobotDescription& robot,
                                  SoftConstraint kind);

// --- Catalog evaluation --------------------------------------------------

/// Sum of per-parameter log densities in the catalog's own coordinates plus
/// the hard datasheet bounds and polar cap (as 0/-inf). No constraint factors.
double per_parameter_log_density(const PriorCatalog& catalog, const RobotDescription& robot,
                                 const RobotParams& params, double noise_c);

/// Joint prior: per-parameter densities + feasibility + enabled soft factors.
double prior_log_density(const PriorCatalog& catalog, const RobotDescription& robot,
                         const RobotParams& params, double noise_c, const FeasibilityChecker& checker);

struct PriorDraw {
  RobotParams params;
  double noise_c = 0;
};

/// One draw from the factorised part of the catalog (per-parameter specs,
/// bounds and polar cap). Feasibility and soft factors are not applied.
PriorDraw sample_unconstrained(const PriorCatalog& catalog, const RobotDescription& robot, Rng& rng);

// --- Serialisation -------------------------------------------------------

nlohmann::json catalog_to_json(const PriorCatalog& catalog);
PriorCatalog catalog_from_json(const nlohmann::json& j);
PriorCatalog load_catalog(const std::filesystem::path& path);
void save_catalog(const PriorCatalog& catalog, const std::filesystem::path& path);

}  // namespace bayesid
