#include "bayesid/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/priors.hpp"
#include "csv.hpp"

namespace bayesid {

namespace {

// Lexicographic order on pose values, for grouping entries by pose.
struct PoseLess {
  bool operator()(const Pose& a, const Pose& b) const {
    return std::lexicographical_compare(a.q.data(), a.q.data() + a.q.size(), b.q.data(),
                                        b.q.data() + b.q.size());
  }
};

// Group index per entry, groups numbered by first appearance.
std::vector<std::size_t> pose_groups(const MeasurementDataset& d, std::size_t& n_groups) {
  std::map<Pose, std::size_t, PoseLess> index;
  std::vector<std::size_t> group;
  group.reserve(d.size());
  for (const auto& e : d.entries) {
    auto [it, inserted] = index.try_emplace(e.pose, index.size());
    group.push_back(it->second);
  }
  n_groups = index.size();
  return group;
}

}  // namespace

PoseList MeasurementDataset::unique_poses() const {
  std::size_t n = 0;
  const auto group = pose_groups(*this, n);
  PoseList out(n);
  for (std::size_t i = 0; i < entries.size(); ++i) out[group[i]] = entries[i].pose;
  return out;
}

void MeasurementDataset::validate(int n_joints) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string where = "dataset entry " + std::to_string(i + 1) + ": ";
    if (e.pose.size() != n_joints)
      throw ValidationError(where + "pose has " + std::to_string(e.pose.size()) + " values, robot has " +
                            std::to_string(n_joints) + " joints");
    if (!e.pose.q.allFinite()) throw ValidationError(where + "pose is not finite");
    if (e.axis < 1 || e.axis > n_joints) throw ValidationError(where + "axis out of range");
    if (!(e.inertia > 0.0) || !std::isfinite(e.inertia)) throw ValidationError(where + "inertia must be > 0");
  }
}

MeasurementDataset MeasurementDataset::first_poses(std::size_t n_poses) const {
  std::size_t n = 0;
  const auto group = pose_groups(*this, n);
  MeasurementDataset out;
  out.provenance = provenance;
  out.truth = truth;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (group[i] < n_poses) out.entries.push_back(entries[i]);
  return out;
}

VectorXd MeasurementDataset::inertias() const {
  VectorXd out(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) out(static_cast<Eigen::Index>(i)) = entries[i].inertia;
  return out;
}

void SyntheticConfig::validate() const {
  if (n_poses < 1) throw ValidationError("synthetic data: n_poses must be >= 1");
  if (!(noise_c >= 0.0) || !std::isfinite(noise_c)) throw ValidationError("synthetic data: noise_c must be >= 0");
  if (!(pose_lo < pose_hi)) throw ValidationError("synthetic data: pose bounds must satisfy lo < hi");
}

MeasurementDataset generate_synthetic(const RobotDescription& robot, const RobotParams& truth,
                                      const SyntheticConfig& config, Rng& rng) {
  config.validate();
  if (static_cast<int>(truth.size()) != robot.n_joints())
    throw ValidationError("synthetic data: truth has the wrong number of links");
  if (!std::isfinite(FeasibilityChecker::with_random_poses(robot).log_factor(truth)))
    throw ValidationError("synthetic data: ground-truth parameters are not physically feasible");

  MeasurementDataset out;
  out.provenance = Provenance::synthetic;
  out.truth = truth;
  const int n = robot.n_joints();
  std::uniform_real_distribution<double> angle(config.pose_lo, config.pose_hi);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int p = 0; p < config.n_poses; ++p) {
    Pose pose{VectorXd(n)};
    for (int j = 0; j < n; ++j) pose.q(j) = angle(rng);
    const VectorXd X = apparent_inertia(robot, truth, pose);
    for (int k = 0; k < n; ++k) {
      if (!(X(k) > 0.0)) throw ValidationError("synthetic data: truth gives non-positive inertia");
      double value = X(k);
      if (config.noise_c > 0.0) {
        do {
          value = X(k) * (1.0 + config.noise_c * normal(rng));
        } while (!(value > 0.0));
      }
      out.entries.push_back({pose, k + 1, value});
    }
  }
  return out;
}

std::pair<MeasurementDataset, MeasurementDataset> split(const MeasurementDataset& dataset,
                                                        std::size_t n_train, std::uint64_t seed) {
  std::size_t n_groups = 0;
  const auto group = pose_groups(dataset, n_groups);
  if (n_train >= n_groups)
    throw ValidationError("split: n_train must be smaller than the number of poses (" +
                          std::to_string(n_groups) + ")");
  std::vector<std::size_t> order(n_groups);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Fisher-Yates with an explicit index draw keeps the partition independent
  // of the standard library's shuffle.
  for (std::size_t i = n_groups; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<bool> in_train(n_groups, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  MeasurementDataset train, test;
  train.provenance = test.provenance = dataset.provenance;
  train.truth = test.truth = dataset.truth;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    (in_train[group[i]] ? train : test).entries.push_back(dataset.entries[i]);
  return {std::move(train), std::move(test)};
}

MeasurementDataset load_dataset(const std::filesystem::path& path) {
  const auto t = detail::CsvTable::read(path);
  int n = 0;
  while (true) {
    try {
      t.require("pose_q" + std::to_string(n + 1));
    } catch (const ParseError&) {
      break;
    }
    ++n;
  }
  if (n == 0) t.require("pose_q1");
  t.require("axis");
  t.require("inertia");

  MeasurementDataset out;
  out.provenance = Provenance::imported;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Measurement m;
    m.pose = Pose(VectorXd(n));
    for (int j = 0; j < n; ++j) m.pose.q(j) = t.real(r, "pose_q" + std::to_string(j + 1));
    m.axis = t.integer(r, "axis");
    m.inertia = t.real(r, "inertia");
    const std::string where = path.string() + ":" + std::to_string(t.line(r)) + ": ";
    if (m.axis < 1 || m.axis > n) throw ParseError(where + "axis out of range", t.line(r), "axis");
    if (!(m.inertia > 0.0)) throw ParseError(where + "inertia must be > 0", t.line(r), "inertia");
    if (!m.pose.q.allFinite()) throw ParseError(where + "pose is not finite", t.line(r), "pose_q1");
    out.entries.push_back(std::move(m));
  }
  return out;
}

void save_dataset(const MeasurementDataset& dataset, const std::filesystem::path& path) {
  const Eigen::Index n = dataset.empty() ? 0 : dataset.entries.front().pose.size();
  for (const auto& e : dataset.entries)
    if (e.pose.size() != n) throw ContractViolation("save_dataset: poses of different sizes");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Eigen::Index j = 0; j < n; ++j) out << "pose_q" << j + 1 << ',';
  out << "axis,inertia\n";
  for (const auto& e : dataset.entries) {
    for (Eigen::Index j = 0; j < n; ++j) out << detail::format_real(e.pose.q(j)) << ',';
    out << e.axis << ',' << detail::format_real(e.inertia) << '\n';
  }
}

}  // namespace bayesid
