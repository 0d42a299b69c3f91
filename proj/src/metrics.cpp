#include "bayesid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/QR>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"

namespace bayesid {

namespace {

void same_length(const VectorXd& a, const VectorXd& b, const char* what) {
  if (a.size() != b.size()) throw ContractViolation(std::string(what) + ": vectors differ in length");
  if (a.size() == 0) throw ContractViolation(std::string(what) + ": empty vectors");
}

}  // namespace

double mae_percent(const VectorXd& A, const VectorXd& B) {
  same_length(A, B, "mae_percent");
  const double ref = B.cwiseAbs().mean();
  if (!(ref > 0.0)) throw UndefinedMetricError("mae_percent: reference has zero mean magnitude");
  return 100.0 * (A - B).cwiseAbs().mean() / ref;
}

double cosine_similarity(const VectorXd& A, const VectorXd& B) {
  same_length(A, B, "cosine_similarity");
  const double na = A.norm(), nb = B.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw UndefinedMetricError("cosine_similarity: zero vector");
  return std::clamp(A.dot(B) / (na * nb), -1.0, 1.0);
}

double rmse_percent(const VectorXd& pred, const VectorXd& meas) {
  same_length(pred, meas, "rmse_percent");
  const double ref = std::sqrt(meas.squaredNorm() / double(meas.size()));
  if (!(ref > 0.0)) throw UndefinedMetricError("rmse_percent: measurements have zero RMS");
  return 100.0 * std::sqrt((pred - meas).squaredNorm() / double(meas.size())) / ref;
}

double tvd(const VectorXd& a, const VectorXd& b, int n_bins) {
  if (a.size() == 0 || b.size() == 0) throw ContractViolation("tvd: empty sample set");
  if (n_bins < 2) throw ContractViolation("tvd: need at least 2 bins");
  const double lo = std::min(a.minCoeff(), b.minCoeff());
  const double hi = std::max(a.maxCoeff(), b.maxCoeff());
  if (!(hi > lo)) return 0.0;  // both sets are the same single value
  const auto histogram = [&](const VectorXd& x) {
    VectorXd h = VectorXd::Zero(n_bins);
    for (double v : x) {
      int bin = static_cast<int>((v - lo) / (hi - lo) * n_bins);
      h(std::clamp(bin, 0, n_bins - 1)) += 1.0;
    }
    return VectorXd(h / double(x.size()));
  };
  return 0.5 * (histogram(a) - histogram(b)).cwiseAbs().sum();
}

double quantile(VectorXd values, double p) {
  if (values.size() == 0) throw ContractViolation("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("quantile: p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * double(values.size() - 1);
  const auto i = static_cast<Eigen::Index>(std::floor(h));
  if (i + 1 >= values.size()) return values(values.size() - 1);
  return values(i) + (h - double(i)) * (values(i + 1) - values(i));
}

ConfidenceInterval confidence_interval(const VectorXd& draws, double level) {
  if (draws.size() == 0) throw ContractViolation("confidence_interval: no draws");
  if (!(level > 0.0 && level <= 1.0)) throw ContractViolation("confidence_interval: level must be in (0, 1]");
  ConfidenceInterval ci;
  const double tail = 0.5 * (1.0 - level);
  ci.lo = quantile(draws, tail);
  ci.hi = quantile(draws, 1.0 - tail);
  if (draws.size() < 40)
    ci.warning = "only " + std::to_string(draws.size()) + " draws; percentile interval is imprecise";
  return ci;
}

OlsResult ols_fit(const MatrixXd& A, const VectorXd& b) {
  if (A.rows() != b.size()) throw ContractViolation("ols_fit: row count differs from measurement count");
  if (A.rows() == 0 || A.cols() == 0) throw ContractViolation("ols_fit: empty system");
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  cod.setThreshold(1e-10);
  const long rank = cod.rank();
  if (rank < A.cols())
    throw RankDeficientError("ols_fit: regressor has rank " + std::to_string(rank) + " < " +
                                 std::to_string(A.cols()) + " columns",
                             rank, A.cols());
  OlsResult r;
  r.rank = rank;
  r.base_params = cod.solve(b);
  r.fitted = A * r.base_params;
  r.residuals = b - r.fitted;
  r.rmse_percent = rmse_percent(r.fitted, b);
  return r;
}

MatrixXd dataset_regressor(const RobotDescription& robot, const MeasurementDataset& data) {
  const int n = robot.n_joints();
  data.validate(n);
  const PoseList poses = data.unique_poses();
  struct Less {
    bool operator()(const Pose& a, const Pose& b) const {
      return std::lexicographical_compare(a.q.begin(), a.q.end(), b.q.begin(), b.q.end());
    }
  };
  std::map<Pose, MatrixXd, Less> cache;
  for (const auto& p : poses) cache.emplace(p, regressor(robot, p));
  MatrixXd out(static_cast<Eigen::Index>(data.size()), kParamsPerLink * n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = data.entries[i];
    out.row(static_cast<Eigen::Index>(i)) = cache.at(e.pose).row(e.axis - 1);
  }
  return out;
}

MatrixXd dataset_reduced_regressor(const RobotDescription& robot, const MeasurementDataset& data,
                                   const BaseParamMap& map) {
  const MatrixXd Y = dataset_regressor(robot, data);
  MatrixXd out(Y.rows(), map.count);
  for (int i = 0; i < map.count; ++i) out.col(i) = Y.col(map.independent[i]);
  return out;
}

OlsResult ols_fit(const RobotDescription& robot, const MeasurementDataset& data, const BaseParamMap& map) {
  if (data.empty()) throw ContractViolation("ols_fit: empty dataset");
  return ols_fit(dataset_reduced_regressor(robot, data, map), data.inertias());
}

}  // namespace bayesid
