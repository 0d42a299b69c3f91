#pragma once

#include <optional>
#include <string>

#include "bayesid/base_params.hpp"
#include "bayesid/data.hpp"
#include "bayesid/types.hpp"

namespace bayesid {

/// 100 * mean|A - B| / mean|B|. Throws UndefinedMetricError when mean|B| = 0.
double mae_percent(const VectorXd& A, const VectorXd& B);

/// <A, B> / (|A| |B|). Throws UndefinedMetricError for a zero vector.
double cosine_similarity(const VectorXd& A, const VectorXd& B);

/// 100 * RMS(pred - meas) / RMS(meas).
double rmse_percent(const VectorXd& pred, const VectorXd& meas);

/// Half the L1 distance between histograms on shared edges spanning both sets.
double tvd(const VectorXd& a, const VectorXd& b, int n_bins = 64);

/// Type-7 (linear interpolation) sample quantile, p in [0, 1].
double quantile(VectorXd values, double p);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<std::string> warning;  // set when too few draws for the level
};

/// Central percentile interval; level 1 gives (min, max). Fewer than 40
/// draws attaches a precision warning.
ConfidenceInterval confidence_interval(const VectorXd& draws, double level = 0.95);

struct OlsResult {
  VectorXd base_params;
  VectorXd fitted;
  VectorXd residuals;
  double rmse_percent = 0.0;
  long rank = 0;
};

/// Minimum-norm least squares A x = b. Throws RankDeficientError when A has
/// lower column rank than its width.
OlsResult ols_fit(const MatrixXd& A, const VectorXd& b);

/// OLS on base parameters from the reduced-regressor rows of the dataset.
OlsResult ols_fit(const RobotDescription& robot, const MeasurementDataset& data, const BaseParamMap& map);

/// Reduced-regressor rows for each dataset entry (row i = entry i).
MatrixXd dataset_reduced_regressor(const RobotDescription& robot, const MeasurementDataset& data,
                                   const BaseParamMap& map);
/// Full-regressor rows for each dataset entry.
MatrixXd dataset_regressor(const RobotDescription& robot, const MeasurementDataset& data);

}  // namespace bayesid
