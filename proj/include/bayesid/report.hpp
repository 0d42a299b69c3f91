#pragma once

// Comparison report: per approach and stage, MP/BP error metrics and inertia
// RMSE, plus the plot-data CSV writers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bayesid/base_params.hpp"
#include "bayesid/data.hpp"
#include "bayesid/inference.hpp"
#include "bayesid/metrics.hpp"
#include "bayesid/priors.hpp"
#include "bayesid/robot.hpp"

namespace bayesid {

/// Missing values are metrics that do not apply (OLS has no MP estimate,
/// zero-shot runs have no training set).
struct MetricSet {
  std::optional<double> mp_mae, mp_cs;
  std::optional<double> bp_mae, bp_cs;
  std::optional<double> rmse_train, rmse_test;

  bool operator==(const MetricSet&) const = default;
};

enum class Stage { ols, prior, posterior };
std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

struct ReportRow {
  std::string approach;  // "ols" or a prior type name
  Stage stage = Stage::prior;
  std::string run_id;
  MetricSet metrics;
  std::optional<MetricSet> reference;  // published values for the same row

  bool operator==(const ReportRow&) const = default;
};

struct ReportMetadata {
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;
  long n_prior_draws = 0;
  long n_posterior_draws = 0;
  long n_train = 0;  // measurements
  long n_test = 0;
  long n_iter = 0;
  std::optional<double> ess_mean, ess_min;
  std::optional<bool> ess_passed;
  std::vector<std::string> notes;

  bool operator==(const ReportMetadata&) const = default;
};

struct EvalReport {
  std::string run_id;
  std::vector<ReportRow> rows;
  ReportMetadata metadata;

  bool operator==(const EvalReport&) const = default;
};

/// Mean over the four groups {m}, {r}, {J}, {tensor} of the group MAE%.
/// Both vectors are in mechanical order (11 per link).
double mechanical_mae_percent(const VectorXd& estimate, const VectorXd& nominal);

/// Metrics of a point estimate. `mp` may be empty (no MP estimate); `train`
/// and `test` may be empty.
MetricSet evaluate_estimate(const VectorXd& mp, const VectorXd& bp, const RobotDescription& robot,
                            const BaseParamMap& map, const RobotParams& nominal, const MeasurementDataset& train,
                            const MeasurementDataset& test);

/// Metrics of the predictive mean of a set of draws.
MetricSet evaluate_draws(const PredictiveDraws& draws, const RobotDescription& robot, const BaseParamMap& map,
                         const RobotParams& nominal, const MeasurementDataset& train,
                         const MeasurementDataset& test);

struct ApproachResult {
  PriorType prior = PriorType::diffuse;
  const PredictiveDraws* prior_draws = nullptr;
  const PredictiveDraws* posterior_draws = nullptr;
};

struct ReportInputs {
  std::string run_id;
  std::vector<ApproachResult> approaches;
  const OlsResult* ols = nullptr;
  RobotParams nominal;
  MeasurementDataset train, test;
  ReportMetadata metadata;
};

/// Rows ordered OLS, diffuse, informed, empirical, CAD; prior before posterior.
/// Rows carry the published values as `reference` where they exist.
EvalReport build_report(const ReportInputs& inputs, const RobotDescription& robot, const BaseParamMap& map);

/// Published metrics for an approach/stage of the reference robot, if any.
std::optional<MetricSet> published_metrics(std::string_view approach, Stage stage);

/// Approach order key used for sorting rows.
int approach_rank(std::string_view approach);

nlohmann::json report_to_json(const EvalReport& report);
/// Throws ValidationError on a schema mismatch.
EvalReport report_from_json(const nlohmann::json& j);
EvalReport load_report(const std::filesystem::path& path);
void save_report(const EvalReport& report, const std::filesystem::path& path);

/// One row per approach per report, in input order. Labels that occur in more
/// than one report get "@<run_id>" appended.
std::vector<ReportRow> merge_reports(const std::vector<EvalReport>& reports);

/// Fixed columns: run_id, approach, stage, the six metrics, then the six
/// published values. OLS MP cells read "indeterminable", other gaps "NA".
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::string report_csv(const std::vector<ReportRow>& rows);

// --- Plot data -----------------------------------------------------------

/// target, mean, median, lo, hi, count.
void write_summary_csv(const std::vector<PredictiveSummary>& summary, const std::filesystem::path& path);

/// target, nominal, prior_mean, prior_lo, prior_hi[, posterior_mean,
/// posterior_lo, posterior_hi]. `nominal` may be empty (column "NA").
void write_interval_csv(const std::vector<std::string>& labels, const VectorXd& nominal, const MatrixXd& prior,
                        const MatrixXd* posterior, const std::filesystem::path& path);

/// Histogram densities on shared edges: target, bin_lo, bin_hi,
/// prior_density, posterior_density. Also returns the TVD per column.
std::vector<double> write_pdf_csv(const std::vector<std::string>& labels, const MatrixXd& prior,
                                  const MatrixXd& posterior, const std::filesystem::path& path, int n_bins = 64);

/// Measured inertia sorted ascending with predictive intervals: rank, target,
/// measured, prior_mean, prior_lo, prior_hi[, posterior_...]. The draws'
/// x columns must match the dataset entries.
void write_sorted_inertia_csv(const MeasurementDataset& data, const MatrixXd& prior_x, const MatrixXd* posterior_x,
                              const std::filesystem::path& path);

/// Predicted inertia per dataset entry (columns in entry order) from draws
/// whose mp block is set.
MatrixXd predict_entries(const PredictiveDraws& draws, const RobotDescription& robot,
                         const MeasurementDataset& data);

}  // namespace bayesid
