#include "bayesid/report.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "csv.hpp"
#include "json_io.hpp"

namespace bayesid {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 6> kMetricNames = {"mp_mae", "mp_cs", "bp_mae", "bp_cs", "rmse_train", "rmse_test"};

std::array<std::optional<double>*, 6> fields(MetricSet& m) {
  return {&m.mp_mae, &m.mp_cs, &m.bp_mae, &m.bp_cs, &m.rmse_train, &m.rmse_test};
}
std::array<const std::optional<double>*, 6> fields(const MetricSet& m) {
  return {&m.mp_mae, &m.mp_cs, &m.bp_mae, &m.bp_cs, &m.rmse_train, &m.rmse_test};
}

json metrics_to_json(const MetricSet& m) {
  json j = json::object();
  const auto f = fields(m);
  for (std::size_t i = 0; i < f.size(); ++i) j[kMetricNames[i]] = f[i]->has_value() ? json(**f[i]) : json(nullptr);
  return j;
}

MetricSet metrics_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("report: metrics must be an object");
  MetricSet m;
  auto f = fields(m);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!j.contains(kMetricNames[i])) throw ValidationError(std::string("report: missing metric ") + kMetricNames[i]);
    const auto& v = j.at(kMetricNames[i]);
    if (!v.is_null()) *f[i] = detail::real_from_json(v);
  }
  return m;
}

MetricSet published(double mp_mae, double mp_cs, double bp_mae, double bp_cs, double train, double test) {
  return {mp_mae, mp_cs, bp_mae, bp_cs, train, test};
}

VectorXd select(const VectorXd& v, const std::vector<Eigen::Index>& idx) {
  VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

std::string cell(const std::optional<double>& v, bool indeterminable) {
  if (v) return detail::format_real(*v);
  return indeterminable ? "indeterminable" : "NA";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

struct ColumnSummary {
  double mean, lo, hi;
};

ColumnSummary column_summary(const MatrixXd& draws, Eigen::Index c) {
  const VectorXd col = draws.col(c);
  const auto ci = confidence_interval(col, 0.95);
  return {col.mean(), ci.lo, ci.hi};
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::ols: return "ols";
    case Stage::prior: return "prior";
    case Stage::posterior: return "posterior";
  }
  return "prior";
}

Stage stage_from_string(std::string_view name) {
  if (name == "ols") return Stage::ols;
  if (name == "prior") return Stage::prior;
  if (name == "posterior") return Stage::posterior;
  throw ValidationError("report: unknown stage \"" + std::string(name) + "\"");
}

double mechanical_mae_percent(const VectorXd& estimate, const VectorXd& nominal) {
  if (estimate.size() != nominal.size() || nominal.size() % kParamsPerLink != 0 || nominal.size() == 0)
    throw ContractViolation("mechanical_mae_percent: vectors must hold 11 entries per link");
  std::array<std::vector<Eigen::Index>, 4> groups;  // m, r, J, tensor
  for (Eigen::Index k = 0; k < nominal.size() / kParamsPerLink; ++k) {
    const Eigen::Index o = kParamsPerLink * k;
    groups[0].push_back(o);
    for (int i = 1; i <= 3; ++i) groups[1].push_back(o + i);
    groups[2].push_back(o + 10);
    for (int i = 4; i <= 9; ++i) groups[3].push_back(o + i);
  }
  double sum = 0.0;
  for (const auto& g : groups) sum += mae_percent(select(estimate, g), select(nominal, g));
  return sum / 4.0;
}

MetricSet evaluate_estimate(const VectorXd& mp, const VectorXd& bp, const RobotDescription& robot,
                            const BaseParamMap& map, const RobotParams& nominal, const MeasurementDataset& train,
                            const MeasurementDataset& test) {
  MetricSet m;
  if (mp.size() > 0) {
    const VectorXd nominal_mp = flatten_mechanical(nominal);
    m.mp_mae = mechanical_mae_percent(mp, nominal_mp);
    m.mp_cs = cosine_similarity(mp, nominal_mp);
  }
  const VectorXd nominal_bp = base_param_values(map, stack_inertial(robot, nominal));
  m.bp_mae = mae_percent(bp, nominal_bp);
  m.bp_cs = cosine_similarity(bp, nominal_bp);
  if (!train.empty()) m.rmse_train = rmse_percent(dataset_reduced_regressor(robot, train, map) * bp, train.inertias());
  if (!test.empty()) m.rmse_test = rmse_percent(dataset_reduced_regressor(robot, test, map) * bp, test.inertias());
  return m;
}

MetricSet evaluate_draws(const PredictiveDraws& draws, const RobotDescription& robot, const BaseParamMap& map,
                         const RobotParams& nominal, const MeasurementDataset& train,
                         const MeasurementDataset& test) {
  if (draws.size() == 0) throw ContractViolation("evaluate_draws: no draws");
  const VectorXd mp = draws.mp.colwise().mean().transpose();
  const VectorXd bp = draws.bp.colwise().mean().transpose();
  return evaluate_estimate(mp, bp, robot, map, nominal, train, test);
}

int approach_rank(std::string_view approach) {
  static const std::array<std::string_view, 5> order = {"ols", "diffuse", "informed_diffuse", "empirical", "cad"};
  for (std::size_t i = 0; i < order.size(); ++i)
    if (approach == order[i]) return static_cast<int>(i);
  return static_cast<int>(order.size());
}

std::optional<MetricSet> published_metrics(std::string_view approach, Stage stage) {
  const bool post = stage == Stage::posterior;
  if (approach == "ols") {
    if (stage != Stage::ols) return std::nullopt;
    MetricSet m;
    m.bp_mae = 33.37;
    m.bp_cs = 0.990;
    m.rmse_train = 5.30;
    m.rmse_test = 9.81;
    return m;
  }
  if (stage == Stage::ols) return std::nullopt;
  if (approach == "diffuse")
    return post ? published(87.54, 0.847, 26.42, 0.991, 17.42, 19.23)
                : published(189.83, 0.605, 486.62, 0.979, 354.69, 340.86);
  if (approach == "informed_diffuse")
    return post ? published(83.12, 0.895, 21.52, 0.994, 13.19, 14.43)
                : published(189.83, 0.789, 502.73, 0.980, 366.14, 338.87);
  if (approach == "empirical")
    return post ? published(31.06, 0.957, 11.55, 0.998, 7.27, 7.65)
                : published(47.98, 0.953, 31.24, 0.977, 23.06, 22.98);
  if (approach == "cad")
    return post ? published(9.57, 0.998, 8.09, 0.999, 7.34, 7.36)
                : published(18.79, 0.999, 19.44, 0.993, 23.29, 26.49);
  return std::nullopt;
}

EvalReport build_report(const ReportInputs& in, const RobotDescription& robot, const BaseParamMap& map) {
  EvalReport report;
  report.run_id = in.run_id;
  report.metadata = in.metadata;
  if (in.ols) {
    ReportRow row;
    row.approach = "ols";
    row.stage = Stage::ols;
    row.run_id = in.run_id;
    row.metrics = evaluate_estimate(VectorXd(), in.ols->base_params, robot, map, in.nominal, in.train, in.test);
    row.reference = published_metrics("ols", Stage::ols);
    report.rows.push_back(row);
  }
  for (const auto& a : in.approaches) {
    const std::string name(to_string(a.prior));
    for (auto [stage, draws] : {std::pair{Stage::prior, a.prior_draws}, std::pair{Stage::posterior, a.posterior_draws}}) {
      if (!draws) continue;
      ReportRow row;
      row.approach = name;
      row.stage = stage;
      row.run_id = in.run_id;
      row.metrics = evaluate_draws(*draws, robot, map, in.nominal, in.train, in.test);
      row.reference = published_metrics(name, stage);
      report.rows.push_back(row);
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    const int ra = approach_rank(a.approach), rb = approach_rank(b.approach);
    if (ra != rb) return ra < rb;
    return static_cast<int>(a.stage) < static_cast<int>(b.stage);
  });
  return report;
}

// --- Serialisation -------------------------------------------------------

nlohmann::json report_to_json(const EvalReport& r) {
  json j;
  j["schema_version"] = detail::kSchemaVersion;
  j["kind"] = "eval_report";
  j["run_id"] = r.run_id;
  json meta;
  const auto& m = r.metadata;
  meta["seed"] = m.seed;
  meta["data_seed"] = m.data_seed ? json(*m.data_seed) : json(nullptr);
  meta["n_prior_draws"] = m.n_prior_draws;
  meta["n_posterior_draws"] = m.n_posterior_draws;
  meta["n_train"] = m.n_train;
  meta["n_test"] = m.n_test;
  meta["n_iter"] = m.n_iter;
  meta["ess_mean"] = m.ess_mean ? json(*m.ess_mean) : json(nullptr);
  meta["ess_min"] = m.ess_min ? json(*m.ess_min) : json(nullptr);
  meta["ess_passed"] = m.ess_passed ? json(*m.ess_passed) : json(nullptr);
  meta["notes"] = m.notes;
  j["metadata"] = meta;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["approach"] = row.approach;
    jr["stage"] = std::string(to_string(row.stage));
    jr["run_id"] = row.run_id;
    jr["metrics"] = metrics_to_json(row.metrics);
    jr["reference"] = row.reference ? metrics_to_json(*row.reference) : json(nullptr);
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  detail::check_schema(j, "report");
  if (j.value("kind", "") != "eval_report") throw ValidationError("report: not an evaluation report");
  try {
    EvalReport r;
    r.run_id = j.at("run_id").get<std::string>();
    const auto& meta = j.at("metadata");
    auto& m = r.metadata;
    m.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("data_seed").is_null()) m.data_seed = meta.at("data_seed").get<std::uint64_t>();
    m.n_prior_draws = meta.at("n_prior_draws").get<long>();
    m.n_posterior_draws = meta.at("n_posterior_draws").get<long>();
    m.n_train = meta.at("n_train").get<long>();
    m.n_test = meta.at("n_test").get<long>();
    m.n_iter = meta.at("n_iter").get<long>();
    if (!meta.at("ess_mean").is_null()) m.ess_mean = detail::real_from_json(meta.at("ess_mean"));
    if (!meta.at("ess_min").is_null()) m.ess_min = detail::real_from_json(meta.at("ess_min"));
    if (!meta.at("ess_passed").is_null()) m.ess_passed = meta.at("ess_passed").get<bool>();
    m.notes = meta.at("notes").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.approach = jr.at("approach").get<std::string>();
      row.stage = stage_from_string(jr.at("stage").get<std::string>());
      row.run_id = jr.at("run_id").get<std::string>();
      row.metrics = metrics_from_json(jr.at("metrics"));
      if (!jr.at("reference").is_null()) row.reference = metrics_from_json(jr.at("reference"));
      r.rows.push_back(row);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
}

EvalReport load_report(const std::filesystem::path& path) {
  try {
    return report_from_json(detail::read_json(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  detail::write_json(report_to_json(report), path);
}

std::vector<ReportRow> merge_reports(const std::vector<EvalReport>& reports) {
  std::map<std::pair<std::string, Stage>, std::vector<std::size_t>> owners;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const auto& row : reports[i].rows) {
      auto& v = owners[{row.approach, row.stage}];
      if (v.empty() || v.back() != i) v.push_back(i);
    }
  std::vector<ReportRow> out;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (ReportRow row : reports[i].rows) {
      if (owners[{row.approach, row.stage}].size() > 1) {
        row.approach += "@" + reports[i].run_id;
        // Same run id in two reports: fall back to the report position.
        for (std::size_t k = 0; k < reports.size(); ++k)
          if (k != i && reports[k].run_id == reports[i].run_id) {
            row.approach += "#" + std::to_string(i + 1);
            break;
          }
      }
      out.push_back(std::move(row));
    }
  return out;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "run_id,approach,stage";
  for (const char* n : kMetricNames) out << ',' << n;
  for (const char* n : kMetricNames) out << ",reference_" << n;
  out << '\n';
  for (const auto& row : rows) {
    const bool ols = row.stage == Stage::ols;
    out << row.run_id << ',' << row.approach << ',' << to_string(row.stage);
    const auto f = fields(row.metrics);
    for (std::size_t i = 0; i < f.size(); ++i) out << ',' << cell(*f[i], ols && i < 2);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::optional<double> v = row.reference ? *fields(*row.reference)[i] : std::nullopt;
      out << ',' << cell(v, ols && i < 2);
    }
    out << '\n';
  }
  return out.str();
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report_csv(rows);
}

// --- Plot data -----------------------------------------------------------

void write_summary_csv(const std::vector<PredictiveSummary>& summary, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "target,mean,median,lo,hi,count\n";
  for (const auto& s : summary)
    out << s.target << ',' << detail::format_real(s.mean) << ',' << detail::format_real(s.median) << ','
        << detail::format_real(s.lo) << ',' << detail::format_real(s.hi) << ',' << s.count << '\n';
}

void write_interval_csv(const std::vector<std::string>& labels, const VectorXd& nominal, const MatrixXd& prior,
                        const MatrixXd* posterior, const std::filesystem::path& path) {
  const auto cols = static_cast<Eigen::Index>(labels.size());
  if (prior.cols() != cols || (posterior && posterior->cols() != cols) || (nominal.size() != 0 && nominal.size() != cols))
    throw ContractViolation("write_interval_csv: column counts differ");
  auto out = open_out(path);
  out << "target,nominal,prior_mean,prior_lo,prior_hi";
  if (posterior) out << ",posterior_mean,posterior_lo,posterior_hi";
  out << '\n';
  for (Eigen::Index c = 0; c < cols; ++c) {
    out << labels[c] << ',' << (nominal.size() ? detail::format_real(nominal(c)) : "NA");
    for (const MatrixXd* m : {&prior, posterior}) {
      if (!m) continue;
      const auto s = column_summary(*m, c);
      out << ',' << detail::format_real(s.mean) << ',' << detail::format_real(s.lo) << ','
          << detail::format_real(s.hi);
    }
    out << '\n';
  }
}

std::vector<double> write_pdf_csv(const std::vector<std::string>& labels, const MatrixXd& prior,
                                  const MatrixXd& posterior, const std::filesystem::path& path, int n_bins) {
  const auto cols = static_cast<Eigen::Index>(labels.size());
  if (prior.cols() != cols || posterior.cols() != cols) throw ContractViolation("write_pdf_csv: column counts differ");
  if (n_bins < 2) throw ContractViolation("write_pdf_csv: need at least 2 bins");
  auto out = open_out(path);
  out << "target,bin_lo,bin_hi,prior_density,posterior_density\n";
  std::vector<double> distances;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const VectorXd a = prior.col(c), b = posterior.col(c);
    distances.push_back(tvd(a, b, n_bins));
    const double lo = std::min(a.minCoeff(), b.minCoeff());
    const double hi = std::max(a.maxCoeff(), b.maxCoeff());
    if (!(hi > lo)) {
      out << labels[c] << ',' << detail::format_real(lo) << ',' << detail::format_real(hi) << ",inf,inf\n";
      continue;
    }
    const double width = (hi - lo) / n_bins;
    const auto density = [&](const VectorXd& x) {
      VectorXd h = VectorXd::Zero(n_bins);
      for (double v : x) h(std::clamp(static_cast<int>((v - lo) / width), 0, n_bins - 1)) += 1.0;
      return VectorXd(h / (double(x.size()) * width));
    };
    const VectorXd pa = density(a), pb = density(b);
    for (int i = 0; i < n_bins; ++i)
      out << labels[c] << ',' << detail::format_real(lo + i * width) << ','
          << detail::format_real(lo + (i + 1) * width) << ',' << detail::format_real(pa(i)) << ','
          << detail::format_real(pb(i)) << '\n';
  }
  return distances;
}

MatrixXd predict_entries(const PredictiveDraws& draws, const RobotDescription& robot, const MeasurementDataset& data) {
  const MatrixXd Y = dataset_regressor(robot, data);
  MatrixXd out(draws.size(), Y.rows());
  for (Eigen::Index i = 0; i < draws.size(); ++i)
    out.row(i) = (Y * stack_inertial(robot, draws.params(i))).transpose();
  return out;
}

void write_sorted_inertia_csv(const MeasurementDataset& data, const MatrixXd& prior_x, const MatrixXd* posterior_x,
                              const std::filesystem::path& path) {
  const auto n = static_cast<Eigen::Index>(data.size());
  if (prior_x.cols() != n || (posterior_x && posterior_x->cols() != n))
    throw ContractViolation("write_sorted_inertia_csv: draws do not match the dataset");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return data.entries[a].inertia < data.entries[b].inertia; });
  auto out = open_out(path);
  out << "rank,entry,axis,measured,prior_mean,prior_lo,prior_hi";
  if (posterior_x) out << ",posterior_mean,posterior_lo,posterior_hi";
  out << '\n';
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Eigen::Index e = order[r];
    out << r + 1 << ',' << e + 1 << ',' << data.entries[e].axis << ',' << detail::format_real(data.entries[e].inertia);
    for (const MatrixXd* m : {&prior_x, posterior_x}) {
      if (!m) continue;
      const auto s = column_summary(*m, e);
      out << ',' << detail::format_real(s.mean) << ',' << detail::format_real(s.lo) << ','
          << detail::format_real(s.hi);
    }
    out << '\n';
  }
}

}  // namespace bayesid
