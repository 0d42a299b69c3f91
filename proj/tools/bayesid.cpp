// bayesid command-line front end.
//
// Exit codes: 0 ok, 2 usage or validation error, 3 infeasible catalog or
// failed initialisation, 4 diagnostics gate failure (artifacts still written).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayesid/base_params.hpp"
#include "bayesid/bundled.hpp"
#include "bayesid/data.hpp"
#include "bayesid/dynamics.hpp"
#include "bayesid/errors.hpp"
#include "bayesid/inference.hpp"
#include "bayesid/metrics.hpp"
#include "bayesid/priors.hpp"
#include "bayesid/report.hpp"
#include "bayesid/robot.hpp"

namespace fs = std::filesystem;
using namespace bayesid;

namespace {

constexpr int kExitOk = 0, kExitUsage = 2, kExitInfeasible = 3, kExitDiagnostics = 4;

struct Options {
  std::string robot, prior, catalog, data, test, truth, cad, donors, out, run_id, space = "mechanical";
  std::vector<std::string> reports;
  long iters = 200000, burn_in = -1, n_samples = 10000, n = 147, n_train = 0, n_poses = 10;
  std::uint64_t seed = 0;
  double noise_c = 0.02, cad_spread = 0.1, target_acceptance = 0.0;
  bool allow_empty = false;
};

RobotDescription resolve_robot(const Options& o) {
  RobotDescription r = o.robot.empty() ? bundled_robot() : load_robot(o.robot);
  r.validate();
  return r;
}

RobotParams resolve_cad(const Options& o) { return o.cad.empty() ? bundled_cad_params() : load_params(o.cad); }

PriorCatalog resolve_catalog(const Options& o, const RobotDescription& robot) {
  if (!o.catalog.empty()) {
    if (!o.prior.empty()) throw ValidationError("give either --prior or --catalog, not both");
    PriorCatalog c = load_catalog(o.catalog);
    if (c.n_links() != robot.n_joints()) throw ValidationError("catalog does not match the robot");
    return c;
  }
  if (o.prior.empty()) throw ValidationError("one of --prior or --catalog is required");
  const PriorType type = prior_type_from_string(o.prior);
  PriorInputs in;
  in.cad_spread = o.cad_spread;
  if (type == PriorType::cad) in.cad = resolve_cad(o);
  if (type == PriorType::empirical) {
    if (!o.donors.empty()) {
      in.empirical = empirical_prior_from_cad(load_donor_csv(o.donors), robot.total_mass, robot.nominal_rotor_inertias());
      for (const auto& w : in.empirical->warnings) std::cerr << "warning: " << w << '\n';
    } else {
      in.empirical = bundled_empirical_table();
    }
  }
  return build_prior(type, robot, in);
}

fs::path output_dir(const Options& o) {
  if (o.out.empty()) throw ValidationError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

std::string prior_label(const PriorCatalog& c) { return std::string(to_string(c.type)); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

// --- gen -----------------------------------------------------------------

int cmd_gen(const Options& o) {
  if (o.truth.empty()) throw ValidationError("gen: --truth is required");
  const RobotDescription robot = resolve_robot(o);
  const RobotParams truth = load_params(o.truth);
  SyntheticConfig cfg;
  cfg.n_poses = static_cast<int>(o.n);
  cfg.noise_c = o.noise_c;
  Rng rng(o.seed);
  const MeasurementDataset ds = generate_synthetic(robot, truth, cfg, rng);
  const fs::path dir = output_dir(o);
  save_dataset(ds, dir / "dataset.csv");
  if (o.n_train > 0) {
    const auto [train, test] = split(ds, static_cast<std::size_t>(o.n_train), o.seed);
    save_dataset(train, dir / "train.csv");
    save_dataset(test, dir / "test.csv");
  }
  std::cout << "wrote " << ds.size() << " measurements to " << (dir / "dataset.csv").string() << '\n';
  return kExitOk;
}

// --- zero-shot -----------------------------------------------------------

int cmd_zero_shot(const Options& o) {
  const RobotDescription robot = resolve_robot(o);
  const PriorCatalog catalog = resolve_catalog(o, robot);
  const BaseParamMap map = extract_base_params(robot);
  PoseList poses;
  if (!o.data.empty()) {
    poses = load_dataset(o.data).unique_poses();
  } else {
    Rng rng(o.seed);
    poses = random_poses(robot, static_cast<int>(o.n_poses), rng);
  }
  const fs::path dir = output_dir(o);
  const ZeroShotResult zs = zero_shot_predict(catalog, robot, map, poses, o.n_samples, o.seed);

  VectorXd nominal_mp, nominal_bp;
  if (!o.truth.empty()) {
    const RobotParams truth = load_params(o.truth);
    nominal_mp = flatten_mechanical(truth);
    nominal_bp = base_param_values(map, stack_inertial(robot, truth));
  }
  const auto& d = zs.draws;
  write_interval_csv(d.mp_labels, nominal_mp, d.mp, nullptr, dir / "mp_intervals.csv");
  write_interval_csv(d.bp_labels, nominal_bp, d.bp, nullptr, dir / "bp_intervals.csv");
  write_interval_csv(d.x_labels, VectorXd(), d.x, nullptr, dir / "x_intervals.csv");
  write_summary_csv(summarize(d.mp, d.mp_labels), dir / "mp_summary.csv");
  write_summary_csv(summarize(d.bp, d.bp_labels), dir / "bp_summary.csv");
  write_summary_csv(summarize(d.x, d.x_labels), dir / "x_summary.csv");

  nlohmann::json meta;
  meta["prior"] = prior_label(catalog);
  meta["seed"] = o.seed;
  meta["n_samples"] = o.n_samples;
  meta["n_poses"] = poses.size();
  meta["method"] = zs.method;
  meta["attempts"] = zs.attempts;
  meta["rejection_rate"] = zs.rejection_rate;
  write_text(dir / "zero_shot.json", meta.dump(2) + "\n");
  std::cout << "zero-shot: " << o.n_samples << " draws (" << zs.method << ", rejection rate "
            << zs.rejection_rate << ")\n";
  return kExitOk;
}

// --- infer ---------------------------------------------------------------

int cmd_infer(const Options& o) {
  const RobotDescription robot = resolve_robot(o);
  const PriorCatalog catalog = resolve_catalog(o, robot);
  const BaseParamMap map = extract_base_params(robot);

  MeasurementDataset train, test;
  if (o.data.empty()) {
    if (!o.allow_empty) throw ValidationError("infer: --data is required (or pass --allow-empty)");
  } else {
    train = load_dataset(o.data);
    train.validate(robot.n_joints());
  }
  if (!o.test.empty()) {
    test = load_dataset(o.test);
    test.validate(robot.n_joints());
  }
  const MeasurementDataset& eval = test.empty() ? train : test;

  const fs::path dir = output_dir(o);
  InferenceConfig cfg;
  cfg.n_iter = o.iters;
  cfg.adapt.burn_in = o.burn_in;
  cfg.adapt.target_acceptance = o.target_acceptance;
  cfg.seed = o.seed;
  cfg.space = sampling_space_from_string(o.space);
  cfg.summary_poses = eval.unique_poses();
  const InferenceResult res = infer(train, catalog, robot, map, cfg);
  const ZeroShotResult prior = zero_shot_predict(catalog, robot, map, cfg.summary_poses, o.n_samples, o.seed);

  save_chain_csv(res.chain, res.coordinate_labels, dir / "chain.csv");

  ReportMetadata meta;
  meta.seed = o.seed;
  meta.n_prior_draws = prior.draws.size();
  meta.n_posterior_draws = res.draws.size();
  meta.n_train = static_cast<long>(train.size());
  meta.n_test = static_cast<long>(test.size());
  meta.n_iter = o.iters;
  if (!res.ess.ess.empty()) {
    meta.ess_mean = res.ess.mean_ess;
    meta.ess_min = res.ess.min_ess;
    meta.ess_passed = res.ess.passed;
  }
  if (!res.all_feasible) meta.notes.push_back("some posterior draws failed the feasibility check");

  RobotParams nominal;
  if (!o.truth.empty()) {
    nominal = load_params(o.truth);
  } else {
    nominal = resolve_cad(o);
    meta.notes.push_back("no --truth given; metrics are relative to the CAD parameters");
  }
  std::optional<OlsResult> ols;
  if (!train.empty()) {
    try {
      ols = ols_fit(robot, train, map);
    } catch (const RankDeficientError& e) {
      meta.notes.push_back(std::string("OLS skipped: ") + e.what());
    }
  }

  ReportInputs in;
  in.run_id = o.run_id.empty() ? prior_label(catalog) + "-seed" + std::to_string(o.seed) : o.run_id;
  in.approaches.push_back({catalog.type, &prior.draws, &res.draws});
  in.ols = ols ? &*ols : nullptr;
  in.nominal = nominal;
  in.train = train;
  in.test = test;
  in.metadata = meta;
  const EvalReport report = build_report(in, robot, map);
  save_report(report, dir / "report.json");
  write_report_csv(report.rows, dir / "report.csv");

  const VectorXd nominal_mp = flatten_mechanical(nominal);
  const VectorXd nominal_bp = base_param_values(map, stack_inertial(robot, nominal));
  const auto& post = res.draws;
  write_summary_csv(summarize(post.mp, post.mp_labels), dir / "posterior_mp.csv");
  write_summary_csv(summarize(post.bp, post.bp_labels), dir / "posterior_bp.csv");
  write_interval_csv(post.mp_labels, nominal_mp, prior.draws.mp, &post.mp, dir / "mp_intervals.csv");
  write_interval_csv(post.bp_labels, nominal_bp, prior.draws.bp, &post.bp, dir / "bp_intervals.csv");
  write_pdf_csv(post.mp_labels, prior.draws.mp, post.mp, dir / "mp_pdf.csv");
  if (!eval.empty()) {
    write_summary_csv(summarize(post.x, post.x_labels), dir / "posterior_x.csv");
    const MatrixXd prior_x = predict_entries(prior.draws, robot, eval);
    const MatrixXd post_x = predict_entries(post, robot, eval);
    write_sorted_inertia_csv(eval, prior_x, &post_x, dir / "inertia_sorted.csv");
  }

  const fs::path marker = dir / "FAILED_ESS";
  if (!res.ess.ess.empty() && !res.ess.passed) {
    std::string text = "ESS below " + std::to_string(cfg.adapt.target_min_ess) + " for:\n";
    for (std::size_t i = 0; i < res.ess.failing.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f", res.ess.ess[res.ess.failing[i]]);
      text += res.ess.failing_names[i] + " " + buf + "\n";
    }
    write_text(marker, text);
    std::cerr << "ESS gate failed for " << res.ess.failing.size() << " of " << res.ess.ess.size()
              << " coordinates (min " << res.ess.min_ess << "); see " << marker.string() << '\n';
    return kExitDiagnostics;
  }
  fs::remove(marker);
  std::cout << "infer: acceptance " << res.chain.acceptance_rate << ", " << res.draws.size() << " stored draws\n";
  return kExitOk;
}

// --- evaluate ------------------------------------------------------------

int cmd_evaluate(const Options& o) {
  if (o.reports.empty()) throw ValidationError("evaluate: at least one report is required");
  std::vector<EvalReport> reports;
  for (const auto& p : o.reports) reports.push_back(load_report(p));
  const auto rows = merge_reports(reports);
  if (o.out.empty()) {
    std::cout << report_csv(rows);
  } else {
    const fs::path dir = output_dir(o);
    write_report_csv(rows, dir / "table.csv");
    std::cout << "wrote " << rows.size() << " rows to " << (dir / "table.csv").string() << '\n';
  }
  return kExitOk;
}

// --- export-bundled ------------------------------------------------------

int cmd_export_bundled(const Options& o) {
  const fs::path dir = output_dir(o);
  const RobotDescription robot = bundled_robot();
  save_robot(robot, dir / "robot.json");
  save_params(bundled_cad_params(), dir / "cad.json");
  save_params(bundled_truth_params(), dir / "truth.json");
  PriorInputs in;
  in.cad = bundled_cad_params();
  in.cad_spread = o.cad_spread;
  in.empirical = bundled_empirical_table();
  for (PriorType t : {PriorType::diffuse, PriorType::informed_diffuse, PriorType::empirical, PriorType::cad})
    save_catalog(build_prior(t, robot, in), dir / ("catalog_" + std::string(to_string(t)) + ".json"));
  std::cout << "wrote bundled robot, parameters and catalogs to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian identification of robot inertia parameters"};
  app.require_subcommand(1);
  Options o;

  const auto add_robot = [&](CLI::App* c) { c->add_option("--robot", o.robot, "Robot JSON (default: bundled robot)"); };
  const auto add_prior = [&](CLI::App* c) {
    c->add_option("--prior", o.prior, "diffuse, informed, empirical or cad");
    c->add_option("--catalog", o.catalog, "Prior catalog JSON");
    c->add_option("--cad", o.cad, "CAD parameter JSON for the cad prior");
    c->add_option("--cad-spread", o.cad_spread, "Relative spread of the cad prior");
    c->add_option("--donors", o.donors, "Donor CAD CSV for the empirical prior");
  };
  const auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--out", o.out, "Output directory");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic measurement dataset");
  add_robot(gen);
  add_common(gen);
  gen->add_option("--truth", o.truth, "Ground-truth parameter JSON");
  gen->add_option("--n", o.n, "Number of poses");
  gen->add_option("--noise-c", o.noise_c, "Proportional noise coefficient");
  gen->add_option("--n-train", o.n_train, "Also write a train/test split with this many training poses");

  auto* zero = app.add_subcommand("zero-shot", "Prior predictive intervals without measurements");
  add_robot(zero);
  add_prior(zero);
  add_common(zero);
  zero->add_option("--n-samples", o.n_samples, "Number of prior draws");
  zero->add_option("--data", o.data, "Dataset whose poses are predicted");
  zero->add_option("--n-poses", o.n_poses, "Random poses to predict when no dataset is given");
  zero->add_option("--truth", o.truth, "Reference parameters for the interval files");

  auto* inf = app.add_subcommand("infer", "Posterior sampling from measurements");
  add_robot(inf);
  add_prior(inf);
  add_common(inf);
  inf->add_option("--data", o.data, "Training dataset CSV");
  inf->add_option("--test", o.test, "Held-out dataset CSV");
  inf->add_option("--truth", o.truth, "Reference parameters for the report (default: CAD)");
  inf->add_option("--iters", o.iters, "Chain length");
  inf->add_option("--burn-in", o.burn_in, "Burn-in iterations (default: 20%)");
  inf->add_option("--n-samples", o.n_samples, "Prior draws for the prior row");
  inf->add_option("--space", o.space, "Sampling space: mechanical or inertial");
  inf->add_option("--target-acceptance", o.target_acceptance, "Tune the proposal scale to this acceptance rate");
  inf->add_option("--run-id", o.run_id, "Run identifier stored in the report");
  inf->add_flag("--allow-empty", o.allow_empty, "Run without measurements (posterior equals prior)");

  auto* eval = app.add_subcommand("evaluate", "Merge reports into one comparison table");
  eval->add_option("reports", o.reports, "Report JSON files");
  eval->add_option("--out", o.out, "Output directory (default: stdout)");

  auto* exp = app.add_subcommand("export-bundled", "Write the bundled robot, parameters and catalogs");
  exp->add_option("--out", o.out, "Output directory");
  exp->add_option("--cad-spread", o.cad_spread, "Relative spread of the cad catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o);
    if (zero->parsed()) return cmd_zero_shot(o);
    if (inf->parsed()) return cmd_infer(o);
    if (eval->parsed()) return cmd_evaluate(o);
    if (exp->parsed()) return cmd_export_bundled(o);
  } catch (const InfeasibleCatalogError& e) {
    std::cerr << "error: " << e.what() << " (rejection rate " << e.rejection_rate() << ")\n";
    return kExitInfeasible;
  } catch (const InitializationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DiagnosticError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiagnostics;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
