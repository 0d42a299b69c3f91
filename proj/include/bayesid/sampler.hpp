#pragma once

// Random-walk Metropolis with Haario-style covariance adaptation, plus the
// autocorrelation diagnostics used to judge a chain.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bayesid/types.hpp"

namespace bayesid {

struct AdaptConfig {
  /// Iterations discarded before storing draws; negative means 20% of n_iter.
  long burn_in = -1;
  /// First iteration at which the adapted covariance replaces the initial one.
  long adapt_start = 1000;
  /// Iterations between covariance recomputations.
  long adapt_interval = 100;
  double epsilon = 1e-6;
  /// Proposal scale factor; 0 means 2.38^2 / d.
  double scale = 0.0;
  /// Per-coordinate standard deviation of the initial proposal.
  double initial_step = 0.1;
  bool adapt = true;
  /// When > 0, the proposal scale is also tuned after adapt_start by a
  /// Robbins-Monro step towards this acceptance rate (diminishing gain).
  double target_acceptance = 0.0;
  /// Keep every thin-th post-burn-in draw.
  long thin = 1;
  double target_min_ess = 100.0;

  long resolved_burn_in(long n_iter) const { return burn_in < 0 ? n_iter / 5 : burn_in; }
  double resolved_scale(Eigen::Index d) const { return scale > 0.0 ? scale : 2.38 * 2.38 / double(d); }
  void validate() const;
};

struct ChainSamples {
  MatrixXd draws;        // stored draws, one per row
  VectorXd log_target;   // log-target of each stored draw
  double acceptance_rate = 0.0;  // over all iterations
  std::uint64_t seed = 0;
  long n_iter = 0;
  long burn_in = 0;
  long thin = 1;
  long n_adaptations = 0;  // covariance recomputations performed
  long first_adaptation = -1;
  double final_scale = 0.0;  // proposal scale factor at the end of the run

  Eigen::Index size() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }
  /// Iteration index of stored draw i.
  long iteration(Eigen::Index i) const { return burn_in + static_cast<long>(i) * thin; }
};

using LogTarget = std::function<double(const VectorXd&)>;

/// Runs the chain from `init`. A proposal is accepted when
/// log u < log_target(proposal) - log_target(current), u ~ U(0, 1).
/// Throws InitializationError if log_target(init) is not finite and
/// DiagnosticError if an adapted covariance fails its Cholesky factorisation.
ChainSamples metropolis_run(const LogTarget& log_target, const VectorXd& init, long n_iter,
                            const AdaptConfig& config, Rng& rng);

/// Biased estimator (1/N) sum_t (x_t - mean)(x_{t+lag} - mean).
double autocovariance(const VectorXd& x, long lag);
double autocovariance(const ChainSamples& chain, Eigen::Index param, long lag);

/// All lags 0..N-1 at once (FFT based).
VectorXd autocovariance_sequence(const VectorXd& x);

struct EssEstimate {
  double value = 0.0;
  bool degenerate = false;  // zero-variance chain
};

/// N / (1 + 2 sum rho_k) with the sum truncated by Geyer's initial positive
/// sequence of paired autocorrelations. Requires N >= 10.
EssEstimate effective_sample_size(const VectorXd& x);
EssEstimate effective_sample_size(const ChainSamples& chain, Eigen::Index param);

struct EssGateReport {
  bool passed = true;
  std::vector<double> ess;
  std::vector<Eigen::Index> failing;
  std::vector<std::string> failing_names;
  double mean_ess = 0.0;
  double min_ess = 0.0;
};

/// Fails every parameter whose ESS is below config.target_min_ess.
/// `names` labels the parameters in the report (optional).
EssGateReport check_ess_gate(const ChainSamples& chain, const AdaptConfig& config,
                             const std::vector<std::string>& names = {});
/// Same on precomputed ESS values.
EssGateReport check_ess_gate(const std::vector<double>& ess, double target_min_ess,
                             const std::vector<std::string>& names = {});

/// CSV with columns iteration, <names...>, log_target.
void save_chain_csv(const ChainSamples& chain, const std::vector<std::string>& names,
                    const std::filesystem::path& path);

}  // namespace bayesid
