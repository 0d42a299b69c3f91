#include "bayesid/sampler.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include "bayesid/errors.hpp"
#include "csv.hpp"

namespace bayesid {

void AdaptConfig::validate() const {
  if (adapt_start < 1) throw ContractViolation("adapt_start must be >= 1");
  if (adapt_interval < 1) throw ContractViolation("adapt_interval must be >= 1");
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be > 0");
  if (!(initial_step >= 0.0)) throw ContractViolation("initial_step must be >= 0");
  if (scale < 0.0) throw ContractViolation("scale must be >= 0");
  if (thin < 1) throw ContractViolation("thin must be >= 1");
  if (!(target_acceptance >= 0.0 && target_acceptance < 1.0))
    throw ContractViolation("target_acceptance must be in [0, 1)");
}

namespace {

// Running mean and scatter of the chain history (Welford).
class RunningMoments {
 public:
  explicit RunningMoments(Eigen::Index d) : mean_(VectorXd::Zero(d)), scatter_(MatrixXd::Zero(d, d)) {}

  void push(const VectorXd& x) {
    ++n_;
    const VectorXd delta = x - mean_;
    mean_ += delta / double(n_);
    scatter_.noalias() += delta * (x - mean_).transpose();
  }

  MatrixXd covariance() const { return n_ > 1 ? MatrixXd(scatter_ / double(n_ - 1)) : MatrixXd(scatter_ * 0.0); }
  long count() const { return n_; }

 private:
  long n_ = 0;
  VectorXd mean_;
  MatrixXd scatter_;
};

}  // namespace

ChainSamples metropolis_run(const LogTarget& log_target, const VectorXd& init, long n_iter,
                            const AdaptConfig& config, Rng& rng) {
  config.validate();
  if (n_iter < 1) throw ContractViolation("metropolis_run: n_iter must be >= 1");
  const Eigen::Index d = init.size();
  if (d < 1) throw ContractViolation("metropolis_run: empty state");
  const long burn_in = config.resolved_burn_in(n_iter);
  if (burn_in >= n_iter) throw ContractViolation("metropolis_run: burn-in must be shorter than the chain");

  VectorXd x = init;
  double lx = log_target(x);
  if (!std::isfinite(lx)) throw InitializationError("metropolis_run: initial state has non-finite log-target");

  ChainSamples out;
  out.n_iter = n_iter;
  out.burn_in = burn_in;
  out.thin = config.thin;
  const long n_store = (n_iter - burn_in + config.thin - 1) / config.thin;
  out.draws.resize(n_store, d);
  out.log_target.resize(n_store);

  MatrixXd L = MatrixXd::Identity(d, d) * config.initial_step;
  MatrixXd L_unit;  // Cholesky factor of the adapted covariance without the scale
  double log_scale = std::log(config.resolved_scale(d));
  RunningMoments moments(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VectorXd z(d), proposal(d);
  long accepted = 0, stored = 0;

  for (long t = 0; t < n_iter; ++t) {
    if (config.adapt && t >= config.adapt_start && (t - config.adapt_start) % config.adapt_interval == 0) {
      MatrixXd cov = moments.covariance() + config.epsilon * MatrixXd::Identity(d, d);
      Eigen::LLT<MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success)
        throw DiagnosticError("adaptive proposal covariance is not positive definite at iteration " +
                              std::to_string(t));
      L_unit = llt.matrixL();
      L = std::exp(0.5 * log_scale) * L_unit;
      if (out.first_adaptation < 0) out.first_adaptation = t;
      ++out.n_adaptations;
    }

    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
    proposal.noalias() = x + L.triangularView<Eigen::Lower>() * z;
    const double lp = log_target(proposal);
    const double u = unit(rng);
    const bool accept = std::isfinite(lp) && std::log(u) < lp - lx;
    if (accept) {
      x = proposal;
      lx = lp;
      ++accepted;
    }
    if (config.target_acceptance > 0.0 && L_unit.size() > 0) {
      const double gain = std::pow(double(t - config.adapt_start + 1), -0.6);
      log_scale += gain * ((accept ? 1.0 : 0.0) - config.target_acceptance);
      L = std::exp(0.5 * log_scale) * L_unit;
    }
    moments.push(x);

    if (t >= burn_in && (t - burn_in) % config.thin == 0) {
      out.draws.row(stored) = x.transpose();
      out.log_target(stored) = lx;
      ++stored;
    }
  }
  out.acceptance_rate = double(accepted) / double(n_iter);
  out.final_scale = std::exp(log_scale);
  return out;
}

double autocovariance(const VectorXd& x, long lag) {
  const Eigen::Index n = x.size();
  if (lag < 0 || lag >= n) throw ContractViolation("autocovariance: lag must be in [0, N)");
  const double mean = x.mean();
  double s = 0.0;
  for (Eigen::Index t = 0; t + lag < n; ++t) s += (x(t) - mean) * (x(t + lag) - mean);
  return s / double(n);
}

double autocovariance(const ChainSamples& chain, Eigen::Index param, long lag) {
  if (param < 0 || param >= chain.dim()) throw ContractViolation("autocovariance: parameter index out of range");
  return autocovariance(VectorXd(chain.draws.col(param)), lag);
}

VectorXd autocovariance_sequence(const VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 1) throw ContractViolation("autocovariance_sequence: empty chain");
  Eigen::Index m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  const double mean = x.mean();
  for (Eigen::Index t = 0; t < n; ++t) padded[t] = x(t) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (auto& c : spec) c = std::norm(c);
  std::vector<double> acf;
  fft.inv(acf, spec);
  VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = acf[k] / double(n);
  return out;
}

EssEstimate effective_sample_size(const VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 10) throw ContractViolation("effective_sample_size: need at least 10 draws");
  const VectorXd acov = autocovariance_sequence(x);
  const double var = acov(0);
  const double spread = (x.array() - x.mean()).abs().maxCoeff();
  if (!(var > 0.0) || spread <= 1e-14 * std::max(1.0, std::abs(x.mean()))) return {0.0, true};

  // Paired sums Gamma_k = rho_{2k} + rho_{2k+1}, summed while positive.
  double tau = -1.0;
  for (Eigen::Index k = 0; 2 * k + 1 < n; ++k) {
    const double gamma = (acov(2 * k) + acov(2 * k + 1)) / var;
    if (!(gamma > 0.0)) break;
    tau += 2.0 * gamma;
  }
  // Antithetic chains can push tau towards zero; cap ESS at N log10(N).
  tau = std::max(tau, 1.0 / std::log10(double(n)));
  return {double(n) / tau, false};
}

EssEstimate effective_sample_size(const ChainSamples& chain, Eigen::Index param) {
  if (param < 0 || param >= chain.dim()) throw ContractViolation("effective_sample_size: parameter index out of range");
  return effective_sample_size(VectorXd(chain.draws.col(param)));
}

EssGateReport check_ess_gate(const std::vector<double>& ess, double target_min_ess,
                             const std::vector<std::string>& names) {
  EssGateReport r;
  r.ess = ess;
  if (ess.empty()) return r;
  double sum = 0.0;
  r.min_ess = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ess.size(); ++i) {
    sum += ess[i];
    r.min_ess = std::min(r.min_ess, ess[i]);
    if (ess[i] < target_min_ess) {
      r.failing.push_back(static_cast<Eigen::Index>(i));
      r.failing_names.push_back(i < names.size() ? names[i] : "param" + std::to_string(i));
    }
  }
  r.mean_ess = sum / double(ess.size());
  r.passed = r.failing.empty();
  return r;
}

EssGateReport check_ess_gate(const ChainSamples& chain, const AdaptConfig& config,
                             const std::vector<std::string>& names) {
  std::vector<double> ess;
  for (Eigen::Index p = 0; p < chain.dim(); ++p) ess.push_back(effective_sample_size(chain, p).value);
  return check_ess_gate(ess, config.target_min_ess, names);
}

void save_chain_csv(const ChainSamples& chain, const std::vector<std::string>& names,
                    const std::filesystem::path& path) {
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != chain.dim())
    throw ContractViolation("save_chain_csv: name count does not match the chain dimension");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "iteration";
  for (Eigen::Index p = 0; p < chain.dim(); ++p)
    out << ',' << (names.empty() ? "x" + std::to_string(p) : names[p]);
  out << ",log_target\n";
  for (Eigen::Index i = 0; i < chain.size(); ++i) {
    out << chain.iteration(i);
    for (Eigen::Index p = 0; p < chain.dim(); ++p) out << ',' << detail::format_real(chain.draws(i, p));
    out << ',' << detail::format_real(chain.log_target(i)) << '\n';
  }
}

}  // namespace bayesid
