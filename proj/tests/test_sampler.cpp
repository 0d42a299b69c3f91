#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bayesid/errors.hpp"
#include "bayesid/sampler.hpp"

using namespace bayesid;

namespace {

// AR(1) with unit innovation variance.
VectorXd ar1(long n, double rho, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  VectorXd x(n);
  x(0) = z(rng) / std::sqrt(1 - rho * rho);
  for (long t = 1; t < n; ++t) x(t) = rho * x(t - 1) + z(rng);
  return x;
}

double std_normal(const VectorXd& x) { return -0.5 * x.squaredNorm(); }

}  // namespace

TEST_CASE("adaptive chain on a standard normal") {
  AdaptConfig cfg;
  Rng rng(1);
  const auto chain = metropolis_run(std_normal, VectorXd::Zero(2), 100000, cfg, rng);
  CHECK(chain.dim() == 2);
  CHECK(chain.burn_in == 20000);
  CHECK(chain.size() == 80000);
  for (int d = 0; d < 2; ++d) {
    const VectorXd x = chain.draws.col(d);
    const double m = x.mean();
    CHECK(std::abs(m) < 0.05);
    CHECK((x.array() - m).square().mean() == doctest::Approx(1.0).epsilon(0.1));
  }
  CHECK(chain.n_adaptations > 0);
  CHECK(chain.first_adaptation == cfg.adapt_start);
  CHECK(chain.acceptance_rate > 0.2);
  CHECK(chain.acceptance_rate < 0.8);
}

TEST_CASE("chains are reproducible from the seed") {
  AdaptConfig cfg;
  Rng a(5), b(5), c(6);
  const auto ca = metropolis_run(std_normal, VectorXd::Zero(3), 5000, cfg, a);
  const auto cb = metropolis_run(std_normal, VectorXd::Zero(3), 5000, cfg, b);
  const auto cc = metropolis_run(std_normal, VectorXd::Zero(3), 5000, cfg, c);
  CHECK(ca.draws == cb.draws);
  CHECK(ca.draws != cc.draws);
}

TEST_CASE("thinning and burn-in bookkeeping") {
  AdaptConfig cfg;
  cfg.burn_in = 100;
  cfg.thin = 7;
  Rng rng(2);
  const auto chain = metropolis_run(std_normal, VectorXd::Zero(1), 1000, cfg, rng);
  CHECK(chain.size() == (900 + 6) / 7);
  CHECK(chain.iteration(0) == 100);
  CHECK(chain.iteration(3) == 121);
}

TEST_CASE("acceptance rule follows the log-target difference") {
  // A flat target accepts every proposal; -inf away from the start rejects all.
  AdaptConfig cfg;
  cfg.adapt = false;
  Rng rng(3);
  const auto flat = metropolis_run([](const VectorXd&) { return 0.0; }, VectorXd::Zero(1), 2000, cfg, rng);
  CHECK(flat.acceptance_rate == 1.0);
  const auto stuck = metropolis_run(
      [](const VectorXd& x) { return x(0) == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity(); },
      VectorXd::Zero(1), 2000, cfg, rng);
  CHECK(stuck.acceptance_rate == 0.0);
  CHECK((stuck.draws.array() == 0.0).all());
}

TEST_CASE("non-finite start is an initialisation error") {
  AdaptConfig cfg;
  Rng rng(1);
  CHECK_THROWS_AS(metropolis_run([](const VectorXd&) { return std::nan(""); }, VectorXd::Zero(1), 10, cfg, rng),
                  InitializationError);
}

TEST_CASE("target acceptance tuning moves the scale") {
  AdaptConfig cfg;
  cfg.target_acceptance = 0.234;
  Rng rng(4);
  const auto chain = metropolis_run(std_normal, VectorXd::Zero(5), 50000, cfg, rng);
  CHECK(chain.acceptance_rate == doctest::Approx(0.234).epsilon(0.15));
  CHECK(chain.final_scale != doctest::Approx(cfg.resolved_scale(5)));
}

TEST_CASE("config validation") {
  AdaptConfig cfg;
  cfg.adapt_interval = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  AdaptConfig ok;
  CHECK(ok.resolved_burn_in(1000) == 200);
  CHECK(ok.resolved_scale(4) == doctest::Approx(2.38 * 2.38 / 4));
}

TEST_CASE("FFT autocovariance matches the direct sum") {
  const VectorXd x = ar1(500, 0.7, 9);
  const VectorXd seq = autocovariance_sequence(x);
  const double m = x.mean();
  for (long lag : {0L, 1L, 5L, 100L, 499L}) {
    double s = 0;
    for (long t = 0; t + lag < x.size(); ++t) s += (x(t) - m) * (x(t + lag) - m);
    CHECK(seq(lag) == doctest::Approx(s / x.size()).epsilon(1e-9).scale(1.0));
    CHECK(autocovariance(x, lag) == doctest::Approx(s / x.size()).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("ESS of AR(1) chains") {
  for (double rho : {0.0, 0.5, 0.9}) {
    const long n = 100000;
    const auto e = effective_sample_size(ar1(n, rho, 11));
    const double expected = n * (1 - rho) / (1 + rho);
    CHECK_FALSE(e.degenerate);
    CHECK(e.value == doctest::Approx(expected).epsilon(0.1));
  }
}

TEST_CASE("ESS edge cases") {
  CHECK(effective_sample_size(VectorXd::Constant(100, 2.0)).degenerate);
  CHECK_THROWS_AS(effective_sample_size(VectorXd::Zero(5)), ContractViolation);
}

TEST_CASE("ESS gate") {
  const auto r = check_ess_gate({150.0, 99.0, 400.0}, 100.0, {"a", "b", "c"});
  CHECK_FALSE(r.passed);
  REQUIRE(r.failing.size() == 1);
  CHECK(r.failing[0] == 1);
  CHECK(r.failing_names[0] == "b");
  CHECK(r.min_ess == 99.0);
  CHECK(r.mean_ess == doctest::Approx(649.0 / 3));
  CHECK(check_ess_gate({100.0, 101.0}, 100.0).passed);
}

TEST_CASE("chain CSV") {
  AdaptConfig cfg;
  cfg.burn_in = 0;
  Rng rng(1);
  const auto chain = metropolis_run(std_normal, VectorXd::Zero(2), 20, cfg, rng);
  const auto path = std::filesystem::temp_directory_path() / "bayesid_chain.csv";
  save_chain_csv(chain, {"x", "y"}, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,x,y,log_target");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 20);
}
