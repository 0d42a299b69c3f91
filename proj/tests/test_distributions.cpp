#include <doctest.h>

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bayesid/distributions.hpp"
#include "bayesid/errors.hpp"

using namespace bayesid;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate(const DistributionSpec& s, double lo, double hi, int power = 0) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double x) { return std::pow(x, power) * std::exp(log_pdf(s, x)); };
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

// Sample mean and variance of n draws.
std::pair<double, double> sample_moments(const DistributionSpec& s, int n, std::uint64_t seed) {
  Rng rng(seed);
  double m = 0, m2 = 0;
  for (int i = 1; i <= n; ++i) {
    const double x = sample(s, rng);
    const double d = x - m;
    m += d / i;
    m2 += d * (x - m);
  }
  return {m, m2 / (n - 1)};
}

}  // namespace

TEST_CASE("densities integrate to one") {
  CHECK(integrate(DistributionSpec::uniform(-1, 3), -1, 3) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate(DistributionSpec::normal(2, 0.5), -kInf, kInf) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate(DistributionSpec::trunc_normal(25.99, 26.62, 0, 1050), 0, 1050) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(integrate(DistributionSpec::trunc_normal(0.05, 0.05, 1e-4, 1), 1e-4, 1) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(integrate(DistributionSpec::trunc_normal(1, 1, 5, 8), 5, 8) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(integrate(DistributionSpec::lognormal(0.3, 0.7), 0, kInf) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated normal density matches the boost normal ratio") {
  const auto s = DistributionSpec::trunc_normal(1.0, 2.0, -0.5, 4.0);
  const boost::math::normal_distribution<double> n(1.0, 2.0);
  const double mass = boost::math::cdf(n, 4.0) - boost::math::cdf(n, -0.5);
  for (double x : {-0.5, 0.0, 1.7, 3.99})
    CHECK(std::exp(log_pdf(s, x)) == doctest::Approx(boost::math::pdf(n, x) / mass).epsilon(1e-12));
  CHECK(log_pdf(s, -0.51) == -kInf);
  CHECK(log_pdf(s, 4.01) == -kInf);
}

TEST_CASE("analytic moments agree with quadrature") {
  for (const auto& s : {DistributionSpec::trunc_normal(25.99, 26.62, 0, 1050),
                        DistributionSpec::trunc_normal(217.16, 217.16, 217.16, 434.32),
                        DistributionSpec::trunc_normal(0.05, 0.05, 1e-4, 1)}) {
    const double m = integrate(s, s.a, s.b, 1);
    const double v = integrate(s, s.a, s.b, 2) - m * m;
    CHECK(s.mean() == doctest::Approx(m).epsilon(1e-8));
    CHECK(s.stddev() == doctest::Approx(std::sqrt(v)).epsilon(1e-8));
  }
  const auto ln = DistributionSpec::lognormal(0.3, 0.7);
  const double m = integrate(ln, 0, kInf, 1);
  CHECK(ln.mean() == doctest::Approx(m).epsilon(1e-8));
}

TEST_CASE("samples follow the declared moments") {
  for (const auto& s : {DistributionSpec::uniform(2, 5), DistributionSpec::normal(-1, 3),
                        DistributionSpec::trunc_normal(25.99, 26.62, 0, 1050),
                        DistributionSpec::trunc_normal(0, 1, 4, 6),  // far tail
                        DistributionSpec::lognormal(0.1, 0.4)}) {
    const auto [m, v] = sample_moments(s, 200000, 7);
    CHECK(m == doctest::Approx(s.mean()).epsilon(0.01).scale(s.stddev()));
    CHECK(std::sqrt(v) == doctest::Approx(s.stddev()).epsilon(0.02));
  }
}

TEST_CASE("far-tail truncated draws stay inside the bounds") {
  const auto s = DistributionSpec::trunc_normal(0, 1, 9, 9.5);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample(s, rng);
    CHECK(x >= 9.0);
    CHECK(x <= 9.5);
  }
}

TEST_CASE("lognormal from physical moments") {
  const auto s = DistributionSpec::lognormal_from_moments(2.0, 0.5);
  CHECK(s.mean() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.stddev() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(DistributionSpec::lognormal_from_moments(0.0, 1.0), ContractViolation);
}

TEST_CASE("point mass") {
  const auto s = DistributionSpec::point(1.5);
  CHECK(log_pdf(s, 1.5) == 0.0);
  CHECK(log_pdf(s, 1.5000001) == -kInf);
  Rng rng(1);
  CHECK(sample(s, rng) == 1.5);
  CHECK(s.stddev() == 0.0);
  CHECK(to_string(s.kind) == "Point");
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(DistributionSpec::uniform(1, 1), ContractViolation);
  CHECK_THROWS_AS(DistributionSpec::normal(0, 0), ContractViolation);
  CHECK_THROWS_AS(DistributionSpec::trunc_normal(0, 1, 2, 1), ContractViolation);
  CHECK_THROWS_AS(distribution_kind_from_string("Cauchy"), Error);
  CHECK(distribution_kind_from_string("TruncNormal") == DistributionKind::TruncNormal);
}

TEST_CASE("normal cdf and quantile are inverse") {
  for (double p : {1e-12, 0.025, 0.5, 0.9, 1 - 1e-10})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}
