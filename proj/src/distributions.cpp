#include "bayesid/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "bayesid/errors.hpp"

namespace bayesid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double std_normal_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// log(Phi(beta) - Phi(alpha)) evaluated in the tail where Phi is accurate.
double log_normal_mass(double alpha, double beta) {
  if (alpha > 0.0) {
    // Mirror into the lower tail.
    const double lo = -beta, hi = -alpha;
    alpha = lo;
    beta = hi;
  }
  const double mass = normal_cdf(beta) - normal_cdf(alpha);
  return std::log(mass);
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Uniform: return "Uniform";
    case DistributionKind::Normal: return "Normal";
    case DistributionKind::TruncNormal: return "TruncNormal";
    case DistributionKind::Lognormal: return "Lognormal";
    case DistributionKind::Point: return "Point";
  }
  return "?";
}

DistributionKind distribution_kind_from_string(std::string_view name) {
  if (name == "Uniform") return DistributionKind::Uniform;
  if (name == "Normal") return DistributionKind::Normal;
  if (name == "TruncNormal") return DistributionKind::TruncNormal;
  if (name == "Lognormal") return DistributionKind::Lognormal;
  if (name == "Point") return DistributionKind::Point;
  throw ContractViolation("unknown distribution kind \"" + std::string(name) + "\"");
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
  DistributionSpec s{DistributionKind::Uniform, 0.0, 0.0, a, b};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::normal(double mu, double sigma) {
  DistributionSpec s{DistributionKind::Normal, mu, sigma, -kInf, kInf};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::trunc_normal(double mu, double sigma, double a, double b) {
  DistributionSpec s{DistributionKind::TruncNormal, mu, sigma, a, b};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::lognormal(double log_mu, double log_sigma) {
  DistributionSpec s{DistributionKind::Lognormal, log_mu, log_sigma, 0.0, kInf};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::point(double value) {
  DistributionSpec s{DistributionKind::Point, value, 0.0, value, value};
  s.validate();
  return s;
}

DistributionSpec DistributionSpec::lognormal_from_moments(double mean, double stddev) {
  if (!(mean > 0.0) || !(stddev > 0.0))
    throw ContractViolation("lognormal_from_moments: mean and stddev must be > 0");
  const double s2 = std::log1p((stddev / mean) * (stddev / mean));
  return lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
}

void DistributionSpec::validate() const {
  const auto fail = [this](const char* why) {
    throw ContractViolation(std::string(to_string(kind)) + ": " + why);
  };
  switch (kind) {
    case DistributionKind::Uniform:
      if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) fail("requires finite a < b");
      break;
    case DistributionKind::Normal:
    case DistributionKind::Lognormal:
      if (!std::isfinite(mu)) fail("requires finite mu");
      if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("requires sigma > 0");
      break;
    case DistributionKind::TruncNormal:
      if (!std::isfinite(mu)) fail("requires finite mu");
      if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("requires sigma > 0");
      if (!(a < b)) fail("requires a < b");
      break;
    case DistributionKind::Point:
      if (!std::isfinite(mu)) fail("requires finite mu");
      break;
  }
}

double DistributionSpec::lower() const {
  switch (kind) {
    case DistributionKind::Uniform:
    case DistributionKind::TruncNormal: return a;
    case DistributionKind::Normal: return -kInf;
    case DistributionKind::Lognormal: return 0.0;
    case DistributionKind::Point: return mu;
  }
  return -kInf;
}

double DistributionSpec::upper() const {
  switch (kind) {
    case DistributionKind::Uniform:
    case DistributionKind::TruncNormal: return b;
    case DistributionKind::Point: return mu;
    default: return kInf;
  }
}

double DistributionSpec::mean() const {
  switch (kind) {
    case DistributionKind::Uniform: return 0.5 * (a + b);
    case DistributionKind::Normal:
    case DistributionKind::Point: return mu;
    case DistributionKind::Lognormal: return std::exp(mu + 0.5 * sigma * sigma);
    case DistributionKind::TruncNormal: {
      const double alpha = (a - mu) / sigma, beta = (b - mu) / sigma;
      const double pa = std::isfinite(alpha) ? std::exp(std_normal_log_pdf(alpha)) : 0.0;
      const double pb = std::isfinite(beta) ? std::exp(std_normal_log_pdf(beta)) : 0.0;
      return mu + sigma * (pa - pb) / std::exp(log_normal_mass(alpha, beta));
    }
  }
  return 0.0;
}

double DistributionSpec::stddev() const {
  switch (kind) {
    case DistributionKind::Uniform: return (b - a) / std::sqrt(12.0);
    case DistributionKind::Normal: return sigma;
    case DistributionKind::Point: return 0.0;
    case DistributionKind::Lognormal:
      return std::sqrt(std::expm1(sigma * sigma)) * std::exp(mu + 0.5 * sigma * sigma);
    case DistributionKind::TruncNormal: {
      const double alpha = (a - mu) / sigma, beta = (b - mu) / sigma;
      const double Z = std::exp(log_normal_mass(alpha, beta));
      const double pa = std::isfinite(alpha) ? std::exp(std_normal_log_pdf(alpha)) : 0.0;
      const double pb = std::isfinite(beta) ? std::exp(std_normal_log_pdf(beta)) : 0.0;
      const double ta = std::isfinite(alpha) ? alpha * pa : 0.0;
      const double tb = std::isfinite(beta) ? beta * pb : 0.0;
      const double r = (pa - pb) / Z;
      const double var = sigma * sigma * (1.0 + (ta - tb) / Z - r * r);
      return std::sqrt(std::max(var, 0.0));
    }
  }
  return 0.0;
}

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_pdf(const DistributionSpec& spec, double x) {
  spec.validate();
  if (std::isnan(x)) return -kInf;
  switch (spec.kind) {
    case DistributionKind::Uniform:
      if (x < spec.a || x > spec.b) return -kInf;
      return -std::log(spec.b - spec.a);
    case DistributionKind::Normal:
      return std_normal_log_pdf((x - spec.mu) / spec.sigma) - std::log(spec.sigma);
    case DistributionKind::TruncNormal: {
      if (x < spec.a || x > spec.b) return -kInf;
      const double alpha = (spec.a - spec.mu) / spec.sigma;
      const double beta = (spec.b - spec.mu) / spec.sigma;
      return std_normal_log_pdf((x - spec.mu) / spec.sigma) - std::log(spec.sigma) -
             log_normal_mass(alpha, beta);
    }
    case DistributionKind::Lognormal: {
      if (!(x > 0.0)) return -kInf;
      const double lx = std::log(x);
      return std_normal_log_pdf((lx - spec.mu) / spec.sigma) - std::log(spec.sigma) - lx;
    }
    case DistributionKind::Point:
      // Coordinate changes (spherical CoM) cost a few ulps.
      return std::abs(x - spec.mu) <= 1e-12 * std::max(1.0, std::abs(spec.mu)) ? 0.0 : -kInf;
  }
  return -kInf;
}

double sample(const DistributionSpec& spec, Rng& rng) {
  spec.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (spec.kind) {
    case DistributionKind::Uniform: {
      const double x = spec.a + (spec.b - spec.a) * unit(rng);
      return std::clamp(x, spec.a, spec.b);
    }
    case DistributionKind::Normal: {
      std::normal_distribution<double> normal(spec.mu, spec.sigma);
      return normal(rng);
    }
    case DistributionKind::Lognormal: {
      std::normal_distribution<double> normal(spec.mu, spec.sigma);
      return std::exp(normal(rng));
    }
    case DistributionKind::TruncNormal: {
      double alpha = (spec.a - spec.mu) / spec.sigma;
      double beta = (spec.b - spec.mu) / spec.sigma;
      const bool mirrored = alpha > 0.0;
      if (mirrored) {
        const double lo = -beta;
        beta = -alpha;
        alpha = lo;
      }
      const double pa = normal_cdf(alpha), pb = normal_cdf(beta);
      double z;
      if (pb - pa > 0.0) {
        z = normal_quantile(pa + (pb - pa) * unit(rng));
      } else {
        // Both bounds beyond double precision of Phi: the mass concentrates
        // at the bound nearest the mode.
        z = beta;
      }
      z = std::clamp(z, alpha, beta);
      if (mirrored) z = -z;
      return std::clamp(spec.mu + spec.sigma * z, spec.a, spec.b);
    }
    case DistributionKind::Point: return spec.mu;
  }
  return 0.0;
}

}  // namespace bayesid
