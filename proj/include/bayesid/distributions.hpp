#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "bayesid/types.hpp"

namespace bayesid {

enum class DistributionKind { Uniform, Normal, TruncNormal, Lognormal, Point };

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view name);

/// One-dimensional prior family.
///
/// Uniform(a, b); Normal(mu, sigma); TruncNormal(mu, sigma, a, b) normalised
/// on [a, b]; Lognormal(mu, sigma) with mu, sigma on the log scale. Fields a
/// and b are unused by Normal and Lognormal. Point(mu) is a point mass used
/// for degenerate catalogs; its log_pdf is 0 at mu and -infinity elsewhere.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::Uniform;
  double mu = 0.0;
  double sigma = 1.0;
  double a = 0.0;
  double b = 1.0;

  static DistributionSpec uniform(double a, double b);
  static DistributionSpec normal(double mu, double sigma);
  static DistributionSpec trunc_normal(double mu, double sigma, double a,
                                       double b = std::numeric_limits<double>::infinity());
  static DistributionSpec lognormal(double log_mu, double log_sigma);
  static DistributionSpec point(double value);
  /// Lognormal whose physical-scale mean and standard deviation are given.
  static DistributionSpec lognormal_from_moments(double mean, double stddev);

  /// Throws ContractViolation when the parameters are invalid for the kind.
  void validate() const;

  double mean() const;
  double stddev() const;
  double lower() const;  // support bounds
  double upper() const;

  bool operator==(const DistributionSpec&) const = default;
};

/// Natural-log density; -infinity outside the support.
double log_pdf(const DistributionSpec& spec, double x);

/// One draw. TruncNormal uses the inverse CDF in the tail that keeps
/// precision, so narrow or far-out bounds stay exact.
double sample(const DistributionSpec& spec, Rng& rng);

/// Standard normal CDF and quantile.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace bayesid
