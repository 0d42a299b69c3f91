#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bayesid {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, invalid spec).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (prior inputs, donor tables).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Input data violates its schema or a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Line numbers are 1-based; column is a header name.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line, std::string column)
      : ValidationError(what), line_(line), column_(std::move(column)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

/// No feasible starting point could be found for a chain.
class InitializationError : public Error {
 public:
  using Error::Error;
};

/// A prior catalog rejects (almost) every draw under the feasibility factors.
class InfeasibleCatalogError : public Error {
 public:
  InfeasibleCatalogError(const std::string& what, double rejection_rate)
      : Error(what), rejection_rate_(rejection_rate) {}
  double rejection_rate() const noexcept { return rejection_rate_; }

 private:
  double rejection_rate_;
};

/// Least squares requested on a rank-deficient system.
class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, long rank, long columns)
      : Error(what), rank_(rank), columns_(columns) {}
  long rank() const noexcept { return rank_; }
  long columns() const noexcept { return columns_; }

 private:
  long rank_;
  long columns_;
};

/// A metric is undefined for its inputs (zero reference, zero vector).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// A numerical diagnostic failed (unstable rank across samples).
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

}  // namespace bayesid
