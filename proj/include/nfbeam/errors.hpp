#pragma once

#include <stdexcept>
#include <string>

namespace nfbeam {

// Invalid input: argument outside the domain of an operation, bad geometry,
// or a configuration value that violates a physical constraint.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedOrderError : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyLayoutError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Configuration parse or validation failure. `field` names the offending key
// (empty for syntax errors), `line` is 1-based or 0 when not line-bound.
class ConfigError : public DomainError {
 public:
  ConfigError(const std::string& what, std::string field, int line = 0)
      : DomainError(what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

// Numerical failure: singular systems, non-convergence, missing roots.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double rcond)
      : NumericalError(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class NoRootError : public NumericalError {
 public:
  NoRootError(const std::string& what, double scan_begin, double scan_end)
      : NumericalError(what), begin_(scan_begin), end_(scan_end) {}
  double scan_begin() const noexcept { return begin_; }
  double scan_end() const noexcept { return end_; }

 private:
  double begin_;
  double end_;
};

}  // namespace nfbeam
