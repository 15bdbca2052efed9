#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cfmaps {

// An operation needed a digit beyond the known prefix of a TRUNCATED expansion.
class TruncationExhausted : public std::runtime_error {
 public:
  explicit TruncationExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Input is well formed but outside what the operation supports (e.g. a periodic
// tail where a finite expansion is required).
class UnsupportedInput : public std::invalid_argument {
 public:
  explicit UnsupportedInput(const std::string& what) : std::invalid_argument(what) {}
};

class PoleError : public std::domain_error {
 public:
  PoleError(const std::string& what, double pole) : std::domain_error(what), pole_(pole) {}
  double pole() const noexcept { return pole_; }

 private:
  double pole_;
};

class UndefinedDerivative : public std::domain_error {
 public:
  explicit UndefinedDerivative(const std::string& what) : std::domain_error(what) {}
};

class DivergenceError : public std::domain_error {
 public:
  explicit DivergenceError(const std::string& what) : std::domain_error(what) {}
};

class PrecisionBudgetError : public std::invalid_argument {
 public:
  explicit PrecisionBudgetError(const std::string& what) : std::invalid_argument(what) {}
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_eigenvalue, std::vector<double> last_iterate)
      : std::runtime_error(what), last_eigenvalue_(last_eigenvalue), last_iterate_(std::move(last_iterate)) {}
  double last_eigenvalue() const noexcept { return last_eigenvalue_; }
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_eigenvalue_;
  std::vector<double> last_iterate_;
};

class ParseError : public std::invalid_argument {
 public:
  explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace cfmaps
