#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cepreg {

enum class ErrorKind { data, convergence, configuration, numerical };

/// Base for every error raised by the library. The kind maps onto the
/// command-line exit codes (2 data, 3 convergence/numerical, 4 configuration).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error(ErrorKind::data, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::configuration, message) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::numerical, message) {}
};

/// The Whittle objective overflowed at the requested point.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative solver ran out of iterations. Carries the last iterate, the
/// final gradient norm and the objective trace for diagnostics.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, Eigen::VectorXd last_iterate,
                   double gradient_norm, std::vector<double> objective_trace = {});

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }
  const std::vector<double>& objective_trace() const noexcept { return trace_; }

 private:
  Eigen::VectorXd last_iterate_;
  double gradient_norm_;
  std::vector<double> trace_;
};

}  // namespace cepreg
