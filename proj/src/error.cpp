#include "cepreg/error.hpp"

#include <utility>

namespace cepreg {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::data:
      return 2;
    case ErrorKind::convergence:
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::configuration:
      return 4;
  }
  return 1;
}

ConvergenceError::ConvergenceError(const std::string& message,
                                   Eigen::VectorXd last_iterate,
                                   double gradient_norm,
                                   std::vector<double> objective_trace)
    : Error(ErrorKind::convergence, message),
      last_iterate_(std::move(last_iterate)),
      gradient_norm_(gradient_norm),
      trace_(std::move(objective_trace)) {}

}  // namespace cepreg
