#pragma once

#include <vector>

#include "cepreg/regression.hpp"

namespace cepreg {

/// f(G) = log|G' M G| + log|G' N G| with M = S_{X|Y} and N = S_X^{-1}; its
/// minimizer over semi-orthogonal P x r matrices spans the predictor envelope.
class EnvelopeObjective {
 public:
  /// Covariances use divisor N. S_Y gets a ridge of 1e-8 tr(S_Y)/K.
  EnvelopeObjective(const Matrix& cepstra, const Matrix& covariates);

  double value(const Matrix& basis) const;
  Matrix gradient(const Matrix& basis) const;

  const Matrix& covariate_covariance() const noexcept { return sx_; }
  const Matrix& cross_covariance() const noexcept { return sxy_; }
  const Matrix& conditional_covariance() const noexcept { return sx_given_y_; }
  const Matrix& covariance_inverse() const noexcept { return sx_inv_; }
  double log_det_response() const noexcept { return log_det_sy_; }
  double log_det_covariates() const noexcept { return log_det_sx_; }

 private:
  Matrix sx_;
  Matrix sxy_;
  Matrix sx_given_y_;
  Matrix sx_inv_;
  double log_det_sy_ = 0.0;
  double log_det_sx_ = 0.0;
};

struct StiefelResult {
  Matrix basis;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

struct StiefelOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;
};

/// Curvilinear search along Cayley-transform curves with Barzilai-Borwein
/// steps and Armijo backtracking; every iterate stays semi-orthogonal.
StiefelResult minimize_on_stiefel(const EnvelopeObjective& objective, Matrix start,
                                  const StiefelOptions& options);

/// Best of a deterministic start and options.random_starts random starts.
/// Throws ConvergenceError (with the objective trace) if no start converges.
StiefelResult estimate_envelope_basis(const EnvelopeObjective& objective, Index dimension,
                                      const EnvelopeOptions& options);

/// Semi-orthogonal basis via thin QR with a deterministic column sign.
Matrix orthonormalize(const Matrix& m);

}  // namespace cepreg
