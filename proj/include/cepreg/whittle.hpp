#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cepreg/spectral.hpp"

namespace cepreg {

inline constexpr double kEulerGamma = 0.577215664901533;

/// Floor applied to zero periodogram ordinates before taking logs in the
/// initializer.
inline constexpr double kPeriodogramFloor = 1e-300;

struct FitConfig {
  double tolerance = 1e-8;  // relative change of the objective
  int max_iterations = 100;
  std::optional<Index> k_max;  // default min(30, floor(L/2))
  int step_halving_max = 20;

  Index k_max_for(Index fourier_count) const;
  void validate(Index fourier_count) const;
};

struct ReplicateFit {
  Vector cepstra;
  double nll = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;  // sup-norm of the score at the solution
  std::vector<double> nll_trace;
};

/// sum_l [ I_l exp(-phi_l' y) + phi_l' y ]. Throws DivergenceError when the
/// exponential overflows.
double negative_whittle_nll(const Vector& cepstra, const Vector& periodogram,
                            const Matrix& basis);

/// Gradient of negative_whittle_nll: sum_l [1 - I_l exp(-phi_l' y)] phi_l.
Vector whittle_score(const Vector& cepstra, const Vector& periodogram, const Matrix& basis);

/// Least-squares fit of the bias-corrected log periodogram onto the basis.
Vector initial_cepstra(const Vector& periodogram, const Matrix& basis);

/// Fisher-scoring solver for one truncation order. The Fisher information
/// sum_l phi_l phi_l' does not depend on the iterate, so it is factored once
/// and shared across every replicate fitted with this object.
class CepstralFitter {
 public:
  CepstralFitter(const FrequencyGrid& grid, Index order);

  Index order() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  Vector initial(const Vector& periodogram) const;

  /// Throws ConvergenceError after max_iterations.
  ReplicateFit fit(const Vector& periodogram, const FitConfig& config) const;

 private:
  Matrix basis_;
  Eigen::LLT<Matrix> information_;
};

ReplicateFit fit_replicate(const Vector& periodogram, const FrequencyGrid& grid,
                           Index order, const FitConfig& config);

struct AicSelection {
  Index order = 0;
  std::map<Index, double> trace;  // K -> AIC(K), converged orders only
  std::vector<Index> skipped;     // orders where some replicate failed
};

/// AIC(K) = sum_j nll_j(K) + 2 N K over K = 1..K_max; ties go to smaller K.
AicSelection select_k_aic(const Periodogram& periodogram, const FitConfig& config);

struct WhittleFit {
  Matrix cepstra;  // N x K
  Index order = 0;
  Vector nll;
  std::vector<int> iterations;
  std::map<Index, double> aic_trace;  // empty when K was given
};

/// Fits every replicate at order K, or selects K by AIC when order is empty.
WhittleFit fit_periodogram(const Periodogram& periodogram, const FitConfig& config,
                           std::optional<Index> order);

WhittleFit fit_panel(const TimeSeriesPanel& panel, const FitConfig& config,
                     std::optional<Index> order);

}  // namespace cepreg
