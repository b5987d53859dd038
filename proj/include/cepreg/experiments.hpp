#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cepreg/regression.hpp"
#include "cepreg/rng.hpp"
#include "cepreg/whittle.hpp"

namespace cepreg {

enum class Example { one, two };

/// Generating model in cepstral coordinates: alpha = phi' A, beta_p = phi' B_p,
/// and each replicate's log-spectrum g_j = phi' Y_j with Y_j including the
/// replicate error xi_j.
struct TrueModel {
  Vector intercept;          // K0
  Matrix coefficients;       // P x K0
  Matrix replicate_cepstra;  // N x K0

  Index order() const noexcept { return intercept.size(); }
};

struct SimulatedPanel {
  TimeSeriesPanel panel;
  TrueModel truth;
};

/// Example 1: alpha = 2cos(2 pi w), beta_1 = 2cos(4 pi w), X_1 ~ U[0, 1],
/// X_2..X_P standard normal noise, xi_j = e1 + e2 cos(2 pi w) + e3 cos(4 pi w)
/// with e_i ~ N(0, xi_variance).
SimulatedPanel generate_example1(Index replicates, Index length, Index covariates, Rng& rng,
                                 double xi_variance = 0.5);

/// Example 2: P = 10, alpha = 2cos(2 pi w), beta_1 = 2cos(4 pi w) + 2cos(6 pi w),
/// beta_2 = 2cos(8 pi w), beta_3..10 = 0, X ~ N(0, S) with S_pq = tau^|p-q|.
SimulatedPanel generate_example2(Index replicates, Index length, double tau, Rng& rng,
                                 double xi_variance = 0.5);

/// Mean squared difference of two curves sampled on the same grid.
double ase_effect(const Vector& estimate, const Vector& truth);

/// Same, with both curves given by cepstral vectors (of any lengths) and
/// evaluated at the Fourier frequencies of the grid.
double ase_effect(const Vector& estimate_cepstra, const Vector& truth_cepstra,
                  const FrequencyGrid& grid);

/// (NL)^{-1} sum_j sum_l [phi_l'(A_hat + B_hat' X_j) - phi_l'(A + B' X_j)]^2:
/// fitted model log-spectra against the population-mean log-spectra.
double ase_log_spectra(const LinearModelFit& fit, const Matrix& covariates,
                       const TrueModel& truth, const FrequencyGrid& grid);

struct ExperimentSpec {
  Example example = Example::one;
  Index replicates = 50;  // N
  Index length = 50;      // T
  Index covariates = 1;   // P (fixed at 10 for example two)
  double tau = 0.0;
  int repetitions = 100;
  std::uint64_t seed = 1;
  std::vector<EstimatorSpec> estimators{EstimatorSpec{}};
  std::optional<Index> order;  // empty selects K by AIC
  FitConfig whittle;
  double xi_variance = 0.5;

  void validate() const;
};

struct TargetSummary {
  std::string target;  // "alpha", "beta_1", ..., "log_spectra"
  double mean = 0.0;
  double sd = 0.0;
};

struct EstimatorSummary {
  EstimatorSpec estimator;
  std::vector<TargetSummary> targets;
  int completed = 0;
  int failures = 0;
  double mean_seconds = 0.0;  // wall clock per two-stage fit
};

struct RepetitionRecord {
  int repetition = 0;
  Index order = 0;
  Estimator estimator = Estimator::ols;
  bool failed = false;
  std::vector<double> ase;  // same order as EstimatorSummary::targets
  double seconds = 0.0;
};

struct AseSummary {
  ExperimentSpec spec;
  std::vector<std::string> targets;
  std::vector<EstimatorSummary> estimators;
  std::vector<RepetitionRecord> records;
};

SimulatedPanel generate(const ExperimentSpec& spec, Rng& rng);

/// Runs the repetitions (in parallel, each from stream derive_seed(seed, rep))
/// and aggregates mean and standard deviation of every ASE target. Throws
/// ConvergenceError if more than 10% of the fits of some estimator fail.
AseSummary run_benchmark(const ExperimentSpec& spec);

/// Long-format table: estimator,target,mean,sd,completed,failures.
std::string benchmark_csv(const AseSummary& summary);

/// Human-readable table in the layout "mean (sd)" x 10^2, one column per
/// estimator.
std::string benchmark_markdown(const AseSummary& summary);

/// Wall-clock timings; kept apart from the ASE tables so those stay
/// byte-reproducible.
std::string benchmark_timing_csv(const AseSummary& summary);

std::string estimator_label(const EstimatorSpec& spec);

}  // namespace cepreg
