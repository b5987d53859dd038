#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "cepreg/regression.hpp"
#include "cepreg/rng.hpp"
#include "cepreg/whittle.hpp"

namespace cepreg {

/// Spectral synthesis of a mean-zero series of length T:
///   Z_t = sum_{l=1}^{L} sqrt(2 f_l / T) [V_l cos(2 pi l t / T) + W_l sin(2 pi l t / T)]
/// plus sqrt(f_{1/2} / T) V_N cos(pi t) when T is even, with f = exp(g) and
/// t = 1..T. Normal draws are taken in the order V_1, W_1, ..., V_L, W_L, V_N.
/// `log_spectrum` holds g at l/T for l = 1..floor(T/2).
Vector simulate_series(const Vector& log_spectrum, Index length, Rng& rng);

Vector simulate_series_from_log_spectrum(const std::function<double(double)>& log_spectrum,
                                         Index length, Rng& rng);

Vector simulate_series_from_cepstra(const Vector& cepstra, Index length, Rng& rng);

/// Linear interpolation between order statistics, h = (n - 1) p.
double quantile_inclusive(std::span<const double> sorted, double p);

struct BootstrapConfig {
  int replicates = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Index grid_size = 256;
  /// Bands are evaluated here instead of the uniform grid when set.
  std::optional<Vector> frequencies;
  /// When false the resampled cepstral vectors are used directly as the
  /// stage-one estimates (no series synthesis, no Whittle refit).
  bool resimulate = true;

  void validate() const;
};

/// Rows are ordered (alpha, beta_1, ..., beta_P).
struct ConfidenceBands {
  Vector frequencies;
  EffectFunctions point;
  Matrix lower;
  Matrix upper;
  Matrix bias;
  double alpha = 0.05;
  int replicates = 0;
  int redraws = 0;
};

/// Residual bootstrap: resample residual rows, synthesize series from
/// exp(alpha + X_j' beta + xi_j^(b)), refit both stages at the original K and
/// estimator dimension, then take bias-corrected percentile bands.
ConfidenceBands residual_bootstrap_bands(const TimeSeriesPanel& panel, const LinearModelFit& fit,
                                         const FitConfig& whittle_config,
                                         const EstimatorSpec& estimator,
                                         const BootstrapConfig& config,
                                         const EnvelopeOptions& envelope = {});

}  // namespace cepreg
