#include "cepreg/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "cepreg/error.hpp"
#include "cepreg/parallel.hpp"

namespace cepreg {
namespace {

using Complex = std::complex<double>;

Vector harmonic_frequencies(Index length) {
  Vector w(length / 2);
  for (Index l = 0; l < w.size(); ++l) w[l] = static_cast<double>(l + 1) / static_cast<double>(length);
  return w;
}

}  // namespace

Vector simulate_series(const Vector& log_spectrum, Index length, Rng& rng) {
  const Index T = length;
  if (T < 3) throw ConfigError("series length must be at least 3");
  if (log_spectrum.size() != T / 2) {
    throw ConfigError("log-spectrum needs " + std::to_string(T / 2) + " values for T = " +
                      std::to_string(T) + ", got " + std::to_string(log_spectrum.size()));
  }
  if (!log_spectrum.allFinite()) throw DataError("log-spectrum has non-finite values");

  const Index L = (T - 1) / 2;
  const auto t_len = static_cast<double>(T);
  std::normal_distribution<double> normal;

  // Unscaled inverse DFT of a Hermitian spectrum; the phase factor shifts the
  // time origin so that output index n corresponds to t = n + 1.
  std::vector<Complex> spectrum(static_cast<std::size_t>(T), Complex(0.0, 0.0));
  for (Index l = 1; l <= L; ++l) {
    const double v = normal(rng);
    const double w = normal(rng);
    const double amplitude = std::sqrt(2.0 * std::exp(log_spectrum[l - 1]) / t_len);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(l) / t_len;
    const Complex c = 0.5 * amplitude * Complex(v, -w) * std::polar(1.0, phase);
    spectrum[static_cast<std::size_t>(l)] = c;
    spectrum[static_cast<std::size_t>(T - l)] = std::conj(c);
  }
  if (T % 2 == 0) {
    const double v = normal(rng);
    spectrum[static_cast<std::size_t>(T / 2)] =
        -std::sqrt(std::exp(log_spectrum[T / 2 - 1]) / t_len) * v;
  }

  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  std::vector<Complex> series;
  fft.inv(series, spectrum);

  Vector out(T);
  for (Index n = 0; n < T; ++n) out[n] = series[static_cast<std::size_t>(n)].real();
  return out;
}

Vector simulate_series_from_log_spectrum(const std::function<double(double)>& log_spectrum,
                                         Index length, Rng& rng) {
  const Vector w = harmonic_frequencies(length);
  Vector g(w.size());
  for (Index l = 0; l < w.size(); ++l) g[l] = log_spectrum(w[l]);
  return simulate_series(g, length, rng);
}

Vector simulate_series_from_cepstra(const Vector& cepstra, Index length, Rng& rng) {
  return simulate_series(basis_matrix(harmonic_frequencies(length), cepstra.size()) * cepstra,
                         length, rng);
}

double quantile_inclusive(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void BootstrapConfig::validate() const {
  if (replicates < 50) {
    throw ConfigError("bootstrap bands need at least 50 replicates, got " +
                      std::to_string(replicates));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!frequencies && grid_size < 2) throw ConfigError("band grid needs at least 2 points");
}

ConfidenceBands residual_bootstrap_bands(const TimeSeriesPanel& panel, const LinearModelFit& fit,
                                         const FitConfig& whittle_config,
                                         const EstimatorSpec& estimator,
                                         const BootstrapConfig& config,
                                         const EnvelopeOptions& envelope) {
  config.validate();
  const Matrix& x = panel.covariates();
  const Index N = panel.replicates();
  const Index T = panel.length();
  const Index K = fit.order();
  const Index P = fit.num_covariates();
  if (x.cols() != P || fit.residuals.rows() != N) {
    throw ConfigError("fit does not match the panel (replicates or covariates differ)");
  }
  if (estimator.kind != fit.estimator) {
    throw ConfigError("bootstrap estimator differs from the fitted estimator");
  }
  EstimatorSpec refit_spec = estimator;
  if (refit_spec.kind != Estimator::ols && !refit_spec.dimension) {
    refit_spec.dimension = fit.dimension;
  }

  const Vector frequencies = config.frequencies ? *config.frequencies
                                                : uniform_frequencies(config.grid_size);
  const Index M = frequencies.size();
  const Matrix fitted = (x * fit.coefficients).rowwise() + fit.intercept.transpose();  // N x K
  const Matrix harmonic_basis = basis_matrix(harmonic_frequencies(T), K);

  auto draw = [&](std::uint64_t stream) -> Matrix {
    Rng rng = make_stream(config.seed, stream);
    std::uniform_int_distribution<Index> pick(0, N - 1);
    Matrix cepstra(N, K);
    for (Index j = 0; j < N; ++j) cepstra.row(j) = fitted.row(j) + fit.residuals.row(pick(rng));

    Matrix estimates = cepstra;
    if (config.resimulate) {
      Matrix series(N, T);
      for (Index j = 0; j < N; ++j) {
        series.row(j) =
            simulate_series(harmonic_basis * cepstra.row(j).transpose(), T, rng).transpose();
      }
      estimates = fit_periodogram(compute_periodogram(series), whittle_config, K).cepstra;
    }
    const LinearModelFit refit = fit_model(estimates, x, refit_spec, envelope);
    const EffectFunctions effects = effect_functions(refit, frequencies);
    Matrix curves(P + 1, M);
    curves.row(0) = effects.alpha.transpose();
    curves.bottomRows(P) = effects.beta;
    return curves;
  };

  const auto B = static_cast<std::size_t>(config.replicates);
  std::vector<Matrix> curves(B);
  std::vector<char> failed(B, 0);
  parallel_for(static_cast<std::ptrdiff_t>(B), [&](std::ptrdiff_t b) {
    try {
      curves[static_cast<std::size_t>(b)] = draw(static_cast<std::uint64_t>(b));
    } catch (const ConvergenceError&) {
      failed[static_cast<std::size_t>(b)] = 1;
    } catch (const NumericalError&) {
      failed[static_cast<std::size_t>(b)] = 1;
    }
  });

  // Failed draws are replaced in index order from streams B, B+1, ...
  const auto extra_budget = static_cast<std::uint64_t>(std::ceil(0.1 * static_cast<double>(B)));
  std::uint64_t next_stream = B;
  int redraws = 0;
  for (std::size_t b = 0; b < B; ++b) {
    while (failed[b]) {
      if (next_stream - B >= extra_budget) {
        throw ConvergenceError("bootstrap refits failed too often (" +
                                   std::to_string(redraws + 1) + " failures in " +
                                   std::to_string(B) + " replicates)",
                               Vector(), 0.0);
      }
      ++redraws;
      try {
        curves[b] = draw(next_stream++);
        failed[b] = 0;
      } catch (const ConvergenceError&) {
      } catch (const NumericalError&) {
      }
    }
  }

  ConfidenceBands bands;
  bands.frequencies = frequencies;
  bands.point = effect_functions(fit, frequencies);
  bands.alpha = config.alpha;
  bands.replicates = config.replicates;
  bands.redraws = redraws;

  Matrix point(P + 1, M);
  point.row(0) = bands.point.alpha.transpose();
  point.bottomRows(P) = bands.point.beta;

  Matrix mean = Matrix::Zero(P + 1, M);
  for (const auto& c : curves) mean += c;
  mean /= static_cast<double>(B);
  bands.bias = mean - point;
  bands.lower.resize(P + 1, M);
  bands.upper.resize(P + 1, M);

  std::vector<double> sample(B);
  for (Index row = 0; row <= P; ++row) {
    for (Index m = 0; m < M; ++m) {
      for (std::size_t b = 0; b < B; ++b) sample[b] = curves[b](row, m) - bands.bias(row, m);
      std::sort(sample.begin(), sample.end());
      bands.lower(row, m) = quantile_inclusive(sample, config.alpha / 2.0);
      bands.upper(row, m) = quantile_inclusive(sample, 1.0 - config.alpha / 2.0);
    }
  }
  return bands;
}

}  // namespace cepreg
