#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "cepreg/rng.hpp"
#include "cepreg/spectral.hpp"

namespace testing {

using cepreg::Index;
using cepreg::Matrix;
using cepreg::Rng;
using cepreg::Vector;

// AR(1) by recursion from the stationary distribution; independent of the
// spectral synthesizer.
inline Vector ar1(double phi, Index T, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Vector z(T);
  z[0] = normal(rng) / std::sqrt(1.0 - phi * phi);
  for (Index t = 1; t < T; ++t) z[t] = phi * z[t - 1] + normal(rng);
  return z;
}

inline Matrix ar1_panel(double phi, Index N, Index T, Rng& rng) {
  Matrix m(N, T);
  for (Index j = 0; j < N; ++j) m.row(j) = ar1(phi, T, rng).transpose();
  return m;
}

// log f(w) = log sigma^2 - log(1 - 2 phi cos 2 pi w + phi^2)
inline double ar1_log_spectrum(double phi, double w, double sigma2 = 1.0) {
  return std::log(sigma2) - std::log(1.0 - 2.0 * phi * std::cos(2.0 * std::numbers::pi * w) +
                                     phi * phi);
}

// Y_0 = log sigma^2, Y_k = sqrt2 phi^k / k.
inline Vector ar1_cepstra(double phi, Index K, double sigma2 = 1.0) {
  Vector y(K);
  y[0] = std::log(sigma2);
  for (Index k = 1; k < K; ++k) y[k] = std::numbers::sqrt2 * std::pow(phi, k) / static_cast<double>(k);
  return y;
}

inline Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vector white(Index T, Rng& rng, double sigma = 1.0) {
  return gaussian(T, 1, rng).col(0) * sigma;
}

}  // namespace testing
