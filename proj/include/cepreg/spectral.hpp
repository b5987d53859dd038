#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cepreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// N replicated series of common length T with an N x P covariate table.
/// Construction validates the data and mean-centers every series row.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel(Matrix series, Matrix covariates,
                  std::vector<std::string> covariate_names = {});

  const Matrix& series() const noexcept { return series_; }
  const Matrix& covariates() const noexcept { return covariates_; }
  const std::vector<std::string>& covariate_names() const noexcept { return names_; }

  Index replicates() const noexcept { return series_.rows(); }
  Index length() const noexcept { return series_.cols(); }
  Index num_covariates() const noexcept { return covariates_.cols(); }

  /// Same series, different covariate table (e.g. after standardization).
  TimeSeriesPanel with_covariates(Matrix covariates) const;

 private:
  Matrix series_;
  Matrix covariates_;
  std::vector<std::string> names_;
};

/// Fourier frequencies l/T for l = 1..floor((T-1)/2); zero and Nyquist are
/// excluded.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(Index series_length);

  Index series_length() const noexcept { return length_; }
  Index size() const noexcept { return frequencies_.size(); }
  double operator[](Index l) const { return frequencies_[l]; }
  const Vector& frequencies() const noexcept { return frequencies_; }

 private:
  Index length_;
  Vector frequencies_;
};

struct Periodogram {
  Matrix values;  // N x L, nonnegative
  FrequencyGrid grid;
};

/// phi(w) = (1, sqrt2 cos(2 pi w), ..., sqrt2 cos(2 pi w (K-1))).
struct CosineBasis {
  Index order;
  Vector eval(double frequency) const;
};

struct LogSpectrum {
  Vector frequencies;
  Vector values;
};

/// Periodogram of one series at the Fourier frequencies (series is de-meaned
/// first). Uses an FFT.
Vector periodogram_row(std::span<const double> series);

/// Direct O(T L) evaluation of the periodogram sum; reference implementation.
Vector periodogram_row_direct(std::span<const double> series);

inline Vector periodogram_row(const Vector& series) {
  return periodogram_row(std::span<const double>(series.data(), static_cast<std::size_t>(series.size())));
}
inline Vector periodogram_row_direct(const Vector& series) {
  return periodogram_row_direct(
      std::span<const double>(series.data(), static_cast<std::size_t>(series.size())));
}

Periodogram compute_periodogram(const TimeSeriesPanel& panel);
Periodogram compute_periodogram(const Matrix& series);

/// L x K matrix whose row l is phi(w_l). Throws ConfigError if K > L.
Matrix basis_matrix(const FrequencyGrid& grid, Index order);

/// Basis evaluated at arbitrary frequencies (no truncation check).
Matrix basis_matrix(const Vector& frequencies, Index order);

LogSpectrum log_spectrum_from_cepstra(const Vector& cepstra, const Vector& frequencies);

/// Cepstral coefficients of g by periodic quadrature over [-1/2, 1/2).
Vector cepstra_from_log_spectrum(const std::function<double(double)>& log_spectrum,
                                 Index order, Index points = 4096);

/// Uniform grid of m frequencies spanning [0, 1/2] inclusive.
Vector uniform_frequencies(Index m);

}  // namespace cepreg
