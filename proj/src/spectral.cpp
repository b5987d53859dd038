#include "cepreg/spectral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include <unsupported/Eigen/FFT>

#include "cepreg/error.hpp"
#include "cepreg/parallel.hpp"

namespace cepreg {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(const Matrix& m, const char* what) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        throw DataError(std::string("non-finite value in ") + what + " at row " +
                        std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      }
    }
  }
}

// Subtracts the row mean unless the row is already centered to rounding, which
// keeps re-centering of exported panels bit-exact.
void center_rows(Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const double mean = m.row(r).mean();
    const double scale = m.row(r).cwiseAbs().maxCoeff();
    if (std::abs(mean) > 8.0 * std::numeric_limits<double>::epsilon() * scale) {
      m.row(r).array() -= mean;
    }
  }
}

Index fourier_count(Index T) { return (T - 1) / 2; }

}  // namespace

TimeSeriesPanel::TimeSeriesPanel(Matrix series, Matrix covariates,
                                 std::vector<std::string> covariate_names)
    : series_(std::move(series)),
      covariates_(std::move(covariates)),
      names_(std::move(covariate_names)) {
  if (series_.rows() < 2) {
    throw DataError("panel needs at least 2 replicates, got " +
                    std::to_string(series_.rows()));
  }
  if (series_.cols() < 8) {
    throw DataError("series length must be at least 8, got " +
                    std::to_string(series_.cols()));
  }
  if (covariates_.cols() < 1) throw DataError("panel needs at least one covariate");
  if (covariates_.rows() != series_.rows()) {
    throw DataError("covariate table has " + std::to_string(covariates_.rows()) +
                    " rows but there are " + std::to_string(series_.rows()) +
                    " series");
  }
  require_finite(series_, "series");
  require_finite(covariates_, "covariates");
  if (names_.empty()) {
    for (Index p = 0; p < covariates_.cols(); ++p) names_.push_back("x" + std::to_string(p + 1));
  }
  if (static_cast<Index>(names_.size()) != covariates_.cols()) {
    throw DataError("expected " + std::to_string(covariates_.cols()) +
                    " covariate names, got " + std::to_string(names_.size()));
  }
  center_rows(series_);
}

TimeSeriesPanel TimeSeriesPanel::with_covariates(Matrix covariates) const {
  return TimeSeriesPanel(series_, std::move(covariates), names_);
}

FrequencyGrid::FrequencyGrid(Index series_length) : length_(series_length) {
  if (series_length < 3) {
    throw ConfigError("series length " + std::to_string(series_length) +
                      " has no interior Fourier frequencies");
  }
  const Index L = fourier_count(series_length);
  frequencies_.resize(L);
  for (Index l = 0; l < L; ++l) {
    frequencies_[l] = static_cast<double>(l + 1) / static_cast<double>(series_length);
  }
}

Vector CosineBasis::eval(double frequency) const {
  Vector phi(order);
  phi[0] = 1.0;
  for (Index k = 1; k < order; ++k) {
    phi[k] = std::numbers::sqrt2 * std::cos(kTwoPi * frequency * static_cast<double>(k));
  }
  return phi;
}

Vector periodogram_row(std::span<const double> series) {
  const auto T = static_cast<Index>(series.size());
  const Index L = fourier_count(T);
  if (L < 1) throw ConfigError("series too short for a periodogram");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(T);
  std::vector<double> centered(series.begin(), series.end());
  for (double& v : centered) v -= mean;

  thread_local Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);

  Vector out(L);
  for (Index l = 0; l < L; ++l) {
    out[l] = std::norm(spectrum[static_cast<std::size_t>(l + 1)]) / static_cast<double>(T);
  }
  return out;
}

Vector periodogram_row_direct(std::span<const double> series) {
  const auto T = static_cast<Index>(series.size());
  const Index L = fourier_count(T);
  if (L < 1) throw ConfigError("series too short for a periodogram");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(T);

  Vector out(L);
  for (Index l = 1; l <= L; ++l) {
    double re = 0.0;
    double im = 0.0;
    for (Index t = 1; t <= T; ++t) {
      const double angle = kTwoPi * static_cast<double>((l * t) % T) / static_cast<double>(T);
      const double z = series[static_cast<std::size_t>(t - 1)] - mean;
      re += z * std::cos(angle);
      im -= z * std::sin(angle);
    }
    out[l - 1] = (re * re + im * im) / static_cast<double>(T);
  }
  return out;
}

Periodogram compute_periodogram(const Matrix& series) {
  require_finite(series, "series");
  FrequencyGrid grid(series.cols());
  Matrix values(series.rows(), grid.size());
  parallel_for(series.rows(), [&](Index j) {
    const Vector row = series.row(j).transpose();
    values.row(j) = periodogram_row(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).transpose();
  });
  return {std::move(values), std::move(grid)};
}

Periodogram compute_periodogram(const TimeSeriesPanel& panel) {
  return compute_periodogram(panel.series());
}

Matrix basis_matrix(const Vector& frequencies, Index order) {
  if (order < 1) throw ConfigError("cepstral truncation K must be at least 1");
  Matrix phi(frequencies.size(), order);
  const CosineBasis basis{order};
  for (Index l = 0; l < frequencies.size(); ++l) phi.row(l) = basis.eval(frequencies[l]).transpose();
  return phi;
}

Matrix basis_matrix(const FrequencyGrid& grid, Index order) {
  if (order > grid.size()) {
    throw ConfigError("cepstral truncation K = " + std::to_string(order) +
                      " exceeds the number of Fourier frequencies L = " +
                      std::to_string(grid.size()));
  }
  return basis_matrix(grid.frequencies(), order);
}

LogSpectrum log_spectrum_from_cepstra(const Vector& cepstra, const Vector& frequencies) {
  if (cepstra.size() < 1 || !cepstra.allFinite()) {
    throw DataError("cepstral vector must be nonempty and finite");
  }
  return {frequencies, basis_matrix(frequencies, cepstra.size()) * cepstra};
}

Vector cepstra_from_log_spectrum(const std::function<double(double)>& log_spectrum,
                                 Index order, Index points) {
  if (order < 1) throw ConfigError("cepstral truncation K must be at least 1");
  Vector coeffs = Vector::Zero(order);
  const CosineBasis basis{order};
  for (Index m = 0; m < points; ++m) {
    const double w = -0.5 + static_cast<double>(m) / static_cast<double>(points);
    coeffs += log_spectrum(w) * basis.eval(w);
  }
  return coeffs / static_cast<double>(points);
}

Vector uniform_frequencies(Index m) {
  if (m < 2) throw ConfigError("frequency grid needs at least 2 points");
  Vector w(m);
  for (Index i = 0; i < m; ++i) w[i] = 0.5 * static_cast<double>(i) / static_cast<double>(m - 1);
  return w;
}

}  // namespace cepreg
