#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cepreg/spectral.hpp"

namespace cepreg {

enum class Estimator { ols, rrr, envelope };

std::string to_string(Estimator estimator);
Estimator parse_estimator(std::string_view name);

/// Fit of Y = 1 A' + X B + E on the N x K cepstral matrix. B is P x K; the
/// dimension is the rank m for rrr, the envelope dimension r for envelope and
/// P for ols.
struct LinearModelFit {
  Vector intercept;
  Matrix coefficients;
  Matrix residuals;
  Matrix residual_covariance;
  Estimator estimator = Estimator::ols;
  Index dimension = 0;
  Vector covariate_means;
  Matrix envelope_basis;  // P x r, envelope fits only

  Index order() const noexcept { return coefficients.cols(); }
  Index num_covariates() const noexcept { return coefficients.rows(); }

  /// A + B' x.
  Vector predict_cepstra(const Vector& x) const;
};

struct EffectFunctions {
  Vector frequencies;  // M
  Vector alpha;        // M
  Matrix beta;         // P x M
};

struct EstimatorSpec {
  Estimator kind = Estimator::ols;
  std::optional<Index> dimension;  // empty selects it by information criterion
};

struct EnvelopeOptions {
  int random_starts = 5;
  std::uint64_t seed = 20240611;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;
};

LinearModelFit fit_ols(const Matrix& cepstra, const Matrix& covariates);

/// Reduced-rank fit B_ols * sum_{j<=m} u_j u_j' with u_j the leading
/// eigenvectors of S_XY' S_XX^{-1} S_XY.
LinearModelFit fit_rrr(const Matrix& cepstra, const Matrix& covariates, Index rank);

/// Predictor-envelope fit of dimension r.
LinearModelFit fit_envelope(const Matrix& cepstra, const Matrix& covariates, Index dimension,
                            const EnvelopeOptions& options = {});

struct DimensionSelection {
  Index dimension = 0;
  std::map<Index, double> criterion;  // -2 loglik + log(N) * params
  std::vector<Index> failed;
};

DimensionSelection select_dimension(const Matrix& cepstra, const Matrix& covariates,
                                    Estimator estimator, Index first, Index last,
                                    const EnvelopeOptions& options = {});

/// Dispatches on the estimator, selecting the dimension over its full valid
/// range when the spec leaves it open.
LinearModelFit fit_model(const Matrix& cepstra, const Matrix& covariates,
                         const EstimatorSpec& spec, const EnvelopeOptions& options = {});

EffectFunctions effect_functions(const LinearModelFit& fit, const Vector& frequencies);

/// alpha and beta_p on M uniform frequencies over [0, 1/2].
EffectFunctions effect_functions(const LinearModelFit& fit, Index grid_points);

LogSpectrum predict_log_spectrum(const LinearModelFit& fit, const Vector& x,
                                 const Vector& frequencies);
LogSpectrum predict_log_spectrum(const LinearModelFit& fit, const Vector& x,
                                 Index grid_points);

struct Standardization {
  Matrix values;
  Vector means;
  Vector scales;
};

/// Centers each column and divides by its sample standard deviation.
Standardization standardize_columns(const Matrix& covariates);

}  // namespace cepreg
