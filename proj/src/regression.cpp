#include "cepreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cepreg/envelope.hpp"
#include "cepreg/error.hpp"

namespace cepreg {
namespace {

struct Centered {
  Matrix y;
  Matrix x;
  Vector y_mean;
  Vector x_mean;
};

Centered center(const Matrix& cepstra, const Matrix& covariates) {
  if (cepstra.rows() != covariates.rows()) {
    throw DataError("cepstral matrix has " + std::to_string(cepstra.rows()) +
                    " rows but the covariate table has " + std::to_string(covariates.rows()));
  }
  if (covariates.rows() <= covariates.cols()) {
    throw DataError("need more replicates than covariates (N = " +
                    std::to_string(covariates.rows()) +
                    ", P = " + std::to_string(covariates.cols()) + ")");
  }
  if (cepstra.cols() < 1 || covariates.cols() < 1) {
    throw DataError("empty cepstral matrix or covariate table");
  }
  if (!cepstra.allFinite() || !covariates.allFinite()) {
    throw DataError("non-finite entries in regression inputs");
  }
  Centered c;
  c.y_mean = cepstra.colwise().mean().transpose();
  c.x_mean = covariates.colwise().mean().transpose();
  c.y = cepstra.rowwise() - c.y_mean.transpose();
  c.x = covariates.rowwise() - c.x_mean.transpose();
  return c;
}

// Column-pivoted QR of the centered design; throws naming the dependent columns.
Eigen::ColPivHouseholderQR<Matrix> checked_qr(const Matrix& xc) {
  Eigen::ColPivHouseholderQR<Matrix> qr(xc);
  qr.setThreshold(1e-10);
  if (qr.rank() < xc.cols()) {
    std::ostringstream cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Index i = qr.rank(); i < xc.cols(); ++i) {
      if (i > qr.rank()) cols << ", ";
      cols << (perm[i] + 1);
    }
    throw DataError("collinear covariates: column(s) " + cols.str() +
                    " are linearly dependent on the others (numerical rank " +
                    std::to_string(qr.rank()) + " of " + std::to_string(xc.cols()) + ")");
  }
  return qr;
}

LinearModelFit assemble(const Centered& c, Matrix coefficients, Estimator estimator,
                        Index dimension) {
  LinearModelFit fit;
  const Index N = c.y.rows();
  const Index P = c.x.cols();
  fit.intercept = c.y_mean - coefficients.transpose() * c.x_mean;
  fit.residuals = c.y - c.x * coefficients;
  const double dof = static_cast<double>(std::max<Index>(N - P - 1, 1));
  fit.residual_covariance = fit.residuals.transpose() * fit.residuals / dof;
  fit.coefficients = std::move(coefficients);
  fit.estimator = estimator;
  fit.dimension = dimension;
  fit.covariate_means = c.x_mean;
  return fit;
}

// Sign convention: the largest-magnitude entry of each column is positive.
void fix_column_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0.0) m.col(j) *= -1.0;
  }
}

double log_det_spd(const Matrix& m) {
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  const Vector d = Matrix(llt.matrixL()).diagonal();
  return 2.0 * d.array().log().sum();
}

LinearModelFit envelope_from_objective(const Centered& c, const EnvelopeObjective& objective,
                                       Index dimension, const EnvelopeOptions& options,
                                       double* objective_value) {
  const Index P = c.x.cols();
  Matrix gamma;
  if (dimension == P) {
    gamma = Matrix::Identity(P, P);
    if (objective_value) *objective_value = objective.value(gamma);
  } else {
    StiefelResult best = estimate_envelope_basis(objective, dimension, options);
    gamma = std::move(best.basis);
    if (objective_value) *objective_value = best.objective;
  }
  const Matrix& sx = objective.covariate_covariance();
  const Matrix reduced = gamma.transpose() * sx * gamma;
  const Matrix coefficients =
      gamma * reduced.ldlt().solve(gamma.transpose() * objective.cross_covariance());
  LinearModelFit fit = assemble(c, coefficients, Estimator::envelope, dimension);
  fit.envelope_basis = std::move(gamma);
  return fit;
}

}  // namespace

std::string to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::ols:
      return "ols";
    case Estimator::rrr:
      return "rrr";
    case Estimator::envelope:
      return "envelope";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "ols") return Estimator::ols;
  if (name == "rrr") return Estimator::rrr;
  if (name == "envelope" || name == "env") return Estimator::envelope;
  throw ConfigError("unknown estimator '" + std::string(name) +
                    "' (expected ols, rrr or envelope)");
}

Vector LinearModelFit::predict_cepstra(const Vector& x) const {
  if (x.size() != coefficients.rows()) {
    throw DataError("covariate vector has " + std::to_string(x.size()) + " entries, expected " +
                    std::to_string(coefficients.rows()));
  }
  return intercept + coefficients.transpose() * x;
}

LinearModelFit fit_ols(const Matrix& cepstra, const Matrix& covariates) {
  const Centered c = center(cepstra, covariates);
  const auto qr = checked_qr(c.x);
  return assemble(c, qr.solve(c.y), Estimator::ols, covariates.cols());
}

LinearModelFit fit_rrr(const Matrix& cepstra, const Matrix& covariates, Index rank) {
  const Index P = covariates.cols();
  const Index K = cepstra.cols();
  if (rank < 1 || rank > std::min(P, K)) {
    throw ConfigError("reduced rank m = " + std::to_string(rank) + " outside [1, min(P, K) = " +
                      std::to_string(std::min(P, K)) + "]");
  }
  const Centered c = center(cepstra, covariates);
  const auto qr = checked_qr(c.x);
  const Matrix b_ols = qr.solve(c.y);

  const double scale = 1.0 / static_cast<double>(c.x.rows() - 1);
  const Matrix sxy = scale * c.x.transpose() * c.y;
  Matrix h = sxy.transpose() * b_ols;  // S_XY' S_XX^{-1} S_XY
  h = 0.5 * (h + h.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigen-decomposition failed for the reduced-rank problem (condition "
                         "estimate of X'X: " +
                         std::to_string(qr.maxPivot() / std::abs(qr.matrixR()(P - 1, P - 1))) +
                         ")");
  }
  Matrix u = eig.eigenvectors().rightCols(rank).rowwise().reverse();
  fix_column_signs(u);
  return assemble(c, b_ols * u * u.transpose(), Estimator::rrr, rank);
}

LinearModelFit fit_envelope(const Matrix& cepstra, const Matrix& covariates, Index dimension,
                            const EnvelopeOptions& options) {
  const Index P = covariates.cols();
  if (dimension < 1 || dimension > P) {
    throw ConfigError("envelope dimension r = " + std::to_string(dimension) +
                      " outside [1, P = " + std::to_string(P) + "]");
  }
  const Centered c = center(cepstra, covariates);
  checked_qr(c.x);
  const EnvelopeObjective objective(cepstra, covariates);
  return envelope_from_objective(c, objective, dimension, options, nullptr);
}

DimensionSelection select_dimension(const Matrix& cepstra, const Matrix& covariates,
                                    Estimator estimator, Index first, Index last,
                                    const EnvelopeOptions& options) {
  const Index N = cepstra.rows();
  const Index K = cepstra.cols();
  const Index P = covariates.cols();
  const double log_n = std::log(static_cast<double>(N));
  Index upper = 0;
  switch (estimator) {
    case Estimator::ols:
      throw ConfigError("dimension selection applies to rrr and envelope only");
    case Estimator::rrr:
      upper = std::min(P, K);
      break;
    case Estimator::envelope:
      upper = P;
      break;
  }
  if (first < 1 || last > upper || first > last) {
    throw ConfigError("candidate dimensions " + std::to_string(first) + ".." +
                      std::to_string(last) + " outside [1, " + std::to_string(upper) + "]");
  }

  DimensionSelection out;
  const Centered c = center(cepstra, covariates);
  checked_qr(c.x);
  std::optional<EnvelopeObjective> objective;
  if (estimator == Estimator::envelope) objective.emplace(cepstra, covariates);

  double best = std::numeric_limits<double>::infinity();
  for (Index d = first; d <= last; ++d) {
    double criterion = 0.0;
    try {
      if (estimator == Estimator::rrr) {
        const LinearModelFit fit = fit_rrr(cepstra, covariates, d);
        const Matrix sigma =
            fit.residuals.transpose() * fit.residuals / static_cast<double>(N);
        const double params = static_cast<double>(d * (P + K - d));
        criterion = static_cast<double>(N) * log_det_spd(sigma) + log_n * params;
      } else {
        double f = 0.0;
        envelope_from_objective(c, *objective, d, options, &f);
        criterion = static_cast<double>(N) *
                        (objective->log_det_response() + objective->log_det_covariates() + f) +
                    log_n * static_cast<double>(d * K);
      }
    } catch (const Error&) {
      out.failed.push_back(d);
      continue;
    }
    if (!std::isfinite(criterion)) {
      out.failed.push_back(d);
      continue;
    }
    out.criterion[d] = criterion;
    if (criterion < best) {
      best = criterion;
      out.dimension = d;
    }
  }
  if (out.dimension == 0) {
    throw NumericalError("every candidate dimension failed to fit");
  }
  return out;
}

LinearModelFit fit_model(const Matrix& cepstra, const Matrix& covariates,
                         const EstimatorSpec& spec, const EnvelopeOptions& options) {
  switch (spec.kind) {
    case Estimator::ols:
      if (spec.dimension) throw ConfigError("a dimension applies only to rrr and envelope");
      return fit_ols(cepstra, covariates);
    case Estimator::rrr: {
      const Index m =
          spec.dimension
              ? *spec.dimension
              : select_dimension(cepstra, covariates, Estimator::rrr, 1,
                                 std::min(covariates.cols(), cepstra.cols()), options)
                    .dimension;
      return fit_rrr(cepstra, covariates, m);
    }
    case Estimator::envelope: {
      const Index r = spec.dimension ? *spec.dimension
                                     : select_dimension(cepstra, covariates, Estimator::envelope,
                                                        1, covariates.cols(), options)
                                           .dimension;
      return fit_envelope(cepstra, covariates, r, options);
    }
  }
  throw ConfigError("unknown estimator");
}

EffectFunctions effect_functions(const LinearModelFit& fit, const Vector& frequencies) {
  const Matrix phi = basis_matrix(frequencies, fit.order());
  EffectFunctions out;
  out.frequencies = frequencies;
  out.alpha = phi * fit.intercept;
  out.beta = fit.coefficients * phi.transpose();
  return out;
}

EffectFunctions effect_functions(const LinearModelFit& fit, Index grid_points) {
  return effect_functions(fit, uniform_frequencies(grid_points));
}

LogSpectrum predict_log_spectrum(const LinearModelFit& fit, const Vector& x,
                                 const Vector& frequencies) {
  if (!x.allFinite()) throw DataError("covariate vector must be finite");
  return log_spectrum_from_cepstra(fit.predict_cepstra(x), frequencies);
}

LogSpectrum predict_log_spectrum(const LinearModelFit& fit, const Vector& x,
                                 Index grid_points) {
  return predict_log_spectrum(fit, x, uniform_frequencies(grid_points));
}

Standardization standardize_columns(const Matrix& covariates) {
  if (covariates.rows() < 2) throw DataError("standardization needs at least two rows");
  Standardization s;
  s.means = covariates.colwise().mean().transpose();
  s.values = covariates.rowwise() - s.means.transpose();
  s.scales =
      (s.values.colwise().squaredNorm() / static_cast<double>(covariates.rows() - 1))
          .cwiseSqrt()
          .transpose();
  for (Index p = 0; p < s.scales.size(); ++p) {
    if (!(s.scales[p] > 0.0)) {
      throw DataError("covariate column " + std::to_string(p + 1) +
                      " is constant and cannot be standardized");
    }
    s.values.col(p) /= s.scales[p];
  }
  return s;
}

}  // namespace cepreg
