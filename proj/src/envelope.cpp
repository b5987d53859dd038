#include "cepreg/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cepreg/error.hpp"
#include "cepreg/rng.hpp"

namespace cepreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log|m| for symmetric positive definite m, +inf otherwise.
double log_det_or_inf(const Matrix& m) {
  const Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return kInf;
  const Matrix l = llt.matrixL();
  double sum = 0.0;
  for (Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) return kInf;
    sum += std::log(l(i, i));
  }
  return 2.0 * sum;
}

Matrix symmetric(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Matrix orthonormalize(const Matrix& m) {
  const Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < m.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

EnvelopeObjective::EnvelopeObjective(const Matrix& cepstra, const Matrix& covariates) {
  const auto n = static_cast<double>(cepstra.rows());
  const Matrix yc = cepstra.rowwise() - cepstra.colwise().mean();
  const Matrix xc = covariates.rowwise() - covariates.colwise().mean();
  const Index K = cepstra.cols();
  const Index P = covariates.cols();

  sx_ = symmetric(xc.transpose() * xc / n);
  sxy_ = xc.transpose() * yc / n;
  Matrix sy = symmetric(yc.transpose() * yc / n);
  const double ridge = 1e-8 * sy.trace() / static_cast<double>(K);
  log_det_sy_ = log_det_or_inf(sy);
  sy.diagonal().array() += ridge;

  const Eigen::LLT<Matrix> sx_llt(sx_);
  if (sx_llt.info() != Eigen::Success) {
    throw DataError("covariate covariance is singular; the envelope objective is undefined");
  }
  sx_inv_ = symmetric(sx_llt.solve(Matrix::Identity(P, P)));
  log_det_sx_ = log_det_or_inf(sx_);

  const Eigen::LDLT<Matrix> sy_ldlt(sy);
  sx_given_y_ = symmetric(sx_ - sxy_ * sy_ldlt.solve(sxy_.transpose()));
  if (!std::isfinite(log_det_sy_)) log_det_sy_ = log_det_or_inf(sy);
}

double EnvelopeObjective::value(const Matrix& basis) const {
  return log_det_or_inf(basis.transpose() * sx_given_y_ * basis) +
         log_det_or_inf(basis.transpose() * sx_inv_ * basis);
}

Matrix EnvelopeObjective::gradient(const Matrix& basis) const {
  const Matrix mg = sx_given_y_ * basis;
  const Matrix ng = sx_inv_ * basis;
  const Matrix a = basis.transpose() * mg;
  const Matrix b = basis.transpose() * ng;
  return 2.0 * (a.llt().solve(mg.transpose()).transpose() +
                b.llt().solve(ng.transpose()).transpose());
}

StiefelResult minimize_on_stiefel(const EnvelopeObjective& objective, Matrix start,
                                  const StiefelOptions& options) {
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.2;
  constexpr double kMemory = 0.85;  // nonmonotone averaging weight
  constexpr double kXtol = 1e-12;
  constexpr double kFtol = 1e-14;

  StiefelResult out;
  Matrix x = orthonormalize(start);
  const Index r = x.cols();
  double f = objective.value(x);
  if (!std::isfinite(f)) throw NumericalError("envelope objective is not finite at the start");
  Matrix g = objective.gradient(x);
  Matrix dtx = g - x * (g.transpose() * x);
  double nrm = dtx.norm();
  out.trace.push_back(f);

  double tau = 1e-3;
  double q = 1.0;
  double reference = f;
  int small_steps = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (nrm < options.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Matrix u(x.rows(), 2 * r);
    Matrix v(x.rows(), 2 * r);
    u << g, x;
    v << x, -g;
    const Matrix vu = v.transpose() * u;
    const Matrix vx = v.transpose() * x;

    const Matrix x_old = x;
    const Matrix dtx_old = dtx;
    const double f_old = f;
    Matrix candidate;
    double f_new = kInf;
    for (int backtrack = 0; backtrack < 30; ++backtrack) {
      Matrix lhs = Matrix::Identity(2 * r, 2 * r) + 0.5 * tau * vu;
      candidate = x - tau * u * lhs.partialPivLu().solve(vx);
      f_new = objective.value(candidate);
      if (std::isfinite(f_new) && f_new <= reference - kArmijo * tau * nrm * nrm) break;
      tau *= kShrink;
    }
    if (!std::isfinite(f_new)) break;

    x = std::move(candidate);
    f = f_new;
    g = objective.gradient(x);
    dtx = g - x * (g.transpose() * x);
    nrm = dtx.norm();
    out.trace.push_back(f);
    out.iterations = it + 1;

    const Matrix s = x - x_old;
    const Matrix y = dtx - dtx_old;
    const double x_change = s.norm() / std::sqrt(static_cast<double>(x.rows()));
    const double f_change = std::abs(f_old - f) / (std::abs(f_old) + 1.0);
    small_steps = (x_change < kXtol && f_change < kFtol) ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      out.converged = true;
      break;
    }

    const double sy = std::abs((s.array() * y.array()).sum());
    if (sy > 0.0) {
      tau = (it % 2 == 0) ? s.squaredNorm() / sy : sy / y.squaredNorm();
      tau = std::clamp(tau, 1e-20, 1e20);
    } else {
      tau = 1e-3;
    }
    const double q_old = q;
    q = kMemory * q_old + 1.0;
    reference = (kMemory * q_old * reference + f) / q;
  }
  if (nrm < options.gradient_tolerance) out.converged = true;

  out.basis = orthonormalize(x);
  out.objective = objective.value(out.basis);
  return out;
}

StiefelResult estimate_envelope_basis(const EnvelopeObjective& objective, Index dimension,
                                      const EnvelopeOptions& options) {
  const Index P = objective.covariate_covariance().rows();
  const StiefelOptions stiefel{options.max_iterations, options.gradient_tolerance};

  std::vector<Matrix> starts;
  {
    const Matrix b_ols = objective.covariance_inverse() * objective.cross_covariance();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric(b_ols * b_ols.transpose()));
    starts.push_back(eig.eigenvectors().rightCols(dimension).rowwise().reverse());
  }
  for (int s = 0; s < options.random_starts; ++s) {
    Rng rng = make_stream(options.seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal;
    Matrix m(P, dimension);
    for (Index j = 0; j < dimension; ++j)
      for (Index i = 0; i < P; ++i) m(i, j) = normal(rng);
    starts.push_back(std::move(m));
  }

  std::optional<StiefelResult> best;
  std::vector<double> best_failed_trace;
  for (auto& start : starts) {
    StiefelResult result = minimize_on_stiefel(objective, std::move(start), stiefel);
    if (!result.converged) {
      if (best_failed_trace.empty()) best_failed_trace = result.trace;
      continue;
    }
    if (!best || result.objective < best->objective) best = std::move(result);
  }
  if (!best) {
    throw ConvergenceError("envelope basis optimization did not converge from any start",
                           Vector(), kInf, best_failed_trace);
  }
  return *best;
}

}  // namespace cepreg
