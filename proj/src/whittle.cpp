#include "cepreg/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cepreg/error.hpp"
#include "cepreg/parallel.hpp"

namespace cepreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective value, or +inf when the exponential overflows.
double objective_or_inf(const Vector& cepstra, const Vector& periodogram, const Matrix& basis) {
  const Vector eta = basis * cepstra;
  double total = 0.0;
  for (Index l = 0; l < eta.size(); ++l) {
    const double scaled = periodogram[l] == 0.0 ? 0.0 : periodogram[l] * std::exp(-eta[l]);
    total += scaled + eta[l];
  }
  return std::isfinite(total) ? total : kInf;
}

void check_dimensions(const Vector& cepstra, const Vector& periodogram, const Matrix& basis) {
  if (basis.rows() != periodogram.size() || basis.cols() != cepstra.size()) {
    throw ConfigError("dimension mismatch: basis is " + std::to_string(basis.rows()) + "x" +
                      std::to_string(basis.cols()) + ", periodogram has " +
                      std::to_string(periodogram.size()) + " ordinates, cepstra has " +
                      std::to_string(cepstra.size()) + " entries");
  }
}

struct OrderResult {
  Matrix cepstra;
  Vector nll;
  std::vector<int> iterations;
};

OrderResult fit_order(const Periodogram& periodogram, Index order, const FitConfig& config) {
  const CepstralFitter fitter(periodogram.grid, order);
  const Index N = periodogram.values.rows();
  OrderResult out{Matrix(N, order), Vector(N), std::vector<int>(static_cast<std::size_t>(N))};
  parallel_for(N, [&](Index j) {
    try {
      const ReplicateFit fit = fitter.fit(periodogram.values.row(j).transpose(), config);
      out.cepstra.row(j) = fit.cepstra.transpose();
      out.nll[j] = fit.nll;
      out.iterations[static_cast<std::size_t>(j)] = fit.iterations;
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("replicate " + std::to_string(j + 1) + ", K = " +
                                 std::to_string(order) + ": " + e.what(),
                             e.last_iterate(), e.gradient_norm(), e.objective_trace());
    }
  });
  return out;
}

}  // namespace

Index FitConfig::k_max_for(Index fourier_count) const {
  return k_max.value_or(std::min<Index>(30, std::max<Index>(1, fourier_count / 2)));
}

void FitConfig::validate(Index fourier_count) const {
  if (!(tolerance > 0.0)) throw ConfigError("convergence tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (step_halving_max < 0) throw ConfigError("step_halving_max must be nonnegative");
  const Index kmax = k_max_for(fourier_count);
  if (kmax < 1 || kmax > fourier_count) {
    throw ConfigError("K_max = " + std::to_string(kmax) + " outside [1, L = " +
                      std::to_string(fourier_count) + "]");
  }
}

double negative_whittle_nll(const Vector& cepstra, const Vector& periodogram,
                            const Matrix& basis) {
  check_dimensions(cepstra, periodogram, basis);
  const double value = objective_or_inf(cepstra, periodogram, basis);
  if (!std::isfinite(value)) throw DivergenceError("Whittle objective overflowed");
  return value;
}

Vector whittle_score(const Vector& cepstra, const Vector& periodogram, const Matrix& basis) {
  check_dimensions(cepstra, periodogram, basis);
  const Vector eta = basis * cepstra;
  const Vector residual =
      (1.0 - periodogram.array() * (-eta.array()).exp()).matrix();
  return basis.transpose() * residual;
}

Vector initial_cepstra(const Vector& periodogram, const Matrix& basis) {
  if (basis.rows() != periodogram.size()) {
    throw ConfigError("periodogram and basis row counts differ");
  }
  const Vector target =
      (periodogram.array().max(kPeriodogramFloor).log() + kEulerGamma).matrix();
  const Eigen::LLT<Matrix> gram(basis.transpose() * basis);
  if (gram.info() != Eigen::Success) throw NumericalError("singular basis Gram matrix");
  return gram.solve(basis.transpose() * target);
}

CepstralFitter::CepstralFitter(const FrequencyGrid& grid, Index order)
    : basis_(basis_matrix(grid, order)), information_(basis_.transpose() * basis_) {
  if (information_.info() != Eigen::Success) {
    throw NumericalError("Fisher information is singular for K = " + std::to_string(order));
  }
}

Vector CepstralFitter::initial(const Vector& periodogram) const {
  return initial_cepstra(periodogram, basis_);
}

ReplicateFit CepstralFitter::fit(const Vector& periodogram, const FitConfig& config) const {
  if (periodogram.size() != basis_.rows()) {
    throw ConfigError("periodogram has " + std::to_string(periodogram.size()) +
                      " ordinates, expected " + std::to_string(basis_.rows()));
  }
  const auto L = static_cast<double>(basis_.rows());
  const double gradient_tol = 1e-6 * L;

  ReplicateFit out;
  Vector y = initial(periodogram);
  double nll = objective_or_inf(y, periodogram, basis_);
  if (!std::isfinite(nll)) {
    y.setZero();
    y[0] = std::log(std::max(periodogram.mean(), kPeriodogramFloor));
    nll = objective_or_inf(y, periodogram, basis_);
    if (!std::isfinite(nll)) throw DivergenceError("Whittle objective overflowed at the start");
  }
  out.nll_trace.push_back(nll);

  double last_change = kInf;
  int iterations = 0;
  for (;;) {
    const Vector score = whittle_score(y, periodogram, basis_);
    const double gnorm = score.lpNorm<Eigen::Infinity>();
    if (last_change < config.tolerance && gnorm < gradient_tol) {
      out.gradient_norm = gnorm;
      break;
    }
    if (iterations >= config.max_iterations) {
      throw ConvergenceError("Fisher scoring did not converge in " +
                                 std::to_string(config.max_iterations) +
                                 " iterations (score sup-norm " + std::to_string(gnorm) + ")",
                             y, gnorm, out.nll_trace);
    }

    const Vector step = information_.solve(score);
    double scale = 1.0;
    bool accepted = false;
    Vector candidate;
    double candidate_nll = kInf;
    for (int h = 0; h <= config.step_halving_max; ++h, scale *= 0.5) {
      candidate = y - scale * step;
      candidate_nll = objective_or_inf(candidate, periodogram, basis_);
      if (candidate_nll <= nll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No halving decreases the objective: we are at its rounding floor.
      if (gnorm < gradient_tol) {
        out.gradient_norm = gnorm;
        break;
      }
      throw ConvergenceError("step-halving failed to decrease the Whittle objective", y,
                             gnorm, out.nll_trace);
    }
    last_change = std::abs(nll - candidate_nll) / (std::abs(nll) + 1.0);
    y = std::move(candidate);
    nll = candidate_nll;
    ++iterations;
    out.nll_trace.push_back(nll);
  }

  out.cepstra = std::move(y);
  out.nll = nll;
  out.iterations = iterations;
  return out;
}

ReplicateFit fit_replicate(const Vector& periodogram, const FrequencyGrid& grid, Index order,
                           const FitConfig& config) {
  return CepstralFitter(grid, order).fit(periodogram, config);
}

namespace {

struct Search {
  AicSelection selection;
  OrderResult best;
};

Search run_aic_search(const Periodogram& periodogram, const FitConfig& config) {
  const Index L = periodogram.grid.size();
  config.validate(L);
  const Index N = periodogram.values.rows();
  const Index kmax = config.k_max_for(L);

  Search search;
  double best_aic = kInf;
  for (Index K = 1; K <= kmax; ++K) {
    OrderResult result;
    try {
      result = fit_order(periodogram, K, config);
    } catch (const ConvergenceError&) {
      search.selection.skipped.push_back(K);
      continue;
    } catch (const DivergenceError&) {
      search.selection.skipped.push_back(K);
      continue;
    }
    const double aic = result.nll.sum() + 2.0 * static_cast<double>(N * K);
    search.selection.trace[K] = aic;
    if (aic < best_aic) {
      best_aic = aic;
      search.selection.order = K;
      search.best = std::move(result);
    }
  }
  if (search.selection.order == 0) {
    throw ConvergenceError("no truncation order in 1.." + std::to_string(kmax) +
                               " converged for every replicate",
                           Vector(), kInf);
  }
  return search;
}

}  // namespace

AicSelection select_k_aic(const Periodogram& periodogram, const FitConfig& config) {
  return run_aic_search(periodogram, config).selection;
}

WhittleFit fit_periodogram(const Periodogram& periodogram, const FitConfig& config,
                           std::optional<Index> order) {
  WhittleFit out;
  if (order) {
    config.validate(periodogram.grid.size());
    OrderResult result = fit_order(periodogram, *order, config);
    out.cepstra = std::move(result.cepstra);
    out.nll = std::move(result.nll);
    out.iterations = std::move(result.iterations);
    out.order = *order;
    return out;
  }
  Search search = run_aic_search(periodogram, config);
  out.cepstra = std::move(search.best.cepstra);
  out.nll = std::move(search.best.nll);
  out.iterations = std::move(search.best.iterations);
  out.order = search.selection.order;
  out.aic_trace = std::move(search.selection.trace);
  return out;
}

WhittleFit fit_panel(const TimeSeriesPanel& panel, const FitConfig& config,
                     std::optional<Index> order) {
  return fit_periodogram(compute_periodogram(panel), config, order);
}

}  // namespace cepreg
