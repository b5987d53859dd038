#include "cepreg/experiments.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "cepreg/bootstrap.hpp"
#include "cepreg/error.hpp"
#include "cepreg/io.hpp"
#include "cepreg/parallel.hpp"

namespace cepreg {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// xi_j = e1 + e2 cos(2 pi w) + e3 cos(4 pi w) in cepstral coordinates.
Vector replicate_error(Rng& rng, double variance, Index order) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Vector e = Vector::Zero(order);
  e[0] = normal(rng);
  e[1] = normal(rng) / kSqrt2;
  e[2] = normal(rng) / kSqrt2;
  return e;
}

SimulatedPanel synthesize(Matrix x, TrueModel truth, Index length, Rng& rng) {
  const Index N = x.rows();
  Matrix series(N, length);
  for (Index j = 0; j < N; ++j) {
    series.row(j) =
        simulate_series_from_cepstra(truth.replicate_cepstra.row(j).transpose(), length, rng)
            .transpose();
  }
  return {TimeSeriesPanel(std::move(series), std::move(x)), std::move(truth)};
}

Vector truth_row(const TrueModel& truth, Index p) {
  return p < truth.coefficients.rows() ? Vector(truth.coefficients.row(p).transpose())
                                       : Vector::Zero(truth.order());
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

SimulatedPanel generate_example1(Index replicates, Index length, Index covariates, Rng& rng,
                                 double xi_variance) {
  if (covariates < 1) throw ConfigError("example one needs P >= 1");
  constexpr Index order = 3;
  TrueModel truth;
  truth.intercept = Vector::Zero(order);
  truth.intercept[1] = kSqrt2;  // 2cos(2 pi w)
  truth.coefficients = Matrix::Zero(covariates, order);
  truth.coefficients(0, 2) = kSqrt2;  // 2cos(4 pi w)
  truth.replicate_cepstra.resize(replicates, order);

  Matrix x(replicates, covariates);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (Index j = 0; j < replicates; ++j) {
    x(j, 0) = uniform(rng);
    for (Index p = 1; p < covariates; ++p) x(j, p) = normal(rng);
    truth.replicate_cepstra.row(j) =
        (truth.intercept + truth.coefficients.transpose() * x.row(j).transpose() +
         replicate_error(rng, xi_variance, order))
            .transpose();
  }
  return synthesize(std::move(x), std::move(truth), length, rng);
}

SimulatedPanel generate_example2(Index replicates, Index length, double tau, Rng& rng,
                                 double xi_variance) {
  if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("tau must lie in [0, 1)");
  constexpr Index P = 10;
  constexpr Index order = 5;
  TrueModel truth;
  truth.intercept = Vector::Zero(order);
  truth.intercept[1] = kSqrt2;
  truth.coefficients = Matrix::Zero(P, order);
  truth.coefficients(0, 2) = kSqrt2;  // 2cos(4 pi w)
  truth.coefficients(0, 3) = kSqrt2;  // 2cos(6 pi w)
  truth.coefficients(1, 4) = kSqrt2;  // 2cos(8 pi w)
  truth.replicate_cepstra.resize(replicates, order);

  Matrix sigma(P, P);
  for (Index p = 0; p < P; ++p)
    for (Index q = 0; q < P; ++q) sigma(p, q) = std::pow(tau, static_cast<double>(std::abs(p - q)));
  const Matrix chol = sigma.llt().matrixL();

  Matrix x(replicates, P);
  std::normal_distribution<double> normal;
  for (Index j = 0; j < replicates; ++j) {
    Vector z(P);
    for (Index p = 0; p < P; ++p) z[p] = normal(rng);
    x.row(j) = (chol * z).transpose();
    truth.replicate_cepstra.row(j) =
        (truth.intercept + truth.coefficients.transpose() * x.row(j).transpose() +
         replicate_error(rng, xi_variance, order))
            .transpose();
  }
  return synthesize(std::move(x), std::move(truth), length, rng);
}

double ase_effect(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size() || estimate.size() == 0) {
    throw ConfigError("curves must be nonempty and share a grid");
  }
  return (estimate - truth).squaredNorm() / static_cast<double>(estimate.size());
}

double ase_effect(const Vector& estimate_cepstra, const Vector& truth_cepstra,
                  const FrequencyGrid& grid) {
  const Vector& w = grid.frequencies();
  return ase_effect(basis_matrix(w, estimate_cepstra.size()) * estimate_cepstra,
                    basis_matrix(w, truth_cepstra.size()) * truth_cepstra);
}

double ase_log_spectra(const LinearModelFit& fit, const Matrix& covariates,
                       const TrueModel& truth, const FrequencyGrid& grid) {
  const Vector& w = grid.frequencies();
  const Matrix phi_fit = basis_matrix(w, fit.order());
  const Matrix phi_true = basis_matrix(w, truth.order());
  const Index P = covariates.cols();
  Matrix true_coefficients = Matrix::Zero(P, truth.order());
  const Index shared = std::min(P, truth.coefficients.rows());
  true_coefficients.topRows(shared) = truth.coefficients.topRows(shared);

  const Matrix fitted =
      ((covariates * fit.coefficients).rowwise() + fit.intercept.transpose()) * phi_fit.transpose();
  const Matrix population =
      ((covariates * true_coefficients).rowwise() + truth.intercept.transpose()) *
      phi_true.transpose();
  return (fitted - population).squaredNorm() / static_cast<double>(fitted.size());
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (replicates < 2) throw ConfigError("N must be at least 2");
  if (length < 8) throw ConfigError("T must be at least 8");
  if (example == Example::one && covariates < 1) throw ConfigError("P must be at least 1");
  if (example == Example::two && !(tau >= 0.0 && tau < 1.0)) {
    throw ConfigError("tau must lie in [0, 1)");
  }
  if (estimators.empty()) throw ConfigError("no estimators requested");
  if (!(xi_variance >= 0.0)) throw ConfigError("replicate error variance must be nonnegative");
}

SimulatedPanel generate(const ExperimentSpec& spec, Rng& rng) {
  return spec.example == Example::one
             ? generate_example1(spec.replicates, spec.length, spec.covariates, rng,
                                 spec.xi_variance)
             : generate_example2(spec.replicates, spec.length, spec.tau, rng, spec.xi_variance);
}

std::string estimator_label(const EstimatorSpec& spec) {
  std::string label = "cep";
  switch (spec.kind) {
    case Estimator::ols:
      label += "OLS";
      break;
    case Estimator::rrr:
      label += "RRR";
      break;
    case Estimator::envelope:
      label += "ENV";
      break;
  }
  if (spec.dimension) label += "(" + std::to_string(*spec.dimension) + ")";
  return label;
}

AseSummary run_benchmark(const ExperimentSpec& spec) {
  using Clock = std::chrono::steady_clock;
  spec.validate();
  const Index P = spec.example == Example::one ? spec.covariates : 10;
  const Index shown_betas = P;

  AseSummary summary;
  summary.spec = spec;
  summary.targets.push_back("alpha");
  for (Index p = 0; p < shown_betas; ++p) summary.targets.push_back("beta_" + std::to_string(p + 1));
  summary.targets.push_back("log_spectra");

  const auto reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t n_est = spec.estimators.size();
  std::vector<RepetitionRecord> records(reps * n_est);

  parallel_for(static_cast<std::ptrdiff_t>(reps), [&](std::ptrdiff_t rep) {
    Rng rng = make_stream(spec.seed, static_cast<std::uint64_t>(rep));
    const SimulatedPanel sim = generate(spec, rng);
    const FrequencyGrid grid(spec.length);

    const auto stage1_start = Clock::now();
    std::optional<WhittleFit> stage1;
    try {
      stage1 = fit_panel(sim.panel, spec.whittle, spec.order);
    } catch (const Error&) {
    }
    const double stage1_seconds =
        std::chrono::duration<double>(Clock::now() - stage1_start).count();

    for (std::size_t e = 0; e < n_est; ++e) {
      RepetitionRecord& rec = records[static_cast<std::size_t>(rep) * n_est + e];
      rec.repetition = static_cast<int>(rep);
      rec.estimator = spec.estimators[e].kind;
      if (!stage1) {
        rec.failed = true;
        continue;
      }
      rec.order = stage1->order;
      const auto start = Clock::now();
      try {
        const LinearModelFit fit =
            fit_model(stage1->cepstra, sim.panel.covariates(), spec.estimators[e]);
        rec.seconds =
            stage1_seconds + std::chrono::duration<double>(Clock::now() - start).count();
        rec.ase.push_back(ase_effect(fit.intercept, sim.truth.intercept, grid));
        for (Index p = 0; p < shown_betas; ++p) {
          rec.ase.push_back(ase_effect(Vector(fit.coefficients.row(p).transpose()),
                                       truth_row(sim.truth, p), grid));
        }
        rec.ase.push_back(ase_log_spectra(fit, sim.panel.covariates(), sim.truth, grid));
      } catch (const Error&) {
        rec.failed = true;
        rec.ase.clear();
      }
    }
  });

  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorSummary row;
    row.estimator = spec.estimators[e];
    std::vector<std::vector<double>> values(summary.targets.size());
    double seconds = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const RepetitionRecord& rec = records[rep * n_est + e];
      if (rec.failed) {
        ++row.failures;
        continue;
      }
      ++row.completed;
      seconds += rec.seconds;
      for (std::size_t t = 0; t < values.size(); ++t) values[t].push_back(rec.ase[t]);
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
      const double m = mean_of(values[t]);
      row.targets.push_back({summary.targets[t], m, sd_of(values[t], m)});
    }
    row.mean_seconds = row.completed > 0 ? seconds / row.completed : 0.0;
    if (10 * row.failures > spec.repetitions) {
      throw ConvergenceError(estimator_label(row.estimator) + " failed in " +
                                 std::to_string(row.failures) + " of " +
                                 std::to_string(spec.repetitions) + " repetitions",
                             Vector(), 0.0);
    }
    summary.estimators.push_back(std::move(row));
  }
  summary.records = std::move(records);
  return summary;
}

std::string benchmark_csv(const AseSummary& summary) {
  std::ostringstream out;
  out << "estimator,target,mean,sd,completed,failures\n";
  for (const auto& row : summary.estimators) {
    for (const auto& t : row.targets) {
      out << estimator_label(row.estimator) << ',' << t.target << ',' << format_double(t.mean)
          << ',' << format_double(t.sd) << ',' << row.completed << ',' << row.failures << '\n';
    }
  }
  return out.str();
}

std::string benchmark_markdown(const AseSummary& summary) {
  const ExperimentSpec& s = summary.spec;
  std::ostringstream out;
  out << "Example " << (s.example == Example::one ? 1 : 2) << ": T = " << s.length
      << ", N = " << s.replicates << ", P = " << (s.example == Example::one ? s.covariates : 10);
  if (s.example == Example::two) out << ", tau = " << s.tau;
  out << ", " << s.repetitions << " repetitions, seed " << s.seed << "\n\n";
  out << "ASE x 10^2, mean (sd)\n\n| target |";
  for (const auto& row : summary.estimators) out << ' ' << estimator_label(row.estimator) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < summary.estimators.size(); ++i) out << "---|";
  out << '\n';
  out << std::fixed << std::setprecision(2);
  for (std::size_t t = 0; t < summary.targets.size(); ++t) {
    out << "| " << summary.targets[t] << " |";
    for (const auto& row : summary.estimators) {
      out << ' ' << 100.0 * row.targets[t].mean << " (" << 100.0 * row.targets[t].sd << ") |";
    }
    out << '\n';
  }
  out << "| failures |";
  for (const auto& row : summary.estimators) out << ' ' << row.failures << " |";
  out << '\n';
  return out.str();
}

std::string benchmark_timing_csv(const AseSummary& summary) {
  std::ostringstream out;
  out << "estimator,mean_seconds_per_fit\n";
  for (const auto& row : summary.estimators) {
    out << estimator_label(row.estimator) << ',' << format_double(row.mean_seconds) << '\n';
  }
  return out.str();
}

}  // namespace cepreg
