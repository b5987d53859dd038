// cepreg command-line front end: fit, bootstrap, simulate, benchmark.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cepreg/bootstrap.hpp"
#include "cepreg/error.hpp"
#include "cepreg/experiments.hpp"
#include "cepreg/io.hpp"
#include "cepreg/parallel.hpp"
#include "cepreg/pipeline.hpp"
#include "cepreg/version.hpp"

namespace fs = std::filesystem;
using namespace cepreg;

namespace {

// "auto" or a positive integer.
std::optional<Index> parse_auto(const std::string& text, const char* flag) {
  if (text == "auto") return std::nullopt;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
    throw ConfigError(std::string(flag) + " expects 'auto' or a positive integer, got '" + text +
                      "'");
  }
  return static_cast<Index>(v);
}

struct RunConfig {
  std::string series;
  std::string covariates;
  std::string estimator = "ols";
  std::string k = "auto";
  std::string dim = "auto";
  int bootstrap = 0;
  double alpha = 0.05;
  Index grid = 256;
  bool standardize = false;
  std::uint64_t seed = 1;
  std::string output = "cepreg_out";
  int threads = 0;

  PipelineOptions pipeline() const {
    PipelineOptions o;
    o.order = parse_auto(k, "--k");
    o.estimator.kind = parse_estimator(estimator);
    o.estimator.dimension = parse_auto(dim, "--dim");
    if (o.estimator.kind == Estimator::ols && o.estimator.dimension) {
      throw ConfigError("--dim applies only to rrr and envelope");
    }
    if (grid < 2) throw ConfigError("--grid must be at least 2");
    o.grid_size = grid;
    o.standardize = standardize;
    return o;
  }
};

void add_fit_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--series", c.series, "series CSV (wide N x T or long replicate_id,t,value)")
      ->required();
  cmd->add_option("--covariates", c.covariates, "covariate CSV with a header row")->required();
  cmd->add_option("--estimator", c.estimator, "ols | rrr | envelope")
      ->check(CLI::IsMember({"ols", "rrr", "envelope", "env"}));
  cmd->add_option("--k", c.k, "cepstral truncation: auto or INT");
  cmd->add_option("--dim", c.dim, "rank / envelope dimension: auto or INT");
  cmd->add_option("--alpha", c.alpha, "band level is 1 - alpha");
  cmd->add_option("--grid", c.grid, "frequency grid size M");
  cmd->add_flag("--standardize", c.standardize, "scale covariates to unit variance");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--output", c.output, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads (0 = runtime default)");
}

int run_fit(const RunConfig& c, bool with_bands) {
  const PipelineOptions options = c.pipeline();
  if (with_bands) {
    BootstrapConfig probe;
    probe.replicates = c.bootstrap;
    probe.alpha = c.alpha;
    probe.validate();
  }
  const IngestResult data = ingest(c.series, c.covariates);
  std::cerr << "ingested N=" << data.report.replicates << " T=" << data.report.length
            << " P=" << data.report.covariates << " dropped_rows=" << data.report.dropped_rows
            << '\n';

  const PipelineResult result = run_pipeline(data.panel, options);
  FitOutput out{result.model, data.panel.covariate_names(), result.effects, std::nullopt, c.seed,
                result.stage1.aic_trace, result.standardization};
  if (with_bands) {
    BootstrapConfig config;
    config.replicates = c.bootstrap;
    config.alpha = c.alpha;
    config.seed = c.seed;
    out.bands = pipeline_bands(result, options, config);
  }
  emit_fit(out, c.output);
  std::cerr << "K=" << result.model.order() << " estimator=" << to_string(result.model.estimator)
            << " dimension=" << result.model.dimension << " -> " << c.output << '\n';
  return 0;
}

struct SimulateConfig {
  int example = 1;
  std::string truth;
  Index n = 50;
  Index t = 50;
  Index p = 1;
  double tau = 0.0;
  double xi_variance = 0.5;
  std::uint64_t seed = 1;
  std::string output = "cepreg_sim";
};

int run_simulate(const SimulateConfig& c) {
  std::error_code ec;
  fs::create_directories(c.output, ec);
  if (ec) throw ConfigError("cannot create " + c.output + ": " + ec.message());
  const fs::path dir(c.output);
  Rng rng = make_stream(c.seed, 0);
  if (!c.truth.empty()) {
    const Matrix cepstra = read_matrix_csv(c.truth);
    Matrix series(cepstra.rows(), c.t);
    for (Index j = 0; j < cepstra.rows(); ++j) {
      series.row(j) =
          simulate_series_from_cepstra(cepstra.row(j).transpose(), c.t, rng).transpose();
    }
    write_text(dir / "series.csv", matrix_csv(series));
    return 0;
  }
  if (c.example != 1 && c.example != 2) throw ConfigError("--example must be 1 or 2");
  const SimulatedPanel sim = c.example == 1
                                 ? generate_example1(c.n, c.t, c.p, rng, c.xi_variance)
                                 : generate_example2(c.n, c.t, c.tau, rng, c.xi_variance);
  export_panel(sim.panel, dir / "series.csv", dir / "covariates.csv");
  write_text(dir / "true_cepstra.csv", matrix_csv(sim.truth.replicate_cepstra));
  Matrix effects(sim.truth.coefficients.rows() + 1, sim.truth.order());
  effects.row(0) = sim.truth.intercept.transpose();
  effects.bottomRows(sim.truth.coefficients.rows()) = sim.truth.coefficients;
  write_text(dir / "true_effects.csv", matrix_csv(effects));
  return 0;
}

struct BenchmarkConfig {
  int example = 1;
  Index n = 50;
  Index t = 50;
  Index p = 1;
  double tau = 0.0;
  double xi_variance = 0.5;
  int reps = 100;
  std::vector<std::string> estimators{"ols"};
  std::string k = "auto";
  std::string dim = "auto";
  std::uint64_t seed = 1;
  std::string output = "cepreg_bench";
};

int run_benchmark_cmd(const BenchmarkConfig& c) {
  ExperimentSpec spec;
  if (c.example != 1 && c.example != 2) throw ConfigError("--example must be 1 or 2");
  spec.example = c.example == 1 ? Example::one : Example::two;
  spec.replicates = c.n;
  spec.length = c.t;
  spec.covariates = c.p;
  spec.tau = c.tau;
  spec.xi_variance = c.xi_variance;
  spec.repetitions = c.reps;
  spec.seed = c.seed;
  spec.order = parse_auto(c.k, "--k");
  spec.estimators.clear();
  const auto dim = parse_auto(c.dim, "--dim");
  for (const auto& name : c.estimators) {
    EstimatorSpec e{parse_estimator(name), std::nullopt};
    if (e.kind != Estimator::ols) e.dimension = dim;
    spec.estimators.push_back(e);
  }
  const AseSummary summary = run_benchmark(spec);
  std::error_code ec;
  fs::create_directories(c.output, ec);
  if (ec) throw ConfigError("cannot create " + c.output + ": " + ec.message());
  const fs::path dir(c.output);
  write_text(dir / "benchmark.csv", benchmark_csv(summary));
  write_text(dir / "benchmark.md", benchmark_markdown(summary));
  write_text(dir / "timing.csv", benchmark_timing_csv(summary));
  std::cout << benchmark_markdown(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cepstral regression for replicated time series"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 0;

  RunConfig fit_cfg;
  auto* fit = app.add_subcommand("fit", "two-stage fit and effect functions");
  add_fit_flags(fit, fit_cfg);

  RunConfig boot_cfg;
  boot_cfg.bootstrap = 500;
  auto* boot = app.add_subcommand("bootstrap", "fit plus residual-bootstrap bands");
  add_fit_flags(boot, boot_cfg);
  boot->add_option("--bootstrap", boot_cfg.bootstrap, "bootstrap replicates B");

  SimulateConfig sim_cfg;
  auto* sim = app.add_subcommand("simulate", "synthetic panels");
  sim->add_option("--example", sim_cfg.example, "1 or 2");
  sim->add_option("--truth", sim_cfg.truth, "CSV of cepstral vectors, one row per replicate");
  sim->add_option("--n", sim_cfg.n, "replicates N");
  sim->add_option("--t", sim_cfg.t, "series length T");
  sim->add_option("--p", sim_cfg.p, "covariates P (example 1)");
  sim->add_option("--tau", sim_cfg.tau, "covariate correlation (example 2)");
  sim->add_option("--xi-variance", sim_cfg.xi_variance, "variance of replicate errors");
  sim->add_option("--seed", sim_cfg.seed, "master seed");
  sim->add_option("--output", sim_cfg.output, "output directory");
  sim->add_option("--threads", threads, "worker threads");

  BenchmarkConfig bench_cfg;
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo ASE tables");
  bench->add_option("--example", bench_cfg.example, "1 or 2");
  bench->add_option("--n", bench_cfg.n, "replicates N");
  bench->add_option("--t", bench_cfg.t, "series length T");
  bench->add_option("--p", bench_cfg.p, "covariates P (example 1)");
  bench->add_option("--tau", bench_cfg.tau, "covariate correlation (example 2)");
  bench->add_option("--xi-variance", bench_cfg.xi_variance, "variance of replicate errors");
  bench->add_option("--reps", bench_cfg.reps, "Monte Carlo repetitions");
  bench->add_option("--estimators", bench_cfg.estimators, "comma-separated list")
      ->delimiter(',');
  bench->add_option("--k", bench_cfg.k, "auto or INT");
  bench->add_option("--dim", bench_cfg.dim, "auto or INT");
  bench->add_option("--seed", bench_cfg.seed, "master seed");
  bench->add_option("--output", bench_cfg.output, "output directory");
  bench->add_option("--threads", threads, "worker threads");

  fit->add_option("--bootstrap", fit_cfg.bootstrap, "bootstrap replicates (0 = no bands)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  try {
    if (fit_cfg.threads > 0) threads = fit_cfg.threads;
    if (boot_cfg.threads > 0) threads = boot_cfg.threads;
    if (threads < 0) throw ConfigError("--threads must be nonnegative");
    set_thread_count(threads);
    if (*fit) return run_fit(fit_cfg, fit_cfg.bootstrap > 0);
    if (*boot) return run_fit(boot_cfg, true);
    if (*sim) return run_simulate(sim_cfg);
    if (*bench) return run_benchmark_cmd(bench_cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
