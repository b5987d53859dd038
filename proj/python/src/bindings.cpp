#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cepreg/bootstrap.hpp"
#include "cepreg/error.hpp"
#include "cepreg/experiments.hpp"
#include "cepreg/parallel.hpp"
#include "cepreg/pipeline.hpp"
#include "cepreg/version.hpp"

namespace py = pybind11;
using namespace cepreg;

namespace {

PipelineOptions options_from(const std::string& estimator, std::optional<Index> k,
                             std::optional<Index> dim, Index grid, bool standardize) {
  PipelineOptions o;
  o.order = k;
  o.estimator = EstimatorSpec{parse_estimator(estimator), dim};
  o.grid_size = grid;
  o.standardize = standardize;
  return o;
}

py::dict fit_dict(const PipelineResult& r) {
  py::dict d;
  d["K"] = r.stage1.order;
  d["estimator"] = to_string(r.model.estimator);
  d["dimension"] = r.model.dimension;
  d["cepstra"] = r.stage1.cepstra;
  d["intercept"] = r.model.intercept;
  d["B"] = r.model.coefficients;
  d["frequencies"] = r.effects.frequencies;
  d["alpha"] = r.effects.alpha;
  d["beta"] = r.effects.beta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cepreg, m) {
  m.doc() = "Cepstral regression of replicated time series on covariates.";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base(m, "CepregError");
  static py::exception<DataError> data(m, "DataError", base.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", base.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      data(e.what());
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const ConvergenceError& e) {
      convergence(e.what());
    } catch (const NumericalError& e) {
      numerical(e.what());
    }
  });

  m.def("set_threads", &set_thread_count, py::arg("threads"),
        "Worker threads for parallel loops; 0 restores the default.");

  m.def(
      "periodogram",
      [](const Matrix& series) {
        const Periodogram p = compute_periodogram(series);
        return py::make_tuple(p.grid.frequencies(), p.values);
      },
      py::arg("series"), "Fourier frequencies and the N x L periodogram of each row.");

  m.def(
      "fit_cepstra",
      [](const Matrix& series, std::optional<Index> k) {
        const WhittleFit f = fit_panel(TimeSeriesPanel(series, Matrix::Zero(series.rows(), 1)),
                                       FitConfig{}, k);
        py::dict d;
        d["K"] = f.order;
        d["cepstra"] = f.cepstra;
        d["nll"] = f.nll;
        return d;
      },
      py::arg("series"), py::arg("k") = py::none(),
      "Whittle cepstral fit of every row; K by AIC when k is None.");

  m.def(
      "fit",
      [](const Matrix& series, const Matrix& covariates, const std::string& estimator,
         std::optional<Index> k, std::optional<Index> dim, Index grid, bool standardize) {
        const PipelineOptions o = options_from(estimator, k, dim, grid, standardize);
        return fit_dict(run_pipeline(TimeSeriesPanel(series, covariates), o));
      },
      py::arg("series"), py::arg("covariates"), py::arg("estimator") = "ols",
      py::arg("k") = py::none(), py::arg("dim") = py::none(), py::arg("grid") = 256,
      py::arg("standardize") = false);

  m.def(
      "bootstrap",
      [](const Matrix& series, const Matrix& covariates, const std::string& estimator,
         std::optional<Index> k, std::optional<Index> dim, Index grid, int replicates,
         double alpha, std::uint64_t seed) {
        const PipelineOptions o = options_from(estimator, k, dim, grid, false);
        const PipelineResult r = run_pipeline(TimeSeriesPanel(series, covariates), o);
        BootstrapConfig c;
        c.replicates = replicates;
        c.alpha = alpha;
        c.seed = seed;
        const ConfidenceBands b = pipeline_bands(r, o, c);
        py::dict d = fit_dict(r);
        d["lower"] = b.lower;
        d["upper"] = b.upper;
        d["bias"] = b.bias;
        return d;
      },
      py::arg("series"), py::arg("covariates"), py::arg("estimator") = "ols",
      py::arg("k") = py::none(), py::arg("dim") = py::none(), py::arg("grid") = 256,
      py::arg("replicates") = 500, py::arg("alpha") = 0.05, py::arg("seed") = 1,
      "Fit plus residual-bootstrap bands; rows of lower/upper are alpha then each beta.");

  m.def(
      "simulate_series",
      [](const Vector& log_spectrum, Index length, std::uint64_t seed) {
        Rng rng(seed);
        return simulate_series(log_spectrum, length, rng);
      },
      py::arg("log_spectrum"), py::arg("length"), py::arg("seed") = 1,
      "Gaussian series with the given log-spectrum at frequencies l / length.");

  m.def(
      "simulate_example",
      [](int example, Index n, Index t, Index p, double tau, double xi_variance,
         std::uint64_t seed) {
        if (example != 1 && example != 2) throw ConfigError("example must be 1 or 2");
        Rng rng(seed);
        const SimulatedPanel s = example == 1 ? generate_example1(n, t, p, rng, xi_variance)
                                              : generate_example2(n, t, tau, rng, xi_variance);
        py::dict d;
        d["series"] = s.panel.series();
        d["covariates"] = s.panel.covariates();
        d["intercept"] = s.truth.intercept;
        d["B"] = s.truth.coefficients;
        d["cepstra"] = s.truth.replicate_cepstra;
        return d;
      },
      py::arg("example") = 1, py::arg("n") = 50, py::arg("t") = 50, py::arg("p") = 1,
      py::arg("tau") = 0.0, py::arg("xi_variance") = 0.5, py::arg("seed") = 1);
}
