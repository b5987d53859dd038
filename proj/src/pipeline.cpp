#include "cepreg/pipeline.hpp"

namespace cepreg {

PipelineResult run_pipeline(const TimeSeriesPanel& panel, const PipelineOptions& options) {
  std::optional<Standardization> standardization;
  TimeSeriesPanel used = panel;
  if (options.standardize) {
    standardization = standardize_columns(panel.covariates());
    used = panel.with_covariates(standardization->values);
  }
  WhittleFit stage1 = fit_panel(used, options.whittle, options.order);
  LinearModelFit model =
      fit_model(stage1.cepstra, used.covariates(), options.estimator, options.envelope);
  EffectFunctions effects = effect_functions(model, options.grid_size);
  return {std::move(used), std::move(stage1), std::move(model), std::move(effects),
          std::move(standardization)};
}

ConfidenceBands pipeline_bands(const PipelineResult& result, const PipelineOptions& options,
                               BootstrapConfig config) {
  config.frequencies = result.effects.frequencies;
  FitConfig whittle = options.whittle;
  return residual_bootstrap_bands(result.panel, result.model, whittle, options.estimator, config,
                                  options.envelope);
}

}  // namespace cepreg
