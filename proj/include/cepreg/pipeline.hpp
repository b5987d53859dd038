#pragma once

#include <optional>

#include "cepreg/bootstrap.hpp"
#include "cepreg/regression.hpp"
#include "cepreg/whittle.hpp"

namespace cepreg {

struct PipelineOptions {
  FitConfig whittle;
  std::optional<Index> order;  // empty selects K by AIC
  EstimatorSpec estimator;
  EnvelopeOptions envelope;
  bool standardize = false;
  Index grid_size = 256;
};

struct PipelineResult {
  TimeSeriesPanel panel;  // covariates as used by the second stage
  WhittleFit stage1;
  LinearModelFit model;
  EffectFunctions effects;
  std::optional<Standardization> standardization;
};

/// Whittle fit of every replicate followed by the cepstral regression.
PipelineResult run_pipeline(const TimeSeriesPanel& panel, const PipelineOptions& options);

/// Residual-bootstrap bands for a pipeline result, on the same grid as its
/// effect functions.
ConfidenceBands pipeline_bands(const PipelineResult& result, const PipelineOptions& options,
                               BootstrapConfig config);

}  // namespace cepreg
