#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cepreg/bootstrap.hpp"
#include "cepreg/regression.hpp"

namespace cepreg {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

enum class SeriesFormat { wide, long_format };

struct IngestReport {
  Index replicates = 0;
  Index length = 0;
  Index covariates = 0;
  Index dropped_rows = 0;  // blank lines skipped in either file
  SeriesFormat format = SeriesFormat::wide;
  bool keyed = false;  // covariates aligned by replicate_id rather than row order
};

struct IngestResult {
  TimeSeriesPanel panel;
  IngestReport report;
  std::vector<std::string> replicate_ids;  // in panel row order
};

/// Series: N x T numbers without header, or long format with columns
/// replicate_id,t,value (detected from the header or from a 3-column layout).
/// Covariates: header row of names, then N rows; an optional leading
/// replicate_id column keys rows to series ids. Throws DataError with file
/// row/column coordinates on any malformed input.
IngestResult ingest(const std::filesystem::path& series_path,
                    const std::filesystem::path& covariates_path);

/// Writes the panel in the wide layout accepted by ingest.
void export_panel(const TimeSeriesPanel& panel, const std::filesystem::path& series_path,
                  const std::filesystem::path& covariates_path);

struct FitOutput {
  LinearModelFit fit;
  std::vector<std::string> covariate_names;
  EffectFunctions effects;
  std::optional<ConfidenceBands> bands;
  std::optional<std::uint64_t> seed;
  std::map<Index, double> aic_trace;
  std::optional<Standardization> standardization;  // values are not stored
};

nlohmann::ordered_json fit_to_json(const FitOutput& output);

/// Columns target,frequency,estimate,lower,upper; (P + 1) * M rows. lower and
/// upper are empty without bands.
std::string effects_csv(const FitOutput& output);

/// Writes fit.json and effects.csv into directory (created if missing).
void emit_fit(const FitOutput& output, const std::filesystem::path& directory);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& header = {});

/// Plain numeric CSV without header.
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace cepreg
