#include "cepreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cepreg/error.hpp"
#include "cepreg/version.hpp"

namespace cepreg {
namespace {

struct CsvRow {
  Index line = 0;  // 1-based line number in the file
  std::vector<std::string> cells;
};

struct CsvFile {
  std::vector<CsvRow> rows;
  Index blank = 0;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvFile file;
  std::string line;
  Index number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) {
      ++file.blank;
      continue;
    }
    CsvRow row{number, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.cells.push_back(trim(std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    file.rows.push_back(std::move(row));
  }
  return file;
}

std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

std::string where(const std::filesystem::path& path, Index line, Index column) {
  return path.filename().string() + " row " + std::to_string(line) + ", column " +
         std::to_string(column);
}

double number_at(const std::filesystem::path& path, const CsvRow& row, std::size_t column) {
  const auto v = parse_number(row.cells[column]);
  if (!v) {
    throw DataError("non-numeric cell '" + row.cells[column] + "' at " +
                    where(path, row.line, static_cast<Index>(column) + 1));
  }
  return *v;
}

bool is_key_name(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "replicate_id" || lower == "id";
}

struct SeriesTable {
  Matrix values;
  std::vector<std::string> ids;  // empty for wide input
  SeriesFormat format = SeriesFormat::wide;
  Index blank = 0;
};

SeriesTable read_long(const std::filesystem::path& path, const CsvFile& file, bool has_header) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::map<long long, double>> cells;
  for (std::size_t r = has_header ? 1 : 0; r < file.rows.size(); ++r) {
    const CsvRow& row = file.rows[r];
    if (row.cells.size() != 3) {
      throw DataError("expected 3 columns (replicate_id,t,value) but found " +
                      std::to_string(row.cells.size()) + " at " + where(path, row.line, 1));
    }
    const std::string& id = row.cells[0];
    if (id.empty()) throw DataError("empty replicate_id at " + where(path, row.line, 1));
    const double t_value = number_at(path, row, 1);
    const auto t = static_cast<long long>(t_value);
    if (static_cast<double>(t) != t_value) {
      throw DataError("time index must be an integer at " + where(path, row.line, 2));
    }
    const double value = number_at(path, row, 2);
    auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) {
      ids.push_back(id);
      cells.emplace_back();
    }
    if (!cells[it->second].emplace(t, value).second) {
      throw DataError("duplicate observation (replicate_id " + id + ", t " + std::to_string(t) +
                      ") at " + where(path, row.line, 2));
    }
  }
  if (ids.empty()) throw DataError(path.filename().string() + " holds no observations");

  long long t_min = cells[0].begin()->first;
  long long t_max = cells[0].rbegin()->first;
  for (const auto& c : cells) {
    t_min = std::min(t_min, c.begin()->first);
    t_max = std::max(t_max, c.rbegin()->first);
  }
  const auto T = static_cast<Index>(t_max - t_min + 1);
  Matrix values(static_cast<Index>(ids.size()), T);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    for (long long t = t_min; t <= t_max; ++t) {
      const auto found = cells[j].find(t);
      if (found == cells[j].end()) {
        throw DataError("missing observation (replicate_id " + ids[j] + ", t " +
                        std::to_string(t) + ") in " + path.filename().string());
      }
      values(static_cast<Index>(j), static_cast<Index>(t - t_min)) = found->second;
    }
  }
  return {std::move(values), std::move(ids), SeriesFormat::long_format, file.blank};
}

SeriesTable read_series(const std::filesystem::path& path) {
  const CsvFile file = read_csv(path);
  if (file.rows.empty()) throw DataError(path.filename().string() + " is empty");
  const CsvRow& first = file.rows.front();
  const bool header = !first.cells.empty() && !parse_number(first.cells[0]);
  if (header && first.cells.size() == 3 && is_key_name(first.cells[0])) {
    return read_long(path, file, true);
  }
  // headerless long rows: id (possibly text), integer time, value
  if (first.cells.size() == 3 && parse_number(first.cells[1]) && parse_number(first.cells[2])) {
    return read_long(path, file, false);
  }

  const std::size_t T = first.cells.size();
  Matrix values(static_cast<Index>(file.rows.size()), static_cast<Index>(T));
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const CsvRow& row = file.rows[r];
    if (row.cells.size() != T) {
      throw DataError("unequal series lengths: " + std::to_string(row.cells.size()) +
                      " values at " + path.filename().string() + " row " +
                      std::to_string(row.line) + ", expected " + std::to_string(T));
    }
    for (std::size_t c = 0; c < T; ++c) {
      values(static_cast<Index>(r), static_cast<Index>(c)) = number_at(path, row, c);
    }
  }
  return {std::move(values), {}, SeriesFormat::wide, file.blank};
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buffer, ptr);
}

IngestResult ingest(const std::filesystem::path& series_path,
                    const std::filesystem::path& covariates_path) {
  SeriesTable series = read_series(series_path);
  const CsvFile cov = read_csv(covariates_path);
  if (cov.rows.empty()) throw DataError(covariates_path.filename().string() + " is empty");

  const CsvRow& header = cov.rows.front();
  const bool keyed = !header.cells.empty() && is_key_name(header.cells[0]);
  const std::size_t offset = keyed ? 1 : 0;
  if (header.cells.size() <= offset) {
    throw DataError(covariates_path.filename().string() + " has no covariate columns");
  }
  for (std::size_t c = 0; c < header.cells.size(); ++c) {
    if (header.cells[c].empty() || (c >= offset && parse_number(header.cells[c]))) {
      throw DataError("covariate header must name every column; got '" + header.cells[c] +
                      "' at " + where(covariates_path, header.line, static_cast<Index>(c) + 1));
    }
  }
  std::vector<std::string> names(header.cells.begin() + static_cast<std::ptrdiff_t>(offset),
                                 header.cells.end());
  const auto P = static_cast<Index>(names.size());
  const Index N = series.values.rows();
  const auto data_rows = static_cast<Index>(cov.rows.size()) - 1;
  if (data_rows != N) {
    throw DataError("dimension mismatch: " + std::to_string(N) + " series but " +
                    std::to_string(data_rows) + " covariate rows");
  }

  Matrix x(N, P);
  std::vector<std::string> ids = series.ids;
  std::unordered_map<std::string, Index> position;
  for (std::size_t j = 0; j < ids.size(); ++j) position.emplace(ids[j], static_cast<Index>(j));
  std::set<std::string> seen;
  for (Index r = 0; r < data_rows; ++r) {
    const CsvRow& row = cov.rows[static_cast<std::size_t>(r) + 1];
    if (row.cells.size() != header.cells.size()) {
      throw DataError("expected " + std::to_string(header.cells.size()) + " columns but found " +
                      std::to_string(row.cells.size()) + " at " +
                      where(covariates_path, row.line, 1));
    }
    Index target = r;
    if (keyed) {
      const std::string& id = row.cells[0];
      if (!seen.insert(id).second) {
        throw DataError("duplicate replicate_id '" + id + "' at " +
                        where(covariates_path, row.line, 1));
      }
      if (!ids.empty() || !series.ids.empty()) {
        const auto found = position.find(id);
        if (found == position.end()) {
          throw DataError("replicate_id '" + id + "' at " + where(covariates_path, row.line, 1) +
                          " has no series");
        }
        target = found->second;
      }
    }
    for (Index p = 0; p < P; ++p) {
      x(target, p) = number_at(covariates_path, row, static_cast<std::size_t>(p) + offset);
    }
  }
  if (ids.empty()) {
    for (Index j = 0; j < N; ++j) {
      ids.push_back(keyed ? cov.rows[static_cast<std::size_t>(j) + 1].cells[0]
                          : std::to_string(j + 1));
    }
  }

  IngestReport report;
  report.replicates = N;
  report.length = series.values.cols();
  report.covariates = P;
  report.dropped_rows = series.blank + cov.blank;
  report.format = series.format;
  report.keyed = keyed && !series.ids.empty();
  return {TimeSeriesPanel(std::move(series.values), std::move(x), std::move(names)), report,
          std::move(ids)};
}

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += ',';
    out += header[c];
  }
  if (!header.empty()) out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const CsvFile file = read_csv(path);
  if (file.rows.empty()) throw DataError(path.filename().string() + " is empty");
  const std::size_t cols = file.rows.front().cells.size();
  Matrix m(static_cast<Index>(file.rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const CsvRow& row = file.rows[r];
    if (row.cells.size() != cols) {
      throw DataError("expected " + std::to_string(cols) + " columns at " +
                      where(path, row.line, 1));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = number_at(path, row, c);
    }
  }
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

void export_panel(const TimeSeriesPanel& panel, const std::filesystem::path& series_path,
                  const std::filesystem::path& covariates_path) {
  write_text(series_path, matrix_csv(panel.series()));
  write_text(covariates_path, matrix_csv(panel.covariates(), panel.covariate_names()));
}

nlohmann::ordered_json fit_to_json(const FitOutput& output) {
  using json = nlohmann::ordered_json;
  const LinearModelFit& fit = output.fit;
  const EffectFunctions& effects = output.effects;
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  auto rows = [&](const Matrix& m) {
    json a = json::array();
    for (Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
  };

  json doc;
  doc["version"] = kVersion;
  doc["K"] = fit.order();
  doc["estimator"] = to_string(fit.estimator);
  doc["dimension"] = fit.dimension;
  doc["covariate_names"] = output.covariate_names;
  doc["intercept"] = vec(fit.intercept);
  doc["B"] = rows(fit.coefficients);
  doc["frequencies"] = vec(effects.frequencies);
  doc["alpha"] = vec(effects.alpha);
  doc["beta"] = rows(effects.beta);
  if (output.bands) {
    const ConfidenceBands& b = *output.bands;
    doc["bands"] = {{"level", 1.0 - b.alpha},
                    {"replicates", b.replicates},
                    {"redraws", b.redraws},
                    {"lower", rows(b.lower)},
                    {"upper", rows(b.upper)},
                    {"bias", rows(b.bias)}};
  } else {
    doc["bands"] = nullptr;
  }
  doc["seed"] = output.seed ? json(*output.seed) : json(nullptr);
  json aic = json::array();
  for (const auto& [k, value] : output.aic_trace) aic.push_back({{"K", k}, {"aic", value}});
  doc["aic_trace"] = aic;
  if (output.standardization) {
    doc["standardization"] = {{"means", vec(output.standardization->means)},
                              {"scales", vec(output.standardization->scales)}};
  }
  return doc;
}

std::string effects_csv(const FitOutput& output) {
  const EffectFunctions& effects = output.effects;
  const Index P = effects.beta.rows();
  const Index M = effects.frequencies.size();
  std::string out = "target,frequency,estimate,lower,upper\n";
  for (Index row = 0; row <= P; ++row) {
    const std::string target =
        row == 0 ? "alpha"
                 : "beta_" + (static_cast<std::size_t>(row - 1) < output.covariate_names.size()
                                  ? output.covariate_names[static_cast<std::size_t>(row - 1)]
                                  : std::to_string(row));
    for (Index m = 0; m < M; ++m) {
      out += target;
      out += ',';
      out += format_double(effects.frequencies[m]);
      out += ',';
      out += format_double(row == 0 ? effects.alpha[m] : effects.beta(row - 1, m));
      out += ',';
      if (output.bands) out += format_double(output.bands->lower(row, m));
      out += ',';
      if (output.bands) out += format_double(output.bands->upper(row, m));
      out += '\n';
    }
  }
  return out;
}

void emit_fit(const FitOutput& output, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw ConfigError("cannot create " + directory.string() + ": " + ec.message());
  write_text(directory / "fit.json", fit_to_json(output).dump(2) + "\n");
  write_text(directory / "effects.csv", effects_csv(output));
}

}  // namespace cepreg
