#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cepreg/error.hpp"
#include "cepreg/experiments.hpp"
#include "cepreg/io.hpp"

using namespace cepreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cepreg_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string message_of(const fs::path& s, const fs::path& c) {
  try {
    ingest(s, c);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.123456789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("wide ingestion") {
  TempDir dir;
  std::string series;
  for (int j = 0; j < 3; ++j) {
    for (int t = 0; t < 8; ++t) series += (t ? "," : "") + std::to_string(j * 10 + t * t);
    series += "\n";
  }
  write(dir / "s.csv", series + "\n");
  write(dir / "c.csv", "age,score\n1,2\n3,4\n5,6\n");
  const IngestResult r = ingest(dir / "s.csv", dir / "c.csv");
  CHECK(r.panel.replicates() == 3);
  CHECK(r.panel.length() == 8);
  CHECK(r.panel.num_covariates() == 2);
  CHECK(r.report.dropped_rows == 1);
  CHECK(r.report.format == SeriesFormat::wide);
  CHECK(r.panel.covariate_names() == std::vector<std::string>{"age", "score"});
  CHECK(r.panel.covariates()(2, 1) == 6.0);
}

TEST_CASE("long ingestion, keyed covariates and gaps") {
  TempDir dir;
  std::string series = "replicate_id,t,value\n";
  for (const char* id : {"b", "a", "c"})
    for (int t = 8; t >= 1; --t)
      series += std::string(id) + "," + std::to_string(t) + "," + std::to_string(t * 0.5) + "\n";
  write(dir / "s.csv", series);
  write(dir / "c.csv", "replicate_id,x\na,1\nc,3\nb,2\n");
  const IngestResult r = ingest(dir / "s.csv", dir / "c.csv");
  CHECK(r.report.format == SeriesFormat::long_format);
  CHECK(r.report.keyed);
  CHECK(r.replicate_ids == std::vector<std::string>{"b", "a", "c"});
  CHECK(r.panel.covariates()(0, 0) == 2.0);
  CHECK(r.panel.covariates()(1, 0) == 1.0);
  CHECK(r.panel.covariates()(2, 0) == 3.0);
  CHECK(r.panel.length() == 8);

  // drop (a, 5)
  std::string gap;
  for (const char* id : {"a", "b"})
    for (int t = 1; t <= 8; ++t)
      if (!(std::string(id) == "a" && t == 5)) gap += std::string(id) + "," + std::to_string(t) + ",1.5\n";
  write(dir / "g.csv", gap);
  write(dir / "c2.csv", "x\n1\n2\n");
  const std::string msg = message_of(dir / "g.csv", dir / "c2.csv");
  CHECK(msg.find("replicate_id a") != std::string::npos);
  CHECK(msg.find("t 5") != std::string::npos);
}

TEST_CASE("ingestion errors carry coordinates") {
  TempDir dir;
  write(dir / "c.csv", "x\n1\n2\n");
  write(dir / "bad.csv", "1,2,3,4,5,6,7,8\n1,2,3,oops,5,6,7,8\n");
  std::string msg = message_of(dir / "bad.csv", dir / "c.csv");
  CHECK(msg.find("row 2, column 4") != std::string::npos);

  write(dir / "ragged.csv", "1,2,3,4,5,6,7,8\n1,2,3,4,5,6,7\n");
  msg = message_of(dir / "ragged.csv", dir / "c.csv");
  CHECK(msg.find("unequal series lengths") != std::string::npos);
  CHECK(msg.find("row 2") != std::string::npos);

  write(dir / "ok.csv", "1,2,3,4,5,6,7,8\n8,7,6,5,4,3,2,1\n");
  write(dir / "c3.csv", "x\n1\n2\n3\n");
  CHECK(message_of(dir / "ok.csv", dir / "c3.csv").find("dimension mismatch") != std::string::npos);

  write(dir / "dup.csv", "replicate_id,t,value\na,1,1\na,1,2\n");
  CHECK(message_of(dir / "dup.csv", dir / "c.csv").find("duplicate") != std::string::npos);

  std::string keyed = "replicate_id,t,value\n";
  for (const char* id : {"a", "b"})
    for (int t = 1; t <= 8; ++t) keyed += std::string(id) + "," + std::to_string(t) + "," + std::to_string(t % 3) + "\n";
  write(dir / "k.csv", keyed);
  write(dir / "ck.csv", "replicate_id,x\na,1\na,2\n");
  CHECK(message_of(dir / "k.csv", dir / "ck.csv").find("duplicate replicate_id") !=
        std::string::npos);
  write(dir / "ck2.csv", "replicate_id,x\na,1\nz,2\n");
  CHECK(message_of(dir / "k.csv", dir / "ck2.csv").find("'z'") != std::string::npos);

  CHECK_THROWS_AS(ingest(dir / "missing.csv", dir / "c.csv"), DataError);
}

TEST_CASE("export then ingest reproduces the panel exactly") {
  TempDir dir;
  Rng rng(3);
  const SimulatedPanel sim = generate_example2(12, 40, 0.5, rng);
  export_panel(sim.panel, dir / "s.csv", dir / "c.csv");
  const IngestResult back = ingest(dir / "s.csv", dir / "c.csv");
  CHECK((back.panel.series().array() == sim.panel.series().array()).all());
  CHECK((back.panel.covariates().array() == sim.panel.covariates().array()).all());
  CHECK(back.panel.covariate_names() == sim.panel.covariate_names());
}

TEST_CASE("emitted fit documents") {
  TempDir dir;
  LinearModelFit fit;
  fit.intercept = Vector::Zero(3);
  fit.intercept[0] = 1.0 / 3.0;
  fit.coefficients = Matrix::Zero(2, 3);
  fit.dimension = 2;
  FitOutput out{fit, {"age", "dose"}, effect_functions(fit, 17), std::nullopt, 42, {}, std::nullopt};
  emit_fit(out, dir / "zero");
  const auto doc = nlohmann::json::parse(std::ifstream(dir / "zero" / "fit.json"));
  CHECK(doc["K"] == 3);
  CHECK(doc["seed"] == 42);
  CHECK(doc["frequencies"].size() == 17);
  for (const auto& row : doc["beta"])
    for (const auto& v : row) CHECK(v.get<double>() == 0.0);
  CHECK(doc["bands"].is_null());
  const std::string csv = effects_csv(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 17);
  CHECK(csv.find("beta_age,0,0,,") != std::string::npos);

  Rng rng(4);
  fit.coefficients = Matrix::Random(2, 3) * 1e-3;
  fit.coefficients(1, 2) = 0.1 + 0.2;
  out.fit = fit;
  out.effects = effect_functions(fit, 9);
  out.bands = ConfidenceBands{};
  out.bands->lower = Matrix::Zero(3, 9);
  out.bands->upper = Matrix::Ones(3, 9);
  out.bands->bias = Matrix::Zero(3, 9);
  emit_fit(out, dir / "full");
  const auto full = nlohmann::json::parse(std::ifstream(dir / "full" / "fit.json"));
  for (Index p = 0; p < 2; ++p)
    for (Index k = 0; k < 3; ++k)
      CHECK(full["B"][static_cast<std::size_t>(p)][static_cast<std::size_t>(k)].get<double>() ==
            fit.coefficients(p, k));
  CHECK(full["bands"]["upper"].size() == 3);
  std::ifstream csvin(dir / "full" / "effects.csv");
  const std::string text((std::istreambuf_iterator<char>(csvin)), std::istreambuf_iterator<char>());
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 9);

  write(dir / "file", "x");
  CHECK_THROWS_AS(emit_fit(out, dir / "file" / "sub"), ConfigError);
}
