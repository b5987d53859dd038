#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cepreg/error.hpp"
#include "cepreg/spectral.hpp"
#include "support.hpp"

using namespace cepreg;
using std::numbers::pi;
using std::numbers::sqrt2;

TEST_CASE("frequency grid excludes zero and Nyquist") {
  CHECK(FrequencyGrid(8).size() == 3);
  CHECK(FrequencyGrid(9).size() == 4);
  const FrequencyGrid g(50);
  CHECK(g.size() == 24);
  CHECK(g[0] == doctest::Approx(1.0 / 50));
  CHECK(g[23] == doctest::Approx(24.0 / 50));
}

TEST_CASE("panel validation") {
  Matrix z = Matrix::Random(3, 8);
  Matrix x = Matrix::Random(3, 2);
  CHECK_NOTHROW(TimeSeriesPanel(z, x));
  CHECK_THROWS_AS(TimeSeriesPanel(Matrix::Random(1, 8), Matrix::Random(1, 2)), DataError);
  CHECK_THROWS_AS(TimeSeriesPanel(Matrix::Random(3, 7), x), DataError);
  CHECK_THROWS_AS(TimeSeriesPanel(z, Matrix::Random(4, 2)), DataError);
  CHECK_THROWS_AS(TimeSeriesPanel(z, Matrix(3, 0)), DataError);

  z(1, 4) = std::numeric_limits<double>::quiet_NaN();
  try {
    TimeSeriesPanel p(z, x);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 5") != std::string::npos);
  }

  const TimeSeriesPanel p(Matrix::Random(3, 8), x);
  CHECK(p.covariate_names() == std::vector<std::string>{"x1", "x2"});
  CHECK(p.series().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  // re-centering an exported panel is exact
  const TimeSeriesPanel again(p.series(), p.covariates());
  CHECK((again.series().array() == p.series().array()).all());
}

TEST_CASE("FFT periodogram matches the direct sum") {
  Rng rng(11);
  for (Index T : {8, 9, 16, 31, 50, 64, 101, 128}) {
    const Vector z = testing::white(T, rng, 2.0) + Vector::Constant(T, 3.0);
    const Vector fast = periodogram_row(z);
    const Vector slow = periodogram_row_direct(z);
    REQUIRE(fast.size() == (T - 1) / 2);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + slow.cwiseAbs().maxCoeff()));
    CHECK(fast.minCoeff() >= 0.0);
  }
}

TEST_CASE("periodogram of zero and of a pure cosine") {
  CHECK(periodogram_row(Vector::Zero(32)).cwiseAbs().maxCoeff() == 0.0);
  for (Index T : {63, 64}) {
    const Index l0 = 5;
    Vector z(T);
    for (Index t = 0; t < T; ++t) z[t] = std::cos(2.0 * pi * l0 * (t + 1) / static_cast<double>(T));
    const Vector I = periodogram_row(z);
    for (Index l = 0; l < I.size(); ++l) {
      const double expected = (l + 1 == l0) ? T / 4.0 : 0.0;
      CHECK(std::abs(I[l] - expected) < 1e-9);
    }
  }
}

TEST_CASE("white-noise periodogram averages to the unit spectrum") {
  // 1000 replicates of unit-variance Gaussian noise: I_l ~ Exp(1) exactly, so
  // the replicate mean has standard error 1/sqrt(1000) at each frequency.
  Rng rng(1000);
  const Index N = 1000;
  const Index T = 64;
  Matrix z(N, T);
  for (Index j = 0; j < N; ++j) z.row(j) = testing::white(T, rng).transpose();
  const Vector mean = compute_periodogram(z).values.colwise().mean();
  const double se = 1.0 / std::sqrt(static_cast<double>(N));
  CHECK(std::abs(mean.mean() - 1.0) < 0.05);
  CHECK((mean.array() - 1.0).abs().maxCoeff() < 4.0 * se);
}

TEST_CASE("basis matrix") {
  const FrequencyGrid grid(40);
  const Matrix one = basis_matrix(grid, 1);
  CHECK(one.cols() == 1);
  CHECK((one.array() == 1.0).all());
  const Matrix phi = basis_matrix(grid, 4);
  for (Index l = 0; l < grid.size(); ++l) {
    CHECK(phi(l, 1) == doctest::Approx(sqrt2 * std::cos(2.0 * pi * grid[l])));
    CHECK(phi(l, 3) == doctest::Approx(sqrt2 * std::cos(6.0 * pi * grid[l])));
  }
  CHECK_THROWS_AS(basis_matrix(grid, grid.size() + 1), ConfigError);
  CHECK_THROWS_AS(basis_matrix(grid, 0), ConfigError);

  // orthonormal on a dense full-period grid
  const Index M = 2000;
  Vector w(M);
  for (Index m = 0; m < M; ++m) w[m] = -0.5 + static_cast<double>(m) / M;
  const Matrix dense = basis_matrix(w, 12);
  const Matrix gram = dense.transpose() * dense / static_cast<double>(M);
  CHECK((gram - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("log-spectrum from cepstra") {
  const Vector w = uniform_frequencies(11);
  CHECK(w[0] == 0.0);
  CHECK(w[10] == 0.5);

  Vector c = Vector::Zero(5);
  c[0] = -0.7;
  const LogSpectrum flat = log_spectrum_from_cepstra(c, w);
  CHECK((flat.values.array() + 0.7).abs().maxCoeff() < 1e-15);

  Vector e1 = Vector::Zero(3);
  e1[1] = 1.0;
  CHECK(log_spectrum_from_cepstra(e1, Vector::Zero(1)).values[0] == doctest::Approx(sqrt2));

  const Vector ar = testing::ar1_cepstra(0.5, 40);
  const double g0 = log_spectrum_from_cepstra(ar, Vector::Zero(1)).values[0];
  CHECK(std::abs(g0 - (-2.0 * std::log(0.5))) < 1e-5);
  CHECK(std::abs(g0 - 1.38629) < 1e-5);

  const Vector ws = uniform_frequencies(64);
  const LogSpectrum g = log_spectrum_from_cepstra(ar, ws);
  for (Index m = 0; m < ws.size(); ++m) {
    CHECK(std::abs(g.values[m] - testing::ar1_log_spectrum(0.5, ws[m])) < 1e-5);
  }
}

TEST_CASE("cepstra from a log-spectrum") {
  CHECK(cepstra_from_log_spectrum([](double) { return 0.0; }, 6).cwiseAbs().maxCoeff() < 1e-15);

  Vector y = cepstra_from_log_spectrum([](double w) { return 2.0 * std::cos(2.0 * pi * w); }, 6);
  CHECK(y[1] == doctest::Approx(sqrt2).epsilon(1e-12));
  y[1] = 0.0;
  CHECK(y.cwiseAbs().maxCoeff() < 1e-12);

  const Vector ar =
      cepstra_from_log_spectrum([](double w) { return testing::ar1_log_spectrum(0.5, w); }, 8);
  const Vector truth = testing::ar1_cepstra(0.5, 8);
  CHECK((ar - truth).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(ar[1] - 0.70711) < 1e-5);
  CHECK(std::abs(ar[2] - 0.17678) < 1e-5);
}

TEST_CASE("cepstra and log-spectrum round trip") {
  Rng rng(5);
  const Vector y = testing::gaussian(7, 1, rng).col(0);
  const auto g = [&](double w) { return CosineBasis{7}.eval(w).dot(y); };
  CHECK((cepstra_from_log_spectrum(g, 7) - y).cwiseAbs().maxCoeff() < 1e-12);
}
