import numpy as np
import pytest

import cepreg


def test_periodogram_matches_numpy():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((3, 37))
    freqs, values = cepreg.periodogram(z)
    L = (37 - 1) // 2
    assert values.shape == (3, L)
    np.testing.assert_allclose(freqs, np.arange(1, L + 1) / 37)
    c = z - z.mean(axis=1, keepdims=True)
    ref = np.abs(np.fft.fft(c, axis=1)[:, 1 : L + 1]) ** 2 / 37
    np.testing.assert_allclose(values, ref, rtol=1e-10, atol=1e-12)


def test_ols_stage_two_matches_lstsq():
    sim = cepreg.simulate_example(example=1, n=40, t=64, p=2, seed=3)
    out = cepreg.fit(sim["series"], sim["covariates"], k=3)
    assert out["K"] == 3
    x = np.column_stack([np.ones(40), sim["covariates"]])
    coef, *_ = np.linalg.lstsq(x, out["cepstra"], rcond=None)
    np.testing.assert_allclose(out["intercept"], coef[0], atol=1e-10)
    np.testing.assert_allclose(out["B"], coef[1:], atol=1e-10)
    assert out["beta"].shape == (2, 256)


def test_bootstrap_bands_and_determinism():
    sim = cepreg.simulate_example(example=1, n=30, t=50, seed=5)
    a = cepreg.bootstrap(sim["series"], sim["covariates"], replicates=60, grid=16, seed=7)
    b = cepreg.bootstrap(sim["series"], sim["covariates"], replicates=60, grid=16, seed=7)
    assert a["lower"].shape == (2, 16)
    assert np.all(a["lower"] <= a["upper"])
    np.testing.assert_array_equal(a["lower"], b["lower"])


def test_simulated_series_reproducible():
    g = np.zeros(32)
    np.testing.assert_array_equal(
        cepreg.simulate_series(g, 64, seed=2), cepreg.simulate_series(g, 64, seed=2)
    )


def test_errors_map_to_python_exceptions():
    with pytest.raises(cepreg.DataError):
        cepreg.fit(np.full((4, 20), np.nan), np.zeros((4, 1)))
    with pytest.raises(cepreg.ConfigError):
        cepreg.fit(np.ones((4, 20)), np.zeros((4, 1)), estimator="bogus")
    assert issubclass(cepreg.ConfigError, cepreg.CepregError)
