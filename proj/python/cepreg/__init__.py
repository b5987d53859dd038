from ._cepreg import (
    CepregError,
    ConfigError,
    ConvergenceError,
    DataError,
    NumericalError,
    __version__,
    bootstrap,
    fit,
    fit_cepstra,
    periodogram,
    set_threads,
    simulate_example,
    simulate_series,
)

__all__ = [
    "CepregError",
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "NumericalError",
    "__version__",
    "bootstrap",
    "fit",
    "fit_cepstra",
    "periodogram",
    "set_threads",
    "simulate_example",
    "simulate_series",
]
