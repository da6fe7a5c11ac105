"""Pseudospectral solver for the damped plate equation with rotational inertia.

Thin re-export of the compiled core.  Fields are plain lists of floats in the
grid's row-major layout; see ``help(plate_spectral._core)`` for signatures.
"""

from ._core import (
    ConfigError,
    Grid,
    NumericalError,
    apply,
    bessel_norm,
    bump,
    check_gamma_lemma,
    check_linear_lemma,
    check_time_convolution,
    fit_decay,
    gaussian,
    linear_solution,
    log_spaced,
    lp_norm,
    march,
    multiplier,
    picard,
    random_band_limited,
    sobolev_norm,
    symbol_decay,
    symbol_oscillation,
    theorem_global_hs,
    theorem_global_hsp,
    theorem_local,
)

__all__ = [
    "ConfigError",
    "Grid",
    "NumericalError",
    "apply",
    "bessel_norm",
    "bump",
    "check_gamma_lemma",
    "check_linear_lemma",
    "check_time_convolution",
    "fit_decay",
    "gaussian",
    "linear_solution",
    "log_spaced",
    "lp_norm",
    "march",
    "multiplier",
    "picard",
    "random_band_limited",
    "sobolev_norm",
    "symbol_decay",
    "symbol_oscillation",
    "theorem_global_hs",
    "theorem_global_hsp",
    "theorem_local",
]
