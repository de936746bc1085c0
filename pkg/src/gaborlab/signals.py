"""Deterministic catalog of Schwartz-type test signals.

A fixed 10-signal family (Gaussians, shifted/modulated Gaussians,
Hermite-type, chirped Gaussians, a two-bump sum, enveloped band-limited
noise) used by norm sweeps, embedding suites and tests.  All signals are
unit l2 norm, negligible near the grid boundary, and reproducible (fixed
seed for the noise member).
"""

from __future__ import annotations

import numpy as np

from .phase_space import Grid, SampledSignal, forward_transform, inverse_transform

__all__ = ["signal_family", "make_signal", "SIGNAL_NAMES"]

_NOISE_SEED = 20240914


def _normalized(grid: Grid, values: np.ndarray) -> SampledSignal:
    sig = SampledSignal(grid, values)
    return SampledSignal(grid, sig.values / sig.norm())


def _gauss(t, width):
    return np.exp(-np.pi * t ** 2 / width ** 2)


def make_signal(grid: Grid, name: str) -> SampledSignal:
    """One catalog signal by name; see SIGNAL_NAMES."""
    t = grid.points
    if name == "gauss":
        v = _gauss(t, 1.0)
    elif name == "gauss_wide":
        v = _gauss(t, 1.6)
    elif name == "gauss_narrow":
        v = _gauss(t, 0.7)
    elif name == "gauss_shift":
        v = _gauss(t - 1.5, 1.0) * np.exp(2j * np.pi * 0.5 * t)
    elif name == "gauss_mod":
        v = _gauss(t, 1.0) * np.exp(2j * np.pi * 2.0 * t)
    elif name == "hermite1":
        v = t * _gauss(t, 1.0)
    elif name == "hermite2":
        v = (4.0 * np.pi * t ** 2 - 1.0) * _gauss(t, 1.0)
    elif name == "chirp_gauss":
        v = np.exp(1j * np.pi * t ** 2) * _gauss(t, 1.0)
    elif name == "two_bump":
        v = _gauss(t - 2.0, 0.9) + _gauss(t + 2.0, 0.9)
    elif name == "noise_bl":
        rng = np.random.default_rng(_NOISE_SEED)
        nu = grid.freq_grid().points
        spec = (rng.standard_normal(grid.n_samples)
                + 1j * rng.standard_normal(grid.n_samples))
        spec[np.abs(nu) > 3.0] = 0.0
        v = inverse_transform(grid, spec) * _gauss(t, 4.5)
    else:
        raise ValueError(f"unknown signal {name!r} (choose from {SIGNAL_NAMES})")
    return _normalized(grid, v)


SIGNAL_NAMES = ("gauss", "gauss_wide", "gauss_narrow", "gauss_shift", "gauss_mod",
                "hermite1", "hermite2", "chirp_gauss", "two_bump", "noise_bl")


def signal_family(grid: Grid) -> dict[str, SampledSignal]:
    """The full named 10-signal family on a grid."""
    return {name: make_signal(grid, name) for name in SIGNAL_NAMES}
