"""Cross-tau-Wigner distributions and the Born-Jordan distribution.

    W_tau(f,g)(x, omega) = int e^{-2 pi i y omega} f(x + tau y)
                           conj(g(x - (1-tau) y)) dy

discretized with y on the time grid and the integral as a centered DFT.
The scaled arguments x + tau*y leave the sample lattice, so f and g are
evaluated through their trigonometric (DFT-series) interpolants; this is
exact at grid points, spectrally accurate for signals that are negligible
near the grid boundary, and wraps periodically outside the grid.  The
Born-Jordan distribution is the Gauss-Legendre average over tau in [0,1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phase_space import (Grid, PhaseSpacePoint, SampledSignal,
                          forward_transform, tf_shift)
from .stft import PhaseSpaceArray

__all__ = ["Quadrature", "gauss_legendre", "tau_wigner", "born_jordan_dist",
           "wigner_covariance_check"]

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre rule on [0, 1]."""

    kind: str
    nodes: int
    abscissae: tuple
    weights: tuple

    def __post_init__(self):
        if self.kind != "gauss_legendre":
            raise ValueError(f"unsupported quadrature kind {self.kind!r}")
        if self.nodes != len(self.abscissae) or self.nodes != len(self.weights):
            raise ValueError("node count does not match abscissae/weights")
        w = np.asarray(self.weights)
        a = np.asarray(self.abscissae)
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        if abs(float(np.sum(w)) - 1.0) > 1e-14:
            raise ValueError("quadrature weights must sum to 1")
        if np.any(a <= 0) or np.any(a >= 1):
            raise ValueError("abscissae must lie in (0, 1)")


def gauss_legendre(m: int) -> Quadrature:
    """m-node Gauss-Legendre rule mapped from [-1,1] to [0,1]."""
    if m < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(m)
    return Quadrature(kind="gauss_legendre", nodes=m,
                      abscissae=tuple((x + 1.0) / 2.0),
                      weights=tuple(w / 2.0))


def _check_boundary_negligible(sig: SampledSignal, name: str):
    """Reject signals with non-negligible mass at the grid edge.

    Scaled arguments wrap periodically, so edge mass aliases; accuracy of
    the discretization further assumes the signal is negligible (< 1e-12 of
    peak) in the outer quarter of the grid, which the covariance check
    measures empirically.
    """
    v = np.abs(sig.values)
    peak = v.max()
    if peak == 0:
        return
    edge = max(v[:2].max(), v[-2:].max())
    if edge > _EDGE_TOL * peak:
        raise ValueError(
            f"{name} has non-negligible mass at the grid boundary "
            f"(edge/peak = {edge / peak:.2e} > {_EDGE_TOL:g}); "
            "tau-Wigner scaled arguments would wrap around")


def _eval_scaled(sig: SampledSignal, x: np.ndarray, scale: float, y: np.ndarray) -> np.ndarray:
    """Matrix f(x_i + scale * y_j) through the trigonometric interpolant."""
    grid = sig.grid
    fhat = forward_transform(grid, sig.values)
    nu = grid.freq_grid().points
    a = (grid.freq_spacing * fhat)[None, :] * np.exp(2j * np.pi * np.outer(x, nu))
    b = np.exp(2j * np.pi * scale * np.outer(nu, y))
    return a @ b


def tau_wigner(f: SampledSignal, g: SampledSignal, tau: float) -> PhaseSpaceArray:
    """Cross-tau-Wigner distribution W_tau(f, g) on the phase-space grid."""
    if f.grid != g.grid:
        raise ValueError("signals live on different grids")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    _check_boundary_negligible(f, "first argument")
    _check_boundary_negligible(g, "second argument")
    grid = f.grid
    x = grid.points
    ygrid = Grid(grid.n_samples, grid.spacing, 0.0)
    y = ygrid.points
    fmat = _eval_scaled(f, x, tau, y)
    gmat = _eval_scaled(g, x, -(1.0 - tau), y)
    prod = fmat * np.conj(gmat)
    w = forward_transform(ygrid, prod, axis=1)
    return PhaseSpaceArray(x_grid=grid, omega_grid=ygrid.freq_grid(), values=w)


def born_jordan_dist(f: SampledSignal, g: SampledSignal, quad: Quadrature) -> PhaseSpaceArray:
    """Born-Jordan distribution: quadrature average of W_tau over tau in [0,1]."""
    acc = None
    out_grids = None
    for w_i, tau_i in zip(quad.weights, quad.abscissae):
        w_tau = tau_wigner(f, g, tau_i)
        if acc is None:
            acc = w_i * w_tau.values
            out_grids = (w_tau.x_grid, w_tau.omega_grid)
        else:
            acc = acc + w_i * w_tau.values
    return PhaseSpaceArray(x_grid=out_grids[0], omega_grid=out_grids[1], values=acc)


def wigner_covariance_check(f: SampledSignal, w: PhaseSpacePoint, tau: float) -> float:
    """Max abs deviation of |W_tau(pi(w)f)| from the shifted |W_tau f|.

    Validates the discretization (interpolation + wrap-around) against the
    exact magnitude covariance; w must sit on the phase-space grid.
    """
    grid = f.grid
    sx = w.x / grid.spacing
    so = w.omega / grid.freq_spacing
    if abs(sx - round(sx)) > 1e-9 or abs(so - round(so)) > 1e-9:
        raise ValueError("shift must lie on the phase-space grid")
    shifted = tf_shift(f, w)
    w_shift = tau_wigner(shifted, shifted, tau)
    w_base = tau_wigner(f, f, tau)
    target = np.roll(np.roll(np.abs(w_base.values), int(round(sx)), axis=0),
                     int(round(so)), axis=1)
    return float(np.max(np.abs(np.abs(w_shift.values) - target)))
