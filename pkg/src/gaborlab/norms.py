"""Weighted sequence norms, modulation norms, Besov norms, embeddings.

Two constructions of the modulation norm are implemented: the mixed
weighted Lebesgue norm of the STFT, and the frequency-uniform decomposition
norm built from a smooth partition of unity into unit cubes.  Besov norms
use the dyadic Littlewood-Paley analogue.  Quasi-Banach exponents
0 < p, q < 1 are supported everywhere (sums of q-th powers; no triangle
inequality is assumed).  Embedding checks are constant-tracking
falsification tools, not proofs: "violated" means the empirical ratio blows
up along an ordered signal family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phase_space import (Grid, Lattice, SampledSignal, WeightSpec, bracket,
                          bracket_point, forward_transform, inverse_transform)
from .stft import stft

__all__ = ["LatticeArray", "PartitionOfUnity", "EmbeddingReport",
           "weighted_seq_norm", "modulation_norm_stft", "freq_uniform_decomp",
           "modulation_norm_decomp", "besov_norm", "check_embedding",
           "cube_partition", "dyadic_partition"]


@dataclass(frozen=True)
class LatticeArray:
    """Values indexed by a truncated lattice in its enumeration order."""

    lattice: Lattice
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, copy=True)
        if arr.shape != (self.lattice.count,):
            raise ValueError(f"values must have length {self.lattice.count}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def weighted_seq_norm(a: LatticeArray, q: float, s: float) -> float:
    """(sum |a_k|^q <k>^(s q))^(1/q) with <k> the bracket of the lattice
    point (k alpha, l beta); sup form for q = infinity."""
    if not q > 0:
        raise ValueError("q must be positive")
    w = bracket_point(a.lattice.points()) ** s
    vals = np.abs(a.values) * w
    if math.isinf(q):
        return float(vals.max()) if len(vals) else 0.0
    return float(np.sum(vals ** q) ** (1.0 / q))


# --- smooth partitions of unity ---------------------------------------------

def _smoothstep7(u):
    """Degree-7 polynomial step: 0 at 0, 1 at 1, three vanishing derivatives
    at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u ** 4 * (35.0 - 84.0 * u + 70.0 * u ** 2 - 20.0 * u ** 3)


@dataclass(frozen=True)
class PartitionOfUnity:
    """Cube (frequency-uniform) or dyadic partition profile.

    cube: rho equals 1 on |xi| <= plateau and 0 beyond support;
    sigma_k(xi) = rho(xi-k) / sum_l rho(xi-l) is an exact partition of unity.
    dyadic: theta equals 1 on |nu| <= inner and 0 beyond outer; psi_0 =
    theta, psi_j = theta(2^-j nu) - theta(2^-(j-1) nu) telescopes to 1.
    """

    kind: str
    plateau: float = 0.5
    support: float = 0.75

    def __post_init__(self):
        if self.kind not in ("cube", "dyadic"):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if not 0 < self.plateau < self.support:
            raise ValueError("need 0 < plateau < support")

    # cube profile ------------------------------------------------------
    def rho(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        ramp = (xi - self.plateau) / (self.support - self.plateau)
        return 1.0 - _smoothstep7(ramp)

    def sigma(self, k: int, xi):
        """sigma_k(xi) = rho(xi - k) normalized by the neighbor sum."""
        if self.kind != "cube":
            raise ValueError("sigma is defined for the cube partition")
        xi = np.asarray(xi, dtype=float)
        num = self.rho(xi - k)
        den = np.zeros_like(num)
        base = np.floor(xi + 0.5)
        for off in (-1.0, 0.0, 1.0):
            den += self.rho(xi - (base + off))
        return num / den

    # dyadic profile ----------------------------------------------------
    def theta(self, nu):
        if self.kind != "dyadic":
            raise ValueError("theta is defined for the dyadic partition")
        nu = np.abs(np.asarray(nu, dtype=float))
        ramp = (nu - self.plateau) / (self.support - self.plateau)
        return 1.0 - _smoothstep7(ramp)

    def psi(self, j: int, nu):
        """Dyadic piece: psi_0 = theta, psi_j = theta(2^-j .) - theta(2^-j+1 .)."""
        nu = np.asarray(nu, dtype=float)
        if j == 0:
            return self.theta(nu)
        return self.theta(nu / 2.0 ** j) - self.theta(nu / 2.0 ** (j - 1))


def cube_partition() -> PartitionOfUnity:
    """Default unit-cube partition: plateau 1/2, support 3/4."""
    return PartitionOfUnity(kind="cube", plateau=0.5, support=0.75)


def dyadic_partition() -> PartitionOfUnity:
    """Default dyadic partition: theta = 1 inside |nu| <= 1, 0 beyond 2."""
    return PartitionOfUnity(kind="dyadic", plateau=1.0, support=2.0)


# --- norms -----------------------------------------------------------------

def _weight_on_plane(w: WeightSpec, x: np.ndarray, om: np.ndarray) -> np.ndarray:
    """Weight sampled on the (x, omega) phase-space mesh."""
    return w.eval_components(x[:, None], om[None, :])


def _lp_axis(vals: np.ndarray, p: float, cell: float, axis: int) -> np.ndarray:
    if math.isinf(p):
        return vals.max(axis=axis)
    return (cell * np.sum(vals ** p, axis=axis)) ** (1.0 / p)


def modulation_norm_stft(f: SampledSignal, g: SampledSignal, p: float, q: float,
                         w: WeightSpec) -> float:
    """Mixed weighted norm of the STFT: inner L^p over x, outer L^q over omega."""
    if not (p > 0 and q > 0):
        raise ValueError("exponents must be positive")
    V = stft(f, g)
    absV = np.abs(V.values) * _weight_on_plane(w, V.x_grid.points, V.omega_grid.points)
    inner = _lp_axis(absV, p, V.x_grid.spacing, axis=0)      # function of omega
    outer = _lp_axis(inner, q, V.omega_grid.spacing, axis=0)
    return float(outer)


def _max_cube_index(grid: Grid) -> int:
    nu_max = 1.0 / (2.0 * grid.spacing)
    return int(math.floor(nu_max - 0.75))


def freq_uniform_decomp(f: SampledSignal, k: int,
                        part: PartitionOfUnity | None = None) -> SampledSignal:
    """Frequency-uniform piece: inverse DFT of sigma_k times the DFT of f."""
    part = part or cube_partition()
    kmax = _max_cube_index(f.grid)
    if abs(k) > kmax:
        raise ValueError(f"cube index {k} outside the grid's frequency band "
                         f"(|k| <= {kmax})")
    fhat = forward_transform(f.grid, f.values)
    nu = f.grid.freq_grid().points
    piece = inverse_transform(f.grid, part.sigma(k, nu) * fhat)
    return SampledSignal(f.grid, piece)


def _lp_time(u: np.ndarray, p: float, grid: Grid, h: WeightSpec | None) -> float:
    vals = np.abs(u)
    if h is not None:
        vals = vals * bracket(grid.points) ** h.s
    if math.isinf(p):
        return float(vals.max())
    return float((grid.spacing * np.sum(vals ** p)) ** (1.0 / p))


def modulation_norm_decomp(f: SampledSignal, p: float, q: float,
                           h: WeightSpec | None = None,
                           w_seq: WeightSpec | None = None,
                           part: PartitionOfUnity | None = None) -> float:
    """Decomposition norm (sum_k ||Box_k f||_{L^p_h}^q w(k)^q)^(1/q).

    h is a polynomial time weight (or None for unweighted); w_seq is the
    polynomial sequence weight evaluated at the integer cube index.
    """
    if not (p > 0 and q > 0):
        raise ValueError("exponents must be positive")
    if h is not None and h.kind != "polynomial":
        raise ValueError("time weight must be of polynomial kind")
    if w_seq is not None and w_seq.kind != "polynomial":
        raise ValueError("sequence weight must be of polynomial kind")
    part = part or cube_partition()
    kmax = _max_cube_index(f.grid)
    fhat = forward_transform(f.grid, f.values)
    nu = f.grid.freq_grid().points
    terms = []
    for k in range(-kmax, kmax + 1):
        piece = inverse_transform(f.grid, part.sigma(k, nu) * fhat)
        lp = _lp_time(piece, p, f.grid, h)
        wk = bracket(float(k)) ** w_seq.s if w_seq is not None else 1.0
        terms.append(lp * wk)
    terms = np.asarray(terms)
    if math.isinf(q):
        return float(terms.max())
    return float(np.sum(terms ** q) ** (1.0 / q))


def besov_norm(f: SampledSignal, p: float, q: float, s: float,
               part: PartitionOfUnity | None = None) -> float:
    """Dyadic norm (sum_j 2^{j s q} ||F^{-1}(psi_j F f)||_p^q)^(1/q), with j
    capped by the grid's Nyquist band."""
    if not (p > 0 and q > 0):
        raise ValueError("exponents must be positive")
    part = part or dyadic_partition()
    nu_max = 1.0 / (2.0 * f.grid.spacing)
    jmax = max(1, int(math.ceil(math.log2(nu_max))))
    fhat = forward_transform(f.grid, f.values)
    nu = f.grid.freq_grid().points
    terms = []
    for j in range(jmax + 1):
        piece = inverse_transform(f.grid, part.psi(j, nu) * fhat)
        terms.append(2.0 ** (j * s) * _lp_time(piece, p, f.grid, None))
    terms = np.asarray(terms)
    if math.isinf(q):
        return float(terms.max())
    return float(np.sum(terms ** q) ** (1.0 / q))


@dataclass(frozen=True)
class EmbeddingReport:
    """Ratio statistics for a claimed embedding source -> target
    (i.e. ||.||_target <= C ||.||_source on the family)."""

    max_ratio: float
    violated: bool
    ratios: tuple

    # blow-up factor between the first and last family scale that flags the
    # claimed direction as empirically violated
    BLOWUP = 4.0


def check_embedding(source_norms, target_norms) -> EmbeddingReport:
    """Constant-tracking check of target <~ source on an ordered family.

    Inputs are norm values along a signal family ordered by scale; the
    embedding is flagged violated when the ratio target/source grows by more
    than a factor 4 from the first to the last scale.
    """
    src = np.asarray(source_norms, dtype=float)
    tgt = np.asarray(target_norms, dtype=float)
    if src.shape != tgt.shape or src.ndim != 1 or len(src) < 1:
        raise ValueError("need matched 1-d norm families")
    if np.any(src <= 0):
        raise ValueError("source norms must be positive")
    ratios = tgt / src
    violated = bool(len(ratios) > 1 and ratios[-1] > EmbeddingReport.BLOWUP * ratios[0])
    return EmbeddingReport(max_ratio=float(ratios.max()), violated=violated,
                           ratios=tuple(float(r) for r in ratios))
