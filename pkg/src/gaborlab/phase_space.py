"""Grids, lattices, weights and elementary phase-space geometry.

Everything downstream works on a uniform centered time grid
t_j = origin + j*dt, j = -n/2 .. n/2-1, whose implied frequency grid has
spacing 1/(n*dt) and spans [-1/(2*dt), 1/(2*dt)).  Phase space is the
product of the two (dimension d = 1, so phase space is R^2).

All container types are immutable after construction and every operation
here is pure, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "SampledSignal",
    "PhaseSpacePoint",
    "Lattice",
    "WeightSpec",
    "ModerationReport",
    "weight_eval",
    "check_moderate",
    "tf_shift",
    "snap_to_grid",
    "t_tau",
    "j_rot",
    "j_rot_inv",
    "invert_change_of_variables",
    "forward_transform",
    "inverse_transform",
    "kahan_sum",
    "bracket",
    "bracket_point",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bracket(x):
    """Elementwise Japanese bracket <x> = (1 + x^2)^(1/2) of scalars."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


def bracket_point(v):
    """Bracket <v> = (1 + |v|^2)^(1/2) of vectors stacked on the last axis."""
    v = np.asarray(v, dtype=float)
    return np.sqrt(1.0 + np.sum(v * v, axis=-1))


def kahan_sum(values) -> complex:
    """Compensated (Kahan) summation in array order.

    Used for sequential scalar accumulations where a fixed, reproducible
    rounding pattern is wanted independent of how callers batch work.
    """
    values = np.asarray(values).ravel()
    s = 0.0 + 0.0j
    c = 0.0 + 0.0j
    for v in values:
        y = complex(v) - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


@dataclass(frozen=True)
class Grid:
    """Uniform centered 1-D grid: t_j = origin + j*spacing, j = -n/2..n/2-1."""

    n_samples: int
    spacing: float
    origin: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n_samples, (int, np.integer)):
            raise ValueError("n_samples must be an integer")
        if self.n_samples < 8 or not _is_power_of_two(self.n_samples):
            raise ValueError(f"n_samples must be a power of two >= 8, got {self.n_samples}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive and finite, got {self.spacing}")
        if not math.isfinite(self.origin):
            raise ValueError("origin must be finite")

    @property
    def points(self) -> np.ndarray:
        j = np.arange(-self.n_samples // 2, self.n_samples // 2)
        return self.origin + j * self.spacing

    @property
    def extent(self) -> float:
        """Total length n*spacing of the periodization cell."""
        return self.n_samples * self.spacing

    @property
    def freq_spacing(self) -> float:
        return 1.0 / (self.n_samples * self.spacing)

    def freq_grid(self) -> "Grid":
        """Implied frequency grid: n points, spacing 1/(n*dt), centered at 0."""
        return Grid(self.n_samples, self.freq_spacing, 0.0)


def _readonly_complex(values, n=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if n is not None and arr.shape != (n,):
        raise ValueError(f"values must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("values must be finite (no NaN/Inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampledSignal:
    """Complex samples of a function on a Grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly_complex(self.values, self.grid.n_samples))

    def norm(self) -> float:
        """l2 norm with the grid's cell weight: (dt * sum |f|^2)^(1/2)."""
        return math.sqrt(self.grid.spacing * abs(kahan_sum(np.abs(self.values) ** 2)))

    def inner(self, other: "SampledSignal") -> complex:
        """<f, g> = dt * sum f * conj(g)."""
        if self.grid != other.grid:
            raise ValueError("signals live on different grids")
        return self.grid.spacing * kahan_sum(self.values * np.conj(other.values))


@dataclass(frozen=True)
class PhaseSpacePoint:
    """A point z = (x, omega) in phase space R^2."""

    x: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.omega)):
            raise ValueError("phase-space point components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.omega])

    def __add__(self, other):
        return PhaseSpacePoint(self.x + other.x, self.omega + other.omega)

    def __sub__(self, other):
        return PhaseSpacePoint(self.x - other.x, self.omega - other.omega)


@dataclass(frozen=True)
class Lattice:
    """Separable lattice alpha*Z x beta*Z, truncated to |k|, |l| <= radius.

    Enumeration order is lexicographic in (k, l); index_of gives the
    position of (k, l) in that order.
    """

    alpha: float
    beta: float
    radius: int

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError("beta must be positive")
        if not isinstance(self.radius, (int, np.integer)) or self.radius < 1:
            raise ValueError("radius must be a positive integer")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def count(self) -> int:
        return self.side ** 2

    def indices(self) -> np.ndarray:
        """(count, 2) integer array of (k, l), lexicographic."""
        r = self.radius
        k, l = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
        return np.stack([k.ravel(), l.ravel()], axis=1)

    def points(self) -> np.ndarray:
        """(count, 2) array of lattice points (k*alpha, l*beta)."""
        idx = self.indices().astype(float)
        idx[:, 0] *= self.alpha
        idx[:, 1] *= self.beta
        return idx

    def point(self, k: int, l: int) -> PhaseSpacePoint:
        return PhaseSpacePoint(k * self.alpha, l * self.beta)

    def index_of(self, k: int, l: int) -> int:
        r = self.radius
        if abs(k) > r or abs(l) > r:
            raise ValueError(f"({k},{l}) outside lattice radius {r}")
        return (k + r) * self.side + (l + r)


@dataclass(frozen=True)
class WeightSpec:
    """Polynomial weight family.

    kind="polynomial": v_s(z) = <z>^s = (1+|z|^2)^(s/2), radial on whatever
    vector (or scalar) it is fed.
    kind="tensor": w1 (x) w2 with w1 = <.>^m, w2 = <.>^s on the two factors
    of a product argument: a phase-space point (x, omega) maps to
    <x>^m * <omega>^s, a pair (z, zeta) of points to <z>^m * <zeta>^s.
    """

    kind: str
    s: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        if self.kind not in ("polynomial", "tensor"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not (math.isfinite(self.s) and math.isfinite(self.m)):
            raise ValueError("weight parameters must be finite")

    @staticmethod
    def polynomial(s: float) -> "WeightSpec":
        return WeightSpec("polynomial", s=s)

    @staticmethod
    def tensor(m: float, s: float) -> "WeightSpec":
        return WeightSpec("tensor", s=s, m=m)

    def eval_components(self, a, b):
        """Evaluate on a split argument (a, b): tensor <a>^m <b>^s, or the
        radial polynomial weight of the joined vector."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind == "tensor":
            return (1.0 + a * a) ** (self.m / 2.0) * (1.0 + b * b) ** (self.s / 2.0)
        return (1.0 + a * a + b * b) ** (self.s / 2.0)


def weight_eval(w: WeightSpec, z) -> float:
    """Evaluate a weight at a point or pair of points.

    z may be a PhaseSpacePoint (polynomial: radial bracket; tensor:
    <x>^m <omega>^s) or a tuple (z, zeta) of PhaseSpacePoints (tensor:
    <z>^m <zeta>^s).
    """
    if isinstance(z, tuple):
        p, q = z
        if w.kind == "tensor":
            return float(bracket_point(p.as_array()) ** w.m * bracket_point(q.as_array()) ** w.s)
        raise ValueError("polynomial weights take a single phase-space point")
    if w.kind == "tensor":
        return float(weight_eval_components(w, z.x, z.omega))
    return float(bracket_point(z.as_array()) ** w.s)


def weight_eval_components(w: WeightSpec, a, b):
    return w.eval_components(a, b)


@dataclass(frozen=True)
class ModerationReport:
    max_ratio: float
    argmax_pair: tuple


def check_moderate(w: WeightSpec, v: WeightSpec, sample_pairs) -> ModerationReport:
    """Empirical moderation constant sup w(z1+z2) / (v(z1) w(z2)).

    sample_pairs is a nonempty iterable of (PhaseSpacePoint, PhaseSpacePoint);
    the caller compares max_ratio against a candidate constant C.
    """
    pairs = list(sample_pairs)
    if not pairs:
        raise ValueError("sample_pairs must be nonempty")
    best = -math.inf
    best_pair = None
    for z1, z2 in pairs:
        ratio = weight_eval(w, z1 + z2) / (weight_eval(v, z1) * weight_eval(w, z2))
        if ratio > best:
            best = ratio
            best_pair = (z1, z2)
    return ModerationReport(max_ratio=best, argmax_pair=best_pair)


def snap_to_grid(grid: Grid, x: float) -> tuple[int, float]:
    """Round a time shift to the nearest grid step; returns (index, residual)."""
    s = int(round(x / grid.spacing))
    return s, x - s * grid.spacing


def tf_shift(f: SampledSignal, z: PhaseSpacePoint) -> SampledSignal:
    """Time-frequency shift pi(z) f(t) = e^{2 pi i omega t} f(t - x).

    The time shift is rounded to the nearest grid point and applied as a
    circular rotation (use snap_to_grid for the rounding residual); the
    modulation is applied exactly as a phase ramp.  Shifts of half the grid
    extent or more are rejected, since wrap-around would alias.
    """
    grid = f.grid
    s, _residual = snap_to_grid(grid, z.x)
    if abs(z.x) >= grid.extent / 2:
        raise ValueError(f"time shift {z.x} exceeds half the grid extent {grid.extent / 2}")
    shifted = np.roll(f.values, s)
    phase = np.exp(2j * np.pi * z.omega * grid.points)
    return SampledSignal(grid, phase * shifted)


def t_tau(z: PhaseSpacePoint, u: PhaseSpacePoint, tau: float) -> PhaseSpacePoint:
    """Interpolation map T_tau(z, u) = ((1-tau) z1 + tau u1, tau z2 + (1-tau) u2)."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    return PhaseSpacePoint((1 - tau) * z.x + tau * u.x, tau * z.omega + (1 - tau) * u.omega)


def j_rot(z: PhaseSpacePoint) -> PhaseSpacePoint:
    """Rotation J(z1, z2) = (z2, -z1)."""
    return PhaseSpacePoint(z.omega, -z.x)


def j_rot_inv(z: PhaseSpacePoint) -> PhaseSpacePoint:
    """Inverse rotation J^{-1}(z1, z2) = (-z2, z1)."""
    return PhaseSpacePoint(-z.omega, z.x)


def invert_change_of_variables(y: PhaseSpacePoint, t: PhaseSpacePoint, tau: float):
    """Invert (z, u) -> (y, t) = (T_tau(z, u), J(u - z)).

    Returns (z, u) with z = y - U_tau J^{-1} t and u = y + (I - U_tau) J^{-1} t,
    U_tau = diag(tau, 1 - tau).
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    jt = j_rot_inv(t)
    z = PhaseSpacePoint(y.x - tau * jt.x, y.omega - (1 - tau) * jt.omega)
    u = PhaseSpacePoint(y.x + (1 - tau) * jt.x, y.omega + tau * jt.omega)
    return z, u


def _shift_axis(arr: np.ndarray, axis: int):
    return np.fft.ifftshift(arr, axes=axis), axis


def forward_transform(grid: Grid, values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Centered-grid DFT: V_k = dt * sum_j v_j e^{-2 pi i nu_k t_j} along axis.

    Input samples are indexed by grid (t_j = origin + j*dt, j centered);
    output coefficients by grid.freq_grid().
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.shape[axis] != grid.n_samples:
        raise ValueError("axis length does not match grid")
    out = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(values, axes=axis), axis=axis), axes=axis)
    out = out * grid.spacing
    if grid.origin != 0.0:
        nu = grid.freq_grid().points
        shape = [1] * values.ndim
        shape[axis] = grid.n_samples
        out = out * np.exp(-2j * np.pi * nu * grid.origin).reshape(shape)
    return out


def inverse_transform(grid: Grid, coeffs: np.ndarray, axis: int = -1) -> np.ndarray:
    """Inverse of forward_transform: v_j = dnu * sum_k V_k e^{+2 pi i nu_k t_j}.

    grid describes the *output* (time) axis; coefficients are indexed by
    grid.freq_grid().
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape[axis] != grid.n_samples:
        raise ValueError("axis length does not match grid")
    if grid.origin != 0.0:
        nu = grid.freq_grid().points
        shape = [1] * coeffs.ndim
        shape[axis] = grid.n_samples
        coeffs = coeffs * np.exp(2j * np.pi * nu * grid.origin).reshape(shape)
    out = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(coeffs, axes=axis), axis=axis), axes=axis)
    return out / grid.spacing
