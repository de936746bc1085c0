"""Short-time Fourier transform, its adjoint, inversion, and frame bounds.

The STFT of f against a window g on the grid is

    V_g f(x, omega) = dt * sum_j f(t_j) conj(g(t_j - x)) e^{-2 pi i omega t_j}

with x on (a decimation of) the time grid and omega on its implied
frequency grid; window translates are circular, so signals are expected to
be negligible near the grid boundary for the continuum analogy to hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phase_space import (Grid, Lattice, SampledSignal, forward_transform,
                          inverse_transform, kahan_sum)
from .windows import AnalyticWindow

__all__ = ["PhaseSpaceArray", "FrameReport", "stft", "adjoint_stft",
           "reconstruct", "frame_bounds"]


@dataclass(frozen=True)
class PhaseSpaceArray:
    """Complex values on a rectangular (x, omega) grid, x-major."""

    x_grid: Grid
    omega_grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128, copy=True)
        expected = (self.x_grid.n_samples, self.omega_grid.n_samples)
        if arr.shape != expected:
            raise ValueError(f"values shape {arr.shape} does not match grids {expected}")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def cell_area(self) -> float:
        return self.x_grid.spacing * self.omega_grid.spacing

    def total_mass(self) -> complex:
        return self.cell_area * complex(np.sum(self.values))


@dataclass(frozen=True)
class FrameReport:
    """Extreme eigenvalue estimates of the truncated frame operator."""

    lower_bound_estimate: float
    upper_bound_estimate: float
    gram_truncation_radius: int
    n_lattice_points: int = 0

    def __post_init__(self):
        a, b = self.lower_bound_estimate, self.upper_bound_estimate
        if not (0.0 <= a <= b):
            raise ValueError(f"frame bounds must satisfy 0 <= A <= B, got A={a}, B={b}")

    @property
    def condition_number(self) -> float:
        if self.lower_bound_estimate == 0.0:
            return math.inf
        return self.upper_bound_estimate / self.lower_bound_estimate


def stft(f: SampledSignal, g: SampledSignal, x_step: int = 1, padding: int = 0) -> PhaseSpaceArray:
    """Short-time Fourier transform V_g f on the phase-space grid.

    x_step decimates the x axis in grid units (must divide n with a
    power-of-two quotient); padding appends that many zero samples before
    the column DFTs, refining the frequency grid to n + padding points.
    """
    if f.grid != g.grid:
        raise ValueError("signal and window grids differ")
    grid = f.grid
    n = grid.n_samples
    if not isinstance(x_step, (int, np.integer)) or x_step < 1:
        raise ValueError("x_step must be a positive integer")
    if n % x_step != 0:
        raise ValueError("x_step must divide the number of samples")
    if padding < 0:
        raise ValueError("padding must be nonnegative")
    n_fft = n + padding

    shifts = np.arange(-n // 2, n // 2)
    shifts = shifts[shifts % x_step == 0]
    x_grid = Grid(len(shifts), grid.spacing * x_step, grid.origin)

    # product rows f * conj(T_x g) for every selected shift
    idx = (np.arange(n)[None, :] - shifts[:, None]) % n
    prods = f.values[None, :] * np.conj(g.values[idx])

    if padding == 0:
        cols = forward_transform(grid, prods, axis=1)
        omega_grid = grid.freq_grid()
    else:
        omega_grid = Grid(n_fft, 1.0 / (n_fft * grid.spacing), 0.0)
        # place sample j (centered) at position j mod n_fft, then DFT
        buf = np.zeros((len(shifts), n_fft), dtype=np.complex128)
        j = np.arange(-n // 2, n // 2)
        buf[:, j % n_fft] = prods
        cols = np.fft.fftshift(np.fft.fft(buf, axis=1), axes=1) * grid.spacing
        if grid.origin != 0.0:
            cols = cols * np.exp(-2j * np.pi * omega_grid.points * grid.origin)[None, :]
    return PhaseSpaceArray(x_grid=x_grid, omega_grid=omega_grid, values=cols)


def _x_shift_indices(x_grid: Grid, grid: Grid) -> np.ndarray:
    """Indices s with x_i = t_{s_i}; rejects x grids not embedded in grid."""
    ratio = x_grid.spacing / grid.spacing
    step = int(round(ratio))
    if abs(ratio - step) > 1e-9 or x_grid.origin != grid.origin:
        raise ValueError("x grid is not a decimation of the signal grid")
    s = np.arange(-x_grid.n_samples // 2, x_grid.n_samples // 2) * step
    return s


def adjoint_stft(F: PhaseSpaceArray, g: SampledSignal) -> SampledSignal:
    """Adjoint V_g^* F(t) = dx*domega * sum_{x,omega} F(x,omega) e^{2 pi i omega t} g(t-x).

    Riemann-sum discretization of the synthesis integral with cell weight
    dx*domega; F's omega grid must equal the signal grid's frequency grid.
    """
    grid = g.grid
    if F.omega_grid != grid.freq_grid():
        raise ValueError("omega grid incompatible with the window grid")
    s = _x_shift_indices(F.x_grid, grid)
    # inner inverse DFT: G[i, j] = domega * sum_k F[i, k] e^{2 pi i omega_k t_j}
    G = inverse_transform(grid, F.values, axis=1)
    n = grid.n_samples
    idx = (np.arange(n)[None, :] - s[:, None]) % n
    out = np.sum(g.values[idx] * G, axis=0) * F.x_grid.spacing
    return SampledSignal(grid, out)


def reconstruct(f: SampledSignal, g: SampledSignal):
    """Inversion formula f = V_g^*(V_g f) / ||g||^2; returns (signal, rel l2 error)."""
    nrm = g.norm()
    if nrm <= 0:
        raise ValueError("window must have positive norm")
    rec = adjoint_stft(stft(f, g), g)
    rec = SampledSignal(f.grid, rec.values / nrm ** 2)
    denom = f.norm()
    err = SampledSignal(f.grid, rec.values - f.values).norm() / denom if denom > 0 else 0.0
    return rec, err


def _truncated_lattice_points(g: AnalyticWindow, lattice: Lattice, tol: float = 1e-12):
    """Usable lattice points for the truncated frame operator.

    Time shifts are truncated where the shifted window envelope exceeds tol
    at the grid boundary (time wrap-around is a real artifact; windows are
    evaluated unwrapped).  Frequency shifts are kept within one full Nyquist
    period: on the grid a modulation e^{2 pi i l beta t_j} only depends on
    l*beta modulo 1/dt, so one period covers every discrete frequency and
    points beyond it would merely duplicate frame elements.
    """
    grid = g.grid
    t_max = grid.extent / 2.0 - g.time_halfwidth(tol)
    period = 1.0 / grid.spacing
    pts = lattice.points()
    keep = (np.abs(pts[:, 0] - grid.origin) <= t_max) \
        & (pts[:, 1] >= -period / 2.0) & (pts[:, 1] < period / 2.0)
    return pts[keep]


def frame_bounds(g: AnalyticWindow, lattice: Lattice) -> FrameReport:
    """Frame bound estimates for the Gabor system G(g, lattice).

    Assembles the truncated frame operator S f = sum_lambda <f, pi(lambda)g>
    pi(lambda)g in the grid basis and reports extreme eigenvalues of a
    Hermitian (sub)matrix.  Frequency shifts are always reduced to one
    Nyquist period (modulations alias exactly on the grid).  Two regimes for
    the time axis:

    * covering: the kept time shifts tile the full grid period (radius*alpha
      >= extent/2 - alpha).  Windows are circular translates (alpha must be
      a multiple of dt) and the eigenvalues are taken over the whole grid,
      which is the finite periodic Gabor frame model; degenerate densities
      (e.g. Gaussian at alpha*beta = 1) register exactly.
    * sheltered: the lattice stops short of the boundary.  Windows are
      evaluated unwrapped from their closed form, time shifts with envelope
      mass at the boundary are dropped, and the eigenvalues are restricted
      to signals supported in the central half, emulating the real-line
      inequality without wrap-around artifacts.
    """
    if not isinstance(g, AnalyticWindow):
        raise ValueError("frame_bounds needs an analytic window (closed-form evaluation)")
    grid = g.grid
    t = grid.points
    half_t = grid.extent / 2.0
    covering = lattice.radius * lattice.alpha >= half_t - lattice.alpha
    if covering:
        step = lattice.alpha / grid.spacing
        if abs(step - round(step)) > 1e-9:
            raise ValueError("covering-mode frame bounds need alpha to be a "
                             "multiple of the grid spacing")
        step = int(round(step))
        period = 1.0 / grid.spacing
        ks = [k for k in range(-lattice.radius, lattice.radius + 1)
              if -half_t <= k * lattice.alpha < half_t]
        ls = [l for l in range(-lattice.radius, lattice.radius + 1)
              if -period / 2.0 <= l * lattice.beta < period / 2.0]
        rows = np.empty((len(ks) * len(ls), grid.n_samples), dtype=np.complex128)
        mods = np.exp(2j * np.pi * np.outer([l * lattice.beta for l in ls], t))
        for i, k in enumerate(ks):
            rows[i * len(ls):(i + 1) * len(ls)] = np.roll(g.values, k * step) * mods
        smat = grid.spacing * (rows.T @ rows.conj())
        eigs = np.linalg.eigvalsh(smat)
        n_pts = len(rows)
    else:
        pts = _truncated_lattice_points(g, lattice)
        if len(pts) == 0:
            raise ValueError("no lattice points survive the boundary truncation; "
                             "lattice is incompatible with this grid")
        win = g.eval(t[None, :] - pts[:, 0][:, None]).astype(np.complex128)
        win *= np.exp(2j * np.pi * pts[:, 1][:, None] * t[None, :])
        smat = grid.spacing * (win.T @ win.conj())
        central = np.abs(t - grid.origin) < grid.extent / 4.0
        eigs = np.linalg.eigvalsh(smat[np.ix_(central, central)])
        n_pts = len(pts)
    return FrameReport(lower_bound_estimate=max(float(eigs[0]), 0.0),
                       upper_bound_estimate=float(eigs[-1]),
                       gram_truncation_radius=lattice.radius,
                       n_lattice_points=n_pts)
