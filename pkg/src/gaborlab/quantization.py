"""Gabor matrices of tau-quantized and Born-Jordan operators.

Two independent routes compute the matrix entries
entry(lambda, mu) = <Op_tau(sigma) pi(mu) g, pi(lambda) g>:

* the direct route discretizes the weak pairing <sigma, W_tau(pi(lambda)g,
  pi(mu)g)> on the phase-space grid, with the shifted windows evaluated from
  their closed forms;
* the STFT route computes Phi_tau = W_tau(g, g) once (wigner module) and
  evaluates the symbol's short-time Fourier transform V_{Phi_tau} sigma at
  the points (T_tau(lambda, mu), J(lambda - mu)).

The two routes share only the sampled symbol and the grid; entrywise
magnitude agreement is the standing cross-check.  Both require the lattice
to be grid-compatible (alpha a multiple of dt, beta a multiple of the
frequency spacing) and a centered grid (origin 0).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .phase_space import (Grid, Lattice, SampledSignal, forward_transform,
                          inverse_transform)
from .stft import PhaseSpaceArray
from .symbols import SymbolSpec, eval_symbol_grid
from .wigner import Quadrature, tau_wigner
from .windows import AnalyticWindow

__all__ = ["GaborMatrix", "RouteDeviation", "gabor_matrix_direct",
           "gabor_matrix_stft", "born_jordan_matrix", "apply_operator",
           "route_deviation", "reference_entry", "sample_symbol"]

BORN_JORDAN_TAG = "born_jordan"


@dataclass(frozen=True)
class GaborMatrix:
    """Dense Gabor matrix over a truncated lattice.

    entries[i, j] = <T pi(mu_j) g, pi(lambda_i) g> with lambda_i, mu_j in the
    lattice's lexicographic enumeration; tau is the quantization parameter or
    the "born_jordan" tag.
    """

    lattice: Lattice
    tau: float | str
    entries: np.ndarray = field(repr=False)
    window_id: str = ""

    def __post_init__(self):
        if isinstance(self.tau, str):
            if self.tau != BORN_JORDAN_TAG:
                raise ValueError(f"unknown tau tag {self.tau!r}")
        elif not 0.0 <= float(self.tau) <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        m = self.lattice.count
        if arr.shape != (m, m):
            raise ValueError(f"entries must be {m}x{m}, got {arr.shape}")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class RouteDeviation:
    """Entrywise magnitude comparison of two Gabor matrices."""

    max_dev_over_peak: float     # max | |a|-|b| | / max|a|
    max_rel_dev: float           # max | |a|-|b| | / |a| over |a| >= floor*max|a|
    peak: float
    floor: float


def _lattice_steps(grid: Grid, lattice: Lattice) -> tuple[int, int]:
    """Integer grid multiples (p, q) with alpha = p*dt, beta = q*domega."""
    p = lattice.alpha / grid.spacing
    q = lattice.beta / grid.freq_spacing
    if abs(p - round(p)) > 1e-9 or abs(q - round(q)) > 1e-9:
        raise ValueError(
            f"lattice (alpha={lattice.alpha}, beta={lattice.beta}) is not "
            f"grid-compatible (dt={grid.spacing}, domega={grid.freq_spacing})")
    return int(round(p)), int(round(q))


def _require_centered(grid: Grid):
    if grid.origin != 0.0:
        raise ValueError("Gabor matrix assembly requires a centered grid (origin 0)")


def sample_symbol(sym: SymbolSpec, grid: Grid) -> np.ndarray:
    """sigma sampled on the phase-space grid (x rows, omega columns)."""
    x = grid.points
    om = grid.freq_grid().points
    return eval_symbol_grid(sym, x[:, None], om[None, :])


def _window_eval(g: AnalyticWindow, pts: np.ndarray) -> np.ndarray:
    vals = g.eval(pts)
    return vals.astype(np.complex128) if not np.iscomplexobj(vals) else vals


def _direct_block(args):
    """Entries for one block of time-shift index pairs (k_lam, k_mu)."""
    (k_lams, stilde, grid, lattice, tau, gP, gQ) = args
    n = grid.n_samples
    side = lattice.side
    r = lattice.radius
    beta = lattice.beta
    y = Grid(n, grid.spacing, 0.0).points
    ls = np.arange(-r, r + 1)
    deltas = np.arange(-2 * r, 2 * r + 1)
    # modulation transforms: e^{-2 pi i beta l y_j} for all l, and the
    # delta-dependent ramp e^{-2 pi i beta (1-tau) delta y_j}
    mod_l = np.exp(-2j * np.pi * beta * np.outer(y, ls))          # (n, side)
    ramp = np.exp(-2j * np.pi * beta * (1.0 - tau) * np.outer(deltas, y))  # (ndelta, n)
    # x-axis harmonics e^{+2 pi i beta delta x_i} live on the grid's dual:
    # beta*delta = (qstep*delta)*dnu, so one inverse FFT along axis 0 yields
    # them all (the modulo wrap is exact for the discrete sum)
    qstep = int(round(beta / grid.freq_spacing))
    out = np.zeros((len(k_lams), side, side, side), dtype=np.complex128)
    pref = grid.spacing * grid.spacing  # dx * dt
    for a, k_lam in enumerate(k_lams):
        il = k_lam + r
        for im in range(side):
            base = np.conj(gP[il]) * stilde * gQ[im]              # (n, n)
            # D[kappa, j] = sum_i base[i, j] e^{+2 pi i kappa dnu x_i}
            d = n * np.fft.ifft(np.fft.ifftshift(base, axes=0), axis=0)
            rows = d[(qstep * deltas) % n, :]                     # (ndelta, n)
            t = rows * ramp                                       # (ndelta, n)
            block = t @ mod_l                                     # (ndelta, side)
            # entry(l_lam, l_mu = l_lam + delta) = pref * block[delta, l_lam]
            for di, delta in enumerate(deltas):
                lmu = ls + delta
                ok = (lmu >= -r) & (lmu <= r)
                out[a, im, ls[ok] + r, lmu[ok] + r] = pref * block[di, ok]
    return out


def gabor_matrix_direct(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice,
                        tau: float, parallel: int = 1) -> GaborMatrix:
    """Gabor matrix by the direct weak-pairing quadrature.

    entry(lambda, mu) = dx*domega * sum_z sigma(z) conj(W_tau(pi(lambda)g,
    pi(mu)g)(z)) over the full phase-space grid, with the omega-sum folded
    into a half-transform of sigma (an exact rearrangement) and the shifted
    windows evaluated from the window's closed form.
    """
    if not isinstance(g, AnalyticWindow):
        raise ValueError("direct route needs an analytic window")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    grid = g.grid
    _require_centered(grid)
    _lattice_steps(grid, lattice)
    n = grid.n_samples
    r = lattice.radius
    side = lattice.side
    x = grid.points
    ygrid = Grid(n, grid.spacing, 0.0)
    y = ygrid.points

    sigma = sample_symbol(sym, grid)
    # Stilde[i, j] = domega * sum_k sigma[i, k] e^{+2 pi i omega_k y_j}
    stilde = inverse_transform(ygrid, sigma, axis=1)

    pmat = x[:, None] + tau * y[None, :]            # arguments of pi(lambda)g
    qmat = x[:, None] - (1.0 - tau) * y[None, :]    # arguments of pi(mu)g
    ks = np.arange(-r, r + 1)
    gP = np.stack([_window_eval(g, pmat - k * lattice.alpha) for k in ks])
    gQ = np.stack([_window_eval(g, qmat - k * lattice.alpha) for k in ks])

    chunks = [ks[i:i + 1] for i in range(side)]
    argsets = [(chunk, stilde, grid, lattice, tau, gP, gQ) for chunk in chunks]
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as ex:
            results = list(ex.map(_direct_block, argsets))
    else:
        results = [_direct_block(a) for a in argsets]

    entries = np.zeros((lattice.count, lattice.count), dtype=np.complex128)
    for chunk, res in zip(chunks, results):
        for a, k_lam in enumerate(chunk):
            for im, k_mu in enumerate(ks):
                # res[a, im, l_lam, l_mu] -> entries[(k_lam,l_lam), (k_mu,l_mu)]
                row0 = (k_lam + r) * side
                col0 = (k_mu + r) * side
                entries[row0:row0 + side, col0:col0 + side] = res[a, im]
    return GaborMatrix(lattice=lattice, tau=tau, entries=entries,
                       window_id=g.descriptor())


def gabor_matrix_stft(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice,
                      tau: float) -> GaborMatrix:
    """Gabor matrix magnitudes via the STFT of the symbol.

    Computes Phi_tau = W_tau(g, g) once, then the phase-space STFT
    V_{Phi_tau} sigma at the points (T_tau(lambda, mu), J(lambda - mu)).
    Only the entry magnitudes are contractual (the identity fixes
    magnitudes); the stored complex values carry this route's phases.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    grid = g.grid
    _require_centered(grid)
    pstep, qstep = _lattice_steps(grid, lattice)
    n = grid.n_samples
    r = lattice.radius
    side = lattice.side

    sigma = sample_symbol(sym, grid)
    phi = tau_wigner(g, g, tau)

    omega_grid = grid.freq_grid()
    # 2-d centered transforms; axis-0 dual is the frequency grid, axis-1 dual
    # is the (zero-origin) time grid
    def cdft2(arr):
        out = forward_transform(grid, arr, axis=0)
        return forward_transform(omega_grid, out, axis=1)

    sig_hat = cdft2(sigma)
    phi_hat = cdft2(phi.values)
    kappa0 = omega_grid.points
    kappa1 = Grid(n, grid.spacing, 0.0).points
    scale = grid.freq_spacing * grid.spacing  # dnu0 * dnu1

    idx = np.arange(-r, r + 1)
    entries = np.zeros((lattice.count, lattice.count), dtype=np.complex128)
    for dk in range(-2 * r, 2 * r + 1):
        for dl in range(-2 * r, 2 * r + 1):
            # pairs mu = (k, l), lambda = mu + (dk, dl)
            kmu = idx[(idx + dk >= -r) & (idx + dk <= r)]
            lmu = idx[(idx + dl >= -r) & (idx + dl <= r)]
            if len(kmu) == 0 or len(lmu) == 0:
                continue
            km, lm = np.meshgrid(kmu, lmu, indexing="ij")
            km = km.ravel()
            lm = lm.ravel()
            mu1 = km * lattice.alpha
            mu2 = lm * lattice.beta
            lam1 = mu1 + dk * lattice.alpha
            lam2 = mu2 + dl * lattice.beta
            y1 = (1.0 - tau) * lam1 + tau * mu1
            y2 = tau * lam2 + (1.0 - tau) * mu2
            # t = J(lambda - mu) = (dl*beta, -dk*alpha): roll sig_hat so
            # coefficient kappa reads sigma_hat at t + kappa (periodic wrap)
            rolled = np.roll(np.roll(sig_hat, -dl * qstep, axis=0), dk * pstep, axis=1)
            coeff = scale * np.conj(phi_hat) * rolled
            e1 = np.exp(2j * np.pi * np.outer(y1, kappa0))
            e2 = np.exp(2j * np.pi * np.outer(y2, kappa1))
            vals = np.einsum("pa,ab,pb->p", e1, coeff, e2, optimize=True)
            rows = (km + dk + r) * side + (lm + dl + r)
            cols = (km + r) * side + (lm + r)
            entries[rows, cols] = vals
    return GaborMatrix(lattice=lattice, tau=tau, entries=entries,
                       window_id=g.descriptor())


def born_jordan_matrix(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice,
                       quad: Quadrature, parallel: int = 1) -> GaborMatrix:
    """Born-Jordan Gabor matrix: Gauss-Legendre average of tau-matrices."""
    acc = None
    for w_i, tau_i in zip(quad.weights, quad.abscissae):
        m = gabor_matrix_direct(sym, g, lattice, tau_i, parallel=parallel)
        acc = w_i * m.entries if acc is None else acc + w_i * m.entries
    return GaborMatrix(lattice=lattice, tau=BORN_JORDAN_TAG, entries=acc,
                       window_id=g.descriptor())


def apply_operator(M: GaborMatrix, f: SampledSignal, g: AnalyticWindow) -> SampledSignal:
    """Apply the operator through its Gabor matrix.

    T f = sum_lambda [sum_mu M(lambda,mu) <f, pi(mu)g> alpha*beta] pi(lambda)g
    alpha*beta, i.e. analysis -> kernel -> synthesis with lattice cell weight
    alpha*beta on each lattice sum.
    """
    if f.grid != g.grid:
        raise ValueError("signal and window grids differ")
    grid = g.grid
    lattice = M.lattice
    pts = lattice.points()
    t = grid.points
    win = _window_eval(g, t[None, :] - pts[:, 0][:, None])
    win = win * np.exp(2j * np.pi * pts[:, 1][:, None] * t[None, :])
    coeff = grid.spacing * (win.conj() @ f.values)
    cell = lattice.alpha * lattice.beta
    synth = M.entries @ coeff * cell
    out = (synth[:, None] * win).sum(axis=0) * cell
    return SampledSignal(grid, out)


def route_deviation(a: GaborMatrix, b: GaborMatrix, floor: float = 1e-6) -> RouteDeviation:
    """Compare entry magnitudes of two routes for the same operator."""
    ma = np.abs(a.entries)
    mb = np.abs(b.entries)
    peak = float(ma.max())
    if peak == 0.0:
        return RouteDeviation(0.0, 0.0, 0.0, floor)
    dev = np.abs(ma - mb)
    big = ma >= floor * peak
    rel = float((dev[big] / ma[big]).max()) if np.any(big) else 0.0
    return RouteDeviation(max_dev_over_peak=float(dev.max()) / peak,
                          max_rel_dev=rel, peak=peak, floor=floor)


def reference_entry(sym: SymbolSpec, g: AnalyticWindow, lam, mu, tau: float) -> complex:
    """Literal single-entry oracle: tau-Wigner of the shifted windows via the
    wigner module, then the quadrature pairing with sigma.  Slow; used to
    validate the fused assembly on small cases."""
    from .phase_space import tf_shift
    grid = g.grid
    sig = SampledSignal(grid, g.values)
    w = tau_wigner(tf_shift(sig, lam), tf_shift(sig, mu), tau)
    sigma = sample_symbol(sym, grid)
    return complex(w.cell_area * np.sum(sigma * np.conj(w.values)))
