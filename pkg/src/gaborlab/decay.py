"""Envelope extraction and almost-diagonalization decay analysis.

The minimal admissible envelope of a Gabor matrix with growth order m is

    h(k) = max over mu of |entry(mu+k, mu)| <T_tau(mu, mu+k)>^{-m}

over difference vectors k of the truncated lattice (for Born-Jordan
matrices the weight is <mu>^{-m} instead, matching the averaged bound).
Envelope norms, log-log decay fits, the seminorm-controlled bound constant,
tau-uniformity sweeps and the Born-Jordan domination check all live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phase_space import Lattice, bracket_point
from .norms import LatticeArray, weighted_seq_norm
from .quantization import (BORN_JORDAN_TAG, GaborMatrix, born_jordan_matrix,
                           gabor_matrix_direct)
from .symbols import SymbolSpec, seminorm
from .wigner import Quadrature
from .windows import AnalyticWindow

__all__ = ["DecayReport", "TauSweepReport", "BJDecayReport", "envelope",
           "envelope_norm", "decay_order_fit", "verify_th34", "tau_sweep",
           "bj_decay_check"]

# envelope values below this fraction of the envelope peak are treated as
# numerical noise and excluded from log-log fits
FIT_FLOOR = 1e-13


@dataclass(frozen=True)
class DecayReport:
    tau: float | str
    m: float
    envelope: LatticeArray
    envelope_norms: dict
    fitted_order: float
    seminorm_used: float
    bound_constant: float
    noninteger_s: float
    noninteger_bound_constant: float


@dataclass(frozen=True)
class TauSweepReport:
    norms: dict           # tau -> envelope norm
    max_over_tau: float
    q: float
    s: float


@dataclass(frozen=True)
class BJDecayReport:
    bj_envelope: LatticeArray
    node_average: LatticeArray     # Peetre-corrected quadrature average
    dominated: bool
    max_violation: float
    bj_norm: float
    node_average_norm: float
    q: float
    s: float


def _entries_4d(M: GaborMatrix) -> np.ndarray:
    side = M.lattice.side
    return M.entries.reshape(side, side, side, side)


def _diff_lattice(lattice: Lattice) -> Lattice:
    return Lattice(lattice.alpha, lattice.beta, 2 * lattice.radius)


def envelope(M: GaborMatrix, m: float) -> LatticeArray:
    """Minimal admissible envelope h(k) on the difference lattice.

    h(k) = max over mu with mu, mu+k in the lattice of
    |entry(mu+k, mu)| <T_tau(mu, mu+k)>^{-m}; Born-Jordan matrices use the
    weight <mu>^{-m}.  By construction every matrix entry satisfies the
    envelope bound, with equality at the maximizing mu.
    """
    lat = M.lattice
    r = lat.radius
    e4 = _entries_4d(M)
    idx = np.arange(-r, r + 1)
    is_bj = M.tau == BORN_JORDAN_TAG
    tau = None if is_bj else float(M.tau)
    dlat = _diff_lattice(lat)
    out = np.zeros(dlat.count)
    for dk in range(-2 * r, 2 * r + 1):
        kmu = idx[(idx + dk >= -r) & (idx + dk <= r)]
        for dl in range(-2 * r, 2 * r + 1):
            lmu = idx[(idx + dl >= -r) & (idx + dl <= r)]
            # entry(mu + k, mu) over the (kmu, lmu) mesh, axes paired
            vals = np.abs(e4[(kmu + dk + r)[:, None], (lmu + dl + r)[None, :],
                             (kmu + r)[:, None], (lmu + r)[None, :]])
            mu1 = (kmu * lat.alpha)[:, None]
            mu2 = (lmu * lat.beta)[None, :]
            if is_bj:
                w = (1.0 + mu1 ** 2 + mu2 ** 2) ** (-m / 2.0)
            else:
                t1 = mu1 + tau * dk * lat.alpha
                t2 = mu2 + (1.0 - tau) * dl * lat.beta
                w = (1.0 + t1 ** 2 + t2 ** 2) ** (-m / 2.0)
            out[dlat.index_of(dk, dl)] = float((vals * w).max())
    return LatticeArray(dlat, out)


def envelope_norm(h: LatticeArray, q: float, s: float) -> float:
    """Weighted sequence norm of an envelope."""
    return weighted_seq_norm(h, q, s)


def decay_order_fit(h: LatticeArray, k_max: int | None = None) -> float:
    """Least-squares decay order: slope of -log h(k) against log <k>.

    Near-diagonal differences (|k|_inf <= 1) reflect window shape and are
    excluded, as are values at the numerical noise floor; at least 4
    distinct radii <k> must remain.  For envelopes of truncated matrices
    pass k_max = lattice radius: difference classes beyond it are carried by
    ever fewer pairs pinned at the truncation corners and measure the
    truncation, not the operator.
    """
    idx = h.lattice.indices()
    pts = h.lattice.points()
    vals = np.asarray(np.abs(h.values), dtype=float)
    peak = vals.max()
    if peak <= 0:
        raise ValueError("envelope is identically zero")
    sup = np.max(np.abs(idx), axis=1)
    mask = (sup >= 2) & (vals > FIT_FLOOR * peak)
    if k_max is not None:
        mask &= sup <= k_max
    br = bracket_point(pts[mask])
    if len(np.unique(np.round(br, 12))) < 4:
        raise ValueError("fewer than 4 usable radii |k| >= 2 with positive envelope")
    x = np.log(br)
    y = np.log(vals[mask])
    slope = np.linalg.lstsq(np.stack([x, np.ones_like(x)], axis=1), y, rcond=None)[0][0]
    return float(-slope)


def verify_th34(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice, tau: float,
                n: int, m: float, norm_specs=((1.0, 3.0), (2.0, 0.0)),
                seminorm_radius: float = 8.0, parallel: int = 1,
                fit_k_max: int | None = None) -> DecayReport:
    """Empirical check of the seminorm-controlled decay bound.

    bound_constant = max over lattice pairs of
    |entry| <lambda-mu>^n / (|sigma|_{n,m} <T_tau(mu,lambda)>^m);
    a finite, radius-stable value supports the bound.  The report also
    carries the non-integer variant with s = n + 1/2 controlled by the
    (n+1)-st seminorm.  Symbols whose (n, m) seminorm diverges are rejected.
    """
    if n > 6:
        raise ValueError("derivative order n must be at most 6")
    rep = seminorm(sym, n, m, region_radius=seminorm_radius)
    if rep.divergence_flag:
        raise ValueError(
            f"symbol {sym.name} is not admissible: seminorm |.|_{{{n},{m:g}}} "
            f"diverges (value {rep.value:.3g} at radius {rep.region_radius:g} "
            "keeps growing)")
    M = gabor_matrix_direct(sym, g, lattice, tau, parallel=parallel)
    h = envelope(M, m)
    br = bracket_point(h.lattice.points())
    bound = float((h.values * br ** n).max()) / rep.value
    s_frac = n + 0.5
    rep_hi = seminorm(sym, n + 1, m, region_radius=seminorm_radius)
    bound_frac = float((h.values * br ** s_frac).max()) / rep_hi.value
    norms = {(q, s): envelope_norm(h, q, s) for (q, s) in norm_specs}
    if fit_k_max is None:
        fit_k_max = lattice.radius
    return DecayReport(tau=tau, m=m, envelope=h, envelope_norms=norms,
                       fitted_order=decay_order_fit(h, k_max=fit_k_max),
                       seminorm_used=rep.value,
                       bound_constant=bound, noninteger_s=s_frac,
                       noninteger_bound_constant=bound_frac)


def tau_sweep(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice, taus,
              m: float, q: float, s: float, parallel: int = 1) -> TauSweepReport:
    """Envelope norms across tau; max_over_tau is the empirical uniform bound."""
    taus = list(taus)
    if any(not 0.0 <= t <= 1.0 for t in taus):
        raise ValueError("all taus must lie in [0, 1]")
    norms = {}
    for t in taus:
        M = gabor_matrix_direct(sym, g, lattice, t, parallel=parallel)
        norms[t] = envelope_norm(envelope(M, m), q, s)
    return TauSweepReport(norms=norms, max_over_tau=max(norms.values()),
                          q=q, s=s)


def bj_decay_check(sym: SymbolSpec, g: AnalyticWindow, lattice: Lattice,
                   quad: Quadrature, m: float, q: float, s: float,
                   tol: float = 1e-6, parallel: int = 1) -> BJDecayReport:
    """Born-Jordan envelope against the averaged per-tau envelopes.

    The BJ matrix is the quadrature average of tau-matrices, so entrywise

        h_BJ(k) <= 2^{|m|/2} <k>^{|m|} sum_i w_i h_{tau_i}(k)

    by the triangle inequality and Peetre's inequality (the right side is
    the "node average" envelope).  Both the entrywise domination (up to tol)
    and the corresponding weighted-norm comparison are reported.
    """
    node_matrices = []
    for tau_i in quad.abscissae:
        node_matrices.append(gabor_matrix_direct(sym, g, lattice, tau_i,
                                                 parallel=parallel))
    acc = None
    for w_i, M_i in zip(quad.weights, node_matrices):
        acc = w_i * M_i.entries if acc is None else acc + w_i * M_i.entries
    bj = GaborMatrix(lattice=lattice, tau=BORN_JORDAN_TAG, entries=acc,
                     window_id=g.descriptor())
    h_bj = envelope(bj, m)
    avg = None
    for w_i, M_i in zip(quad.weights, node_matrices):
        h_i = envelope(M_i, m)
        avg = w_i * h_i.values if avg is None else avg + w_i * h_i.values
    peetre = 2.0 ** (abs(m) / 2.0) * bracket_point(h_bj.lattice.points()) ** abs(m)
    node_avg = LatticeArray(h_bj.lattice, peetre * avg)
    slack = h_bj.values - (1.0 + tol) * node_avg.values
    max_violation = float(slack.max())
    return BJDecayReport(
        bj_envelope=h_bj, node_average=node_avg,
        dominated=bool(max_violation <= 0.0), max_violation=max_violation,
        bj_norm=weighted_seq_norm(h_bj, q, s),
        node_average_norm=weighted_seq_norm(node_avg, q, s),
        q=q, s=s)
