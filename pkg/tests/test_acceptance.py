"""Acceptance suite: every numbered criterion at its stated tolerance.

Each test prints one PASS line (pytest -s shows them; failures surface as
ordinary assertions).  Matrix-heavy criteria run on the 512-sample grid
(extent +-16) so lattice radius 8 stays well inside the quadrature domain;
signal-level criteria use the 256-sample grid.
"""

import json
import math
import time

import numpy as np
import pytest

from gaborlab import (Grid, Lattice, SampledSignal, WeightSpec, besov_norm,
                      bracket_point, check_embedding, decay_order_fit,
                      envelope, envelope_norm, forward_transform,
                      frame_bounds, gabor_matrix_direct, gabor_matrix_stft,
                      gauss_legendre, gaussian_window, make_signal,
                      modulation_norm_decomp, modulation_norm_stft,
                      reconstruct, route_deviation, signal_family, stft,
                      tau_sweep, tau_wigner, bj_decay_check, verify_th34,
                      weighted_seq_norm)
from gaborlab.cli import main as cli_main
from gaborlab.norms import LatticeArray
from gaborlab.quantization import born_jordan_matrix
from gaborlab.symbols import (bracket_power, chirp, constant, profile_gauss,
                              separable_x, trig)

TAUS = (0.0, 0.25, 0.5, 0.75, 1.0)


def report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:>2}: {status} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_c01_stft_inversion(grid, window, family):
    t0 = time.monotonic()
    names = ("gauss", "gauss_shift", "hermite1", "hermite2", "chirp_gauss")
    errs = {name: reconstruct(family[name], window)[1] for name in names}
    elapsed = time.monotonic() - t0
    ok = all(e <= 1e-10 for e in errs.values()) and elapsed < 10.0
    report(1, ok, f"reconstruction errors {max(errs.values()):.2e} <= 1e-10 "
                  f"on {len(names)} signals in {elapsed:.2f}s")


def test_c02_wigner_marginals(grid, family):
    worst = 0.0
    for name in ("gauss", "hermite1", "chirp_gauss"):
        f = family[name]
        target_t = np.abs(f.values) ** 2
        target_f = np.abs(forward_transform(grid, f.values)) ** 2
        for tau in TAUS:
            W = tau_wigner(f, f, tau)
            tm = W.omega_grid.spacing * np.sum(W.values, axis=1)
            fm = W.x_grid.spacing * np.sum(W.values, axis=0)
            worst = max(worst,
                        np.max(np.abs(tm - target_t)) / np.max(target_t),
                        np.max(np.abs(fm - target_f)) / np.max(target_f))
    report(2, worst <= 1e-6,
           f"both marginals, 5 taus x 3 signals, worst rel dev {worst:.2e} <= 1e-6")


def test_c03_gaussian_closed_forms(grid, window):
    V = stft(window, window)
    X, Om = np.meshgrid(V.x_grid.points, V.omega_grid.points, indexing="ij")
    mask = X ** 2 + Om ** 2 <= 9.0
    dev_v = np.max(np.abs(np.abs(V.values)
                          - np.exp(-np.pi * (X ** 2 + Om ** 2) / 2))[mask])
    W = tau_wigner(window, window, 0.5)
    dev_w = np.max(np.abs(W.values - 2.0 * np.exp(-2 * np.pi * (X ** 2 + Om ** 2)))[mask])
    ok = dev_v <= 1e-6 and dev_w <= 1e-6
    report(3, ok, f"|V_g g| dev {dev_v:.2e}, W_1/2 dev {dev_w:.2e} <= 1e-6 on |z|<=3")


def test_c04_route_equivalence(grid512, window512):
    t0 = time.monotonic()
    lat = Lattice(0.5, 0.5, 6)
    symbols = (bracket_power(0.5), trig(1.0, 1.0), separable_x(profile_gauss(1.0)))
    worst = 0.0
    for sym in symbols:
        for tau in (0.0, 0.5, 1.0):
            Md = gabor_matrix_direct(sym, window512, lat, tau)
            Ms = gabor_matrix_stft(sym, window512, lat, tau)
            worst = max(worst, route_deviation(Md, Ms).max_dev_over_peak)
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-6 and elapsed < 300.0
    report(4, ok, f"direct vs STFT route, 3 symbols x 3 taus, radius 6: "
                  f"worst magnitude dev {worst:.2e} <= 1e-6 in {elapsed:.0f}s")


def test_c05_identity_and_multiplication(grid, window):
    from gaborlab import PhaseSpacePoint, tf_shift
    lat = Lattice(0.5, 0.5, 3)
    sig = SampledSignal(grid, window.values)
    pts = lat.points()
    shifted = [tf_shift(sig, PhaseSpacePoint(*p)) for p in pts]
    gram = np.array([[shifted[j].inner(shifted[i]) for j in range(lat.count)]
                     for i in range(lat.count)])
    worst_id = 0.0
    for tau in (0.0, 0.5, 1.0):
        M = gabor_matrix_direct(constant(1.0), window, lat, tau)
        worst_id = max(worst_id, float(np.max(np.abs(M.entries - gram))))
    sym = separable_x(profile_gauss(1.0))
    mats = [gabor_matrix_direct(sym, window, lat, tau).entries for tau in TAUS]
    worst_sep = max(float(np.max(np.abs(m - mats[0]))) for m in mats[1:])
    ok = worst_id <= 1e-8 and worst_sep <= 1e-7
    report(5, ok, f"identity vs Gram dev {worst_id:.2e} <= 1e-8; "
                  f"separable tau-independence {worst_sep:.2e} <= 1e-7")


def test_c06_decay_theorem(grid512, window512):
    lat6, lat8 = Lattice(0.5, 0.5, 6), Lattice(0.5, 0.5, 8)
    ok = True
    details = []
    for m in (0.0, 1.0):
        sym = bracket_power(m)
        for n in (0, 2, 4):
            b6 = verify_th34(sym, window512, lat6, 0.5, n, m).bound_constant
            b8 = verify_th34(sym, window512, lat8, 0.5, n, m).bound_constant
            stable = math.isfinite(b6) and math.isfinite(b8) \
                and abs(b8 - b6) <= 0.1 * b6
            ok = ok and stable
            details.append(f"m={m:g},n={n}: C6={b6:.3g} C8={b8:.3g}")
        fit = verify_th34(sym, window512, lat8, 0.5, 4, m,
                          fit_k_max=4).fitted_order
        ok = ok and fit > 6.0
        details.append(f"m={m:g} fit={fit:.1f}")
    Mc = gabor_matrix_direct(chirp(1.0), window512, lat8, 0.5)
    chirp_fit = decay_order_fit(envelope(Mc, 0.0), k_max=4)
    ok = ok and chirp_fit <= 2.0
    with pytest.raises(ValueError, match="seminorm"):
        verify_th34(chirp(1.0), window512, lat8, 0.5, 1, 0.0)
    report(6, ok, "bound constants radius-stable (+-10%), member fits > 6, "
                  f"chirp fit {chirp_fit:.2f} <= 2 [{'; '.join(details)}]")


def test_c07_tau_uniformity(grid512, window512):
    lat = Lattice(0.5, 0.5, 5)
    worst = 0.0
    for sym, m in ((bracket_power(0.5), 0.5), (trig(1.0, 1.0), 0.0),
                   (separable_x(profile_gauss(1.0)), 0.0)):
        rep = tau_sweep(sym, window512, lat, TAUS, m, 1.0, 3.0)
        vals = list(rep.norms.values())
        worst = max(worst, max(vals) / min(vals))
    report(7, worst <= 2.0,
           f"envelope l1_(<.>^3) norms over 5 taus, 3 members: "
           f"worst max/min ratio {worst:.3f} <= 2")


def test_c08_born_jordan(grid, window):
    lat = Lattice(0.5, 0.5, 3)
    sym = bracket_power(1.0)
    rep8 = bj_decay_check(sym, window, lat, gauss_legendre(8), 1.0, 1.0, 3.0)
    rep16 = bj_decay_check(sym, window, lat, gauss_legendre(16), 1.0, 1.0, 3.0)
    m8 = born_jordan_matrix(sym, window, lat, gauss_legendre(8))
    m16 = born_jordan_matrix(sym, window, lat, gauss_legendre(16))
    quad_dev = float(np.max(np.abs(m8.entries - m16.entries)))
    norm_dev = abs(rep8.bj_norm - rep16.bj_norm) / rep16.bj_norm
    ok = rep8.dominated and quad_dev <= 1e-8 and norm_dev <= 1e-8
    report(8, ok, f"BJ envelope dominated (max violation {rep8.max_violation:.2e}"
                  f" <= 0 at tol 1e-6); M8 vs M16 entries {quad_dev:.2e} <= 1e-8,"
                  f" envelope norms {norm_dev:.2e}")


def test_c09_frame_bounds():
    fgrid = Grid(128, 1 / 8)
    g = gaussian_window(fgrid, 1.0)
    half = frame_bounds(g, Lattice(1.0, 0.5, 8))
    crit = frame_bounds(g, Lattice(1.0, 1.0, 8))
    sweep = [frame_bounds(g, Lattice(1.0, b, 8)).lower_bound_estimate
             for b in (0.5, 0.75, 0.95)]
    ok = (half.lower_bound_estimate > 0
          and math.isfinite(half.condition_number)
          and crit.lower_bound_estimate / crit.upper_bound_estimate <= 1e-3
          and sweep[0] >= sweep[1] >= sweep[2])
    report(9, ok, f"alpha*beta=1/2: A={half.lower_bound_estimate:.3f}, "
                  f"B/A={half.condition_number:.2f}; critical A/B="
                  f"{crit.lower_bound_estimate / crit.upper_bound_estimate:.2e}"
                  f" <= 1e-3; A monotone {[round(a, 4) for a in sweep]}")


def test_c10_norm_equivalence(grid, window, family):
    worst = 0.0
    for q in (1.0, 2.0, math.inf):
        for s in (0.0, 2.0):
            ratios = []
            for f in family.values():
                v1 = modulation_norm_stft(f, window, math.inf, q,
                                          WeightSpec.tensor(0.0, s))
                v2 = modulation_norm_decomp(f, math.inf, q,
                                            w_seq=WeightSpec.polynomial(s))
                ratios.append(v1 / v2)
            worst = max(worst, max(ratios) / min(ratios))
    report(10, worst <= 10.0,
           f"STFT vs decomposition norms, q in {{1,2,inf}}, s in {{0,2}}, "
           f"10 signals: worst bracket {worst:.2f} <= 10")


def test_c11_embedding_suite(grid, window):
    base = make_signal(grid, "gauss")
    ladder = [SampledSignal(grid, base.values * np.exp(2j * np.pi * om * grid.points))
              for om in (0.0, 1.0, 2.0, 4.0, 6.0)]

    def mod(f, q, s):
        return modulation_norm_stft(f, window, math.inf, q, WeightSpec.tensor(0.0, s))

    checks = []
    # weighted sequence-space inclusion on a support-growing family
    lat = Lattice(1.0, 1.0, 10)
    br = bracket_point(lat.points())
    src = []
    tgt = []
    for radius in (1.0, 2.0, 4.0, 8.0):
        a = LatticeArray(lat, (br <= radius).astype(float))
        src.append(weighted_seq_norm(a, 2.0, 3.0))
        tgt.append(weighted_seq_norm(a, 1.0, 0.0))
    checks.append(("seq l2_3 -> l1_0", check_embedding(src, tgt).violated, False))
    checks.append(("seq reversed", check_embedding(tgt, src).violated, True))
    # modulation chain (q1=1, q2=2, r=2 > s + d(1/q1-1/q2) with s=0)
    a = [mod(f, 1.0, 2.0) for f in ladder]
    b = [mod(f, 2.0, 2.0) for f in ladder]
    c = [mod(f, 1.0, 0.0) for f in ladder]
    checks.append(("mod q1->q2", check_embedding(a, b).violated, False))
    checks.append(("mod q2->s", check_embedding(b, c).violated, False))
    checks.append(("mod reversed", check_embedding(c, a).violated, True))
    # Besov sandwich for q in {1, 2, inf}, s in {0, 1}
    for q, theta in ((1.0, 0.0), (2.0, -0.5), (math.inf, -1.0)):
        for s in (0.0, 1.0):
            hi = [besov_norm(f, math.inf, q,
                             s + (1.0 / q if q != math.inf else 0.0))
                  for f in ladder]
            mid = [mod(f, q, s) for f in ladder]
            lo = [besov_norm(f, math.inf, q, s + theta) for f in ladder]
            checks.append((f"besov->mod q={q:g} s={s:g}",
                           check_embedding(hi, mid).violated, False))
            checks.append((f"mod->besov q={q:g} s={s:g}",
                           check_embedding(mid, lo).violated, False))
    bad = [name for name, got, want in checks if got != want]
    report(11, not bad, f"{len(checks)} embedding checks as predicted"
                        + (f"; offending: {bad}" if bad else ""))


def test_c12_cli_determinism(tmp_path):
    args = ["matrix", "--route", "both", "--n", "256", "--radius", "2",
            "--alpha", "0.5", "--beta", "0.5"]
    outs = []
    for i, par in enumerate(("1", "3", "1")):
        out = tmp_path / f"run{i}"
        rc = cli_main(args + ["--out", str(out), "--parallel", par])
        assert rc == 0
        outs.append(out)
    names = sorted(json.loads((outs[0] / "manifest.json").read_text())["artifacts"])
    identical = all(len({(o / n).read_bytes() for o in outs}) == 1
                    for n in names + ["manifest.json"])
    report(12, identical,
           f"byte-identical artifacts {names} + manifest across reruns and "
           f"parallel degrees 1/3")
