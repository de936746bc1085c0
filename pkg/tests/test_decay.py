import numpy as np
import pytest

from gaborlab import (Grid, Lattice, bracket_point, decay_order_fit, envelope,
                      envelope_norm, gabor_matrix_direct, gauss_legendre,
                      gaussian_window, tau_sweep, verify_th34, bj_decay_check)
from gaborlab.norms import LatticeArray
from gaborlab.symbols import (bracket_power, chirp, constant, profile_gauss,
                              separable_x, trig)


@pytest.fixture(scope="module")
def lat3():
    return Lattice(0.5, 0.5, 3)


class TestEnvelope:
    def test_nonnegative_and_minimal(self, grid, window, lat3):
        M = gabor_matrix_direct(bracket_power(1.0), window, lat3, 0.5)
        h = envelope(M, 1.0)
        assert np.all(h.values >= 0)
        # minimality: every entry obeys the bound, equality attained per k
        r = lat3.radius
        idx = lat3.indices()
        for i in range(lat3.count):
            for j in range(lat3.count):
                dk, dl = idx[i] - idx[j]
                mu = idx[j].astype(float) * 0.5
                t1 = mu[0] + 0.5 * dk * 0.5
                t2 = mu[1] + (1 - 0.5) * dl * 0.5
                w = (1.0 + t1 ** 2 + t2 ** 2) ** 0.5
                hk = h.values[h.lattice.index_of(dk, dl)]
                assert abs(M.entries[i, j]) <= hk * w + 1e-12

    def test_identity_envelope_matches_gram_decay(self, grid, window, lat3):
        # sigma = 1: h(k) recovers |V_g g| at the lattice difference, i.e.
        # e^{-pi |k|^2 / 2} for the width-1 window
        M = gabor_matrix_direct(constant(1.0), window, lat3, 0.5)
        h = envelope(M, 0.0)
        pts = h.lattice.points()
        pred = np.exp(-np.pi * np.sum(pts ** 2, axis=1) / 2)
        mask = np.max(np.abs(h.lattice.indices()), axis=1) <= 3
        assert np.max(np.abs(h.values - pred)[mask]) < 1e-8

    def test_envelope_norm_zero_matrix(self, lat3):
        from gaborlab.quantization import GaborMatrix
        M = GaborMatrix(lattice=lat3, tau=0.5,
                        entries=np.zeros((lat3.count, lat3.count)))
        h = envelope(M, 0.0)
        assert envelope_norm(h, 1.0, 4.0) == 0.0

    def test_quasi_norm_branch_finite(self, grid, window, lat3):
        M = gabor_matrix_direct(constant(1.0), window, lat3, 0.5)
        h = envelope(M, 0.0)
        v = envelope_norm(h, 0.5, 2.0)
        assert np.isfinite(v) and v > 0


class TestDecayFit:
    def test_synthetic_power_law(self):
        lat = Lattice(1.0, 1.0, 5)
        h = LatticeArray(lat, bracket_point(lat.points()) ** -3.0)
        assert decay_order_fit(h) == pytest.approx(3.0, abs=0.05)

    def test_synthetic_exponential_reads_superpolynomial(self):
        lat = Lattice(1.0, 1.0, 10)
        pts = lat.points()
        h = LatticeArray(lat, np.exp(-np.sqrt(np.sum(pts ** 2, axis=1))))
        assert decay_order_fit(h) > 6.0

    def test_too_few_radii_rejected(self):
        lat = Lattice(1.0, 1.0, 2)
        h = LatticeArray(lat, np.ones(lat.count))
        with pytest.raises(ValueError):
            decay_order_fit(h, k_max=2)

    def test_identity_symbol_beats_every_polynomial(self, grid, window):
        lat = Lattice(0.5, 0.5, 4)
        M = gabor_matrix_direct(constant(1.0), window, lat, 0.5)
        h = envelope(M, 0.0)
        assert decay_order_fit(h, k_max=4) > 6.0


class TestVerifyTh34:
    def test_constant_symbol_bound(self, grid, window, lat3):
        rep = verify_th34(constant(1.0), window, lat3, 0.5, 4, 0.0)
        assert np.isfinite(rep.bound_constant) and rep.bound_constant > 0
        assert np.isfinite(rep.noninteger_bound_constant)
        assert rep.noninteger_s == 4.5
        assert (1.0, 3.0) in rep.envelope_norms

    @pytest.mark.parametrize("n", [0, 2, 4])
    def test_bracket_bound_finite_per_order(self, grid, window, lat3, n):
        rep = verify_th34(bracket_power(1.0), window, lat3, 0.5, n, 1.0)
        assert np.isfinite(rep.bound_constant) and rep.bound_constant > 0

    def test_radius_stability(self, grid, window):
        rep3 = verify_th34(constant(1.0), window, Lattice(0.5, 0.5, 3), 0.5, 4, 0.0)
        rep4 = verify_th34(constant(1.0), window, Lattice(0.5, 0.5, 4), 0.5, 4, 0.0)
        assert rep4.bound_constant == pytest.approx(rep3.bound_constant, rel=0.1)

    def test_chirp_rejected_with_seminorm_message(self, grid, window, lat3):
        with pytest.raises(ValueError, match="seminorm"):
            verify_th34(chirp(1.0), window, lat3, 0.5, 1, 0.0)

    def test_large_order_rejected(self, grid, window, lat3):
        with pytest.raises(ValueError):
            verify_th34(constant(1.0), window, lat3, 0.5, 7, 0.0)


class TestTauSweep:
    def test_separable_symbol_invariant(self, grid, window, lat3):
        rep = tau_sweep(separable_x(profile_gauss(1.0)), window, lat3,
                        [0.0, 0.25, 0.5, 0.75, 1.0], 0.0, 1.0, 3.0)
        vals = list(rep.norms.values())
        assert max(vals) / min(vals) < 1.0 + 1e-7

    def test_singleton(self, grid, window, lat3):
        rep = tau_sweep(bracket_power(0.5), window, lat3, [0.5], 0.5, 1.0, 3.0)
        assert rep.max_over_tau == rep.norms[0.5]

    def test_bracket_uniformity(self, grid, window, lat3):
        rep = tau_sweep(bracket_power(0.5), window, lat3,
                        [0.0, 0.25, 0.5, 0.75, 1.0], 0.5, 1.0, 3.0)
        vals = list(rep.norms.values())
        assert max(vals) / min(vals) <= 2.0


class TestBornJordanDecay:
    def test_constant_symbol_envelope_matches_identity(self, grid, window, lat3):
        rep = bj_decay_check(constant(1.0), window, lat3, gauss_legendre(4),
                             0.0, 1.0, 3.0)
        M = gabor_matrix_direct(constant(1.0), window, lat3, 0.5)
        h = envelope(M, 0.0)
        assert np.max(np.abs(rep.bj_envelope.values - h.values)) < 1e-10

    def test_domination(self, grid, window, lat3):
        rep = bj_decay_check(bracket_power(1.0), window, lat3, gauss_legendre(8),
                             1.0, 1.0, 3.0)
        assert rep.dominated
        assert rep.max_violation <= 0.0
        assert rep.bj_norm <= rep.node_average_norm * (1 + 1e-6)

    def test_quadrature_convergence(self, grid, window, lat3):
        r8 = bj_decay_check(bracket_power(1.0), window, lat3, gauss_legendre(8),
                            1.0, 1.0, 3.0)
        r16 = bj_decay_check(bracket_power(1.0), window, lat3, gauss_legendre(16),
                             1.0, 1.0, 3.0)
        assert r8.bj_norm == pytest.approx(r16.bj_norm, rel=1e-6)


class TestMembershipDiscrimination:
    def test_chirp_vs_members(self, grid, window):
        # the operational discriminator: chirp fits ~flat, members steep
        lat = Lattice(0.5, 0.5, 6)
        member = gabor_matrix_direct(trig(1.0, 1.0), window, lat, 0.5)
        non = gabor_matrix_direct(chirp(1.0), window, lat, 0.5)
        fit_member = decay_order_fit(envelope(member, 0.0), k_max=3)
        fit_non = decay_order_fit(envelope(non, 0.0), k_max=3)
        assert fit_member > 6.0
        assert fit_non <= 2.0
