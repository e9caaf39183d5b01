import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsgld_lab.linalg import AntisymmetricMatrix, block_diagonal_J, random_gaussian_J
from nsgld_lab.objectives import double_well, isotropic_quadratic
from nsgld_lab.spectral import (EYRING_KRAMERS, GRID_GENERATOR, GapEstimate, Grid, SaddleData,
                                SaddleStructureError, SpectralIdentificationError, complexity_ratio,
                                eyring_kramers_rate, generator_matrix, grid_generator_gap, mu_star,
                                mu_star_J, mu_star_J_closed_form, outperform_threshold, verdict)

LAM1 = np.linspace(1.05, 12.0, 50)
A1 = np.linspace(0.02, 3.0, 50)


def random_saddle(rng, d):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    w = rng.uniform(0.2, 5.0, d)
    w[0] = -rng.uniform(0.2, 5.0)
    return q @ np.diag(w) @ q.T


class TestMuStar:
    def test_examples(self):
        assert mu_star(np.diag([-1.0, 2.0])) == 1.0
        assert mu_star(np.diag([-3.0, 1.0, 5.0])) == 3.0

    @pytest.mark.parametrize("h", [np.eye(2), np.diag([-1.0, -2.0, 3.0]), np.diag([0.0, 1.0])])
    def test_structure_errors(self, h):
        with pytest.raises(SaddleStructureError):
            mu_star(h)

    def test_J_zero_reduces(self):
        rng = np.random.default_rng(0)
        for d in (2, 5, 20):
            H = random_saddle(rng, d)
            assert mu_star_J(H, AntisymmetricMatrix.zeros(d)) == pytest.approx(mu_star(H), rel=1e-12)

    def test_closed_form_example(self):
        val = mu_star_J(np.diag([-1.0, 2.0]), block_diagonal_J([1.0], 2))
        assert abs(val - (math.sqrt(17) - 1) / 2) <= 1e-10

    def test_increasing_in_a(self):
        vals = [mu_star_J(np.diag([-1.0, 2.0]), block_diagonal_J([a], 2)) for a in (0, 0.5, 1, 2)]
        assert np.all(np.diff(vals) > 0)

    def test_closed_form_agrees_on_grid(self):
        for lam in LAM1[::7]:
            for a in A1[::7]:
                num = mu_star_J(np.diag([-1.0, lam]), block_diagonal_J([a], 2))
                np.testing.assert_allclose(num, mu_star_J_closed_form(lam, a), rtol=1e-10)

    def test_not_slower_than_reversible_on_grid(self):
        for lam in LAM1:
            for a in A1:
                assert mu_star_J_closed_form(lam, a) >= 1.0

    def test_two_negative_directions_rejected(self):
        # I + J has identity symmetric part, so (I + J) H inherits the inertia of H
        H = np.diag([-1.0, -2.0, 3.0])
        J = random_gaussian_J(3, 2.0, 0)
        assert np.sum(np.linalg.eigvals((np.eye(3) + J.full) @ H).real < 0) == 2
        with pytest.raises(SaddleStructureError):
            mu_star_J(H, J)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 10_000), st.floats(0.0, 5.0))
    def test_negative_eigenvalue_is_real(self, d, seed, tau):
        H = random_saddle(np.random.default_rng(seed), d)
        val = mu_star_J(H, random_gaussian_J(d, tau, seed))
        assert val > 0


class TestEyringKramers:
    saddle = SaddleData(np.diag([-1.0, 2.0]), np.eye(2), 1.0)

    def test_hand_value(self):
        g = eyring_kramers_rate(self.saddle, 5.0)
        assert g.method == EYRING_KRAMERS
        np.testing.assert_allclose(-g.lam, math.sqrt(0.5) * math.exp(-5) / (2 * math.pi), rtol=1e-12)
        assert -g.lam == pytest.approx(7.585e-4, rel=1e-3)

    def test_rate_ratio_is_mu_ratio(self):
        J = block_diagonal_J([1.0], 2)
        r = eyring_kramers_rate(self.saddle, 3.0, J).lam / eyring_kramers_rate(self.saddle, 3.0).lam
        np.testing.assert_allclose(r, mu_star_J(self.saddle.hessian_at_saddle, J), rtol=1e-12)

    def test_log_rate_slope_is_barrier(self):
        betas = np.array([1.0, 2.0, 5.0, 9.0])
        logs = [math.log(-eyring_kramers_rate(self.saddle, b).lam) for b in betas]
        np.testing.assert_allclose(np.diff(logs) / np.diff(betas), -1.0, rtol=1e-12)

    def test_saddle_validation(self):
        with pytest.raises(SaddleStructureError):
            SaddleData(np.diag([-1.0, 2.0]), np.diag([1.0, -1.0]), 1.0)
        with pytest.raises(ValueError):
            SaddleData(np.diag([-1.0, 2.0]), np.eye(2), 0.0)
        with pytest.raises(SaddleStructureError):
            SaddleData(np.eye(2), np.eye(2), 1.0)

    def test_gap_estimate_sign(self):
        with pytest.raises(ValueError):
            GapEstimate(0.1, GRID_GENERATOR, 1.0)


class TestComplexityRatio:
    def test_zero_J(self):
        assert complexity_ratio(np.diag([-1.0, 3.0]), AntisymmetricMatrix.zeros(2)) == 1.0

    def test_favorable_example(self):
        r = complexity_ratio(np.diag([-1.0, 5.0]), block_diagonal_J([0.3], 2))
        assert r < 1 and verdict(r) == "NSGLD favorable"
        assert outperform_threshold(0.3) == pytest.approx(4.11, abs=0.01)

    @pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 3.0])
    def test_unfavorable_below_four(self, a):
        assert complexity_ratio(np.diag([-1.0, 2.0]), block_diagonal_J([a], 2)) > 1

    def test_threshold_values(self):
        assert outperform_threshold(0.0) == 4.0
        assert outperform_threshold(1.0) == pytest.approx((1 + 2 ** 0.4) * (1 + 2 ** 0.2), rel=1e-14)
        assert outperform_threshold(1.0) == pytest.approx(4.984, abs=1e-3)

    @pytest.mark.parametrize("a", [0.2, 0.7, 1.5, 2.5])
    def test_bracketing(self, a):
        t = outperform_threshold(a)
        J = block_diagonal_J([a], 2)
        assert complexity_ratio(np.diag([-1.0, 1.01 * t]), J) < 1
        assert complexity_ratio(np.diag([-1.0, 0.99 * t]), J) > 1

    def test_verdict_agrees_with_threshold_on_grid(self):
        disagreements = 0
        for lam in LAM1:
            for a in A1:
                r = complexity_ratio(np.diag([-1.0, lam]), block_diagonal_J([a], 2))
                disagreements += (r < 1) != (lam > outperform_threshold(a))
        assert disagreements == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_orthogonal_invariance(self, d, seed):
        rng = np.random.default_rng(seed)
        H = random_saddle(rng, d)
        J = random_gaussian_J(d, 0.5, seed)
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        try:
            r = complexity_ratio(H, J)
        except SaddleStructureError:
            return
        np.testing.assert_allclose(complexity_ratio(q @ H @ q.T, J.conjugate(q)), r, rtol=1e-9)

    def test_verdict_labels(self):
        assert verdict(1.0) == "tie"
        assert verdict(1.2) == "SGLD favorable"


class TestGridGenerator:
    def test_grid_limits(self):
        with pytest.raises(ValueError):
            Grid(-1, 1, 51)
        with pytest.raises(ValueError):
            Grid(1, -1, 10)

    def test_rows_annihilate_constants(self):
        L = generator_matrix(double_well(), block_diagonal_J([1.0], 2), 2.0, Grid(-3, 3, 12))
        np.testing.assert_allclose(L @ np.ones(L.shape[0]), 0.0, atol=1e-12)

    def test_ou_1d(self):
        g = grid_generator_gap(isotropic_quadratic(1), None, 1.0, Grid(-6, 6, 40))
        assert g.method == GRID_GENERATOR
        assert g.lam == pytest.approx(-1.0, rel=0.1)

    def test_1d_forces_zero_J(self):
        a = grid_generator_gap(isotropic_quadratic(1), None, 1.0, Grid(-6, 6, 30))
        b = grid_generator_gap(isotropic_quadratic(1), AntisymmetricMatrix.zeros(1), 1.0, Grid(-6, 6, 30))
        assert a.lam == b.lam

    def test_spectrum_signs(self):
        from nsgld_lab.linalg import eigenvalues

        L = generator_matrix(isotropic_quadratic(2), None, 1.0, Grid(-6, 6, 20))
        w = eigenvalues(L)
        near_zero = np.abs(w) < 1e-8 * np.abs(np.diag(L)).max()
        assert near_zero.sum() == 1
        assert np.all(w[~near_zero].real < 0)

    def test_nonreversible_not_slower_small_grid(self):
        obj = isotropic_quadratic(2)
        grid = Grid(-6, 6, 24)
        g0 = grid_generator_gap(obj, None, 1.0, grid)
        gJ = grid_generator_gap(obj, block_diagonal_J([1.0], 2), 1.0, grid)
        assert abs(gJ.lam) >= abs(g0.lam) - 0.02

    def test_identification_failure(self, monkeypatch):
        import nsgld_lab.spectral as spectral_mod

        real = spectral_mod.eigen_decomposition

        def shifted(m):
            w, v = real(m)
            return w - 1.0, v

        monkeypatch.setattr(spectral_mod, "eigen_decomposition", shifted)
        with pytest.raises(SpectralIdentificationError, match="larger box"):
            grid_generator_gap(isotropic_quadratic(1), None, 1.0, Grid(-6, 6, 10))

    def test_dimension_limit(self):
        with pytest.raises(ValueError):
            generator_matrix(isotropic_quadratic(3), None, 1.0, Grid(-1, 1, 5))
