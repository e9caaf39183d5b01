"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
printed under ``pytest -v`` because output capture is lifted for them.
"""

import math

import numpy as np
import pytest

from nsgld_lab.bounds import (ProblemConstants, compute_I2, compute_I3, compute_moment_constants,
                              step_size_cap)
from nsgld_lab.dynamics import ChainConfig, ChainState, collect_samples, nsgld_step, sgld_step
from nsgld_lab.harness import ICA_DEFAULTS, ExperimentConfig, execute
from nsgld_lab.linalg import AntisymmetricMatrix, DriftMatrix, block_diagonal_J
from nsgld_lab.objectives import (NoisyGradient, double_well, isotropic_quadratic,
                                  verify_regularity)
from nsgld_lab.spectral import (Grid, complexity_ratio, grid_generator_gap, mu_star_J,
                                outperform_threshold)
from tests.test_bounds import oracle_agreement
from tests.test_objectives import _ball, _fd_gradient, _ica_points, shipped_objectives

GLOBAL_MIN = -0.3228
LOCAL_MIN = 0.29


@pytest.fixture
def report(capsys):
    def emit(n, passed, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if passed else 'FAIL'}  {detail}")
        assert passed, detail
    return emit


def double_well_run(tau=None, method="nsgld"):
    text = ("objective.name = double_well\nsolver.eta = 1.0\nsolver.beta = 200\n"
            "ensemble.n_chains = 50\nensemble.max_iters = 500\nensemble.checkpoint_every = 10\n"
            f"ensemble.seed = 0\nensemble.x0 = 1,1\nsolver.method = {method}\n")
    if tau is not None:
        text += f"solver.tau = {tau}\n"
    return execute(ExperimentConfig.from_text(text))


class TestAcceptance:
    def test_1_double_well_anchors(self, report):
        f = double_well()
        xmin = -(math.sqrt(2) / 2 + 0.2) * np.ones(2)
        vals = [float(f.value(np.array([1.0, 1.0]))), float(f.value(np.array([0.2, 0.2]))),
                float(f.value(xmin))]
        errs = np.abs(np.array(vals) - [0.4858, 0.29, GLOBAL_MIN])
        report(1, bool(np.all(errs <= 5e-4)),
               f"f(1,1)={vals[0]:.5f} f(0.2,0.2)={vals[1]:.5f} f(argmin)={vals[2]:.5f} max err {errs.max():.1e}")

    def test_2_global_minimum_attraction(self, report):
        sgld = double_well_run(method="sgld").record.rows[-1].mean_F
        taus = (0.25, 0.5, 1.0)
        ns = [double_well_run(tau=t).record.rows[-1].mean_F for t in taus]
        ok_sgld = abs(sgld - GLOBAL_MIN) <= 0.08 and sgld < LOCAL_MIN
        ok_ns = any(v <= sgld + 0.02 for v in ns)
        detail = f"SGLD final {sgld:.4f}; NSGLD " + ", ".join(f"tau={t}: {v:.4f}" for t, v in zip(taus, ns))
        report(2, ok_sgld and ok_ns, detail)

    def test_3_zero_J_reduction(self, report):
        cases = {"double_well": (np.array([1.0, 1.0]), dict(eta=1.0, beta=200.0)),
                 "quadratic": (np.ones(3), dict(eta=0.05, beta=5.0)),
                 "noisy_double_well": (np.array([1.0, 1.0]), dict(eta=0.5, beta=50.0)),
                 "ica": (np.eye(2).ravel(), dict(eta=0.01, beta=1000.0, batch_size=8))}
        same = []
        for name, obj in shipped_objectives().items():
            x0, kw = cases[name]
            cfg = ChainConfig(drift=DriftMatrix(AntisymmetricMatrix.zeros(obj.d)), **kw)
            a, b = ChainState.start(x0, seed=1), ChainState.start(x0, seed=1)
            for _ in range(10_000):
                a = nsgld_step(a, obj, cfg)
                b = sgld_step(b, obj, cfg)
            same.append(np.array_equal(a.x, b.x) and a.diverged == b.diverged)
        report(3, all(same), f"bitwise equal after 1e4 steps on {sum(same)}/{len(same)} objectives")

    def test_4_stationary_invariance(self, report):
        eta, beta = 0.01, 200.0
        target = (2 * eta / beta) / (1 - (1 - eta) ** 2)
        var = []
        for J in (AntisymmetricMatrix.zeros(2), block_diagonal_J([1.0], 2)):
            cfg = ChainConfig(eta=eta, beta=beta, drift=DriftMatrix(J), max_iters=6000, seed=0)
            s = collect_samples(isotropic_quadratic(2), cfg, 200, burn_in=1000, x0=np.zeros(2), threads=4)
            var.append(s[:, 1:].reshape(-1, 2).var(axis=0))
        dev = [np.abs(v / target - 1).max() for v in var]
        between = np.abs(var[1] / var[0] - 1).max()
        report(4, dev[0] <= 0.05 and dev[1] <= 0.05 and between <= 0.03,
               f"target {target:.4e}; rel dev J=0 {dev[0]:.3%}, J(a=1) {dev[1]:.3%}, between {between:.3%}")

    def test_5_spectral_gap(self, report):
        obj = isotropic_quadratic(2)
        grid = Grid(-6.0, 6.0, 40)
        g0 = grid_generator_gap(obj, None, 1.0, grid).lam
        gJ = grid_generator_gap(obj, block_diagonal_J([1.0], 2), 1.0, grid).lam
        ou = grid_generator_gap(isotropic_quadratic(1), None, 1.0, Grid(-6.0, 6.0, 40)).lam
        ok = abs(gJ) >= abs(g0) - 0.02 and abs(ou + 1) <= 0.1
        report(5, ok, f"lambda J=0 {g0:.5f}, J(a=1) {gJ:.5f}, 1D OU {ou:.5f}")

    def test_6_eyring_kramers(self, report):
        mu = mu_star_J(np.diag([-1.0, 2.0]), block_diagonal_J([1.0], 2))
        exact = (math.sqrt(17) - 1) / 2
        t0 = outperform_threshold(0.0)
        bad = 0
        # a1 = 0 is an exact tie for every lambda1, so the grid starts just above it
        for lam in np.linspace(0.5, 20.0, 50):
            for a in np.linspace(0.0, 3.0, 51)[1:]:
                r = complexity_ratio(np.diag([-1.0, lam]), block_diagonal_J([a], 2))
                bad += (r < 1) != (lam > outperform_threshold(a))
        ok = abs(mu - exact) <= 1e-10 and t0 == 4.0 and bad == 0
        report(6, ok, f"mu*_J err {abs(mu - exact):.1e}; threshold(0) = {t0!r}; grid disagreements {bad}")

    def test_7_constants_oracle(self, report):
        worst = oracle_agreement(n_tuples=20, rtol=1e-12)

        def pc(**kw):
            base = dict(M=1.0, m=1.0, b=1.0, A=1.0, B=1.0, beta=4.0, d=2, lambda_J=-0.5, lambda_J0=-0.4)
            base.update(kw)
            return ProblemConstants(**base)

        c_d = [compute_moment_constants(pc(delta=dl))[1] for dl in np.linspace(0, 0.9, 10)]
        i3 = [compute_I3(pc(), n) * n for n in (1, 10, 100, 1000)]
        eta = [step_size_cap(pc(norm_AJ=a), 0.01) for a in np.linspace(1, 5, 9)]
        i2 = [compute_I2(pc(beta=bt)) for bt in np.geomspace(100, 1e4, 25)]
        mono = (np.all(np.diff(c_d) >= 0) and np.allclose(i3, i3[0], rtol=1e-14)
                and np.all(np.diff(eta) <= 0) and np.all(np.diff(i2) <= 0))
        report(7, worst <= 1e-12 and mono, f"worst oracle rel diff {worst:.1e}; monotonicities hold: {mono}")

    def test_8_ica_recovery(self, report):
        rec, close, diverged = [], 0, 0
        for s in range(20):
            runs = {}
            for method, extra in (("sgld", {}), ("nsgld", {"solver.tau": "1.0"})):
                raw = {"objective.name": "ica", "objective.synthetic_seed": str(s),
                       "ensemble.seed": str(s), "ensemble.n_chains": "1", "solver.method": method, **extra}
                runs[method] = execute(ExperimentConfig.from_mapping(raw, ICA_DEFAULTS))
            rec.append(runs["sgld"].recovery[0])
            ll_s = -runs["sgld"].record.rows[-1].mean_F
            ll_n = -runs["nsgld"].record.rows[-1].mean_F
            diverged += runs["nsgld"].status != "ok" or runs["nsgld"].diverged_fraction > 0
            close += ll_n >= ll_s - 0.01 * abs(ll_s)
        good = int(np.sum(np.array(rec) > 0.95))
        report(8, good >= 18 and diverged == 0 and close >= 10,
               f"SGLD recovery > 0.95 in {good}/20 (min {min(rec):.4f}); "
               f"NSGLD diverged runs {diverged}; within 1% of SGLD likelihood in {close}/20")

    def test_9_gradients_and_regularity(self, report):
        rng = np.random.default_rng(42)
        worst = 0.0
        for name, obj in shipped_objectives().items():
            pts = _ica_points(obj, rng, 100) if name == "ica" else _ball(rng, 100, obj.d, 10.0)
            for x in pts:
                g = obj.gradient(x)
                fd = _fd_gradient(lambda y: float(obj.value(y)), x)
                worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
        noisy = NoisyGradient(double_well(), 0.5)
        checks = [verify_regularity(double_well(), 100_000, 20.0).ok,
                  verify_regularity(isotropic_quadratic(3), 10_000, 50.0).ok,
                  verify_regularity(noisy, 10_000, 20.0, constants=noisy.base.constants()).ok]
        report(9, worst <= 1e-5 and all(checks),
               f"worst FD rel err {worst:.1e}; regularity checks passed {sum(checks)}/{len(checks)}")
