"""Objective functions with analytic gradients, stochastic-gradient oracles,
regularity constants and dataset ingestion.

Every objective evaluates ``value`` and ``gradient`` on a single point of
shape ``(d,)`` or on a batch of shape ``(k, d)``.  ``stochastic_gradient``
takes an explicit ``numpy.random.Generator`` so chains never share state.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class DegenerateStateError(ArithmeticError):
    """The iterate left the domain where the objective is defined."""


class DatasetError(ValueError):
    """Malformed input data."""


@dataclass(frozen=True)
class RegularityConstants:
    """Constants of the standing assumptions.

    ``M`` smoothness, ``(m, b)`` dissipativity, ``A``/``B`` bounds on the
    value and gradient at the origin, ``delta`` the gradient-noise level.
    The initialization radius is derived as ``R = sqrt(b / m)``.
    """

    M: float
    m: float
    b: float
    A: float
    B: float
    delta: float = 0.0

    def __post_init__(self):
        for name in ("M", "m", "b", "A", "B", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.M <= 0 or self.m <= 0:
            raise ValueError("M and m must be positive")
        if self.b < 0 or self.A < 0 or self.B < 0:
            raise ValueError("b, A, B must be nonnegative")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def R(self) -> float:
        return math.sqrt(self.b / self.m)


class Objective:
    """Base class for differentiable objectives ``F(x)``.

    Subclasses implement ``value`` and ``gradient``.  The default stochastic
    gradient is the exact gradient and consumes no randomness.
    """

    name = "objective"

    def __init__(self, d: int, constants: RegularityConstants | None = None):
        self.d = d
        self._constants = constants

    def dim(self) -> int:
        return self.d

    def constants(self) -> RegularityConstants | None:
        """Registered constants, or ``None`` when they are unverified."""
        return self._constants

    @property
    def is_stochastic(self) -> bool:
        return False

    def value(self, x: np.ndarray):
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def stochastic_gradient(self, x: np.ndarray, rng: np.random.Generator,
                            batch_size: int = 1) -> np.ndarray:
        return self.gradient(x)


class DoubleWell(Objective):
    """Two-dimensional non-convex test function.

    ``1/4 - |x|^2 / 2 + <alpha, x>`` inside the disc ``|x| <= 1/2`` and
    ``(|x| - 1)^2 / 2 + <alpha, x>`` outside it.  The branches agree in value
    and gradient on the circle ``|x| = 1/2``.
    """

    name = "double_well"

    def __init__(self, alpha=(0.2, 0.2), constants: RegularityConstants | None = None):
        alpha = np.asarray(alpha, dtype=float)
        if alpha.shape != (2,) or not np.all(np.isfinite(alpha)):
            raise ValueError(f"alpha must be two finite numbers, got {alpha}")
        super().__init__(2, constants)
        self.alpha = alpha

    @staticmethod
    def _radius(x):
        return np.sqrt(np.sum(x * x, axis=-1))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r = self._radius(x)
        inner = 0.25 - 0.5 * r * r
        outer = 0.5 * (r - 1.0) ** 2
        return np.where(r <= 0.5, inner, outer) + x @ self.alpha

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r = self._radius(x)
        inside = r < 0.5
        # outer branch coefficient (r - 1)/r; equals -1 at r = 1/2
        safe_r = np.where(inside, 1.0, r)
        coef = np.where(inside, -1.0, (safe_r - 1.0) / safe_r)
        return np.expand_dims(coef, -1) * x + self.alpha


# Constants for the default alpha = (0.2, 0.2), fitted by
# tests/oracles/fit_double_well.py on a dense grid over |x| <= 20 with m fixed
# at 1/2, then rounded up.  The grid suprema are b >= 1.3367 (the
# f >= m|x|^2/3 - (b/2) log 3 bound binds; dissipativity alone needs 0.8228),
# A >= 0.25, B >= |alpha| = 0.28284.
DOUBLE_WELL_CONSTANTS = RegularityConstants(M=1.0, m=0.5, b=1.4, A=0.25, B=0.2829, delta=0.0)


def double_well(alpha=(0.2, 0.2)) -> DoubleWell:
    """The double-well objective; constants are registered for the default alpha only."""
    alpha = np.asarray(alpha, dtype=float)
    constants = DOUBLE_WELL_CONSTANTS if np.array_equal(alpha, [0.2, 0.2]) else None
    return DoubleWell(alpha, constants)


class IsotropicQuadratic(Objective):
    """``F(x) = |x|^2 / 2``; its Gibbs measure at inverse temperature beta is N(0, I/beta)."""

    name = "quadratic"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError(f"dimension must be positive, got {d}")
        super().__init__(d, RegularityConstants(M=1.0, m=1.0, b=0.0, A=0.0, B=0.0))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.sum(x * x, axis=-1)

    def gradient(self, x):
        return np.array(x, dtype=float)


def isotropic_quadratic(d: int) -> IsotropicQuadratic:
    return IsotropicQuadratic(d)


class NoisyGradient(Objective):
    """Wrap an objective, adding ``N(0, sigma^2 I)`` noise to its gradient.

    Used to exercise a nonzero gradient-noise level on deterministic
    objectives.  The value and exact gradient are those of the wrapped
    objective.
    """

    def __init__(self, base: Objective, sigma: float):
        if sigma < 0:
            raise ValueError(f"noise level must be nonnegative, got {sigma}")
        super().__init__(base.d, None)
        self.base = base
        self.sigma = float(sigma)
        self.name = base.name

    @property
    def is_stochastic(self) -> bool:
        return self.sigma > 0

    def value(self, x):
        return self.base.value(x)

    def gradient(self, x):
        return self.base.gradient(x)

    def stochastic_gradient(self, x, rng, batch_size=1):
        g = self.base.gradient(x)
        return g + self.sigma * rng.standard_normal(np.shape(g))


@dataclass(frozen=True)
class Dataset:
    """Rectangular table of samples ``z_i`` (rows)."""

    samples: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise DatasetError(f"dataset must be a non-empty 2-D table, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise DatasetError("dataset has non-finite entries")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(s.shape[1]))
        if len(names) != s.shape[1]:
            raise DatasetError(f"{len(names)} feature names for {s.shape[1]} columns")
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def p(self) -> int:
        return self.samples.shape[1]


def load_csv(path, has_header: bool = False) -> Dataset:
    """Read a comma-separated numeric table.

    Raises
    ------
    DatasetError
        On an empty file, ragged rows or unparsable fields; the message
        carries the 1-based line number (and column index for bad fields).
    """
    rows = []
    names: tuple = ()
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if has_header and not names and not rows:
                names = tuple(c.strip() for c in row)
                width = len(names)
                continue
            if width is None:
                width = len(row)
            if len(row) != width:
                raise DatasetError(
                    f"line {lineno}: expected {width} fields, found {len(row)}")
            values = []
            for col, cell in enumerate(row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DatasetError(
                        f"line {lineno}, column {col}: non-numeric field {cell.strip()!r}"
                    ) from None
            rows.append(values)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(np.array(rows), names)


def _log_sigmoid_prime(s):
    # log g'(s) for the logistic g, stable for large |s|
    a = np.abs(s)
    return -a - 2.0 * np.log1p(np.exp(-a))


class ICAObjective(Objective):
    """Negative mean log-likelihood of maximum-likelihood ICA with logistic sources.

    The state is the unmixing matrix ``W`` (``p x p``) flattened row-major;
    sources are ``s = W x``.  Per-sample loss::

        f(W, x) = -sum_j log g'(w_j . x) - log|det W|

    where ``g`` is the logistic sigmoid and ``w_j`` the j-th row of ``W``.
    Stochastic gradients average a minibatch drawn uniformly with
    replacement.
    """

    name = "ica"

    def __init__(self, data: Dataset):
        if data.p < 2:
            raise DatasetError(f"ICA needs at least 2 channels, got {data.p}")
        self.data = data
        self.p = data.p
        super().__init__(data.p * data.p, None)

    def _matrix(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"expected a flat state of length {self.d}, got shape {x.shape}")
        return x.reshape(self.p, self.p)

    def _logdet(self, W):
        sign, logdet = np.linalg.slogdet(W)
        scale = np.linalg.norm(W, 2)
        if sign == 0 or not np.isfinite(logdet) or logdet < math.log(1e-12) + self.p * math.log(scale):
            raise DegenerateStateError("unmixing matrix is numerically singular")
        return logdet

    def per_sample_loss(self, x, rows) -> np.ndarray:
        W = self._matrix(x)
        logdet = self._logdet(W)
        s = rows @ W.T
        return -np.sum(_log_sigmoid_prime(s), axis=1) - logdet

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self.value(xi) for xi in x])
        return float(np.mean(self.per_sample_loss(x, self.data.samples)))

    def log_likelihood(self, x) -> float:
        """Mean log-likelihood per sample (the negated objective)."""
        return -self.value(x)

    def _grad_rows(self, W, rows):
        self._logdet(W)
        s = rows @ W.T
        # d/ds log g'(s) = 1 - 2 g(s) = -tanh(s/2)
        score = -np.tanh(0.5 * s)
        g = -(score.T @ rows) / rows.shape[0] - np.linalg.inv(W).T
        return g.reshape(-1)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self.gradient(xi) for xi in x])
        return self._grad_rows(self._matrix(x), self.data.samples)

    @property
    def is_stochastic(self) -> bool:
        return True

    def stochastic_gradient(self, x, rng, batch_size=1):
        idx = rng.integers(0, self.data.n, size=batch_size)
        return self._grad_rows(self._matrix(x), self.data.samples[idx])


def ica_objective(data: Dataset) -> ICAObjective:
    return ICAObjective(data)


def _logistic_mixing_matrix(p: int, rng: np.random.Generator) -> np.ndarray:
    q1, _ = np.linalg.qr(rng.standard_normal((p, p)))
    q2, _ = np.linalg.qr(rng.standard_normal((p, p)))
    sv = rng.uniform(1.0, 3.0, size=p)
    return q1 @ np.diag(sv) @ q2


def synthetic_ica_dataset(n: int, p: int, seed: int) -> tuple[Dataset, np.ndarray]:
    """Mixed logistic sources ``X = S A^T``.

    Returns the dataset and the mixing matrix ``A`` (singular values drawn
    in ``[1, 3]``, so its condition number is at most 3).
    """
    if p < 2 or n < p:
        raise ValueError(f"need n >= p >= 2, got n={n}, p={p}")
    rng = np.random.default_rng(seed)
    A = _logistic_mixing_matrix(p, rng)
    S = rng.logistic(0.0, 1.0, size=(n, p))
    return Dataset(S @ A.T), A


def sources_from_state(obj: ICAObjective, x) -> np.ndarray:
    """Recovered sources ``X W^T`` for the state `x`."""
    return obj.data.samples @ obj._matrix(x).T


def recovery_score(recovered: np.ndarray, truth: np.ndarray) -> float:
    """Smallest matched absolute correlation between recovered and true sources.

    Matching maximizes the total absolute correlation over permutations, so
    the score is invariant to source order and sign.
    """
    from scipy.optimize import linear_sum_assignment

    p = truth.shape[1]
    c = np.abs(np.corrcoef(recovered.T, truth.T)[:p, p:])
    rows, cols = linear_sum_assignment(-c)
    return float(c[rows, cols].min())


@dataclass
class RegularityReport:
    violations: list = field(default_factory=list)
    trials: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _uniform_ball(rng, n, d, radius):
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=(n, 1)) ** (1.0 / d)
    return g * r


def verify_regularity(obj: Objective, trials: int, radius: float, seed: int = 0,
                      constants: RegularityConstants | None = None, rtol: float = 1e-9) -> RegularityReport:
    """Check the registered constants on points sampled uniformly in a ball.

    Checked inequalities::

        quadratic lower bound   m|x|^2/3 - (b/2) log 3 <= f(x)
        quadratic upper bound   f(x) <= M|x|^2/2 + B|x| + A
        gradient growth         |grad f(x)| <= M|x| + B
        dissipativity           <x, grad f(x)> >= m|x|^2 - b
        smoothness              |grad f(x) - grad f(y)| <= M|x - y|

    The smoothness check pairs consecutive samples.  Each violation is
    reported as ``(inequality, witness point, lhs, rhs)``; an empty report
    means every check passed.
    """
    c = constants if constants is not None else obj.constants()
    if c is None:
        raise ValueError(f"objective {obj.name!r} has no registered constants")
    rng = np.random.default_rng(seed)
    X = _uniform_ball(rng, trials, obj.d, radius)
    f = np.asarray(obj.value(X), dtype=float)
    G = np.asarray(obj.gradient(X), dtype=float)
    r = np.linalg.norm(X, axis=1)
    gnorm = np.linalg.norm(G, axis=1)
    dG = np.linalg.norm(G[1:] - G[:-1], axis=1)
    dX = np.linalg.norm(X[1:] - X[:-1], axis=1)

    checks = [
        ("quadratic_lower_bound", c.m * r**2 / 3 - 0.5 * c.b * math.log(3), f, X),
        ("quadratic_upper_bound", f, 0.5 * c.M * r**2 + c.B * r + c.A, X),
        ("gradient_growth", gnorm, c.M * r + c.B, X),
        ("dissipativity", c.m * r**2 - c.b, np.sum(X * G, axis=1), X),
        ("smoothness", dG, c.M * dX, X[1:]),
    ]
    report = RegularityReport(trials=trials)
    for label, lhs, rhs, witness in checks:
        slack = rtol * (1.0 + np.abs(lhs) + np.abs(rhs))
        bad = np.flatnonzero(lhs > rhs + slack)
        for i in bad:
            report.violations.append((label, witness[i].copy(), float(lhs[i]), float(rhs[i])))
    return report
