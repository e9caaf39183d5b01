"""Spectral-gap comparison of reversible and non-reversible Langevin dynamics.

Two routes are provided:

* leading-order Eyring-Kramers rates from saddle/minimum Hessians, with the
  non-reversible negative eigenvalue ``mu*_J`` of ``(I + J) Hess F(saddle)``,
  and the gradient-complexity ratio built on them;
* a finite-difference discretization of the generator
  ``L f = -(I + J) grad F . grad f + beta^{-1} Laplacian f`` on a 1-D or 2-D
  box with reflecting boundaries, whose spectrum is solved densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import AntisymmetricMatrix, eigen_decomposition, eigenvalues, operator_norm
from .objectives import Objective

EYRING_KRAMERS = "eyring_kramers_asymptotic"
GRID_GENERATOR = "grid_generator"


class SaddleStructureError(ValueError):
    """Hessian data do not have the single-negative-direction structure required."""


class SpectralIdentificationError(RuntimeError):
    """The zero eigenvalue of a discretized generator could not be identified."""


def _symmetric(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.allclose(h, h.T, rtol=0, atol=1e-12 * max(1.0, np.abs(h).max())):
        raise ValueError("Hessian must be symmetric")
    return 0.5 * (h + h.T)


@dataclass(frozen=True)
class SaddleData:
    """Hessians at the saddle and at the shallower minimum, and the energy barrier."""

    hessian_at_saddle: np.ndarray
    hessian_at_min: np.ndarray
    barrier: float

    def __post_init__(self):
        hs = _symmetric(self.hessian_at_saddle)
        hm = _symmetric(self.hessian_at_min)
        if hs.shape != hm.shape:
            raise ValueError("saddle and minimum Hessians differ in shape")
        if np.linalg.eigvalsh(hm).min() <= 0:
            raise SaddleStructureError("Hessian at the minimum is not positive definite")
        if not self.barrier > 0:
            raise ValueError(f"barrier must be positive, got {self.barrier}")
        mu_star(hs)
        object.__setattr__(self, "hessian_at_saddle", hs)
        object.__setattr__(self, "hessian_at_min", hm)


@dataclass(frozen=True)
class GapEstimate:
    lam: float
    method: str
    beta: float

    def __post_init__(self):
        if not self.lam < 0:
            raise ValueError(f"spectral gap must be negative, got {self.lam}")


def mu_star(hessian_at_saddle) -> float:
    """Magnitude of the unique negative eigenvalue of a saddle Hessian."""
    h = _symmetric(hessian_at_saddle)
    w = np.linalg.eigvalsh(h)
    neg = w[w < -1e-10 * operator_norm(h)]
    if neg.size != 1:
        raise SaddleStructureError(
            f"saddle Hessian must have exactly one negative eigenvalue, found {neg.size}")
    return float(-neg[0])


def mu_star_J(hessian_at_saddle, J: AntisymmetricMatrix | None) -> float:
    """Magnitude of the unique negative eigenvalue of ``(I + J) H``.

    The eigenvalue must be real (imaginary part at most ``1e-8 ||(I+J)H||``);
    a complex pair with negative real part is rejected.  Since the symmetric
    part of ``I + J`` is the identity, ``(I + J) H`` has as many eigenvalues
    with negative real part as ``H`` has negative eigenvalues, so for a true
    saddle both checks only guard against rounding.
    """
    h = _symmetric(hessian_at_saddle)
    if J is None or J.is_zero:
        return mu_star(h)
    if J.d != h.shape[0]:
        raise ValueError(f"J has dimension {J.d}, Hessian {h.shape[0]}")
    m = (np.eye(J.d) + J.full) @ h
    scale = operator_norm(m)
    w = eigenvalues(m)
    neg = w[w.real < -1e-10 * scale]
    if neg.size != 1:
        raise SaddleStructureError(
            f"(I+J) H must have exactly one eigenvalue with negative real part, found {neg.size}")
    if abs(neg[0].imag) > 1e-8 * scale:
        raise SaddleStructureError(
            f"negative eigenvalue of (I+J) H is not real: {neg[0]}")
    return float(-neg[0].real)


def mu_star_J_closed_form(lambda1: float, a: float) -> float:
    """``mu*_J`` for ``H = diag(-1, lambda1)`` and a single block ``a``."""
    return 0.5 * (math.sqrt((lambda1 - 1.0) ** 2 + 4.0 * lambda1 * (1.0 + a * a)) - (lambda1 - 1.0))


def eyring_kramers_rate(saddle: SaddleData, beta: float,
                        J: AntisymmetricMatrix | None = None) -> GapEstimate:
    """Leading-order spectral gap; correction factors ``1 + O(beta^{-1/2})`` are dropped."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    mu = mu_star_J(saddle.hessian_at_saddle, J)
    det_min = np.linalg.det(saddle.hessian_at_min)
    det_saddle = abs(np.linalg.det(saddle.hessian_at_saddle))
    rate = mu / (2 * math.pi) * math.sqrt(det_min / det_saddle) * math.exp(-beta * saddle.barrier)
    return GapEstimate(-rate, EYRING_KRAMERS, beta)


def complexity_ratio(saddle, J: AntisymmetricMatrix) -> float:
    """Gradient-complexity ratio ``(1 + ||J||^2)^4 (mu* / mu*_J)^5`` of NSGLD over SGLD.

    `saddle` is a ``SaddleData`` or just the saddle Hessian.  NSGLD needs
    fewer stochastic gradients when the ratio is below one.
    """
    h = saddle.hessian_at_saddle if isinstance(saddle, SaddleData) else _symmetric(saddle)
    if J.d != h.shape[0]:
        raise ValueError(f"J has dimension {J.d}, Hessian {h.shape[0]}")
    if J.is_zero:
        return 1.0
    nj = J.norm()
    return (1.0 + nj * nj) ** 4 * (mu_star(h) / mu_star_J(h, J)) ** 5


def verdict(ratio: float, tol: float = 1e-12) -> str:
    if abs(ratio - 1.0) <= tol:
        return "tie"
    return "NSGLD favorable" if ratio < 1.0 else "SGLD favorable"


def outperform_threshold(a1: float) -> float:
    """Smallest ``lambda1`` beyond which block ``a1`` lowers the complexity ratio below one.

    Applies to ``H = diag(-1, lambda1, ...)`` with ``a1`` the largest block
    coefficient in magnitude.
    """
    if a1 < 0:
        raise ValueError(f"a1 must be nonnegative, got {a1}")
    s = 1.0 + a1 * a1
    return (1.0 + s ** 0.4) * (1.0 + s ** 0.2)


@dataclass(frozen=True)
class Grid:
    """Box ``[lo, hi]^dim`` with `n` nodes per axis."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("grid needs hi > lo")
        if not 3 <= self.n <= 50:
            raise ValueError(f"grid needs 3 <= n <= 50 nodes per axis, got {self.n}")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)


def _axis_operators(n: int, h: float):
    """1-D central first and second difference matrices with mirrored ghost nodes."""
    d1 = np.zeros((n, n))
    d2 = np.zeros((n, n))
    for i in range(n):
        lo = i - 1 if i > 0 else 1
        hi = i + 1 if i < n - 1 else n - 2
        d2[i, lo] += 1.0 / h**2
        d2[i, hi] += 1.0 / h**2
        d2[i, i] -= 2.0 / h**2
        # the mirrored ghost node makes the boundary first difference vanish
        if 0 < i < n - 1:
            d1[i, hi] += 0.5 / h
            d1[i, lo] -= 0.5 / h
    return d1, d2


def generator_matrix(potential: Objective, J: AntisymmetricMatrix | None, beta: float,
                     grid: Grid) -> np.ndarray:
    """Finite-difference generator on the tensor grid (row-major node order)."""
    dim = potential.d
    if dim not in (1, 2):
        raise ValueError(f"grid estimator supports dimension 1 or 2, got {dim}")
    if J is None or dim == 1:
        J = AntisymmetricMatrix.zeros(dim)
    if J.d != dim:
        raise ValueError(f"J has dimension {J.d}, potential {dim}")
    x = grid.nodes
    n = grid.n
    d1, d2 = _axis_operators(n, grid.h)
    if dim == 1:
        pts = x[:, None]
    else:
        X, Y = np.meshgrid(x, x, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
    drift = -(potential.gradient(pts) @ (np.eye(dim) + J.full).T)
    if dim == 1:
        return drift[:, 0, None] * d1 + d2 / beta
    eye = np.eye(n)
    ops1 = [np.kron(d1, eye), np.kron(eye, d1)]
    lap = np.kron(d2, eye) + np.kron(eye, d2)
    return drift[:, 0, None] * ops1[0] + drift[:, 1, None] * ops1[1] + lap / beta


def grid_generator_gap(potential: Objective, J: AntisymmetricMatrix | None, beta: float,
                       grid: Grid) -> GapEstimate:
    """Largest nonzero real part in the spectrum of the discretized generator.

    The zero eigenvalue is identified by magnitude together with a
    near-constant eigenvector, not by position in the solver output.

    Raises
    ------
    SpectralIdentificationError
        If no (or more than one) eigenvalue qualifies as the zero eigenvalue.
    """
    L = generator_matrix(potential, J, beta, grid)
    w, v = eigen_decomposition(L)
    scale = np.abs(np.diag(L)).max()
    small = np.abs(w) < 1e-8 * scale
    flat = np.zeros(w.size, dtype=bool)
    for i in np.flatnonzero(small):
        vi = v[:, i] / v[np.argmax(np.abs(v[:, i])), i]
        flat[i] = np.max(np.abs(vi - 1.0)) < 1e-6
    zero = small & flat
    if zero.sum() != 1:
        raise SpectralIdentificationError(
            f"found {int(zero.sum())} candidate zero eigenvalues; try a larger box")
    rest = w[~zero]
    return GapEstimate(float(rest.real.max()), GRID_GENERATOR, beta)
