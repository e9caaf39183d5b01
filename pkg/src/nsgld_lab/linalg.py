"""Small dense linear algebra: antisymmetric matrices, drift matrices, norms
and a checked non-symmetric eigensolver.

Antisymmetric matrices are stored as their strict upper triangle (row-major
order, as produced by ``numpy.triu_indices(d, k=1)``); the full matrix is
materialized on demand, so ``J.T == -J`` holds bitwise for every instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EigenSolveError(RuntimeError):
    """Raised when an eigendecomposition fails or violates its residual bound."""


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class AntisymmetricMatrix:
    """A real ``d x d`` matrix with ``J.T == -J``.

    Parameters
    ----------
    d : int
        Dimension.
    upper : ndarray, shape (d * (d - 1) // 2,)
        Strict upper triangle in row-major order.
    """

    d: int
    upper: np.ndarray

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        upper = np.array(self.upper, dtype=float).reshape(-1)
        expected = self.d * (self.d - 1) // 2
        if upper.size != expected:
            raise ValueError(
                f"strict upper triangle of a {self.d}x{self.d} matrix has "
                f"{expected} entries, got {upper.size}"
            )
        if not np.all(np.isfinite(upper)):
            raise ValueError("antisymmetric matrix has non-finite entries")
        upper.setflags(write=False)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def zeros(cls, d: int) -> "AntisymmetricMatrix":
        return cls(d, np.zeros(d * (d - 1) // 2))

    @classmethod
    def from_full(cls, m, atol: float = 0.0) -> "AntisymmetricMatrix":
        """Build from a full matrix, rejecting it unless ``m.T == -m`` within `atol`."""
        m = _as_square(m)
        if np.max(np.abs(m + m.T), initial=0.0) > atol:
            raise ValueError("matrix is not antisymmetric")
        iu = np.triu_indices(m.shape[0], k=1)
        return cls(m.shape[0], m[iu])

    @property
    def full(self) -> np.ndarray:
        out = np.zeros((self.d, self.d))
        iu = np.triu_indices(self.d, k=1)
        out[iu] = self.upper
        out[(iu[1], iu[0])] = -self.upper
        return out

    @property
    def is_zero(self) -> bool:
        return not np.any(self.upper)

    def norm(self) -> float:
        return operator_norm(self.full)

    def conjugate(self, q) -> "AntisymmetricMatrix":
        """Return ``Q J Q^T``, re-antisymmetrized to remove rounding asymmetry."""
        q = _as_square(q)
        m = q @ self.full @ q.T
        return AntisymmetricMatrix.from_full(0.5 * (m - m.T))


@dataclass(frozen=True)
class DriftMatrix:
    """The drift ``A_J = I + J`` of the non-reversible dynamics."""

    J: AntisymmetricMatrix
    norm_AJ: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "_Jfull", self.J.full)
        object.__setattr__(self, "norm_AJ", operator_norm(self.full))

    @classmethod
    def identity(cls, d: int) -> "DriftMatrix":
        return cls(AntisymmetricMatrix.zeros(d))

    @property
    def d(self) -> int:
        return self.J.d

    @property
    def full(self) -> np.ndarray:
        return np.eye(self.d) + self.J.full

    def apply(self, g: np.ndarray) -> np.ndarray:
        """Compute ``(I + J) g`` as ``g + J g``; `g` may be a batch of row vectors."""
        if self.J.is_zero:
            return g
        return g + g @ self._Jfull.T


def block_diagonal_J(a, d: int) -> AntisymmetricMatrix:
    """Block-diagonal J with 2x2 blocks ``[[0, a_i], [-a_i, 0]]``.

    For odd `d` the last row and column are zero.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.ndim != 1 or a.size != d // 2:
        raise ValueError(f"need {d // 2} block coefficients for d={d}, got {a.size}")
    m = np.zeros((d, d))
    for i, ai in enumerate(a):
        m[2 * i, 2 * i + 1] = ai
    iu = np.triu_indices(d, k=1)
    return AntisymmetricMatrix(d, m[iu])


def random_gaussian_J(d: int, tau: float, seed: int) -> AntisymmetricMatrix:
    """Random J with i.i.d. ``N(0, tau^2 / d^2)`` strict-upper entries.

    Entries are drawn from ``numpy.random.default_rng(seed)`` in row-major
    strict-upper order.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    rng = np.random.default_rng(seed)
    upper = rng.normal(0.0, 1.0, size=d * (d - 1) // 2) * (tau / d)
    return AntisymmetricMatrix(d, upper)


def operator_norm(m) -> float:
    """Largest singular value (spectral norm)."""
    m = _as_square(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def eigen_decomposition(m, rtol: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit eigenvectors (columns) of a general square matrix.

    Every pair is checked against ``||(m - lam I) v|| <= rtol * ||m||``.

    Raises
    ------
    EigenSolveError
        If LAPACK fails to converge or a residual exceeds the bound.
    """
    m = _as_square(m)
    if m.shape[0] > 2500:
        raise ValueError(f"dense eigensolve limited to d <= 2500, got {m.shape[0]}")
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(f"eigensolver did not converge: {exc}") from exc
    scale = operator_norm(m)
    v = v / np.linalg.norm(v, axis=0)
    resid = np.linalg.norm(m @ v - v * w, axis=0)
    bad = resid > rtol * max(scale, np.finfo(float).tiny)
    if np.any(bad):
        raise EigenSolveError(
            f"{int(bad.sum())} eigenpairs exceed residual bound "
            f"(worst {resid.max():.3e}, allowed {rtol * scale:.3e})"
        )
    return w, v


def eigenvalues(m, rtol: float = 1e-7) -> np.ndarray:
    """All (possibly complex) eigenvalues of `m`, in no particular order."""
    return eigen_decomposition(m, rtol)[0]
