"""Explicit constants and performance bounds for NSGLD.

Every evaluator is a literal transcription of a closed-form expression in
the problem constants ``(M, m, b, A, B, delta, beta, d)``, the initialization
radius ``R = sqrt(b/m)``, the spectral gaps ``lambda_J`` and ``lambda_J0``
(both negative) and ``||A_J|| = ||I + J||``.

Two constants are proved to exist but never given values: the prefactor
``C_{z,J}`` of the L2 contraction and the universal constant of the Harnack
inequality.  Both are inputs (``spectral_prefactor`` and ``universal_C``,
default 1.0) and every quantity depending on them is tagged heuristic.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, fields

from .objectives import RegularityConstants

LOG3 = math.log(3.0)

LABELS = {
    "C_c": "uniform_L2_sde",
    "C_d": "uniform_L2_nsgld",
    "U": "uniform_L4_aux",
    "D_c": "uniform_L4_sde",
    "L0": "exp_integrability_L0",
    "L1": "exp_integrability_L1",
    "C0": "diffusion_approx_C0",
    "C1": "diffusion_approx_C1",
    "C0_hat": "diffusion_approx_C0_hat",
    "C1_hat": "diffusion_approx_C1_hat",
    "g_J_at_R": "harnack_g_J",
    "log_g_J_at_R": "harnack_g_J_log",
    "C_hat_zJ": "contraction_prefactor_times_g_J",
    "I0": "sde_to_gibbs_I0",
    "I0_bar": "sde_to_gibbs_uniform_I0",
    "I1": "discretization_I1",
    "I2": "gibbs_concentration_I2",
    "I3": "gibbs_generalization_I3",
    "eta_max": "step_size_cap",
    "horizon": "time_horizon",
    "k_required": "required_iterations",
    "K_J": "iteration_complexity_leading_order",
    "K_tail": "tail_radius",
    "empirical_bound": "I0+I1+I2",
    "population_bound": "I0_bar+I1+I2+I3",
}

HEURISTIC = ("g_J_at_R", "log_g_J_at_R", "C_hat_zJ", "I0", "I0_bar", "K_J",
             "empirical_bound", "population_bound")


class BoundError(ValueError):
    """A formula's precondition failed; ``label`` names the formula."""

    def __init__(self, label: str, message: str):
        super().__init__(f"[{label}] {message}")
        self.label = label


@dataclass(frozen=True)
class ProblemConstants:
    """Inputs shared by every bound.

    ``lambda_J`` and ``lambda_J0`` are the (negative) spectral gaps with and
    without ``J``; ``lambda_star_J0`` is the uniform reversible gap used by
    the generalization term (defaults to ``|lambda_J0|``).
    """

    M: float
    m: float
    b: float
    A: float
    B: float
    beta: float
    d: int
    lambda_J: float
    lambda_J0: float
    norm_AJ: float = 1.0
    delta: float = 0.0
    spectral_prefactor: float = 1.0
    universal_C: float = 1.0
    lambda_star_J0: float | None = None

    def __post_init__(self):
        RegularityConstants(self.M, self.m, self.b, self.A, self.B, self.delta)
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and positive, got {self.beta}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if not (self.lambda_J < 0 and self.lambda_J0 < 0):
            raise ValueError("spectral gaps lambda_J and lambda_J0 must be negative")
        if abs(self.lambda_J) < abs(self.lambda_J0):
            raise ValueError("need |lambda_J| >= |lambda_J0|")
        if not self.norm_AJ >= 1.0:
            raise ValueError(f"||A_J|| is at least 1, got {self.norm_AJ}")
        if self.spectral_prefactor <= 0 or self.universal_C <= 0:
            raise ValueError("heuristic constants must be positive")
        if self.lambda_star_J0 is not None and not self.lambda_star_J0 > 0:
            raise ValueError("lambda_star_J0 must be positive")

    @classmethod
    def from_regularity(cls, rc: RegularityConstants, **kw) -> "ProblemConstants":
        return cls(M=rc.M, m=rc.m, b=rc.b, A=rc.A, B=rc.B, delta=rc.delta, **kw)

    @property
    def R(self) -> float:
        return math.sqrt(self.b / self.m)

    @property
    def inv_beta(self) -> float:
        return 1.0 / self.beta


def require_beta_condition(pc: ProblemConstants, strict: bool = False) -> None:
    """Enforce the precondition ``beta >= 3/m`` (strict if requested)."""
    ok = pc.beta * pc.m > 3.0 if strict else pc.beta * pc.m >= 3.0
    if not ok:
        op = ">" if strict else ">="
        raise BoundError("beta_condition", f"requires beta {op} 3/m; got beta={pc.beta}, "
                                           f"3/m={3.0 / pc.m}")


def compute_moment_constants(pc: ProblemConstants) -> tuple[float, float, float, float]:
    """``(C_c, C_d, D_c, U)``: uniform L2 bounds (SDE and NSGLD) and the L4 bound."""
    M, m, b, A, B, d, ib, R, delta = pc.M, pc.m, pc.b, pc.A, pc.B, pc.d, pc.inv_beta, pc.R, pc.delta
    MB = M + B
    C_c = ((3 * M * R**2 + 3 * B * R + 3 * B + 6 * A + 3 * b * LOG3) / (2 * m)
           + 3 * b * MB / m**2
           + 6 * M * ib * d * MB / m**3)
    C_d = ((3 * M * R**2 + 6 * B * R + 3 * B + 6 * A + 3 * b * LOG3) / (2 * m)
           + 6 * delta * (2 * b * M**2 + B**2 * m) * MB / m**4
           + 12 * M * ib * d * MB / m**3
           + 3 * b * MB / m**2)
    U = ((B + 2 * A) ** 2 / 2
         + 18 * MB**2 / m**2 * (b + ib + 2 * MB * ib / m**2) ** 2
         + 24 * ib * (2 * b * M**2 + m * B**2) * MB**2 / m**4
         + 2 * b * B + 2 * A + b**2)
    D_c = (9 / m**2 * (M / 2 * R**2 + B * R + A) ** 2
           + (9 * U + 9 * b * MB * C_c) / m**2
           + 6 * M * MB**2 / m**3 * (B + 2 * B * math.sqrt(2 * b / m) + 2 * b * M / m + 4 * A) * ib * d)
    return C_c, C_d, D_c, U


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def compute_exp_integrability(pc: ProblemConstants) -> tuple[float, float]:
    """``(L0, L1)`` with ``E exp(|X(t)|^2) <= L0 + L1 t``; needs ``beta > 3/m``.

    Exponentials beyond double range are returned as ``+inf`` (or ``-inf``
    for a negative prefactor) rather than raising.
    """
    require_beta_condition(pc)
    M, m, b, A, B, d, ib, R = pc.M, pc.m, pc.b, pc.A, pc.B, pc.d, pc.inv_beta, pc.R
    MB = M + B
    L0 = _exp(M * R**2 / 2 + B * R + A + 3 * b / (2 * m) * LOG3)
    gap = m - 3 * ib
    if gap <= 0:
        raise BoundError(LABELS["L1"], "factor (m - 3/beta) vanishes; requires beta > 3/m")
    exponent = 3 / m * (B / 2 + A + MB / gap * (b + ib * (2 * M * d - 3 * b) / m))
    coef = (6 * ib * M * d - 9 * b * ib) / (2 * m)
    tail = 0.0 if coef == 0 else coef * _exp(exponent)
    L1 = ((3 * m - 9 * ib) * (B / 2 + A) + 3 * b * MB) / (2 * MB) + tail
    return L0, L1


def compute_discretization_constants(pc: ProblemConstants) -> tuple[float, float, float, float]:
    """``(C0, C1, C0_hat, C1_hat)`` of the Wasserstein diffusion approximation."""
    _, C_d, _, _ = compute_moment_constants(pc)
    L0, L1 = compute_exp_integrability(pc)
    M, B, beta, d = pc.M, pc.B, pc.beta, pc.d
    C0 = 2 * beta * M**2 * (M**2 * C_d + B**2 + d / beta)
    C1 = (1 + 2 * M**2) * beta * (M**2 * C_d + B**2)
    if not L0 + L1 > 1:
        raise BoundError(LABELS["C0_hat"], f"log(L0 + L1) needs L0 + L1 > 1, got {L0 + L1}")
    lg = math.log(L0 + L1)
    C0_hat = math.sqrt(16 * lg * (C0 + math.sqrt(C0)))
    C1_hat = math.sqrt(16 * lg * (C1 + math.sqrt(C1)))
    return C0, C1, C0_hat, C1_hat


@dataclass(frozen=True)
class GJValue:
    value: float
    log_value: float
    overflow: bool


def compute_g_J(pc: ProblemConstants, x_norm: float, universal_C: float | None = None) -> GJValue:
    """The locally bounded Harnack function ``g_{z,J}(|x|)``.

    Evaluated in the log domain; when the value exceeds double range it is
    returned as ``inf`` with ``overflow`` set and the finite log kept.
    """
    Ct = pc.universal_C if universal_C is None else universal_C
    M, m, b, A, B, d, beta = pc.M, pc.m, pc.b, pc.A, pc.B, pc.d, pc.beta
    inner = (1 + beta + (math.sqrt(beta) + beta)
             * (0.25 * pc.norm_AJ * (M * x_norm + M + B) + math.sqrt(d / beta)))
    log_num = math.log(16.0) + math.lgamma(d / 2 + 1) + Ct * 2.0 ** (-3 * d) * inner**2
    # the denominator is (3/(2 m beta))^{-d/2} e^{-beta b log3 / 2} e^{-beta (M+B)(|x|^2 + B/2 + A + 1/16)}
    log_den = (-(d / 2) * math.log(3 / (2 * m * beta)) - beta * b * LOG3 / 2
               - beta * (M + B) * (x_norm**2 + B / 2 + A + 1 / 16))
    log_ratio = log_num - log_den
    log_g = abs(pc.lambda_J) * 27 / 64 + (log_ratio + math.log1p(math.exp(-log_ratio))
                                           if log_ratio > 0 else math.log1p(math.exp(log_ratio)))
    try:
        value = math.exp(log_g)
        overflow = False
    except OverflowError:
        value, overflow = math.inf, True
    return GJValue(value, log_g, overflow)


def compute_I0(pc: ProblemConstants, C_hat_zJ: float) -> float:
    """Coefficient of ``eps`` in the SDE-to-Gibbs bound (multiply by ``eps``)."""
    if not C_hat_zJ > 0:
        raise BoundError(LABELS["I0"], f"C_hat_zJ must be positive, got {C_hat_zJ}")
    require_beta_condition(pc)
    _, _, D_c, _ = compute_moment_constants(pc)
    M, A, B = pc.M, pc.A, pc.B
    return ((M + B) / 2 + B / 2 + A) * C_hat_zJ + (M + B) * D_c


def _check_eps(eps: float, label: str) -> None:
    if not 0 < eps < 1:
        raise BoundError(label, f"eps must lie in (0, 1), got {eps}")


def horizon(pc: ProblemConstants, eps: float) -> float:
    """Continuous time ``k eta = (2 / |lambda_J|) log(1/eps)``."""
    _check_eps(eps, LABELS["horizon"])
    return 2.0 / abs(pc.lambda_J) * math.log(1.0 / eps)


def compute_I1(pc: ProblemConstants, eps: float) -> float:
    """Discretization term; warns (``RuntimeWarning``) when the horizon is below e."""
    _check_eps(eps, LABELS["I1"])
    T = horizon(pc, eps)
    if T <= 1.0:
        raise BoundError(LABELS["I1"], f"time horizon {T} <= 1 makes sqrt(log(horizon)) undefined")
    if T < math.e:
        warnings.warn(f"time horizon {T:.4g} is below e", RuntimeWarning, stacklevel=2)
    _, C_d, _, _ = compute_moment_constants(pc)
    _, _, C0_hat, C1_hat = compute_discretization_constants(pc)
    M, B = pc.M, pc.B
    lamJ, lam0 = abs(pc.lambda_J), abs(pc.lambda_J0)
    return ((M * math.sqrt(C_d) + B)
            * (C0_hat * eps / math.sqrt(lam0)
               + C1_hat * pc.delta**0.25 * math.sqrt(2 * math.log(1 / eps) / lamJ) * pc.norm_AJ)
            * math.sqrt(math.log(2 * math.log(1 / eps) / lamJ)))


def compute_I2(pc: ProblemConstants) -> float:
    """Gibbs concentration ``(d / 2 beta) log(e M/m (b beta / d + 1))``."""
    d, beta = pc.d, pc.beta
    return d / (2 * beta) * math.log(math.e * pc.M / pc.m * (pc.b * beta / d + 1))


def compute_c_LS(pc: ProblemConstants) -> float:
    lam = pc.lambda_star_J0 if pc.lambda_star_J0 is not None else abs(pc.lambda_J0)
    M, m, d, beta = pc.M, pc.m, pc.d, pc.beta
    return (2 * m**2 + 8 * M**2) / (m**2 * M * beta) + (6 * M * (d + beta) / m + 2) / lam


def compute_I3(pc: ProblemConstants, n: int) -> float:
    """Generalization gap of the Gibbs algorithm for `n` samples."""
    if int(n) != n or n < 1:
        raise BoundError(LABELS["I3"], f"n must be a positive integer, got {n}")
    M, m, b, B, d, beta = pc.M, pc.m, pc.b, pc.B, pc.d, pc.beta
    return 4 * (M**2 / m * (b + d / beta) + B**2) * beta * compute_c_LS(pc) / n


def step_size_cap(pc: ProblemConstants, eps: float) -> float:
    """Largest admissible constant step size."""
    _check_eps(eps, LABELS["eta_max"])
    M, m, nA = pc.M, pc.m, pc.norm_AJ
    lg = math.log(1 / eps)
    return min(1.0,
               m**2 / ((m**2 + 8 * M**2) * M * nA**2),
               eps**4 / (4 * lg**2 * nA**4) * pc.lambda_J**2 / pc.lambda_J0**2)


def required_iterations(pc: ProblemConstants, eps: float, eta: float) -> int:
    """Smallest ``k`` with ``k eta >= (2 / |lambda_J|) log(1/eps)``."""
    if not eta > 0:
        raise BoundError(LABELS["k_required"], f"eta must be positive, got {eta}")
    T = horizon(pc, eps)
    k = math.ceil(T / eta)
    # guard against T/eta landing a hair above an integer through rounding
    if (k - 1) * eta >= T:
        k -= 1
    return int(k)


def iteration_complexity(pc: ProblemConstants, eps: float) -> float:
    """Leading-order iteration count with hidden polylog constants set to one."""
    _check_eps(eps, LABELS["K_J"])
    beta, d, nA = pc.beta, pc.d, pc.norm_AJ
    lamJ, lam0 = abs(pc.lambda_J), abs(pc.lambda_J0)
    return (math.sqrt(beta) * (beta + d) / (lamJ * eps**4) * math.log(1 / eps) ** 3
            * nA**4 * lam0**2 / lamJ**2)


def tail_radius(pc: ProblemConstants, eps: float) -> float:
    """Truncation radius ``exp(|lambda_J| k eta / 4)`` at the horizon."""
    return math.exp(abs(pc.lambda_J) * horizon(pc, eps) / 4)


@dataclass(frozen=True)
class BoundReport:
    C_c: float
    C_d: float
    D_c: float
    U: float
    L0: float
    L1: float
    C0: float
    C1: float
    C0_hat: float
    C1_hat: float
    g_J_at_R: float
    log_g_J_at_R: float
    C_hat_zJ: float
    I0: float
    I0_bar: float
    I1: float
    I2: float
    I3: float
    eta_max: float
    horizon: float
    k_required: int
    K_J: float
    K_tail: float
    empirical_bound: float
    population_bound: float
    g_J_overflow: bool = False
    horizon_below_e: bool = False

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.name in LABELS]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("key,value,formula_label\n")
        for k in self.keys():
            buf.write(f"{k},{getattr(self, k)!r},{LABELS[k]}\n")
        buf.write(f"g_J_overflow,{int(self.g_J_overflow)},flag\n")
        buf.write(f"horizon_below_e,{int(self.horizon_below_e)},flag\n")
        return buf.getvalue()

    def to_text(self) -> str:
        lines = ["NSGLD bound report", "=================="]
        width = max(len(k) for k in self.keys())
        for k in self.keys():
            tag = "  [heuristic constant]" if k in HEURISTIC else ""
            lines.append(f"{k:<{width}}  {getattr(self, k):.6g}  ({LABELS[k]}){tag}")
        if self.g_J_overflow:
            lines.append("note: g_J overflows double precision; compare via log_g_J_at_R")
        if self.horizon_below_e:
            lines.append("warning: time horizon is below e")
        lines.append("heuristic constants: spectral prefactor and Harnack constant are "
                     "configuration inputs, not derived values")
        return "\n".join(lines) + "\n"


def emit_bound_report(pc: ProblemConstants, eps: float, n: int, C_hat_zJ: float | str = "auto",
                      C_bar_J: float | None = None, eta: float | None = None) -> BoundReport:
    """Evaluate every constant and both summed bounds.

    ``C_hat_zJ = "auto"`` uses ``spectral_prefactor * g_J(R)``.  `C_bar_J`
    (the supremum of ``C_hat_zJ`` over datasets) defaults to ``C_hat_zJ``.
    `eta` defaults to the step-size cap.
    """
    require_beta_condition(pc)
    C_c, C_d, D_c, U = compute_moment_constants(pc)
    L0, L1 = compute_exp_integrability(pc)
    C0, C1, C0_hat, C1_hat = compute_discretization_constants(pc)
    g = compute_g_J(pc, pc.R)
    if C_hat_zJ == "auto":
        C_hat = pc.spectral_prefactor * g.value
    else:
        C_hat = float(C_hat_zJ)
    C_bar = C_hat if C_bar_J is None else float(C_bar_J)
    I0 = compute_I0(pc, C_hat) * eps if math.isfinite(C_hat) else math.inf
    I0_bar = compute_I0(pc, C_bar) * eps if math.isfinite(C_bar) else math.inf
    T = horizon(pc, eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        I1 = compute_I1(pc, eps)
    I2 = compute_I2(pc)
    I3 = compute_I3(pc, n)
    eta_max = step_size_cap(pc, eps)
    k = required_iterations(pc, eps, eta if eta is not None else eta_max)
    return BoundReport(
        C_c=C_c, C_d=C_d, D_c=D_c, U=U, L0=L0, L1=L1, C0=C0, C1=C1,
        C0_hat=C0_hat, C1_hat=C1_hat, g_J_at_R=g.value, log_g_J_at_R=g.log_value,
        C_hat_zJ=C_hat, I0=I0, I0_bar=I0_bar, I1=I1, I2=I2, I3=I3,
        eta_max=eta_max, horizon=T, k_required=k, K_J=iteration_complexity(pc, eps),
        K_tail=tail_radius(pc, eps),
        empirical_bound=I0 + I1 + I2, population_bound=I0_bar + I1 + I2 + I3,
        g_J_overflow=g.overflow, horizon_below_e=T < math.e,
    )
