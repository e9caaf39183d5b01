"""NSGLD / SGLD steppers, an Euler-Maruyama reference integrator and the
multi-chain Monte Carlo runner.

One NSGLD step is::

    x <- x - eta * (I + J) g(x, U) + sqrt(2 eta / beta) * xi

with ``g`` a stochastic gradient and ``xi`` standard Gaussian.  Each step
draws the stochastic gradient first and then the Gaussian vector; both come
from the chain's own generator, so a trajectory is a function of
``(config, seed, chain index)`` alone.

Per-chain streams are PCG64 generators seeded with
``SeedSequence(seed, spawn_key=(chain, 0))``; initial points drawn in a ball
use ``spawn_key=(chain, 1)``.  This is the same tree ``SeedSequence.spawn``
produces, so chains are independent in practice and individually replayable.
"""

from __future__ import annotations

import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import DriftMatrix
from .objectives import DegenerateStateError, Objective


class AllChainsDiverged(RuntimeError):
    """Every chain of an ensemble diverged; ``record`` holds the partial run."""

    def __init__(self, record: "RunRecord"):
        super().__init__("all chains diverged")
        self.record = record


@dataclass(frozen=True)
class StepSchedule:
    """Decaying step size ``a / (b + c k)`` at iteration ``k``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c >= 0):
            raise ValueError(f"schedule needs a > 0, b > 0, c >= 0, got {self}")

    def __call__(self, k: int) -> float:
        return self.a / (self.b + self.c * k)


@dataclass(frozen=True)
class ChainConfig:
    eta: float
    beta: float
    drift: DriftMatrix
    batch_size: int = 1
    seed: int = 0
    max_iters: int = 1000
    divergence_norm: float = 1e6
    schedule: StepSchedule | None = None

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be finite and positive, got {self.eta}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and positive, got {self.beta}")
        if self.batch_size < 1 or self.max_iters < 1:
            raise ValueError("batch_size and max_iters must be positive")
        if not self.divergence_norm > 0:
            raise ValueError("divergence_norm must be positive")

    def step_size(self, k: int) -> float:
        return self.schedule(k) if self.schedule is not None else self.eta


@dataclass(frozen=True)
class ChainState:
    """Iterate, iteration counter and the chain's generator.

    Steps return a new state that shares (and has advanced) the generator.
    """

    x: np.ndarray
    iter: int
    rng: np.random.Generator
    diverged: bool = False

    @classmethod
    def start(cls, x0, seed: int, chain: int = 0) -> "ChainState":
        return cls(np.array(x0, dtype=float), 0, chain_rng(seed, chain))


def chain_rng(seed: int, chain: int, purpose: int = 0) -> np.random.Generator:
    """Generator for `chain` of a run seeded with `seed` (``purpose`` 1 = init)."""
    ss = np.random.SeedSequence(seed, spawn_key=(chain, purpose))
    return np.random.Generator(np.random.PCG64(ss))


def nsgld_update(x, g, drift: DriftMatrix, eta: float, beta: float, xi) -> np.ndarray:
    """Deterministic part of one step given the gradient sample and the noise.

    ``beta = inf`` gives zero noise and ``eta = 0`` leaves ``x`` unchanged;
    both are accepted here for limit checks.
    """
    scale = math.sqrt(2.0 * eta / beta)
    return x - eta * drift.apply(g) + scale * xi


def _advance(x, k, obj, drift, cfg, rng):
    """One step; returns ``(x_new, diverged)``."""
    eta = cfg.step_size(k)
    try:
        g = obj.stochastic_gradient(x, rng, cfg.batch_size)
    except DegenerateStateError:
        return x, True
    xi = rng.standard_normal(x.shape)
    x_new = nsgld_update(x, g, drift, eta, cfg.beta, xi)
    if not np.all(np.isfinite(x_new)) or np.linalg.norm(x_new) > cfg.divergence_norm:
        return x_new, True
    return x_new, False


def _check_dims(state, obj, drift):
    if state.x.shape != (obj.d,) or drift.d != obj.d:
        raise ValueError(
            f"dimension mismatch: state {state.x.shape}, objective {obj.d}, drift {drift.d}")


def nsgld_step(state: ChainState, obj: Objective, cfg: ChainConfig) -> ChainState:
    """One NSGLD step with the configured drift ``I + J``."""
    _check_dims(state, obj, cfg.drift)
    if state.diverged:
        return state
    x, diverged = _advance(state.x, state.iter, obj, cfg.drift, cfg, state.rng)
    return ChainState(x, state.iter + 1, state.rng, diverged)


def sgld_step(state: ChainState, obj: Objective, cfg: ChainConfig) -> ChainState:
    """One SGLD step: NSGLD with ``J = 0`` regardless of ``cfg.drift``."""
    return nsgld_step(state, obj, replace(cfg, drift=DriftMatrix.identity(obj.d)))


def em_reference_path(obj: Objective, cfg: ChainConfig, substeps: int, x0, n_steps: int,
                      rng: np.random.Generator | None = None,
                      increments: np.ndarray | None = None) -> np.ndarray:
    """Euler-Maruyama path of ``dX = -(I + J) grad F(X) dt + sqrt(2/beta) dB``.

    Integrates with full gradients at step ``cfg.eta / substeps`` and returns
    the states on the coarse grid, shape ``(n_steps + 1,) + x0.shape``.  `x0`
    may be a batch ``(k, d)`` of independent paths.

    `increments`, if given, are the standard-normal draws of every fine step,
    shape ``(n_steps, substeps) + x0.shape``; otherwise they are drawn from
    `rng` (default: the chain-0 stream of ``cfg.seed``) one fine step at a
    time.  With ``substeps = 1`` the draws, and hence the path, coincide with
    an NSGLD run of a full-gradient objective under the same stream.
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    x = np.array(x0, dtype=float)
    if rng is None and increments is None:
        rng = chain_rng(cfg.seed, 0)
    h = cfg.eta / substeps
    out = np.empty((n_steps + 1,) + x.shape)
    out[0] = x
    dead = False
    for k in range(n_steps):
        for j in range(substeps):
            xi = increments[k, j] if increments is not None else rng.standard_normal(x.shape)
            if not dead:
                x = nsgld_update(x, obj.gradient(x), cfg.drift, h, cfg.beta, xi)
                norms = np.linalg.norm(x, axis=-1)
                if not np.all(np.isfinite(x)) or np.any(norms > cfg.divergence_norm):
                    dead = True
        out[k + 1] = x if not dead else np.nan
    return out


@dataclass(frozen=True)
class Checkpoint:
    iter: int
    mean_F: float
    std_F: float
    mean_norm_x: float
    alive: int


CSV_HEADER = "iter,mean_F,std_F,mean_norm_x,alive"


@dataclass
class RunRecord:
    """Per-checkpoint ensemble statistics over the chains still alive."""

    rows: list
    metadata: dict = field(default_factory=dict)
    final_states: np.ndarray | None = None
    final_alive: np.ndarray | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(f"{r.iter},{r.mean_F!r},{r.std_F!r},{r.mean_norm_x!r},{r.alive}\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "RunRecord":
        lines = text.splitlines()
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError("not a run record: header mismatch")
        rows = []
        for line in lines[1:]:
            it, mf, sf, mn, alive = line.split(",")
            rows.append(Checkpoint(int(it), float(mf), float(sf), float(mn), int(alive)))
        return cls(rows)

    @property
    def iters(self) -> np.ndarray:
        return np.array([r.iter for r in self.rows])

    @property
    def mean_F(self) -> np.ndarray:
        return np.array([r.mean_F for r in self.rows])


def checkpoint_iters(max_iters: int, every: int) -> list[int]:
    if every < 1:
        raise ValueError("checkpoint_every must be positive")
    its = list(range(0, max_iters + 1, every))
    if its[-1] != max_iters:
        its.append(max_iters)
    return its


def initial_point(chain: int, seed: int, d: int, x0=None, radius: float | None = None) -> np.ndarray:
    """`x0` if given, otherwise a uniform draw from the ball of the given radius."""
    if x0 is not None:
        x = np.array(x0, dtype=float)
        if x.shape != (d,):
            raise ValueError(f"x0 has shape {x.shape}, expected ({d},)")
        return x
    if radius is None:
        raise ValueError("need either x0 or an initialization radius")
    rng = chain_rng(seed, chain, purpose=1)
    g = rng.standard_normal(d)
    norm = np.linalg.norm(g)
    u = g / norm if norm > 0 else np.eye(d)[0]
    return u * radius * rng.uniform() ** (1.0 / d)


def _run_chain(obj, cfg, chain, its, x0, radius, keep):
    rng = chain_rng(cfg.seed, chain)
    x = initial_point(chain, cfg.seed, obj.d, x0, radius)
    n = len(its)
    F = np.full(n, np.nan)
    norms = np.full(n, np.nan)
    alive = np.zeros(n, dtype=bool)
    samples = [] if keep else None
    diverged = False
    j = 0
    last = its[-1]
    for k in range(last + 1):
        if keep is not None and not diverged and k >= keep[0] and (k - keep[0]) % keep[1] == 0:
            samples.append(x.copy())
        if k == its[j]:
            if not diverged:
                try:
                    F[j] = float(obj.value(x))
                    norms[j] = float(np.linalg.norm(x))
                    alive[j] = True
                except DegenerateStateError:
                    diverged = True
            j += 1
        if k == last:
            break
        if not diverged:
            x, diverged = _advance(x, k, obj, cfg.drift, cfg, rng)
    return F, norms, alive, x, not diverged, samples


def _map_chains(fn, n_chains, threads):
    if threads is None or threads <= 1 or n_chains == 1:
        return [fn(i) for i in range(n_chains)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chains)))


def run_ensemble(obj: Objective, cfg: ChainConfig, n_chains: int, checkpoint_every: int,
                 x0=None, init_radius: float | None = None, threads: int = 1) -> RunRecord:
    """Run `n_chains` independent chains for ``cfg.max_iters`` steps.

    Chains start at `x0`, or uniformly in the ball of radius `init_radius`
    (default: the objective's ``R``).  Statistics at each checkpoint use the
    chains alive at that point; a chain that diverges is dropped from then
    on.  Chains may run on a thread pool; results do not depend on
    `threads`.

    Raises
    ------
    AllChainsDiverged
        If no chain is alive at some checkpoint; the exception carries the
        rows recorded before that point.
    """
    if n_chains < 1:
        raise ValueError("n_chains must be >= 1")
    if cfg.drift.d != obj.d:
        raise ValueError(f"drift dimension {cfg.drift.d} != objective dimension {obj.d}")
    if x0 is None and init_radius is None:
        c = obj.constants()
        if c is None:
            raise ValueError("objective has no registered R; pass x0 or init_radius")
        init_radius = c.R
    start_norm = float(np.linalg.norm(x0)) if x0 is not None else float(init_radius)
    if start_norm >= cfg.divergence_norm:
        raise ValueError(f"initial radius {start_norm} is not below divergence_norm {cfg.divergence_norm}")
    its = checkpoint_iters(cfg.max_iters, checkpoint_every)
    t0 = time.perf_counter()
    results = _map_chains(lambda i: _run_chain(obj, cfg, i, its, x0, init_radius, None),
                          n_chains, threads)
    F = np.array([r[0] for r in results])
    norms = np.array([r[1] for r in results])
    alive = np.array([r[2] for r in results])

    rows = []
    for j, it in enumerate(its):
        mask = alive[:, j]
        n_alive = int(mask.sum())
        if n_alive == 0:
            break
        f = F[mask, j]
        rows.append(Checkpoint(it, float(np.mean(f)), float(np.std(f)),
                               float(np.mean(norms[mask, j])), n_alive))
    record = RunRecord(
        rows,
        metadata={"n_chains": n_chains, "eta": cfg.eta, "beta": cfg.beta, "seed": cfg.seed,
                  "max_iters": cfg.max_iters, "wall_time": time.perf_counter() - t0},
        final_states=np.array([r[3] for r in results]),
        final_alive=np.array([r[4] for r in results]),
    )
    if len(rows) < len(its):
        raise AllChainsDiverged(record)
    return record


def collect_samples(obj: Objective, cfg: ChainConfig, n_chains: int, burn_in: int,
                    thin: int = 1, x0=None, init_radius: float | None = None,
                    threads: int = 1) -> np.ndarray:
    """Post-burn-in iterates ``X_k`` for ``burn_in <= k <= cfg.max_iters``, every `thin`.

    Returns an array of shape ``(n_chains, n_kept, d)``; a chain that
    diverges contributes NaN rows after its divergence.
    """
    if x0 is None and init_radius is None:
        init_radius = obj.constants().R
    its = [0, cfg.max_iters]
    results = _map_chains(
        lambda i: _run_chain(obj, cfg, i, its, x0, init_radius, (burn_in, thin)),
        n_chains, threads)
    n_keep = len(range(burn_in, cfg.max_iters + 1, thin))
    out = np.full((n_chains, n_keep, obj.d), np.nan)
    for i, r in enumerate(results):
        s = r[5]
        if s:
            out[i, : len(s)] = np.array(s)
    return out


def wasserstein2_1d(samples_a, samples_b) -> float:
    """Exact W2 distance between two equal-size 1-D empirical measures."""
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    if a.size != b.size:
        raise ValueError(f"sample sizes differ: {a.size} vs {b.size}")
    return float(np.sqrt(np.mean((a - b) ** 2)))
