"""Experiment configuration, orchestration of runs and sweeps, and CSV/SVG output.

Configuration files are line-oriented ``key = value`` text with dotted keys
(``solver.eta = 1.0``); ``#`` starts a comment line.  Every key has a typed
default, so a file only lists what it changes.  The fully resolved
configuration is written back as ``config.echo``; re-running from the echo
reproduces ``run.csv`` byte for byte.

Recipe defaults that the reference experiments leave unstated are
reconstructions: 500 iterations with full gradients for the double well,
2000 iterations with minibatches of 32 for ICA.
"""

from __future__ import annotations

import math
import os
import xml.sax.saxutils as saxutils
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (CSV_HEADER, AllChainsDiverged, ChainConfig, RunRecord, StepSchedule,
                       run_ensemble)
from .linalg import (AntisymmetricMatrix, DriftMatrix, block_diagonal_J, random_gaussian_J)
from .objectives import (DatasetError, NoisyGradient, Objective, double_well, ica_objective,
                         isotropic_quadratic, load_csv, recovery_score, sources_from_state,
                         synthetic_ica_dataset)


class ConfigError(ValueError):
    """Invalid, unknown or inconsistent configuration."""


# ---------------------------------------------------------------- value codecs

def _parse_float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {s!r}") from None


def _parse_int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"not an integer: {s!r}") from None


def _parse_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple[float, ...] | None:
    s = s.strip()
    if s in ("", "none"):
        return None
    return tuple(_parse_float(t) for t in s.split(","))


def _parse_opt_float(s: str) -> float | None:
    s = s.strip()
    return None if s in ("", "none") else _parse_float(s)


def _parse_opt_int(s: str) -> int | None:
    s = s.strip()
    return None if s in ("", "none") else _parse_int(s)


def _parse_opt_str(s: str) -> str | None:
    s = s.strip()
    return None if s in ("", "none") else s


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(repr(float(t)) for t in v)
    return str(v)


# key -> (parser, default)
SCHEMA: dict[str, tuple] = {
    "objective.name": (str.strip, "double_well"),
    "objective.alpha": (_parse_floats, (0.2, 0.2)),
    "objective.d": (_parse_int, 2),
    "objective.noise_sigma": (_parse_float, 0.0),
    "objective.data": (_parse_opt_str, None),
    "objective.has_header": (_parse_bool, False),
    "objective.synthetic_n": (_parse_int, 1000),
    "objective.synthetic_p": (_parse_int, 2),
    "objective.synthetic_seed": (_parse_int, 0),
    "objective.temperature": (str.strip, "mean"),
    "solver.method": (str.strip, "nsgld"),
    "solver.eta": (_parse_float, 1.0),
    "solver.schedule": (_parse_floats, None),
    "solver.beta": (_parse_float, 200.0),
    "solver.tau": (_parse_opt_float, None),
    "solver.J_kind": (str.strip, "gaussian"),
    "solver.J_seed": (_parse_opt_int, None),
    "solver.J_file": (_parse_opt_str, None),
    "solver.J_blocks": (_parse_floats, None),
    "solver.batch_size": (_parse_int, 1),
    "solver.divergence_norm": (_parse_float, 1e6),
    "ensemble.n_chains": (_parse_int, 50),
    "ensemble.max_iters": (_parse_int, 500),
    "ensemble.checkpoint_every": (_parse_int, 10),
    "ensemble.seed": (_parse_int, 0),
    "ensemble.x0": (_parse_floats, None),
    "ensemble.init_radius": (_parse_opt_float, None),
    "output.dir": (str.strip, "out"),
    "output.svg": (_parse_bool, True),
}

SWEEP_KEYS = ("sweep.param", "sweep.values")

ICA_DEFAULTS = {
    "objective.name": "ica",
    "objective.temperature": "sum",
    "solver.schedule": "0.1,1,0.001",
    "solver.eta": "0.1",
    "solver.beta": "200",
    "solver.batch_size": "32",
    "ensemble.n_chains": "20",
    "ensemble.max_iters": "2000",
    "ensemble.checkpoint_every": "50",
}

OBJECTIVES = ("double_well", "quadratic", "ica")
METHODS = ("nsgld", "sgld")
J_KINDS = ("gaussian", "block", "zero")
TEMPERATURES = ("mean", "sum")


def parse_lines(text: str) -> dict[str, str]:
    """Split ``key = value`` lines; rejects malformed and duplicate lines."""
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _check_keys(raw: dict[str, str], allowed) -> None:
    unknown = sorted(k for k in raw if k not in allowed)
    if unknown:
        raise ConfigError("unknown configuration keys: " + ", ".join(unknown))


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully typed configuration; ``values`` maps every schema key to its value."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: d for k, (_, d) in SCHEMA.items()}
        merged.update(self.values)
        object.__setattr__(self, "values", merged)
        self._validate()

    @classmethod
    def from_mapping(cls, raw: dict[str, str], defaults: dict[str, str] | None = None
                     ) -> "ExperimentConfig":
        _check_keys(raw, SCHEMA)
        src = dict(defaults or {})
        src.update(raw)
        values = {}
        for k, s in src.items():
            parser = SCHEMA[k][0]
            try:
                values[k] = parser(s)
            except ConfigError as exc:
                raise ConfigError(f"{k}: {exc}") from None
        return cls(values)

    @classmethod
    def from_text(cls, text: str, defaults: dict[str, str] | None = None) -> "ExperimentConfig":
        return cls.from_mapping(parse_lines(text), defaults)

    def __getitem__(self, key: str):
        return self.values[key]

    def with_value(self, key: str, value) -> "ExperimentConfig":
        if key not in SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        if isinstance(value, str):
            value = SCHEMA[key][0](value)
        v = dict(self.values)
        v[key] = value
        return ExperimentConfig(v)

    def _validate(self) -> None:
        v = self.values
        if v["objective.name"] not in OBJECTIVES:
            raise ConfigError(f"objective.name must be one of {OBJECTIVES}, got {v['objective.name']!r}")
        if v["solver.method"] not in METHODS:
            raise ConfigError(f"solver.method must be one of {METHODS}")
        if v["solver.J_kind"] not in J_KINDS:
            raise ConfigError(f"solver.J_kind must be one of {J_KINDS}")
        if v["objective.temperature"] not in TEMPERATURES:
            raise ConfigError(f"objective.temperature must be one of {TEMPERATURES}")
        for k in ("solver.eta", "solver.beta", "solver.divergence_norm"):
            if not (math.isfinite(v[k]) and v[k] > 0):
                raise ConfigError(f"{k} must be finite and positive, got {v[k]}")
        for k in ("solver.batch_size", "ensemble.n_chains", "ensemble.max_iters",
                  "ensemble.checkpoint_every", "objective.d", "objective.synthetic_n"):
            if v[k] < 1:
                raise ConfigError(f"{k} must be a positive integer, got {v[k]}")
        if v["objective.noise_sigma"] < 0:
            raise ConfigError("objective.noise_sigma must be nonnegative")
        if v["solver.tau"] is not None and v["solver.tau"] < 0:
            raise ConfigError("solver.tau must be nonnegative")
        if v["ensemble.init_radius"] is not None and v["ensemble.init_radius"] <= 0:
            raise ConfigError("ensemble.init_radius must be positive")
        sched = v["solver.schedule"]
        if sched is not None:
            if len(sched) != 3:
                raise ConfigError("solver.schedule needs three numbers a,b,c")
            try:
                StepSchedule(*sched)
            except ValueError as exc:
                raise ConfigError(f"solver.schedule: {exc}") from None
        if v["solver.tau"] is not None and v["solver.J_file"] is not None:
            raise ConfigError("solver.tau and solver.J_file are mutually exclusive")
        if v["solver.J_blocks"] is not None and (v["solver.J_file"] is not None or v["solver.tau"] is not None):
            raise ConfigError("solver.J_blocks excludes solver.tau and solver.J_file")
        if v["solver.method"] == "sgld" and (v["solver.J_file"] is not None or v["solver.J_blocks"] is not None
                                            or (v["solver.tau"] or 0) > 0):
            raise ConfigError("solver.method = sgld takes no J specification")

    def echo(self, derived: dict[str, str] | None = None) -> str:
        lines = [f"{k} = {_fmt(self.values[k])}" for k in SCHEMA]
        for k, val in (derived or {}).items():
            lines.append(f"# derived.{k} = {val}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepSpec:
    base: ExperimentConfig
    param: str
    values: tuple

    def __post_init__(self):
        if self.param not in SCHEMA or self.param.startswith("output."):
            raise ConfigError(f"sweep.param {self.param!r} is not a sweepable configuration key")
        if len(self.values) < 2:
            raise ConfigError("a sweep needs at least two values")

    @classmethod
    def from_text(cls, text: str) -> "SweepSpec":
        raw = parse_lines(text)
        _check_keys(raw, set(SCHEMA) | set(SWEEP_KEYS))
        if "sweep.param" not in raw or "sweep.values" not in raw:
            raise ConfigError("a sweep file needs sweep.param and sweep.values")
        param = raw.pop("sweep.param")
        text_values = raw.pop("sweep.values")
        # tuple-valued parameters separate sweep values with ';'
        sep = ";" if ";" in text_values else ","
        values = tuple(s.strip() for s in text_values.split(sep))
        base = ExperimentConfig.from_mapping(raw)
        spec = cls(base, param, values)
        spec.configs()  # validates every value
        return spec

    def configs(self) -> list[ExperimentConfig]:
        return [self.base.with_value(self.param, val) for val in self.values]


# ---------------------------------------------------------------- resolution

@dataclass
class Resolved:
    """Objective, chain configuration and start point built from a config."""

    objective: Objective
    chain: ChainConfig
    x0: np.ndarray | None
    init_radius: float | None
    J: AntisymmetricMatrix
    truth: np.ndarray | None = None
    derived: dict = field(default_factory=dict)


def build_objective(cfg: ExperimentConfig):
    """Return ``(objective, true_sources_or_None)``."""
    name = cfg["objective.name"]
    truth = None
    if name == "double_well":
        alpha = cfg["objective.alpha"]
        if alpha is None or len(alpha) != 2:
            raise ConfigError("objective.alpha needs two numbers")
        obj = double_well(alpha)
    elif name == "quadratic":
        obj = isotropic_quadratic(cfg["objective.d"])
    else:
        try:
            if cfg["objective.data"] is not None:
                data = load_csv(cfg["objective.data"], cfg["objective.has_header"])
            else:
                data, A = synthetic_ica_dataset(cfg["objective.synthetic_n"], cfg["objective.synthetic_p"],
                                                cfg["objective.synthetic_seed"])
                truth = data.samples @ np.linalg.inv(A).T
            obj = ica_objective(data)
        except (DatasetError, ValueError, OSError) as exc:
            raise ConfigError(f"ICA data: {exc}") from None
    if cfg["objective.noise_sigma"] > 0:
        obj = NoisyGradient(obj, cfg["objective.noise_sigma"])
    return obj, truth


def build_J(cfg: ExperimentConfig, d: int) -> AntisymmetricMatrix:
    if cfg["solver.method"] == "sgld" or cfg["solver.J_kind"] == "zero":
        return AntisymmetricMatrix.zeros(d)
    if cfg["solver.J_file"] is not None:
        try:
            m = np.loadtxt(cfg["solver.J_file"], delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"solver.J_file: {exc}") from None
        if m.shape != (d, d):
            raise ConfigError(f"solver.J_file holds a {m.shape} matrix, objective dimension is {d}")
        try:
            return AntisymmetricMatrix.from_full(m, atol=1e-12 * max(1.0, np.abs(m).max()))
        except ValueError as exc:
            raise ConfigError(f"solver.J_file: {exc}") from None
    if cfg["solver.J_blocks"] is not None or cfg["solver.J_kind"] == "block":
        # without explicit blocks every block coefficient equals tau
        blocks = cfg["solver.J_blocks"]
        if blocks is None:
            blocks = (cfg["solver.tau"] or 0.0,) * (d // 2)
        try:
            return block_diagonal_J(blocks, d)
        except ValueError as exc:
            raise ConfigError(f"solver.J_blocks: {exc}") from None
    tau = cfg["solver.tau"] or 0.0
    seed = cfg["solver.J_seed"] if cfg["solver.J_seed"] is not None else cfg["ensemble.seed"]
    return random_gaussian_J(d, tau, seed)


def default_start(obj: Objective) -> np.ndarray:
    """Natural start point: (1, 1) for the double well, ones for the quadratic, ``W = I`` for ICA."""
    if obj.name == "ica":
        p = int(round(math.sqrt(obj.d)))
        return np.eye(p).ravel()
    return np.ones(obj.d)


def resolve(cfg: ExperimentConfig) -> Resolved:
    obj, truth = build_objective(cfg)
    J = build_J(cfg, obj.d)
    beta = cfg["solver.beta"]
    derived = {}
    if cfg["objective.temperature"] == "sum":
        if obj.name != "ica":
            raise ConfigError("objective.temperature = sum applies to the ICA objective only")
        n = obj.base.data.n if isinstance(obj, NoisyGradient) else obj.data.n
        beta = beta * n
        derived["beta_effective"] = repr(beta)
    sched = StepSchedule(*cfg["solver.schedule"]) if cfg["solver.schedule"] is not None else None
    chain = ChainConfig(eta=cfg["solver.eta"], beta=beta, drift=DriftMatrix(J),
                        batch_size=cfg["solver.batch_size"], seed=cfg["ensemble.seed"],
                        max_iters=cfg["ensemble.max_iters"],
                        divergence_norm=cfg["solver.divergence_norm"], schedule=sched)
    x0 = cfg["ensemble.x0"]
    radius = cfg["ensemble.init_radius"]
    if x0 is not None and radius is not None:
        raise ConfigError("ensemble.x0 and ensemble.init_radius are mutually exclusive")
    if x0 is not None:
        x0 = np.array(x0)
        if x0.shape != (obj.d,):
            raise ConfigError(f"ensemble.x0 has {x0.size} entries, objective dimension is {obj.d}")
    elif radius is None:
        x0 = default_start(obj)
    if not J.is_zero:
        derived["J_upper"] = ",".join(repr(float(t)) for t in J.upper)
    derived["norm_AJ"] = repr(chain.drift.norm_AJ)
    return Resolved(obj, chain, x0, radius, J, truth, derived)


def resolved_config(cfg: ExperimentConfig, res: Resolved) -> ExperimentConfig:
    """The config with implicit choices (start point, J seed) made explicit."""
    out = cfg
    if cfg["ensemble.x0"] is None and res.x0 is not None:
        out = out.with_value("ensemble.x0", tuple(float(t) for t in res.x0))
    if cfg["solver.J_seed"] is None:
        out = out.with_value("solver.J_seed", cfg["ensemble.seed"])
    return out


# ---------------------------------------------------------------- SVG

def render_svg(curves: list[tuple[str, np.ndarray, np.ndarray]], xlabel: str = "iter",
               ylabel: str = "mean_F", width: int = 640, height: int = 400) -> str:
    """Line plot with one ``<polyline>`` per curve; axes are ``<line>`` elements."""
    ml, mr, mt, mb = 70, 20, 20, 50
    pts = [(np.asarray(x, float), np.asarray(y, float)) for _, x, y in curves]
    xs = np.concatenate([p[0] for p in pts]) if pts else np.zeros(1)
    ys = np.concatenate([p[1] for p in pts]) if pts else np.zeros(1)
    finite = np.isfinite(ys)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = (float(ys[finite].min()), float(ys[finite].max())) if finite.any() else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = width - ml - mr, height - mt - mb

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (y1 - y) / (y1 - y0) * ph

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]
    esc = saxutils.escape
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
           f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
           f'<text x="{ml + pw / 2}" y="{height - 10}" text-anchor="middle" font-size="14">{esc(xlabel)}</text>',
           f'<text x="15" y="{mt + ph / 2}" text-anchor="middle" font-size="14" '
           f'transform="rotate(-90 15 {mt + ph / 2})">{esc(ylabel)}</text>']
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{sx(v):.2f}" y="{mt + ph + 18}" text-anchor="{anchor}" '
                   f'font-size="11">{v:.4g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{ml - 5}" y="{sy(v):.2f}" text-anchor="end" font-size="11">{v:.4g}</text>')
    for i, (label, _, _) in enumerate(curves):
        x, y = pts[i]
        ok = np.isfinite(y)
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        color = palette[i % len(palette)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
                   f'<title>{esc(label)}</title></polyline>')
        out.append(f'<text x="{ml + pw - 5}" y="{mt + 15 + 14 * i}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- runs

@dataclass
class RunOutcome:
    """Result of one configured run; ``status`` is ``ok``, ``all_diverged`` or an error message."""

    config: ExperimentConfig
    record: RunRecord | None
    status: str
    diverged_fraction: float
    echo: str = ""
    chain_report: str | None = None
    recovery: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("NSGLD_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"NSGLD_LAB_THREADS must be an integer, got {env!r}") from None
    return 1


def _chain_report(res: Resolved, record: RunRecord) -> tuple[str, np.ndarray | None]:
    """Per-chain terminal objective, log-likelihood and (synthetic ICA) recovery score."""
    obj = res.objective
    base = obj.base if isinstance(obj, NoisyGradient) else obj
    lines = ["chain,alive,final_F,mean_loglik,recovery"]
    scores = []
    for i, (x, alive) in enumerate(zip(record.final_states, record.final_alive)):
        if alive:
            F = float(obj.value(x))
            rec = recovery_score(sources_from_state(base, x), res.truth) if res.truth is not None else math.nan
        else:
            F, rec = math.nan, math.nan
        scores.append(rec)
        lines.append(f"{i},{int(bool(alive))},{F!r},{-F!r},{rec!r}")
    return "\n".join(lines) + "\n", (np.array(scores) if res.truth is not None else None)


def execute(cfg: ExperimentConfig, threads: int = 1) -> RunOutcome:
    """Run one configuration; divergence of every chain is reported, not raised."""
    res = resolve(cfg)
    full = resolved_config(cfg, res)
    echo = full.echo(res.derived)
    try:
        record = run_ensemble(res.objective, res.chain, cfg["ensemble.n_chains"],
                              cfg["ensemble.checkpoint_every"], x0=res.x0,
                              init_radius=res.init_radius, threads=threads)
        status = "ok"
    except AllChainsDiverged as exc:
        record = exc.record
        status = "all_diverged"
    frac = 1.0 - float(np.mean(record.final_alive))
    report, rec = (None, None)
    if res.objective.name == "ica":
        report, rec = _chain_report(res, record)
    return RunOutcome(full, record, status, frac, echo, report, rec)


def write_outputs(outcome: RunOutcome, outdir) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    outcome.record.write_csv(out / "run.csv")
    (out / "config.echo").write_text(outcome.echo)
    if outcome.chain_report is not None:
        (out / "chains.csv").write_text(outcome.chain_report)
    if outcome.config["output.svg"]:
        r = outcome.record
        (out / "curve.svg").write_text(render_svg([("mean_F", r.iters, r.mean_F)]))


SWEEP_HEADER = "sweep_value," + CSV_HEADER
SUMMARY_HEADER = "sweep_value,status,diverged_fraction,final_mean_F"


@dataclass
class SweepOutcome:
    spec: SweepSpec
    runs: list

    def combined_csv(self) -> str:
        lines = [SWEEP_HEADER]
        for val, run in zip(self.spec.values, self.runs):
            if run.record is None:
                continue
            for row in run.record.to_csv().splitlines()[1:]:
                lines.append(f"{val},{row}")
        return "\n".join(lines) + "\n"

    def summary_csv(self) -> str:
        lines = [SUMMARY_HEADER]
        for val, run in zip(self.spec.values, self.runs):
            final = run.record.rows[-1].mean_F if run.record is not None and run.record.rows else math.nan
            status = run.status.replace(",", ";").replace("\n", " ")
            lines.append(f"{val},{status},{run.diverged_fraction!r},{final!r}")
        return "\n".join(lines) + "\n"


def execute_sweep(spec: SweepSpec, threads: int = 1) -> SweepOutcome:
    """One run per swept value, run concurrently; failures are isolated per run."""
    cfgs = spec.configs()

    def one(cfg):
        try:
            return execute(cfg, threads=1)
        except Exception as exc:  # noqa: BLE001 - recorded per run
            return RunOutcome(cfg, None, f"error: {type(exc).__name__}: {exc}", math.nan)

    if threads > 1 and len(cfgs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, cfgs))
    else:
        runs = [one(c) for c in cfgs]
    return SweepOutcome(spec, runs)


def write_sweep_outputs(outcome: SweepOutcome, outdir) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    curves = []
    for i, (val, run) in enumerate(zip(outcome.spec.values, outcome.runs)):
        if run.record is None:
            continue
        quiet = run.config.with_value("output.svg", False)
        write_outputs(RunOutcome(quiet, run.record, run.status, run.diverged_fraction,
                                 run.echo, run.chain_report, run.recovery), out / f"run_{i:03d}")
        if run.record.rows:
            curves.append((f"{outcome.spec.param}={val}", run.record.iters, run.record.mean_F))
    (out / "sweep.csv").write_text(outcome.combined_csv())
    (out / "sweep_summary.csv").write_text(outcome.summary_csv())
    if outcome.spec.base["output.svg"]:
        (out / "curve.svg").write_text(render_svg(curves))
