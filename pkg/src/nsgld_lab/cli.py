"""Command-line front door: ``nsgld-lab {run,sweep,ica,spectral,constants}``.

Exit codes: 0 success, 2 configuration error, 3 every chain diverged,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds, spectral
from .harness import (ICA_DEFAULTS, ConfigError, ExperimentConfig, SweepSpec, execute,
                      execute_sweep, parse_lines, resolve_threads, write_outputs,
                      write_sweep_outputs)
from .linalg import EigenSolveError, block_diagonal_J
from .objectives import DegenerateStateError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_NUMERIC = 4

SPECTRAL_HEADER = "lambda1,a1,mu_star,mu_star_J,ratio,verdict"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _load_config(args, defaults=None) -> ExperimentConfig:
    text = _read(args.config) if args.config else ""
    raw = parse_lines(text)
    if args.seed is not None:
        raw["ensemble.seed"] = str(args.seed)
    return ExperimentConfig.from_mapping(raw, defaults)


def _outdir(args, cfg: ExperimentConfig) -> Path:
    return Path(args.out) if args.out else Path(cfg["output.dir"])


def _report_run(outcome, out: Path) -> int:
    write_outputs(outcome, out)
    rows = outcome.record.rows
    if rows:
        print(f"final iter {rows[-1].iter}: mean_F = {rows[-1].mean_F:.6g} "
              f"({rows[-1].alive} chains alive)")
    print(f"diverged fraction: {outcome.diverged_fraction:.3g}")
    if outcome.recovery is not None:
        rec = outcome.recovery
        good = int(np.sum(rec > 0.95))
        print(f"source recovery: median {np.nanmedian(rec):.4f}, > 0.95 in {good} of {rec.size} chains")
    print(f"wrote {out}")
    if outcome.status == "all_diverged":
        print("error: all chains diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load_config(args)
    return _report_run(execute(cfg, resolve_threads(args.threads)), _outdir(args, cfg))


def cmd_ica(args) -> int:
    cfg = _load_config(args, ICA_DEFAULTS)
    if cfg["objective.name"] != "ica":
        raise ConfigError("the ica subcommand needs objective.name = ica")
    return _report_run(execute(cfg, resolve_threads(args.threads)), _outdir(args, cfg))


def cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep needs --config <sweep file>")
    text = _read(args.config)
    if args.seed is not None:
        raw = parse_lines(text)
        raw["ensemble.seed"] = str(args.seed)
        text = "\n".join(f"{k} = {v}" for k, v in raw.items())
    spec = SweepSpec.from_text(text)
    outcome = execute_sweep(spec, resolve_threads(args.threads))
    out = Path(args.out) if args.out else Path(spec.base["output.dir"])
    write_sweep_outputs(outcome, out)
    for val, run in zip(spec.values, outcome.runs):
        print(f"{spec.param}={val}: {run.status}, diverged fraction {run.diverged_fraction:.3g}")
    print(f"wrote {out}")
    statuses = [r.status for r in outcome.runs]
    if all(s == "all_diverged" for s in statuses):
        return EXIT_DIVERGED
    if not any(s in ("ok", "all_diverged") for s in statuses):
        return EXIT_NUMERIC
    return EXIT_OK


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def spectral_rows(lambda1s, a1s) -> list[str]:
    """One CSV row per ``(lambda1, a1)`` pair for ``H = diag(-1, lambda1)`` and a single block."""
    rows = []
    for lam in lambda1s:
        if not lam > 0:
            raise ConfigError(f"lambda1 must be positive, got {lam}")
        H = np.diag([-1.0, lam])
        for a in a1s:
            J = block_diagonal_J([a], 2)
            ratio = spectral.complexity_ratio(H, J)
            rows.append(f"{lam!r},{a!r},{spectral.mu_star(H)!r},{spectral.mu_star_J(H, J)!r},"
                        f"{ratio!r},{spectral.verdict(ratio, tol=1e-9)}")
    return rows


def cmd_spectral(args) -> int:
    rows = spectral_rows(_floats(args.lambda1), _floats(args.a1))
    text = SPECTRAL_HEADER + "\n" + "\n".join(rows) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "spectral.csv").write_text(text)
    return EXIT_OK


CONSTANT_KEYS = {
    "M": float, "m": float, "b": float, "A": float, "B": float, "delta": float, "beta": float,
    "d": int, "lambda_J": float, "lambda_J0": float, "norm_AJ": float,
    "spectral_prefactor": float, "universal_C": float, "lambda_star_J0": float,
    "eps": float, "n": int, "C_hat_zJ": str, "C_bar_J": float, "eta": float,
}
CONSTANT_REQUIRED = ("M", "m", "b", "A", "B", "beta", "d", "lambda_J", "lambda_J0")


def parse_constants(text: str):
    raw = parse_lines(text)
    unknown = sorted(k for k in raw if k not in CONSTANT_KEYS)
    if unknown:
        raise ConfigError("unknown configuration keys: " + ", ".join(unknown))
    missing = [k for k in CONSTANT_REQUIRED if k not in raw]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))
    vals = {}
    for k, s in raw.items():
        try:
            vals[k] = CONSTANT_KEYS[k](s)
        except ValueError:
            raise ConfigError(f"{k}: cannot parse {s!r}") from None
    eps = vals.pop("eps", 0.01)
    n = vals.pop("n", 1000)
    c_hat = vals.pop("C_hat_zJ", "auto")
    if c_hat != "auto":
        try:
            c_hat = float(c_hat)
        except ValueError:
            raise ConfigError(f"C_hat_zJ must be a number or 'auto', got {c_hat!r}") from None
    extra = {"C_bar_J": vals.pop("C_bar_J", None), "eta": vals.pop("eta", None)}
    try:
        pc = bounds.ProblemConstants(**vals)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return pc, eps, n, c_hat, extra


def cmd_constants(args) -> int:
    if not args.config:
        raise ConfigError("constants needs --config <file>")
    pc, eps, n, c_hat, extra = parse_constants(_read(args.config))
    try:
        report = bounds.emit_bound_report(pc, eps, n, c_hat, **extra)
    except bounds.BoundError as exc:
        if exc.label == "beta_condition":
            raise ConfigError(str(exc)) from None
        raise
    sys.stdout.write(report.to_text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bounds.csv").write_text(report.to_csv())
        (out / "bounds.txt").write_text(report.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsgld-lab", description="NSGLD / SGLD experiments and bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required, help="key=value configuration file")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--seed", type=int, help="base seed (overrides ensemble.seed)")
        sp.add_argument("--threads", type=int, help="worker threads (fallback: NSGLD_LAB_THREADS)")

    common(sub.add_parser("run", help="run one experiment"))
    common(sub.add_parser("sweep", help="sweep one configuration key"))
    common(sub.add_parser("ica", help="ICA recipe (synthetic data unless objective.data is set)"))
    sp = sub.add_parser("spectral", help="complexity-ratio sweep on the 2x2 normal form")
    sp.add_argument("--lambda1", required=True, help="comma-separated lambda1 values")
    sp.add_argument("--a1", required=True, help="comma-separated block coefficients")
    sp.add_argument("--out", help="directory for spectral.csv")
    cp = sub.add_parser("constants", help="bound report from problem constants")
    cp.add_argument("--config", help="key=value file with M, m, b, A, B, beta, d, lambda_J, ...")
    cp.add_argument("--out", help="directory for bounds.csv and bounds.txt")
    return p


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "ica": cmd_ica, "spectral": cmd_spectral,
            "constants": cmd_constants}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (bounds.BoundError, EigenSolveError, spectral.SpectralIdentificationError,
            spectral.SaddleStructureError, DegenerateStateError, FloatingPointError,
            OverflowError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
