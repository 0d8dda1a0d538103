"""Command-line front end.

Subcommands regenerate the figure datasets as CSV, run a protocol or a
Monte Carlo estimation from a flat key=value config file, and run the
structural validation suite. All outputs are deterministic for a fixed
seed; CSVs carry a metadata comment line (version, command, seed) so
downstream plotting is self-describing.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys as _sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, entangle, estimator, fisher, protocol, spin
from . import validate as validation
from .errors import ConfigError, SpinMetroError

ENV_SEED = "SPINMETRO_SEED"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, command: str, seed: int, header, rows, params=None) -> None:
    """CSV dialect: comma-separated, 17 significant digits, '\\n' endings,
    UTF-8, one leading '#' metadata line."""
    meta = f"# spinmetro version={__version__} command={command} seed={seed}"
    if params:
        meta += "".join(f" {k}={_fmt(v)}" for k, v in params.items())
    lines = [meta, ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def _interior(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n + 2)[1:-1]


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class RunConfig:
    s: float
    theta: float
    beta: float
    state: str
    xi: tuple | None
    xi1: float | None
    chi: np.ndarray | None
    shots: int
    trials: int
    seed: int
    out: str | None


_KNOWN_KEYS = {"s", "theta", "beta", "state", "xi", "xi1", "chi",
               "shots", "trials", "seed", "out"}


def _parse_config_text(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


def _take(entries, key, convert, default=None, required=False):
    if key not in entries:
        if required:
            raise ConfigError(f"missing required field {key!r}")
        return default
    value, lineno = entries[key]
    try:
        return convert(value)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"line {lineno}: field {key!r}: {exc}") from exc


def _parse_floats(value: str) -> tuple:
    return tuple(float(part) for part in value.split(","))


def _parse_chi(value: str) -> np.ndarray:
    rows = [[complex(cell.strip()) for cell in row.split(",")]
            for row in value.split(";")]
    return np.array(rows, dtype=complex)


def load_run_config(path, seed_override=None, out_override=None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    entries = _parse_config_text(text)
    state = _take(entries, "state", str, required=True)
    if state not in ("maximal", "maxprob", "xi", "chi"):
        raise ConfigError(f"field 'state': expected maximal|maxprob|xi|chi, got {state!r}")
    cfg = RunConfig(
        s=_take(entries, "s", float, required=True),
        theta=_take(entries, "theta", float, required=True),
        beta=_take(entries, "beta", float, default=0.0),
        state=state,
        xi=_take(entries, "xi", _parse_floats),
        xi1=_take(entries, "xi1", float),
        chi=_take(entries, "chi", _parse_chi),
        shots=_take(entries, "shots", int, default=1000),
        trials=_take(entries, "trials", int, default=100),
        seed=seed_override if seed_override is not None
        else _take(entries, "seed", int, default=_default_seed()),
        out=out_override if out_override is not None else _take(entries, "out", str),
    )
    if cfg.state == "xi" and cfg.xi is None:
        raise ConfigError("state=xi requires the 'xi' field")
    if cfg.state == "maxprob" and cfg.xi1 is None:
        raise ConfigError("state=maxprob requires the 'xi1' field")
    if cfg.state == "chi" and cfg.chi is None:
        raise ConfigError("state=chi requires the 'chi' field")
    return cfg


def build_state(cfg: RunConfig, sys: spin.SpinSystem, axis: spin.AxisSpec) -> entangle.BipartiteState:
    if cfg.state == "maximal":
        return entangle.maximally_entangled(sys.dim)
    if cfg.state == "maxprob":
        xi1 = float(cfg.xi1)
        if not 0.0 < xi1 < 1.0:
            raise ConfigError(f"field 'xi1': need 0 < xi1 < 1, got {xi1}")
        spec = spin.spectrum(sys, axis)
        return entangle.max_prob_state(spec, xi1, math.sqrt(1.0 - xi1 * xi1))
    if cfg.state == "xi":
        if len(cfg.xi) != sys.dim:
            raise ConfigError(f"field 'xi': expected {sys.dim} coefficients, got {len(cfg.xi)}")
        return entangle.bipartite_state(np.diag(cfg.xi).astype(complex))
    if cfg.chi.shape != (sys.dim, sys.dim):
        raise ConfigError(f"field 'chi': expected a {sys.dim}x{sys.dim} matrix, got {cfg.chi.shape}")
    return entangle.bipartite_state(cfg.chi)


def _default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}") from exc


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


# ------------------------------------------------------------- commands


def cmd_fig_dimension(args) -> int:
    seed = _seed_of(args)
    rows = []
    theta, beta = 0.7, 0.3  # success probability is independent of both
    for m in range(2, args.m_max + 1):
        sys = spin.make_spin_system((m - 1) / 2.0)
        rep = protocol.orthogonal_protocol(entangle.maximally_entangled(m),
                                           sys, spin.AxisSpec(theta), beta)
        rows.append((m, 2.0 / m, float((m - 1) ** 2), rep.p_bruteforce))
    write_csv(args.out, "fig-dimension", seed,
              ("m", "p", "mqfi", "p_brute"), rows)
    return 0


def cmd_fig_surface(args) -> int:
    seed = _seed_of(args)
    xi2_sq = args.xi2_sq
    if not 0.0 < xi2_sq < 1.0:
        raise ConfigError(f"--xi2-sq must lie in (0, 1), got {xi2_sq}")
    sys = spin.make_spin_system(1)
    xi2 = math.sqrt(xi2_sq)
    rows = []
    for theta in _interior(0.0, math.pi, args.grid):
        axis = spin.AxisSpec(theta)
        for xi1_sq in _interior(0.0, 1.0 - xi2_sq, args.grid):
            xi1 = math.sqrt(xi1_sq)
            xi3 = math.sqrt(1.0 - xi2_sq - xi1_sq)
            closed = protocol.spin1_closed_forms((xi1, xi2, xi3), theta)
            psi = entangle.bipartite_state(np.diag([xi1, xi2, xi3]).astype(complex))
            rep = protocol.nonorthogonal_protocol(psi, sys, axis, 0.0)
            rows.append((theta, xi1_sq, closed.p, rep.p_bruteforce))
    write_csv(args.out, "fig-surface", seed,
              ("theta", "xi1_sq", "p", "p_brute"), rows, params={"xi2_sq": xi2_sq})
    return 0


def cmd_fig_contour(args) -> int:
    seed = _seed_of(args)
    xi2_sq_values = np.unique(np.append(_interior(0.0, 1.0, args.grid), 1.0 / 3.0))
    rows = []
    for xi2_sq in xi2_sq_values:
        xi2 = math.sqrt(xi2_sq)
        xi13 = math.sqrt((1.0 - xi2_sq) / 2.0)
        for theta in _interior(0.0, math.pi, args.grid):
            closed = protocol.spin1_closed_forms((xi13, xi2, xi13), theta)
            rows.append((xi2_sq, theta, closed.p_total))
    write_csv(args.out, "fig-contour", seed,
              ("xi2_sq", "theta", "p_total"), rows)
    return 0


def cmd_fig_appendix(args) -> int:
    seed = _seed_of(args)
    rows = []
    for xi3 in _interior(0.0, 1.0, args.grid):
        xi1 = math.sqrt(1.0 - xi3 * xi3)
        aligned = protocol.appendix_special_cases((xi1, 0.0, xi3), 0.0)
        equator = protocol.appendix_special_cases((0.0, xi1, xi3), math.pi / 2.0)
        rows.append((xi3, aligned.p_closed, aligned.p_bruteforce,
                     equator.p_closed, equator.p_bruteforce))
    write_csv(args.out, "fig-appendix", seed,
              ("xi3", "p_xi2_zero", "p_xi2_zero_brute",
               "p_xi1_zero", "p_xi1_zero_brute"), rows)
    return 0


def _report_json(cfg: RunConfig, rep: protocol.ProtocolReport) -> dict:
    return {
        "command": "protocol",
        "s": cfg.s,
        "theta": cfg.theta,
        "beta": cfg.beta,
        "state": cfg.state,
        "seed": cfg.seed,
        "branch": rep.branch,
        "p_closed": rep.p_closed,
        "p_bruteforce": rep.p_bruteforce,
        "qfi_achieved": rep.qfi_achieved,
        "p_total": rep.p_total,
        "p_total_bruteforce": rep.p_total_bruteforce,
    }


def cmd_protocol(args) -> int:
    cfg = load_run_config(args.config, seed_override=args.seed, out_override=args.out)
    sys = spin.make_spin_system(cfg.s)
    axis = spin.AxisSpec(cfg.theta)
    psi = build_state(cfg, sys, axis)
    rep = protocol.run_protocol(psi, sys, axis, cfg.beta)
    payload = json.dumps(_report_json(cfg, rep), sort_keys=True, indent=2)
    print(payload)
    if cfg.out:
        Path(cfg.out).write_bytes((payload + "\n").encode("utf-8"))
    return 0


def cmd_estimate(args) -> int:
    cfg = load_run_config(args.config, seed_override=args.seed, out_override=args.out)
    sys = spin.make_spin_system(cfg.s)
    axis = spin.AxisSpec(cfg.theta)
    psi = build_state(cfg, sys, axis)
    est_cfg = estimator.EstimationConfig(beta_true=cfg.beta, shots=cfg.shots,
                                         trials=cfg.trials, seed=cfg.seed)
    result = estimator.run_estimation(est_cfg, psi, sys, axis)
    out = cfg.out or "estimate.csv"
    write_csv(out, "estimate", cfg.seed, ("trial", "beta_hat"),
              [(t, b) for t, b in enumerate(result.beta_hats)],
              params={"beta_true": cfg.beta, "shots": cfg.shots, "trials": cfg.trials})
    summary = {
        "command": "estimate",
        "seed": cfg.seed,
        "beta_true": cfg.beta,
        "shots": cfg.shots,
        "trials": cfg.trials,
        "fisher": result.fisher,
        "crb": result.crb,
        "empirical_variance": result.empirical_variance,
        "normalized_variance": result.normalized_variance,
        "mean_beta_hat": result.mean_beta,
        "kept_fraction": result.kept_fraction,
        "total_attempts": result.total_attempts,
        "total_kept": result.total_kept,
        "csv": str(out),
    }
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def cmd_validate(args) -> int:
    seed = _seed_of(args)
    results = validation.run_all(seed)
    failed = 0
    for res in results:
        tag = "ok " if res.passed else "FAIL"
        print(f"{tag} {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


# --------------------------------------------------------------- parser


def _add_common(sub, out_default: str):
    sub.add_argument("--seed", type=int, default=None,
                     help=f"RNG seed (default: ${ENV_SEED} or 0)")
    sub.add_argument("--out", default=out_default, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmetro",
        description="Entanglement-assisted phase estimation with spin-s probes.",
        epilog="Config files use flat 'key = value' lines; angles in radians, "
               "spin s as a half-integer, seeds as unsigned integers.")
    parser.add_argument("--version", action="version", version=f"spinmetro {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("fig-dimension",
                          help="success probability 2/m and peak QFI (m-1)^2 vs dimension")
    sub.add_argument("--m-max", type=int, default=12)
    _add_common(sub, "fig-dimension.csv")
    sub.set_defaults(func=cmd_fig_dimension)

    sub = subs.add_parser("fig-surface",
                          help="spin-1 success probability over (theta, xi1^2) at fixed xi2^2")
    sub.add_argument("--xi2-sq", type=float, required=True, dest="xi2_sq")
    sub.add_argument("--grid", type=int, default=200)
    _add_common(sub, "fig-surface.csv")
    sub.set_defaults(func=cmd_fig_surface)

    sub = subs.add_parser("fig-contour",
                          help="combined two-outcome success probability over (xi2^2, theta)")
    sub.add_argument("--grid", type=int, default=200)
    _add_common(sub, "fig-contour.csv")
    sub.set_defaults(func=cmd_fig_contour)

    sub = subs.add_parser("fig-appendix",
                          help="degenerate-regime success probabilities vs xi3")
    sub.add_argument("--grid", type=int, default=200)
    _add_common(sub, "fig-appendix.csv")
    sub.set_defaults(func=cmd_fig_appendix)

    sub = subs.add_parser("protocol", help="run one protocol from a config file")
    sub.add_argument("--config", required=True)
    _add_common(sub, None)
    sub.set_defaults(func=cmd_protocol)

    sub = subs.add_parser("estimate", help="Monte Carlo estimation from a config file")
    sub.add_argument("--config", required=True)
    _add_common(sub, None)
    sub.set_defaults(func=cmd_estimate)

    sub = subs.add_parser("validate", help="run the structural invariant suite")
    sub.add_argument("--seed", type=int, default=None)
    sub.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except SpinMetroError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
