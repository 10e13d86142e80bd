"""Command-line front end.

Usage::

    dynframes gen --family polynomial --param 2 --count 5
    dynframes carleson --family geometric --param 0.5 --count 12 --format json
    dynframes bounds --family geometric --param 0.5 --count 8 [--order N] [--klist 2,4,8]
    dynframes tensor --a geometric:0.5:8 --b geometric:0.5:8 --klist 2,4,6,8 --out t5.csv
    dynframes interp --family geometric --param 0.5 --count 6 --seed 1 [--trials 5]
    dynframes reconstruct --family geometric --param 0.5 --count 6 --seed 1
    dynframes report --family geometric --param 0.5 --count 12 --klist 2,4,8,12
    dynframes --config exp.json

A config file is a JSON object with the same keys as the long flags
(``klist`` may be a list); flags given on the command line win.

Exit codes: 0 success, 2 bad configuration, 3 computation failed,
4 output could not be written.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .disc import carleson_infimum
from .errors import DynFramesError, InvalidSpec
from .frames import (FrameOperatorMatrix, IteratedSystem, analyze, build_synthesis,
                     frame_bounds, frame_operator_closed_form, frame_operator_truncated,
                     reconstruct, select_order)
from .hardy import min_norm_interpolant
from .report import FORMATS, IoError, ReportTable, emit
from .sequences import FAMILIES, SequenceSpec, admissibility_check, generate, ratio_condition_constant
from .tensor import TREND_COLUMNS, frame_trend_experiment, tensor_carleson_infimum

COMMANDS = ("gen", "carleson", "bounds", "tensor", "interp", "reconstruct", "report")
RANDOMIZED = ("interp", "reconstruct")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_IO = 0, 2, 3, 4


class ConfigError(DynFramesError, ValueError):
    pass


class ComputationError(DynFramesError, RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    spec: Optional[SequenceSpec] = None
    spec_a: Optional[SequenceSpec] = None
    spec_b: Optional[SequenceSpec] = None
    k_list: Optional[list] = None
    order: Optional[int] = None
    trials: int = 1
    tol: float = 1e-10
    seed: Optional[int] = None
    out: Optional[str] = None
    format: str = "csv"
    stamp: bool = False

    def echo(self) -> dict:
        def spec_dict(s):
            if s is None:
                return None
            d = {"family": s.family, "param": s.param, "count": s.count}
            if s.family == "geometric_with_phases":
                d["phase"] = s.phase
            if s.family == "explicit":
                d["points"] = [[p.real, p.imag] for p in s.points]
            return d
        return {
            "command": self.command,
            "spec": spec_dict(self.spec),
            "a": spec_dict(self.spec_a),
            "b": spec_dict(self.spec_b),
            "klist": self.k_list,
            "order": self.order,
            "trials": self.trials,
            "tol": self.tol,
            "seed": self.seed,
            "format": self.format,
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynframes", argument_default=argparse.SUPPRESS,
                description="Dynamical-sampling frames, Carleson statistics and interpolation.")
    p.add_argument("command", nargs="?", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--param", type=float, help="geometric base c or polynomial power p")
    p.add_argument("--phase", type=float, help="phase step for geometric_with_phases")
    p.add_argument("--count", type=int, help="number of points K")
    p.add_argument("--points", help="explicit points, comma separated (Python complex syntax)")
    p.add_argument("--a", help="first tensor factor as family:param:count")
    p.add_argument("--b", help="second tensor factor as family:param:count")
    p.add_argument("--klist", help="comma separated truncation sizes")
    p.add_argument("--order", type=int, help="iteration order N (truncated frame operator)")
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--stamp", action="store_true",
                   help="record the wall-clock time in the provenance (breaks byte-identity)")
    p.add_argument("--version", action="version", version=f"dynframes {__version__}")
    return p


def _spec(family, param, count, phase=None, points=None, flag="--family") -> SequenceSpec:
    try:
        if family == "explicit":
            if points is None:
                raise ConfigError(f"{flag}: explicit family needs --points")
            pts = [complex(str(s).strip().replace(" ", "")) if not isinstance(s, (list, tuple))
                   else complex(*s) for s in points]
            return SequenceSpec("explicit", len(pts) if count is None else int(count),
                                points=tuple(pts))
        if count is None:
            raise ConfigError(f"{flag}: --count is required")
        return SequenceSpec(family, int(count), None if param is None else float(param),
                            phase=0.0 if phase is None else float(phase))
    except InvalidSpec as exc:
        raise ConfigError(f"{flag}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from None


def _shorthand(text, flag) -> SequenceSpec:
    if isinstance(text, dict):
        return _spec(text.get("family"), text.get("param"), text.get("count"),
                     text.get("phase"), text.get("points"), flag)
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"{flag}: expected family:param:count[:phase], got {text!r}")
    try:
        param, count = float(parts[1]), int(parts[2])
        phase = float(parts[3]) if len(parts) == 4 else None
    except ValueError:
        raise ConfigError(f"{flag}: cannot parse {text!r}") from None
    if parts[0] not in FAMILIES or parts[0] == "explicit":
        raise ConfigError(f"{flag}: unknown family {parts[0]!r}")
    return _spec(parts[0], param, count, phase, None, flag)


def _klist(value) -> list:
    try:
        if isinstance(value, (list, tuple)):
            ks = [int(v) for v in value]
        else:
            ks = [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--klist: cannot parse {value!r}") from None
    if not ks or min(ks) < 1:
        raise ConfigError("--klist: sizes must be positive integers")
    return ks


def parse_config(argv) -> ExperimentConfig:
    """Turn command-line arguments (and an optional ``--config`` file) into a config."""
    ns = vars(_build_parser().parse_args(list(argv)))
    values = {}
    if "config" in ns:
        try:
            with open(ns["config"], encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {ns['config']}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--config: invalid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("--config: file must hold a JSON object")
        known = {a.dest for a in _build_parser()._actions} - {"help", "config", "version"}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"--config: unknown keys {sorted(unknown)}")
        values.update(loaded)
    values.update({k: v for k, v in ns.items() if k != "config"})

    command = values.get("command")
    if command is None:
        raise ConfigError("no command given (expected one of: " + ", ".join(COMMANDS) + ")")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    fmt = values.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"--format: expected one of {FORMATS}, got {fmt!r}")
    tol = float(values.get("tol", 1e-10))
    if not tol > 0:
        raise ConfigError("--tol: must be positive")
    trials = int(values.get("trials", 1))
    if trials < 1:
        raise ConfigError("--trials: must be positive")
    seed = values.get("seed")
    if command in RANDOMIZED and seed is None:
        raise ConfigError(f"--seed: command {command!r} is randomized and requires a seed")
    order = values.get("order")
    if order is not None and int(order) < 0:
        raise ConfigError("--order: must be >= 0")

    cfg = ExperimentConfig(command, tol=tol, trials=trials,
                           seed=None if seed is None else int(seed),
                           out=values.get("out"), format=fmt,
                           order=None if order is None else int(order),
                           stamp=bool(values.get("stamp", False)))
    if "klist" in values:
        cfg.k_list = _klist(values["klist"])

    if command == "tensor" or (command == "carleson" and ("a" in values or "b" in values)):
        if "a" not in values or "b" not in values:
            raise ConfigError("--a/--b: both tensor factors are required")
        cfg.spec_a = _shorthand(values["a"], "--a")
        cfg.spec_b = _shorthand(values["b"], "--b")
        if command == "tensor" and cfg.k_list is None:
            cfg.k_list = [min(cfg.spec_a.count, cfg.spec_b.count)]
        if cfg.k_list and max(cfg.k_list) > min(cfg.spec_a.count, cfg.spec_b.count):
            raise ConfigError("--klist: sizes exceed the factor counts")
    else:
        family = values.get("family")
        if family is None:
            raise ConfigError("--family: required for command " + repr(command))
        points = values.get("points")
        if isinstance(points, str):
            points = [s for s in points.split(",") if s.strip()]
        cfg.spec = _spec(family, values.get("param"), values.get("count"),
                         values.get("phase"), points, "--param" if family != "explicit"
                         else "--points")
        if cfg.k_list and max(cfg.k_list) > cfg.spec.count:
            raise ConfigError("--klist: sizes exceed --count")
    return cfg


# -- command implementations -------------------------------------------------


def _cmd_gen(cfg):
    seq = generate(cfg.spec)
    t = ReportTable(["k", "re", "im", "modulus", "weight"])
    for k, (z, w) in enumerate(zip(seq.points, seq.weights)):
        t.add_row([k, float(z.real), float(z.imag), float(abs(z)), float(w)])
    return t


def _cmd_carleson(cfg):
    if cfg.spec_a is not None:
        a, b = generate(cfg.spec_a), generate(cfg.spec_b)
        value, (n, m) = tensor_carleson_infimum(a, b)
        t = ReportTable(["K_A", "K_B", "carleson_inf", "argmin_n", "argmin_m"])
        t.add_row([len(a), len(b), value, n, m])
        return t
    seq = generate(cfg.spec)
    t = ReportTable(["K", "carleson_inf", "argmin"])
    for K in cfg.k_list or [len(seq)]:
        value, n = carleson_infimum(seq.truncate(K))
        t.add_row([K, value, n])
    return t


def _cmd_bounds(cfg):
    seq = generate(cfg.spec)
    t = ReportTable(["K", "N", "lower_A", "upper_B", "method", "residual"])
    for K in cfg.k_list or [len(seq)]:
        sub = seq.truncate(K)
        if cfg.order is None:
            S = frame_operator_closed_form(sub)
        else:
            S = frame_operator_truncated(build_synthesis(IteratedSystem(sub, cfg.order)))
        est = frame_bounds(S, cfg.tol)
        t.add_row([K, cfg.order, est.lower_A, est.upper_B, est.method, est.residual])
    return t


def _cmd_tensor(cfg):
    rows = frame_trend_experiment(cfg.spec_a, cfg.spec_b, cfg.k_list, cfg.tol)
    t = ReportTable(list(TREND_COLUMNS))
    for row in rows:
        if row.collision:
            print(f"warning: K={row.K}: {row.collision}; carleson_trunc left empty",
                  file=sys.stderr)
        t.add_row(row.cells())
    return t


def _cmd_interp(cfg):
    seq = generate(cfg.spec)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    t = ReportTable(["trial", "norm", "residual", "gram_condition", "degree"])
    for trial in range(cfg.trials):
        target = rng.standard_normal(len(seq)) + 1j * rng.standard_normal(len(seq))
        target /= np.linalg.norm(target)
        res = min_norm_interpolant(seq, target, cfg.tol)
        t.add_row([trial, math.sqrt(res.norm_sq), res.residual, res.gram_condition, res.degree])
    return t


def _cmd_reconstruct(cfg):
    seq = generate(cfg.spec)
    N = select_order(seq, cfg.tol) if cfg.order is None else cfg.order
    system = IteratedSystem(seq, N)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    t = ReportTable(["trial", "K", "N", "rel_error", "iterations"])
    for trial in range(cfg.trials):
        x = rng.standard_normal(len(seq)) + 1j * rng.standard_normal(len(seq))
        x_hat, iters = reconstruct(system, analyze(system, x), cfg.tol)
        err = float(np.linalg.norm(x_hat - x) / np.linalg.norm(x))
        t.add_row([trial, len(seq), N, err, iters])
    return t


def _cmd_report(cfg):
    seq = generate(cfg.spec)
    t = ReportTable(["K", "carleson_inf", "lower_A", "upper_B", "ratio_c_hat", "weight_sum",
                     "weight_tail"])
    for K in cfg.k_list or [len(seq)]:
        sub = seq.truncate(K)
        value, _ = carleson_infimum(sub)
        est = frame_bounds(frame_operator_closed_form(sub), cfg.tol)
        c_hat = ratio_condition_constant(sub).c_hat if K >= 2 else None
        adm = admissibility_check(cfg.spec, K)
        t.add_row([K, value, est.lower_A, est.upper_B, c_hat, adm.partial_sum, adm.tail_bound])
    return t


_DISPATCH = {
    "gen": _cmd_gen,
    "carleson": _cmd_carleson,
    "bounds": _cmd_bounds,
    "tensor": _cmd_tensor,
    "interp": _cmd_interp,
    "reconstruct": _cmd_reconstruct,
    "report": _cmd_report,
}


def run(cfg: ExperimentConfig) -> ReportTable:
    """Execute ``cfg`` and write the table to ``cfg.out`` (or stdout)."""
    try:
        table = _DISPATCH[cfg.command](cfg)
    except DynFramesError as exc:
        raise ComputationError(f"{cfg.command}: {exc}") from exc
    table.provenance = {"library": "dynframes", "version": __version__, "config": cfg.echo()}
    if cfg.stamp:
        from datetime import datetime, timezone
        table.provenance["generated"] = datetime.now(timezone.utc).isoformat()
    text = emit(table, cfg.out, cfg.format)
    if cfg.out is None:
        sys.stdout.write(text)
    return table


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        run(parse_config(argv))
    except ConfigError as exc:
        print(f"dynframes: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        print(f"dynframes: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except IoError as exc:
        print(f"dynframes: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
