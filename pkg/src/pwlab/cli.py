"""``pwlab`` command line: simulate / estimate / invert / kernel / bell / benchmark.

Every subcommand accepts ``--config FILE.json``; values there sit beneath the
flags given on the command line.  The effective configuration is written into
each output so a run can be repeated from its own file.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bell import build_table
from .benchmark import PRESETS, run_preset
from .curves import CurveSpec, kernel_array
from .errors import NumericalError, UsageError
from .estimator import EstimatorConfig, NSelector, estimate, select_n
from .inversion import builtin_oracle, invert
from .mixture import MixingLaw, MixtureParams, read_sample, sample_mixture, write_sample

# not part of the reproducibility record
_VOLATILE = {"out", "config", "threads"}

OPTIONS = {
    "simulate": {
        "mu": (float, 0.0, "drift parameter"),
        "sigma": (float, 1.0, "scale parameter (> 0)"),
        "mixing": (str, "exp:1", "mixing law: exp:RATE or gamma:SHAPE:RATE"),
        "n": (int, None, "sample size"),
        "seed": (int, 0, "random seed"),
    },
    "estimate": {
        "samples": (str, None, "sample file, one value per line"),
        "mu": (float, 0.0, "drift parameter"),
        "sigma": (float, 1.0, "scale parameter (> 0)"),
        "N": (int, None, "number of terms; omit to use --select"),
        "select": (str, None, "choose N from n: subexponential or heavy"),
        "A": (float, 2.0, "moment growth constant for --select"),
        "C": (float, 2.0, "variance growth constant for --select"),
        "b": (float, 2.0, "tail exponent for --select heavy"),
        "rho": (float, 1.0, "bias order for --select"),
        "x_grid": (str, "0.2:4:50", "evaluation grid start:stop:count"),
    },
    "invert": {
        "oracle": (str, "exp:1", "transform: exp:LAMBDA or gamma:ALPHA:BETA"),
        "curve": (str, "real", "curve: real or mixture"),
        "mu": (float, 0.0, "mixture curve drift"),
        "sigma": (float, 1.0, "mixture curve scale"),
        "N": (int, None, "number of terms"),
        "x_grid": (str, None, "evaluation grid start:stop:count"),
    },
    "kernel": {
        "curve": (str, "real", "curve: real or mixture"),
        "mu": (float, 0.0, "mixture curve drift"),
        "sigma": (float, 1.0, "mixture curve scale"),
        "N": (int, None, "number of terms"),
        "x": (float, 1.0, "point x > 0"),
        "grid": (str, "0.01:3:300", "t grid start:stop:count"),
    },
    "bell": {
        "n": (int, None, "largest N in the table"),
    },
    "benchmark": {
        "preset": (str, "figure1", "preset name"),
        "replicates": (int, 20, "Monte Carlo replicates per cell"),
        "seed": (int, 0, "base seed; replicate r uses (seed, r)"),
        "n_list": (str, None, "override sample sizes, comma separated"),
        "N_list": (str, None, "override term counts, comma separated"),
        "x_grid": (str, None, "override grid start:stop:count"),
    },
}


_REQUIRED = {
    "simulate": ["n"], "estimate": ["samples"], "invert": ["N", "x_grid"],
    "kernel": ["N"], "bell": ["n"], "benchmark": [],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pwlab", description="Generalized Post-Widder inversion toolkit")
    parser.add_argument("--version", action="version", version=f"pwlab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    parser.subcommand_parsers = {}
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        parser.subcommand_parsers[name] = p
        for key, (typ, default, help_) in opts.items():
            flag = "--" + key.replace("_", "-")
            if key in _REQUIRED[name]:
                suffix = " (required)"
            else:
                suffix = "" if default is None else f" (default: {default})"
            p.add_argument(flag, dest=key, type=typ, help=help_ + suffix)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--config", help="JSON file of option values, overridden by flags")
        p.add_argument("--threads", type=int, help="worker threads (env PWLAB_THREADS; default 1)")
    return parser



def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` with inclusive endpoints."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} must look like start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} must look like start:stop:count") from None
    if count < 1:
        raise UsageError(f"grid {text!r} needs count >= 1")
    if count == 1:
        return np.array([start])
    return np.linspace(start, stop, count)


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    if text.startswith("#"):
        # CSV / sample outputs carry their metadata on the first line
        text = text.splitlines()[0][1:]
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    # a bare option map, an output metadata block, or a whole estimate JSON
    if "meta" in data and isinstance(data["meta"], dict):
        data = data["meta"]
    return data.get("config", data)


def effective_config(subcommand: str, flags: dict) -> dict:
    opts = OPTIONS[subcommand]
    eff = {k: d for k, (_, d, _) in opts.items()}
    if "config" in flags:
        for k, v in _load_config(flags["config"]).items():
            if k == "subcommand":
                if v != subcommand:
                    raise UsageError(f"config file is for {v!r}, not {subcommand!r}")
                continue
            if k in _VOLATILE:
                continue
            if k not in opts:
                raise UsageError(f"unknown option {k!r} in config file")
            typ = opts[k][0]
            try:
                eff[k] = None if v is None else typ(v)
            except (TypeError, ValueError):
                raise UsageError(f"config option {k!r}: cannot convert {v!r}") from None
    eff.update({k: v for k, v in flags.items() if k in opts})
    missing = [k for k in _REQUIRED[subcommand] if eff.get(k) is None]
    if subcommand == "estimate" and eff.get("N") is None and eff.get("select") is None:
        missing.append("N")
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return eff


def _meta(subcommand: str, eff: dict) -> dict:
    return {"tool": "pwlab", "version": __version__, "subcommand": subcommand,
            "config": {k: v for k, v in eff.items() if k not in _VOLATILE}}


def _write(out, text: str):
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _csv(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _curve(eff) -> CurveSpec:
    if eff["curve"] == "real":
        return CurveSpec.real_axis()
    if eff["curve"] == "mixture":
        return CurveSpec.mixture(eff["mu"], eff["sigma"])
    raise UsageError(f"unknown curve {eff['curve']!r}; use real or mixture")


def _oracle(text):
    kind, *rest = str(text).split(":")
    try:
        return builtin_oracle(kind, *[float(v) for v in rest])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad oracle {text!r}: {exc}") from None


def cmd_simulate(eff, out, threads):
    params = MixtureParams(eff["mu"], eff["sigma"])
    sample = sample_mixture(params, MixingLaw.parse(eff["mixing"]), eff["n"], eff["seed"])
    meta = _meta("simulate", eff)
    if out is None:
        sys.stdout.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        sys.stdout.write("".join(repr(float(v)) + "\n" for v in sample.values))
    else:
        write_sample(sample, out, meta=meta)


def cmd_estimate(eff, out, threads):
    sample = read_sample(eff["samples"])
    params = MixtureParams(eff["mu"], eff["sigma"])
    if eff.get("N") is not None:
        N = eff["N"]
    else:
        sel = NSelector(eff["select"], A=eff["A"], C=eff["C"], b=eff["b"], rho=eff["rho"])
        N = select_n(sel, len(sample))
    config = EstimatorConfig(params, N, tuple(parse_grid(eff["x_grid"])))
    res = estimate(sample, config, threads=threads)
    meta = _meta("estimate", eff)
    res.meta.update(meta)
    if out is not None and str(out).endswith(".csv"):
        meta["N"], meta["n"] = res.N, res.n
        rows = ([_fmt(x), _fmt(p.real), _fmt(p.imag)] for x, p in zip(res.x, res.p_hat))
        _write(out, _csv(meta, ["x", "p_real", "p_imag"], rows))
    else:
        _write(out, json.dumps(res.to_dict(), indent=1, sort_keys=True) + "\n")


def cmd_invert(eff, out, threads):
    oracle, curve = _oracle(eff["oracle"]), _curve(eff)
    rows = []
    for x in parse_grid(eff["x_grid"]):
        v = invert(oracle, curve, eff["N"], float(x)).value
        rows.append([_fmt(x), _fmt(v.real), _fmt(v.imag)])
    _write(out, _csv(_meta("invert", eff), ["x", "re_p", "im_p"], rows))


def cmd_kernel(eff, out, threads):
    curve = _curve(eff)
    t = parse_grid(eff["grid"])
    if np.any(t <= 0):
        raise UsageError("kernel grid must be strictly positive")
    k = kernel_array(curve, eff["N"], t, eff["x"])
    rows = ([_fmt(a), _fmt(b.real), _fmt(b.imag), _fmt(abs(b))] for a, b in zip(t, k))
    _write(out, _csv(_meta("kernel", eff), ["t", "re_k", "im_k", "abs_k"], rows))


def cmd_bell(eff, out, threads):
    table = build_table(eff["n"])
    rows = []
    for N in range(1, table.n_max + 1):
        for k in range(1, N + 1):
            lf = table[N, k]
            rows.append([str(N), str(k), _fmt(lf), _fmt(math.exp(lf)) if lf < 709.78 else ""])
    _write(out, _csv(_meta("bell", eff), ["N", "k", "log_f", "f"], rows))


def cmd_benchmark(eff, out, threads):
    if eff["preset"] not in PRESETS:
        raise UsageError(f"unknown preset {eff['preset']!r}; choose from {sorted(PRESETS)}")
    overrides = {}
    if eff.get("n_list"):
        overrides["n_list"] = _int_list(eff["n_list"])
    if eff.get("N_list"):
        overrides["N_list"] = _int_list(eff["N_list"])
    if eff.get("x_grid"):
        overrides["x_grid"] = tuple(parse_grid(eff["x_grid"]))
    report = run_preset(eff["preset"], eff["replicates"], eff["seed"], threads=threads, **overrides)
    cols = ["n", "N", "x", "p_true", "mean_real", "rmse", "variance", "agg_rmse"]
    rows = ([_fmt(r[c]) for c in cols] for r in report.rows())
    _write(out, _csv(_meta("benchmark", eff), cols, rows))


COMMANDS = {
    "simulate": cmd_simulate, "estimate": cmd_estimate, "invert": cmd_invert,
    "kernel": cmd_kernel, "bell": cmd_bell, "benchmark": cmd_benchmark,
}


def _threads(flags) -> int:
    if "threads" in flags:
        return max(1, int(flags["threads"]))
    env = os.environ.get("PWLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"PWLAB_THREADS must be an integer, got {env!r}") from None
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = vars(ns)
    sub = flags.pop("subcommand")
    try:
        eff = effective_config(sub, flags)
        COMMANDS[sub](eff, flags.get("out"), _threads(flags))
    except (NumericalError, OverflowError) as exc:
        print(f"pwlab {sub}: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        parser.subcommand_parsers[sub].print_usage(sys.stderr)
        print(f"pwlab {sub}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
