"""Command-line front end: ``qgh <subcommand> [flags]``.

Outputs are CSV with ``#`` comment headers echoing the full configuration.
Exit status: 0 success, 2 configuration or data error, 1 numeric error
(incomplete window, divergent tail).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dirac import (banded_upper_bound, lip_seminorm, random_element, rd_scan,
                    truncated_seminorm)
from .fusion import FusionError, WindowError, build_group_dual, build_su2_like, \
    load_fusion_file, validate_axioms
from .length import LengthFunction, fit_growth_order, folner_ratio_curve, shell_profile, \
    word_length
from .metrics import REPORT_COLUMNS, convergence_study
from .multipliers import folner_multiplier

ALGEBRAS = ("zdual", "z2", "z3", "su2", "so3", "onplus")
COMMANDS = ("algebra", "growth", "folner", "rd", "lip", "multiplier", "converge")


class ConfigError(ValueError):
    """Bad flag value; the message names the field."""


def _levels(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lambda: expected comma-separated integers, got {text!r}")
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("--lambda: levels must be nonnegative")
    return sorted(vals)


def _label(text: str):
    try:
        v = json.loads(text)
    except json.JSONDecodeError:
        return text
    return tuple(v) if isinstance(v, list) else v


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--algebra", choices=ALGEBRAS, help="builtin fusion algebra")
    g.add_argument("--file", type=Path, help="fusion data file (JSON), instead of --algebra")
    g.add_argument("--N", type=int, help="N for --algebra onplus")
    g.add_argument("--cap", type=int, help="enumeration radius/level (derived when omitted)")
    g.add_argument("--generators", help="semicolon-separated generator labels (JSON), "
                                        "default: all labels at level 1")
    g.add_argument("--length", choices=("word", "file"), default="word")
    g.add_argument("--length-file", type=Path, help="CSV of label,value for --length file")
    g.add_argument("--k", type=int, default=1, help="commutator order")
    g.add_argument("--s", type=float, default=2.0, help="rapid-decay exponent")
    g.add_argument("--lambda", dest="levels", type=_levels, default=[], help="e.g. 5,10,20")
    g.add_argument("--samples", type=int, default=100)
    g.add_argument("--support", type=int, help="support radius of sampled elements")
    g.add_argument("--nmax", type=int, help="largest shell for growth")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, help="output directory (stdout when omitted)")
    g.add_argument("--summary", action="store_true", help="also write summary.json")
    g.add_argument("--timing", action="store_true", help="record runtimes (breaks byte-identity)")
    p = argparse.ArgumentParser(prog="qgh", description="Quantum Gromov-Hausdorff desk experiments")
    p.add_argument("--version", action="version", version=f"qgh {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")
    helps = {
        "algebra": "build and validate a fusion algebra",
        "growth": "shell sums and growth-order fit",
        "folner": "Følner ratios per level",
        "rd": "rapid-decay scan",
        "lip": "Lip-seminorm sweep of a seeded element",
        "multiplier": "Følner multipliers per level",
        "converge": "per-level convergence report",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def _needed_cap(a) -> int:
    """Window the subcommand needs, in units of the generator level."""
    lv = a.levels or [0]
    top = max(lv)
    sup = a.support
    if a.command == "growth":
        return a.nmax
    if a.command == "folner":
        return top + 2
    if a.command == "rd":
        return 2 * (sup or 10)
    if a.command == "lip":
        return 2 * (sup or 3) + top
    if a.command == "multiplier":
        return 2 * top
    if a.command == "converge":
        return max(2 * (sup or 2 * top + 1), 2 * top, 4)
    return 10


def _build(a):
    if (a.algebra is None) == (a.file is None):
        raise ConfigError("algebra: give exactly one of --algebra or --file")
    if a.command == "growth" and a.nmax is None:
        raise ConfigError("nmax: --nmax is required for growth")
    if a.k < 1:
        raise ConfigError("k: must be a positive integer")
    if a.samples < 0:
        raise ConfigError("samples: must be nonnegative")
    if a.command in ("folner", "multiplier", "converge", "lip") and not a.levels:
        if a.command != "converge":
            raise ConfigError(f"lambda: --lambda is required for {a.command}")
    cap = a.cap if a.cap is not None else _needed_cap(a)
    a.cap = cap
    if a.file is not None:
        A = load_fusion_file(a.file)
    elif a.algebra == "zdual":
        A = build_group_dual(1, cap)
    elif a.algebra == "z2":
        A = build_group_dual(2, cap)
    elif a.algebra == "z3":
        A = build_group_dual(3, cap)
    elif a.algebra == "onplus":
        if a.N is None or a.N < 2:
            raise ConfigError("N: --algebra onplus needs --N >= 2")
        A = build_su2_like("ON_plus", cap, N=a.N)
    else:
        A = build_su2_like(a.algebra.upper(), cap)
    if a.length == "file":
        if a.length_file is None:
            raise ConfigError("length-file: required with --length file")
        vals = {}
        with open(a.length_file, newline="") as fh:
            for row in csv.reader(r for r in fh if not r.startswith("#")):
                if row:
                    vals[_label(row[0])] = float(row[1])
        try:
            ell = LengthFunction.from_values(A, vals)
        except KeyError as e:
            raise ConfigError(f"length-file: unknown label {e}") from None
    else:
        if a.generators:
            try:
                gens = [A.index(_label(t.strip())) for t in a.generators.split(";")]
            except KeyError as e:
                raise ConfigError(f"generators: unknown label {e}") from None
        else:
            gens = [i for i in range(A.n) if A.level[i] == 1] if A.level is not None else []
            if not gens:
                raise ConfigError("generators: no level-1 labels; pass --generators")
        try:
            ell = word_length(A, gens)
        except ValueError as e:
            raise ConfigError(f"generators: {e}") from None
    return A, ell


def _header(a, A) -> list[str]:
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(a).items()
           if k not in ("summary",)}
    cfg["algebra_name"] = A.name
    cfg["labels"] = A.n
    lines = [f"# qgh {__version__} {a.command}"]
    lines += [f"# {k}={json.dumps(cfg[k])}" for k in sorted(cfg)]
    return lines


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if isinstance(v, tuple):
        return json.dumps(list(v))
    return str(v)


class _Sink:
    def __init__(self, a, A):
        self.out = a.out
        self.header = _header(a, A)
        self.files: list[str] = []
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, columns, rows):
        buf = io.StringIO()
        buf.write("\n".join(self.header) + "\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        if self.out is None:
            sys.stdout.write(f"# file: {name}\n" + buf.getvalue())
        else:
            (self.out / name).write_text(buf.getvalue())
            self.files.append(name)


def _cmd_algebra(a, A, ell, sink):
    rep = validate_axioms(A)
    sink.write("axioms.csv", ("axiom", "labels", "lhs", "rhs"),
               [(v.axiom, json.dumps([_fmt(x) for x in v.labels]), v.lhs, v.rhs)
                for v in rep.violations])
    if not rep.ok:
        raise FusionError(f"{len(rep.violations)} axiom violation(s), first: {rep.violations[0]}")
    return {"checked_pairs": rep.checked_pairs, "violations": 0,
            "max_dim_defect": rep.max_dim_defect}


def _cmd_growth(a, A, ell, sink):
    T = shell_profile(A, ell, a.nmax)
    sink.write("growth.csv", ("n", "shell_sum", "cumulative"), T.rows())
    try:
        fit = fit_growth_order(T, 2, a.nmax)
        return {"s_hat": fit.s, "c1": fit.c1, "c2": fit.c2, "strong": fit.strong}
    except ValueError as e:
        return {"fit": str(e)}


def _cmd_folner(a, A, ell, sink):
    gens = list(ell.generators) or [i for i in range(A.n) if A.level[i] == 1]
    if not gens:
        raise ConfigError("generators: Følner boundary needs generators; pass --generators")
    curve = folner_ratio_curve(A, ell, gens, a.levels)
    sink.write("folner.csv", ("Lambda", "boundary_weight", "bulk_weight", "ratio"), curve.rows())
    return {"monotone": curve.monotone}


def _cmd_rd(a, A, ell, sink):
    sup = a.support if a.support is not None else 10
    r = rd_scan(A, ell, a.s, a.samples, sup, a.seed)
    sink.write("rd.csv", ("s", "samples", "support", "worst_ratio", "C_window", "C_theory",
                          "violations"),
               [(a.s, r.samples, sup, r.worst_ratio, r.C_window, r.C_theory, r.violations)])
    return r._asdict()


def _cmd_lip(a, A, ell, sink):
    sup = a.support if a.support is not None else 3
    f = random_element(A, ell, np.random.default_rng(a.seed), sup, self_adjoint=True)
    sink.write("element.csv", ("label", "re", "im"),
               [(A.keys[i], float(f(i).real), float(f(i).imag)) for i in f.support])
    rows = []
    for lam in a.levels:
        w = lip_seminorm(A, ell, f, a.k, lam, check=False).value
        t = truncated_seminorm(A, ell, f, a.k, lam).value
        b = banded_upper_bound(A, ell, f, a.k, lam) if ell.integer_valued else math.nan
        rows.append((lam, w, t, b))
    sink.write("seminorm.csv", ("Lambda", "window", "truncated", "banded_upper"), rows)
    return {"support": sup}


def _cmd_multiplier(a, A, ell, sink):
    out = {}
    for lam in a.levels:
        phi = folner_multiplier(A, ell, lam)
        sink.write(f"multiplier_{lam}.csv", ("label", "phi"), phi.rows())
        out[str(lam)] = {"normalization": phi.normalization,
                         "bound_violations": len(phi.bound_violations())}
    return out


def _cmd_converge(a, A, ell, sink):
    rad = (lambda lam: a.support) if a.support is not None else None
    rep = convergence_study(A, ell, a.k, a.levels, samples=a.samples, seed=a.seed,
                            timing=a.timing, sample_radius=rad)
    sink.write("converge.csv", REPORT_COLUMNS, rep.rows)
    return {"rows": len(rep.rows)}


_COMMANDS = {"algebra": _cmd_algebra, "growth": _cmd_growth, "folner": _cmd_folner,
             "rd": _cmd_rd, "lip": _cmd_lip, "multiplier": _cmd_multiplier,
             "converge": _cmd_converge}


def run(argv=None) -> int:
    parser = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        A, ell = _build(a)
        sink = _Sink(a, A)
        t0 = time.perf_counter()
        summary = _COMMANDS[a.command](a, A, ell, sink)
        if a.summary and a.out is not None:
            if a.timing:
                summary["runtime"] = time.perf_counter() - t0
            doc = {"config": sink.header, "result": summary, "files": sink.files}
            (a.out / "summary.json").write_text(json.dumps(doc, indent=2, default=_fmt) + "\n")
    except (ConfigError, FusionError) as e:
        print(f"qgh: error: {e}", file=sys.stderr)
        return 2
    except (WindowError, ArithmeticError) as e:
        print(f"qgh: numeric error: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
