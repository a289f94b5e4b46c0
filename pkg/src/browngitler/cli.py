"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 mismatch or theory violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, bg, polyalg, theorems
from .graded import (
    ContractViolation,
    FiniteGradedModule,
    TheoryViolation,
    a1_free_decomposition,
    margolis,
    module_from_text,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
CACHE_ENV = "BROWNGITLER_CACHE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _cache_dir() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_q_module(n: int, m: int) -> FiniteGradedModule:
    """Q(n, m) as a bare module, read from or written to the cache when enabled."""
    cache = _cache_dir()
    if cache is not None:
        f = cache / f"Q_{n}_{m}_v{__version__}.txt"
        if f.exists():
            return module_from_text(f.read_text())
        M = bg.build_q_module(n, m).module
        f.write_text(M.to_text())
        return M
    return bg.build_q_module(n, m).module


def parse_module_spec(text: str) -> FiniteGradedModule:
    kind, _, args = text.partition(":")
    try:
        nums = [int(a) for a in args.split(",")]
    except ValueError:
        raise UsageError(f"bad module spec {text!r}") from None
    if kind == "J" and len(nums) == 1:
        return bg.J(nums[0])
    if kind == "Q" and len(nums) == 2:
        return load_q_module(*nums)
    raise UsageError(f"module spec must be J:n or Q:n,m, got {text!r}")


def _parse_poly(text: str) -> polyalg.Polynomial:
    try:
        return polyalg.parse_poly(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _map_text(name: str, blocks: list[dict]) -> list[str]:
    return [f"map {name} {b['degree']} " + " ".join(b["rows"]) for b in blocks]


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_basis(args) -> int:
    M = bg.J(args.n)
    degrees = [args.degree] if args.degree is not None else M.degrees
    for d in degrees:
        for lab in M.labels(d):
            print(f"{d}: {lab}")
    return EXIT_OK


def cmd_sq(args) -> int:
    print(polyalg.format_poly(polyalg.sq(args.i, _parse_poly(args.poly))))
    return EXIT_OK


def cmd_qm(args) -> int:
    print(polyalg.format_poly(polyalg.qm(args.m, _parse_poly(args.poly))))
    return EXIT_OK


def cmd_margolis(args) -> int:
    M = parse_module_spec(args.module)
    print(margolis(M, args.m).format(M))
    return EXIT_OK


def qmodule_summary(M: FiniteGradedModule, a1: bool) -> str:
    profile = " ".join(str(x) for x in M.poincare(M.lo))
    line = f"dim {M.total_dim}; degrees {M.lo}..{M.hi}: {profile}"
    if a1:
        dec = a1_free_decomposition(M)
        if dec.free:
            line += f"; A(1)-free on degrees {dec.generator_degrees}"
        else:
            line += f"; not A(1)-free (stuck at {dec.witness})"
    return line


def cmd_qmodule(args) -> int:
    if args.dump:
        qm = bg.build_q_module(args.n, args.m)
        dump = bg.qmodule_dump(qm)
        if args.format == "json":
            print(json.dumps(dump, indent=1))
        else:
            lines = qm.module.to_text().rstrip("\n").split("\n")
            lines += _map_text("inclusion", dump["inclusion"])
            lines += _map_text("projection", dump["projection"])
            lines += [f"desusp {s['x']} {s['degree']} {s['value']}" for s in dump["desusp_section"]]
            print("\n".join(lines))
        M = qm.module
    else:
        M = load_q_module(args.n, args.m)
    line = qmodule_summary(M, args.a1_free)
    print(line, file=sys.stderr if args.dump else sys.stdout)
    if args.a1_free and "not A(1)-free" in line:
        return EXIT_FAIL
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.nmax is None:
        args.nmax = args.mmax - 1
    if args.nmax >= args.mmax:
        raise UsageError("--nmax must be below --mmax")
    report = theorems.scan_main_theorem(args.nmax, args.mmax, jobs=args.jobs)
    # wall time varies run to run; left out by default so output is byte-stable
    if args.format == "json":
        text = report.to_json(args.timing) + "\n"
    else:
        text = report.to_text(args.timing)
    _emit(text, args.out)
    if args.out:
        print(f"{len(report.mismatches)} mismatches")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_table(args) -> int:
    table = theorems.k_tables(args.m, args.nmax)
    sys.stdout.write(table.to_text())
    return EXIT_OK if not table.mismatches else EXIT_FAIL


def cmd_diagram(args) -> int:
    M = parse_module_spec(args.module)
    _emit(bg.to_dot(M), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="browngitler", description="Brown-Gitler module computations over F2.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("basis", help="monomial basis of J(n)")
    s.add_argument("n", type=int)
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_basis)

    s = sub.add_parser("sq", help="apply Sq^i to a polynomial")
    s.add_argument("i", type=int)
    s.add_argument("poly")
    s.set_defaults(func=cmd_sq)

    s = sub.add_parser("qm", help="apply the Milnor primitive Q_m to a polynomial")
    s.add_argument("m", type=int)
    s.add_argument("poly")
    s.set_defaults(func=cmd_qm)

    s = sub.add_parser("margolis", help="Margolis homology of J(n) or Q(n,m)")
    s.add_argument("--module", required=True, help="J:n or Q:n,m")
    s.add_argument("--m", type=int, default=1)
    s.set_defaults(func=cmd_margolis)

    s = sub.add_parser("qmodule", help="build Q(n,m)")
    s.add_argument("n", type=int)
    s.add_argument("m", type=int)
    s.add_argument("--dump", action="store_true")
    s.add_argument("--a1-free", action="store_true")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_qmodule)

    s = sub.add_parser("scan", help="compare criterion and oracle over a rectangle")
    s.add_argument("--nmax", type=int)
    s.add_argument("--mmax", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--out")
    s.add_argument("--timing", action="store_true", help="include wall time in the report")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("table", help="k_{m,n} table with closed-form deltas")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--nmax", type=int, required=True)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("diagram", help="DOT graph of a module")
    s.add_argument("--module", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_diagram)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ContractViolation as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TheoryViolation as e:
        print(f"theory violation: {e}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
