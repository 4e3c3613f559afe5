"""Command-line front end: ``quadentropy analyze|degrees|admissibility|fit``."""
from __future__ import annotations

import argparse
import json
import sys

from . import catalog
from .expr import DSLError, parse_system
from .growth import DEFAULT_TOL, NoRationalFit, Unavailable, closed_form, entropy_from_fit, fit_generating_function
from .lattice import StaircaseSpec
from .poly import DegenerateRun, evolve_degrees, extract_sequences
from .report import analyze, format_csv, format_text
from .solve import ALL_DIRECTIONS, DEFAULT_PRIME, Direction, admissibility_report

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_DIRECTION = 3
EXIT_DEGENERATE = 4

# options whose values may start with "-"
_SIGNED_OPTS = ("--diagonal", "--staircase")


def _fix_signed(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _SIGNED_OPTS and i + 1 < len(argv):
            v = argv[i + 1]
            i += 2
        elif a.split("=", 1)[0] in _SIGNED_OPTS and "=" in a:
            a, v = a.split("=", 1)
            i += 1
        else:
            out.append(a)
            i += 1
            continue
        # argparse swallows a bare "--" value, so spell directions as "(s,s)"
        if a == "--diagonal" and len(v) == 2 and set(v) <= {"+", "-"}:
            v = f"({v[0]},{v[1]})"
        out.append(f"{a}={v}")
    return out


def _add_system_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="NAME", help="built-in system (see --list)")
    src.add_argument("--file", metavar="PATH", help="system description file")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--diagonal", metavar="DIR", help="one of ++ +- -+ --")
    p.add_argument("--staircase", metavar="L1,L2,N", help="regular staircase instead of a diagonal")
    p.add_argument("--steps", type=int, help="staircase length N (default: catalog value or 16)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadentropy",
                                 description="Algebraic entropy of systems of quad equations.")
    ap.add_argument("--list", action="store_true", help="list catalog systems and exit")
    sub = ap.add_subparsers(dest="cmd")

    a = sub.add_parser("analyze", help="full pipeline: admissibility, degrees, fits, isotropy")
    _add_system_args(a)
    _add_run_args(a)
    a.add_argument("--trials", type=int, default=3)
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.add_argument("--jobs", type=int, default=1, help="worker processes across directions")
    a.add_argument("--format", choices=("json", "csv", "text"), default="json")

    d = sub.add_parser("degrees", help="degree grid for one direction")
    _add_system_args(d)
    _add_run_args(d)
    d.add_argument("--format", choices=("json", "csv", "text"), default="csv")

    s = sub.add_parser("admissibility", help="rank and elimination status per direction")
    _add_system_args(s)
    s.add_argument("--format", choices=("json", "text"), default="text")

    f = sub.add_parser("fit", help="fit a rational generating function to a sequence")
    f.add_argument("sequence", nargs="?", help="comma-separated terms; '-' or omitted reads stdin")
    f.add_argument("--file", metavar="PATH")
    f.add_argument("--tol", type=float, default=DEFAULT_TOL)
    f.add_argument("--format", choices=("json", "text"), default="text")
    return ap


def _load(args) -> tuple[str, str | None]:
    if args.catalog:
        return catalog.get(args.catalog).source, args.catalog
    with open(args.file, encoding="utf-8") as fh:
        return fh.read(), None


def _stair(args) -> StaircaseSpec | None:
    return StaircaseSpec.parse(args.staircase) if args.staircase else None


def cmd_analyze(args, out) -> int:
    source, name = _load(args)
    dirs = [Direction.parse(args.diagonal)] if args.diagonal else None
    rep = analyze(source, name=name, directions=dirs, steps=args.steps, staircase=_stair(args),
                  prime=args.prime, seed=args.seed, trials=args.trials, tol=args.tol, jobs=args.jobs)
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    elif args.format == "csv":
        out.write(format_csv(rep))
    else:
        out.write(format_text(rep))
    return EXIT_OK if rep.admissible else EXIT_NO_DIRECTION


def cmd_degrees(args, out) -> int:
    source, name = _load(args)
    spec = parse_system(source)
    rep = admissibility_report(spec, prime=args.prime, seed=args.seed)
    stair = _stair(args)
    if stair is not None:
        d = stair.direction
    elif args.diagonal:
        d = Direction.parse(args.diagonal)
    else:
        adm = [x for x in ALL_DIRECTIONS if rep.results[x].admissible]
        if not adm:
            print("no admissible direction", file=sys.stderr)
            return EXIT_NO_DIRECTION
        d = adm[0]
    res = rep.results[d]
    if not res.admissible:
        print(f"direction {d} is not admissible ({res.status})", file=sys.stderr)
        return EXIT_NO_DIRECTION
    steps = args.steps or (catalog.get(name).steps if name else 16)
    grid = evolve_degrees(res.update, stair, direction=d, steps=steps, seed=args.seed, prime=args.prime)
    if args.format == "csv":
        out.write(grid.to_csv())
    elif args.format == "json":
        ss = extract_sequences(grid)
        out.write(json.dumps({
            "schema": 1, "direction": str(d), "prime": grid.prime, "seed": grid.seed,
            "fields": grid.fields,
            "cells": [{"l": l, "m": m, "point": list(grid.points[(l, m)]), "degrees": list(v)}
                      for (l, m), v in sorted(grid.degrees.items())],
            "sequences": ss.sequences, "shift_equivalent": ss.shift_equivalent,
        }, indent=2) + "\n")
    else:
        ss = extract_sequences(grid)
        out.write(f"direction {d}\n")
        for f, seq in ss.sequences.items():
            out.write(f"{f}: {', '.join(map(str, seq))}\n")
        if not ss.shift_equivalent:
            out.write(f"{len(ss.classes)} non-shift-equivalent classes\n")
    return EXIT_OK


def cmd_admissibility(args, out) -> int:
    source, _ = _load(args)
    rep = admissibility_report(parse_system(source), prime=args.prime, seed=args.seed)
    if args.format == "json":
        out.write(json.dumps(rep.to_dict(), indent=2) + "\n")
    else:
        for d, r in rep.results.items():
            i, j = d.unknown
            out.write(f"{d} unknown corner [{i},{j}]: {r.status} (rank {r.rank})\n")
            if r.admissible:
                for f, e in zip(rep.spec.fields, r.update.expressions()):
                    out.write(f"    {f}[{i},{j}] = {e}\n")
    return EXIT_OK if rep.admissible else EXIT_NO_DIRECTION


def _read_sequence(args) -> list[int]:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    elif args.sequence and args.sequence != "-":
        text = args.sequence
    else:
        text = sys.stdin.read()
    return [int(t) for t in text.replace(",", " ").split()]


def cmd_fit(args, out) -> int:
    seq = _read_sequence(args)
    fit = fit_generating_function(seq)
    ent = entropy_from_fit(fit, args.tol)
    try:
        qp = closed_form(fit)
    except Unavailable:
        qp = None
    if args.format == "json":
        d = {"schema": 1, "sequence": seq, "fit": fit.to_dict(), "entropy": ent.to_dict()}
        if qp is not None:
            d["closed_form"] = qp.to_dict()
        out.write(json.dumps(d, indent=2) + "\n")
    else:
        out.write(f"g(s) = {fit}\n")
        out.write(f"S = {ent.S:.6g}{' (exact)' if ent.exact_zero else ''}, growth: {ent.growth}\n")
        if qp is not None:
            out.write(f"{qp}\n")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "degrees": cmd_degrees,
            "admissibility": cmd_admissibility, "fit": cmd_fit}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(_fix_signed(list(sys.argv[1:] if argv is None else argv)))
    if args.list:
        for name, e in catalog.ENTRIES.items():
            out.write(f"{name:28s} {e.description}\n")
        return EXIT_OK
    if not args.cmd:
        ap.print_help(out)
        return EXIT_PARSE
    try:
        return COMMANDS[args.cmd](args, out)
    except DSLError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, KeyError, ValueError) as exc:
        if isinstance(exc, NoRationalFit):
            print(f"no rational fit: {exc}", file=sys.stderr)
            return EXIT_PARSE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateRun as exc:
        print(f"degenerate runs exhausted: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
