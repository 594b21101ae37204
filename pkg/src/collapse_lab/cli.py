"""Command-line driver: ``collapse-lab {analyze,bounds,gh,reproduce}``.

Exit codes: 0 success, 2 bad flags or malformed input files, 3 domain errors
raised by the numerical backends.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict
from typing import Sequence

from . import bounds as _bounds
from .diagnostics import SequenceSpec, classify, format_float, profile
from .errors import DomainError, SizeLimitError
from .geometry import DEFAULT_SAMPLES, BergerSphere, FlatTorus, criterion_ratio
from .gh import FiniteMetricSpace, gh_distance, gh_distance_exact, gh_lower_bound
from .rules import RuleSyntaxError, parse_range, parse_rule

SEED_ENV = "COLLAPSE_LAB_SEED"
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _positive_float(flag: str):
    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}") from None
        if not (math.isfinite(v) and v > 0):
            raise argparse.ArgumentTypeError(f"{flag} must be positive and finite, got {text!r}")
        return v

    return parse


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- analyze -------------------------------------------------------------------

def _spec_from_args(args) -> SequenceSpec:
    if args.family == "torus":
        if args.radii_rule is None or args.eps_rule is not None:
            raise UsageError("--family torus needs --radii-rule (and no --eps-rule)")
        rule = args.radii_rule
    else:
        if args.eps_rule is None or args.radii_rule is not None:
            raise UsageError("--family berger needs --eps-rule (and no --radii-rule)")
        rule = args.eps_rule
    try:
        parsed = parse_rule(rule)
        index_range = parse_range(args.range)
    except RuleSyntaxError as exc:
        flag = "--range" if "range" in str(exc) else ("--radii-rule" if args.family == "torus" else "--eps-rule")
        raise UsageError(f"{flag}: {exc}") from None
    if args.family == "berger" and len(parsed) != 1:
        raise UsageError("--eps-rule must give exactly one expression")
    if args.samples < 1000:
        raise UsageError(f"--samples must be at least 1000, got {args.samples}")
    return SequenceSpec(args.family, rule, index_range, args.r, args.mode, args.samples, args.seed)


def cmd_analyze(args) -> int:
    spec = _spec_from_args(args)
    prof = profile(spec)
    verdict = classify(prof, args.threshold, args.fit_tolerance)
    if args.format == "csv":
        _write(prof.to_csv(), args.out)
        if args.out not in (None, "-"):
            sys.stdout.write(verdict.to_json() + "\n")
    else:
        spec_dict = asdict(spec)
        spec_dict["index_range"] = list(spec.index_range)
        doc = {"spec": spec_dict, "profile": prof.to_dict(), "verdict": verdict.to_dict()}
        _write(_dumps(doc), args.out)
    return EXIT_OK


# -- bounds --------------------------------------------------------------------

def cmd_bounds(args) -> int:
    inp = _bounds.SubmersionBoundInput(args.ca, args.ct, args.k, args.K, args.ell)
    if args.tau_grid is None:
        _write(_dumps(asdict(_bounds.compute_breakdown(inp))), args.out)
        return EXIT_OK
    grid = sorted(set(args.tau_grid), reverse=True)
    for ell in grid:
        if not ell > 0:
            raise UsageError(f"--tau-grid values must be positive, got {ell!r}")
    rows = _bounds.tau_profile(inp, grid)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("ell", "p_bound", "l_minus_one", "c_minus_one"))
        for row in rows:
            w.writerow([format_float(v) for v in (row.ell, row.p_bound, row.l_minus_one, row.c_minus_one)])
        _write(buf.getvalue(), args.out)
    else:
        _write(_dumps({"rows": [asdict(r) for r in rows]}), args.out)
    return EXIT_OK


# -- gh ------------------------------------------------------------------------

def _load_space(path: str, flag: str) -> FiniteMetricSpace:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: malformed JSON in {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{flag}: expected an object with 'labels' and 'dist'")
    try:
        return FiniteMetricSpace.from_dict(data)
    except DomainError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_gh(args) -> int:
    X = _load_space(args.x, "--x")
    Y = _load_space(args.y, "--y")
    if args.exact:
        value, exact = gh_distance_exact(X, Y), True
    elif args.lower_bound:
        value, exact = gh_lower_bound(X, Y), False
    else:
        value, exact = gh_distance(X, Y)
    _write(_dumps({"distance": value, "kind": "exact" if exact else "lower_bound"}), args.out)
    return EXIT_OK


# -- reproduce -----------------------------------------------------------------

REPRODUCE_COLUMNS = ("example", "index", "r", "ratio", "analytic", "relative_error", "published_value", "note")
THIN_INDICES = tuple(range(50, 501, 50))
THIN_RADII = (0.25, 0.5)
THIN_NOTE = "oracle 4r; published value 4*pi*r differs by a factor pi"


def reproduce_rows(samples: int = DEFAULT_SAMPLES, seed: int = 0) -> list[tuple]:
    rows = []
    for r in THIN_RADII:
        spec = SequenceSpec("torus", "1,1/i", (THIN_INDICES[0], THIN_INDICES[-1]), r,
                            "monte_carlo", samples, seed)
        for i in THIN_INDICES:
            M = spec.member(i)
            ratio = criterion_ratio(M, r, "monte_carlo", samples=samples, seed=seed + i)
            analytic = 4.0 * r
            rows.append(("thin_torus", i, r, ratio, analytic, abs(ratio - analytic) / analytic,
                         4.0 * math.pi * r, THIN_NOTE))
    for j in range(10, 101):
        ratio = criterion_ratio(FlatTorus((1.0 / j**2, 1.0 / j)), 1.0)
        analytic = 4.0 * math.pi / j
        rows.append(("shrinking_torus", j, 1.0, ratio, analytic, abs(ratio - analytic) / analytic, analytic, ""))
    for i in range(10, 101):
        ratio = criterion_ratio(BergerSphere(1.0 / i), math.pi)
        analytic = 2.0 * math.pi
        rows.append(("hopf", i, math.pi, ratio, analytic, abs(ratio - analytic) / analytic, analytic, ""))
    return rows


def cmd_reproduce(args) -> int:
    if args.samples < 1000:
        raise UsageError(f"--samples must be at least 1000, got {args.samples}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPRODUCE_COLUMNS)
    for ex, idx, r, ratio, analytic, rel, published, note in reproduce_rows(args.samples, args.seed):
        w.writerow([ex, idx, format_float(r), format_float(ratio), format_float(analytic),
                    format_float(rel), format_float(published), note])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collapse-lab", allow_abbrev=False,
                                     description="Collapse diagnostics for model manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", allow_abbrev=False, help="profile and classify a sequence")
    a.add_argument("--family", choices=("torus", "berger"), required=True)
    a.add_argument("--radii-rule", help='circle radii as functions of i, e.g. "1,1/i"')
    a.add_argument("--eps-rule", help='Berger fibre scale as a function of i, e.g. "1/i"')
    a.add_argument("--range", required=True, help="inclusive index range lo:hi")
    a.add_argument("--r", type=_positive_float("--r"), required=True)
    a.add_argument("--mode", choices=("exact", "monte_carlo"), default="exact")
    a.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    a.add_argument("--seed", type=int, default=default_seed)
    a.add_argument("--threshold", type=_positive_float("--threshold"), default=0.1)
    a.add_argument("--fit-tolerance", type=_positive_float("--fit-tolerance"), default=0.2)
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bounds", allow_abbrev=False, help="submersion bound constants")
    b.add_argument("--ca", type=float, required=True)
    b.add_argument("--ct", type=float, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--K", type=float, required=True)
    b.add_argument("--ell", type=float, required=True)
    b.add_argument("--tau-grid", type=_float_list, help="comma-separated loop lengths")
    b.add_argument("--format", choices=("json", "csv"), default="json")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("gh", allow_abbrev=False, help="Gromov-Hausdorff distance of two JSON spaces")
    g.add_argument("--x", required=True)
    g.add_argument("--y", required=True)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--lower-bound", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gh)

    r = sub.add_parser("reproduce", allow_abbrev=False, help="reference table for the three model sequences")
    r.add_argument("--out")
    r.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    r.add_argument("--seed", type=int, default=default_seed)
    r.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser(_default_seed())
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
