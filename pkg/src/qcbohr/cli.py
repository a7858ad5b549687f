"""Command-line front end.

Subcommands: ``radius``, ``table``, ``check``, ``sharpness``, ``verify``,
``lemmas`` and ``plot``.  JSON outputs carry a top-level ``"schema": 1``;
CSV outputs have a fixed header.  All outputs are deterministic for fixed
arguments.

Exit codes: 0 when every verdict is the expected one, 1 when a mathematical
expectation fails, 2 on usage errors (bad flags, files or parameters).
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import radii
from .coeffseq import SeriesError
from .functionals import (
    FUNCTIONAL_IDS,
    FunctionalError,
    FunctionalSpec,
    PointRule,
    Verdict,
    check,
)
from .mappings import ExtremalSpec, Family, HarmonicMapping, MappingError, make_extremal
from . import verify

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_PLOT_SAMPLES = 201


class UsageError(Exception):
    """Bad arguments or input files; maps to exit code 2."""


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _float_list(text: str | None, name: str) -> list[float]:
    if text is None:
        raise UsageError(f"--{name} is required")
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"--{name} list is empty")
    return [_float(t) for t in items]


def _str_list(text: str, choices, name: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"--{name} list is empty")
    if items == ["all"]:
        return list(choices)
    for t in items:
        if t not in choices:
            raise UsageError(f"unknown {name} {t!r}; choose from {', '.join(choices)}")
    return items


def _json_dump(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    """Shortest round-trip decimal; stable across runs and platforms."""
    return repr(float(x))


def _finite(x: float) -> float | str:
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _spec_from_args(args, K: float) -> FunctionalSpec:
    return FunctionalSpec.make(args.spec, K=K, p=args.p, s=args.s)


def _load_mapping(path: str, spec: FunctionalSpec) -> HarmonicMapping:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read mapping {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("mapping JSON must be an object")
    f = HarmonicMapping.from_json(data)
    if f.qc.k > spec.qc.k + 1e-15:
        raise UsageError(f"mapping has k={f.qc.k} above the spec's k={spec.qc.k}")
    return HarmonicMapping(f.h, f.g, spec.qc, f.b1_zero)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_radius(args) -> int:
    K = _float(args.K)
    eq = radii.catalog(args.id, K=K, p=args.p, N=args.N, a0=args.a0)
    cf = radii.closed_form(args.id, K=K, p=args.p, N=args.N, a0=args.a0)
    if cf is not None:
        rho0, method, width = cf, "closed-form", 0.0
    else:
        res = radii.solve(eq)
        rho0, method, width = res.rho0, res.method, res.bracket_width
    payload = {
        "id": args.id,
        "K": _finite(K),
        "p": args.p,
        "rho0": rho0,
        "residual": eq.residual(rho0),
        "bracket_width": width,
        "method": method,
    }
    _emit(_json_dump(payload), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    ids = _str_list(args.id, radii.CATALOG_IDS, "id")
    Ks = sorted(_float_list(args.K, "K"))
    rows = []
    for eq_id in ids:
        for K in Ks:
            rows.append([eq_id, _num(K), _num(radii.radius(eq_id, K=K, p=args.p, N=args.N, a0=args.a0))])
    _emit(_csv_text(["id", "K", "rho0"], rows), args.out)
    return EXIT_OK


def _expected(text: str | None):
    if text is None:
        return None
    try:
        return Verdict(text)
    except ValueError:
        raise UsageError(f"--expect must be one of {[v.value for v in Verdict]}") from None


def cmd_check(args) -> int:
    spec = _spec_from_args(args, _float(args.K))
    if args.rho is None:
        raise UsageError("--rho is required")
    rho = _float(args.rho)
    rule = PointRule.parse(args.point)
    if (args.input is None) == (args.family is None):
        raise UsageError("give exactly one of --input or --family")
    if args.input is not None:
        f = _load_mapping(args.input, spec)
        source = {"input": args.input}
    else:
        if args.a is None:
            raise UsageError("--family needs --a")
        a = _float(args.a)
        ext = ExtremalSpec(Family(args.family), a, spec.qc, cmath.exp(1j * args.phase))
        f = make_extremal(ext, args.terms)
        source = {"family": args.family, "a": a, "phase": args.phase, "terms": args.terms}
    report = check(spec, f, rho, rule)
    rho0 = spec.rho0()
    expect = _expected(args.expect)
    if expect is None and rho <= rho0:
        expect = Verdict.HOLDS
    ok = expect is None or report.verdict is expect
    payload = {
        **report.to_json(),
        "K": spec.K,
        "rho0": rho0,
        "point_rule": str(rule),
        "source": source,
        "expected": expect.value if expect else None,
        "ok": ok,
    }
    _emit(_json_dump(payload), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _specs_for(args, Ks) -> list[FunctionalSpec]:
    ids = _str_list(args.spec, FUNCTIONAL_IDS, "spec")
    return [FunctionalSpec.make(sid, K=K, p=args.p if sid in ("F-T2", "F-T4") else None,
                                s=args.s if sid == "F-T2" else 1)
            for sid in ids for K in Ks]


def cmd_sharpness(args) -> int:
    Ks = sorted(_float_list(args.K, "K"))
    a_list = _float_list(args.a, "a") if args.a is not None else None
    deltas = _float_list(args.delta, "delta")
    if any(d <= 0 for d in deltas):
        raise UsageError("every --delta must be > 0")
    scans = [verify.sharpness_scan(spec, a_list, deltas) for spec in _specs_for(args, Ks)]
    ok = all(s.found for s in scans)
    _emit(_json_dump({"scans": [s.to_json() for s in scans], "ok": ok}), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    Ks = sorted(_float_list(args.K, "K"))
    reports = [verify.verify_theorem(spec, args.trials, args.seed) for spec in _specs_for(args, Ks)]
    ok = all(r.ok for r in reports)
    _emit(_json_dump({"reports": [r.to_json() for r in reports], "ok": ok}), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lemmas(args) -> int:
    ids = _str_list(args.id, verify.LEMMA_IDS, "id")
    reports = [verify.verify_lemma(lid, args.trials, args.seed) for lid in ids]
    ok = all(r.ok for r in reports)
    _emit(_json_dump({"reports": [r.to_json() for r in reports], "ok": ok}), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def plot_rows(eq: radii.RadiusEquation, samples: int) -> list[list[str]]:
    """``(rho, residual, marker)`` rows on ``[0, hi]`` plus the annotated root."""
    if samples < 2:
        raise UsageError("--samples must be >= 2")
    xs = np.linspace(0.0, eq.hi, samples)
    root = radii.solve(eq).rho0
    rows = [(float(x), eq.residual(float(x)), "") for x in xs if float(x) != root]
    rows.append((root, eq.residual(root), "root"))
    rows.sort(key=lambda r: r[0])
    return [[_num(x), _num(y), m] for x, y, m in rows]


def cmd_plot(args) -> int:
    eq = radii.catalog(args.id, K=_float(args.K), p=args.p, N=args.N, a0=args.a0)
    rows = plot_rows(eq, args.samples)
    _emit(_csv_text(["rho", "residual", "marker"], rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcbohr",
        description="Sharp Bohr-type radii for quasiconformal harmonic mappings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, K_default="1"):
        p.add_argument("--K", default=K_default, help="quasiconformal constant (or comma list)")
        p.add_argument("--p", type=float, default=None, help="exponent parameter")
        p.add_argument("--out", default=None, help="write output to this file")

    def eq_params(p):
        p.add_argument("--N", type=int, default=None, help="index for Bohr-Rogosinski equations")
        p.add_argument("--a0", type=float, default=None, help="|a0| for equations that need it")

    p = sub.add_parser("radius", help="solve one catalog equation")
    p.add_argument("--id", required=True, choices=radii.CATALOG_IDS)
    common(p)
    eq_params(p)
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("table", help="CSV of roots over a K grid")
    p.add_argument("--id", required=True, help="comma list of equation ids, or 'all'")
    common(p)
    eq_params(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("check", help="evaluate a functional on one mapping")
    p.add_argument("--spec", required=True, choices=FUNCTIONAL_IDS)
    common(p)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--rho", default=None)
    p.add_argument("--input", default=None, help="mapping JSON file")
    p.add_argument("--family", default=None, choices=[f.value for f in Family])
    p.add_argument("--a", default=None, help="extremal family parameter")
    p.add_argument("--phase", type=float, default=0.0, help="rotation angle of g (radians)")
    p.add_argument("--terms", type=int, default=256, help="stored terms for --family")
    p.add_argument("--point", default="grid:64", help="grid:<n>, radial-neg or radial-pos")
    p.add_argument("--expect", default=None, help="expected verdict (Holds/Violated/Inconclusive)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sharpness", help="search for witnesses above rho0")
    p.add_argument("--spec", required=True, help="comma list of functional ids, or 'all'")
    common(p, K_default="1,2,10")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--a", default=None, help="comma list of family parameters")
    p.add_argument("--delta", default="0.05", help="comma list of relative offsets above rho0")
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("verify", help="randomised sweep below rho0")
    p.add_argument("--spec", required=True, help="comma list of functional ids, or 'all'")
    common(p)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemmas", help="property suites for the auxiliary inequalities")
    p.add_argument("--id", default="all", help="comma list of L1..L6, or 'all'")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("plot", help="CSV samples of a residual with its root marked")
    p.add_argument("--id", required=True, choices=radii.CATALOG_IDS)
    common(p)
    eq_params(p)
    p.add_argument("--samples", type=int, default=DEFAULT_PLOT_SAMPLES)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FunctionalError, MappingError, SeriesError, radii.CatalogError) as exc:
        print(f"qcbohr {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError) as exc:
        # malformed numeric parameters or mapping fields that slipped past argparse
        print(f"qcbohr {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (radii.NoSignChange, radii.NonMonotoneDetected) as exc:
        print(f"qcbohr {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
