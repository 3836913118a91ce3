"""Command-line front end: family ingestion, report export, plotting.

Subcommands: eval, check, certify, sharp-theta, claims, audit, remark,
plot, askey-check, hermite-check.  Reports are written as CSV or JSON with
byte-identical output for identical configurations; numerals are decimal
strings with precision-derived digit counts and exact rationals carry an
additional p/q rendering.

Exit codes: 0 clean, 1 infrastructure failure, 2 bad arguments, 3 a
counterexample / violation / nonzero residual was found (the findings are
in the report, the code just flags them).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpfr, mpq

from . import precision
from .certify import batch_table, scan_min
from .curves import asymptotic_gap_probe
from .errors import IrrationalParameterError, TurankitError
from .families import (
    ExplicitList,
    GeneralThreeTerm,
    HermiteMonicHalf,
    MonicSymmetric,
    SymmetricUnit,
    Ultraspherical,
    UltrasphericalRatio,
    eval_triple,
    ratio_t,
)
from .svgplot import render_figure
from .turan_core import (
    HermiteFactor,
    askey_turan_check,
    audit_quantities,
    theta_infimum,
    theta_ultraspherical,
    turan_delta_exact,
)

EXIT_OK = 0
EXIT_INFRA = 1
EXIT_USAGE = 2
EXIT_FINDING = 3

CHECK_FIELDS = (
    "lambda", "n", "theta", "mode", "outcome", "min_delta", "argmin_x",
    "precision_bits", "notes",
)


@dataclass(frozen=True)
class RunConfig:
    """Reproducibility envelope: identical configs give byte-identical reports."""

    precision_bits: int = precision.DEFAULT_PRECISION
    grid_size: int = 4096
    tol: object = mpq(1, 10**4)
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"


def run_config(args) -> RunConfig:
    return RunConfig(
        precision_bits=args.precision,
        grid_size=args.grid,
        tol=precision.to_mpq(args.tol),
        seed=args.seed,
        out=args.out,
        format=args.format,
    )


def default_precision_bits() -> int:
    env = os.environ.get("TURANKIT_PRECISION")
    if env:
        return int(env)
    return precision.DEFAULT_PRECISION


# ---------------------------------------------------------------------------
# family file ingestion
# ---------------------------------------------------------------------------


def sequence_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "list":
        return ExplicitList(doc["values"], start=int(doc.get("start", 1)))
    if kind == "formula":
        name = doc.get("name")
        params = doc.get("params", {})
        if name == "ultraspherical-a":
            return UltrasphericalRatio(precision.to_mpq(params["lambda"]))
        if name == "hermite-monic":
            return HermiteMonicHalf()
        raise TurankitError(f"unknown sequence formula {name!r}")
    raise TurankitError(f"unknown sequence kind {kind!r}")


def sequence_to_dict(seq) -> dict:
    if isinstance(seq, ExplicitList):
        return {
            "kind": "list",
            "values": [precision.rational_str(v) for v in seq.values],
            "start": seq.start,
        }
    if isinstance(seq, UltrasphericalRatio):
        return {
            "kind": "formula",
            "name": "ultraspherical-a",
            "params": {"lambda": precision.rational_str(seq.lam)},
        }
    if isinstance(seq, HermiteMonicHalf):
        return {"kind": "formula", "name": "hermite-monic", "params": {}}
    raise TurankitError(f"cannot serialise sequence {seq!r}")


def family_from_dict(doc: dict):
    ftype = doc.get("type")
    if ftype == "ultraspherical":
        return Ultraspherical(precision.to_mpq(doc["lambda"]))
    if ftype == "symmetric-unit":
        return SymmetricUnit(sequence_from_dict(doc["sequence"]))
    if ftype == "monic-symmetric":
        return MonicSymmetric(sequence_from_dict(doc["sequence"]))
    if ftype == "general":
        return GeneralThreeTerm(
            sequence_from_dict(doc["a"]),
            sequence_from_dict(doc["b"]),
            sequence_from_dict(doc["c"]),
        )
    raise TurankitError(f"unknown family type {ftype!r}")


def family_to_dict(family) -> dict:
    if isinstance(family, Ultraspherical):
        return {"type": "ultraspherical", "lambda": precision.rational_str(family.lam)}
    if isinstance(family, SymmetricUnit):
        return {"type": "symmetric-unit", "sequence": sequence_to_dict(family.a)}
    if isinstance(family, MonicSymmetric):
        return {"type": "monic-symmetric", "sequence": sequence_to_dict(family.a)}
    if isinstance(family, GeneralThreeTerm):
        return {
            "type": "general",
            "a": sequence_to_dict(family.a),
            "b": sequence_to_dict(family.b),
            "c": sequence_to_dict(family.c),
        }
    raise TurankitError(f"cannot serialise family {family!r}")


def read_family_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return family_from_dict(json.load(fh))


def write_family_file(family, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(family_to_dict(family), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_n_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def parse_lambda_list(text: str):
    return [precision.to_mpq(part) for part in text.split(",")]


def resolve_family(args):
    if getattr(args, "family_file", None):
        return read_family_file(args.family_file)
    name = getattr(args, "family", None) or "ultraspherical"
    if name == "ultraspherical":
        if args.lam is None:
            raise TurankitError("--lambda required for the ultraspherical family")
        return Ultraspherical(precision.to_mpq(args.lam))
    if name == "hermite-monic":
        return MonicSymmetric(HermiteMonicHalf())
    raise TurankitError(
        f"family {name!r} needs --family-file (only 'ultraspherical' and "
        "'hermite-monic' are available inline)"
    )


# ---------------------------------------------------------------------------
# report formatting
# ---------------------------------------------------------------------------


def format_value(v, bits: int):
    """(decimal string, optional p/q string) for any cell value."""
    if v is None:
        return "", None
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v), None
    if isinstance(v, bool):
        return "true" if v else "false", None
    if isinstance(v, mpq):
        return precision.decimal_str(v, bits), precision.rational_str(v)
    if isinstance(v, mpfr):
        return precision.decimal_str(v, bits), None
    return str(v), None


def rows_to_csv(rows, fields, bits: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        out = []
        notes_extra = []
        for key in fields:
            dec, pq = format_value(row.get(key), bits)
            if pq is not None and key not in ("notes",):
                notes_extra.append(f"{key}={pq}")
            out.append(dec)
        if notes_extra:
            idx = fields.index("notes")
            joined = ";".join(notes_extra)
            out[idx] = f"{out[idx]};{joined}" if out[idx] else joined
        writer.writerow(out)
    return buf.getvalue()


def rows_to_json(rows, fields, bits: int) -> str:
    objs = []
    for row in rows:
        obj = {}
        for key in fields:
            dec, pq = format_value(row.get(key), bits)
            obj[key] = dec
            if pq is not None:
                obj[f"{key}_pq"] = pq
        objs.append(obj)
    return json.dumps(objs, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_rows(rows, fields, cfg: RunConfig) -> None:
    if cfg.format == "json":
        emit(rows_to_json(rows, fields, cfg.precision_bits), cfg.out)
    else:
        emit(rows_to_csv(rows, fields, cfg.precision_bits), cfg.out)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    family = resolve_family(args)
    n = parse_n_range(args.n)[0]
    x = precision.to_mpq(args.x)
    triple = eval_triple(family, n, x, args.precision)
    t = ratio_t(family, n, x, args.precision)
    bits = triple.precision_bits
    lines = [
        f"p[{n - 1}] = {precision.decimal_str(triple.p_prev, bits)}",
        f"p[{n}] = {precision.decimal_str(triple.p_cur, bits)}",
        f"p[{n + 1}] = {precision.decimal_str(triple.p_next, bits)}",
        f"t[{n}] = {precision.decimal_str(t, bits)}",
    ]
    emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    lams = parse_lambda_list(args.lam)
    ns = parse_n_range(args.n)
    theta = None
    if args.theta not in ("auto",):
        if args.theta == "thm2":
            theta = None  # resolved per lambda below
        else:
            theta = precision.to_mpq(args.theta)
    rows = []
    for lam in lams:
        opt_theta = theta
        if args.theta == "thm2":
            opt_theta = theta_infimum(UltrasphericalRatio(lam), 64, args.precision).theta
        rows.extend(
            batch_table(
                [lam], ns, "check",
                theta=opt_theta,
                grid_size=args.grid,
                precision_bits=args.precision,
            )
        )
    emit_rows(rows, CHECK_FIELDS, run_config(args))
    bad = [r for r in rows if r["outcome"] not in ("certified-nonnegative",)]
    return EXIT_FINDING if bad else EXIT_OK


def cmd_certify(args) -> int:
    lams = parse_lambda_list(args.lam)
    ns = parse_n_range(args.n)
    theta = None if args.theta == "auto" else precision.to_mpq(args.theta)
    rows = batch_table(lams, ns, "certify", theta=theta, precision_bits=args.precision)
    emit_rows(rows, CHECK_FIELDS, run_config(args))
    bad = [r for r in rows if r["outcome"] != "certified-nonnegative"]
    return EXIT_FINDING if bad else EXIT_OK


def cmd_sharp_theta(args) -> int:
    lams = parse_lambda_list(args.lam)
    ns = parse_n_range(args.n)
    rows = batch_table(
        lams, ns, "sharp-theta",
        tol=precision.to_mpq(args.tol), grid_size=args.grid,
    )
    emit_rows(rows, CHECK_FIELDS, run_config(args))
    bad = [r for r in rows if r["outcome"] != "bracket"]
    return EXIT_FINDING if bad else EXIT_OK


CLAIM_FIELDS = ("lambda", "n", "theta", "x_tilde", "x1", "x2", "verdict", "situation", "notes")


def cmd_claims(args) -> int:
    from .zeros_claims import vertex_vs_zeros

    lams = parse_lambda_list(args.lam)
    ns = parse_n_range(args.n)
    rows = []
    ok = True
    for lam in lams:
        for n in ns:
            try:
                rep = vertex_vs_zeros(lam, n, args.precision)
                rows.append({
                    "lambda": lam, "n": n, "theta": rep.theta,
                    "x_tilde": rep.x_tilde, "x1": rep.x1, "x2": rep.x2,
                    "verdict": rep.verdict, "situation": rep.situation, "notes": "",
                })
                ok = ok and rep.verdict
            except Exception as exc:
                rows.append({
                    "lambda": lam, "n": n, "theta": None, "x_tilde": None,
                    "x1": None, "x2": None, "verdict": None, "situation": "",
                    "notes": f"{type(exc).__name__}: {exc}",
                })
                ok = False
    emit_rows(rows, CLAIM_FIELDS, run_config(args))
    return EXIT_OK if ok else EXIT_FINDING


AUDIT_FIELDS = ("lambda", "n", "theta", "x", "signs_ok", "residuals_zero", "quantities", "notes")


def cmd_audit(args) -> int:
    ns = parse_n_range(args.n)
    if args.lam is not None:
        lams = parse_lambda_list(args.lam)
        cells = [(lam, n) for lam in lams for n in ns]
    else:
        rng = random.Random(args.seed)
        cells = []
        for _ in range(args.instances):
            lam = mpq(rng.randint(-4, 20), 10)
            if lam <= mpq(-1, 2):
                lam = mpq(-4, 10)
            cells.append((lam, rng.choice(ns)))
    rows = []
    ok = True
    for lam, n in cells:
        try:
            rep = audit_quantities(lam, n, x=args.x, bits=args.precision,
                                   symbolic=args.symbolic)
            q = ";".join(
                f"{k}={format_value(v, 64)[0]}" for k, v in sorted(rep.quantities.items())
            )
            rows.append({
                "lambda": lam, "n": n, "theta": rep.theta, "x": precision.to_mpq(args.x),
                "signs_ok": rep.signs_ok, "residuals_zero": rep.residuals_zero,
                "quantities": q, "notes": "",
            })
            ok = ok and rep.signs_ok and rep.residuals_zero in (True, None)
        except Exception as exc:
            rows.append({
                "lambda": lam, "n": n, "theta": None, "x": None, "signs_ok": None,
                "residuals_zero": None, "quantities": "",
                "notes": f"{type(exc).__name__}: {exc}",
            })
            ok = False
    emit_rows(rows, AUDIT_FIELDS, run_config(args))
    return EXIT_OK if ok else EXIT_FINDING


REMARK_FIELDS = (
    "lambda", "n", "theta", "x_hat", "gap_plus", "gap_minus",
    "resultant_at_xhat", "gap_plus_leading", "gap_minus_leading",
    "resultant_leading", "notes",
)


def cmd_remark(args) -> int:
    lam = precision.to_mpq(args.lam)
    ns = parse_n_range(args.n)
    if args.theta == "auto":
        theta = 8 / (4 - lam)
    else:
        theta = precision.to_mpq(args.theta)
    rows = []
    for n in ns:
        probe = asymptotic_gap_probe(lam, theta, n, args.precision)
        rows.append({
            "lambda": lam, "n": n, "theta": theta, "x_hat": probe.x_hat,
            "gap_plus": probe.gap_plus, "gap_minus": probe.gap_minus,
            "resultant_at_xhat": probe.resultant_at_xhat,
            "gap_plus_leading": probe.gap_plus_leading,
            "gap_minus_leading": probe.gap_minus_leading,
            "resultant_leading": probe.resultant_leading,
            "notes": "" if probe.branches_real else "branches complex at x_hat",
        })
    emit_rows(rows, REMARK_FIELDS, run_config(args))
    return EXIT_OK


def cmd_plot(args) -> int:
    lam = precision.to_mpq(args.lam)
    n = parse_n_range(args.n)[0]
    if args.theta == "auto":
        theta = theta_ultraspherical(lam)
    else:
        theta = precision.to_mpq(args.theta)
    if not args.out:
        raise TurankitError("plot needs --out FILE.svg")
    try:
        svg = render_figure(lam, n, theta, samples=args.grid,
                            x_min=args.x_min, x_max=args.x_max, bits=args.precision)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
    return EXIT_OK


ASKEY_FIELDS = ("n_max", "grid_size", "min_delta", "argmin_x", "argmin_n",
                "violations", "hypothesis_edge", "precision_bits", "notes")


def cmd_askey_check(args) -> int:
    family = resolve_family(args)
    if not isinstance(family, MonicSymmetric):
        raise TurankitError("askey-check needs a monic-symmetric family")
    with precision.context(args.precision):
        lo = mpfr(precision.to_mpq(args.x_min))
        hi = mpfr(precision.to_mpq(args.x_max))
    grid = precision.make_grid(lo, hi, args.grid, args.precision, cluster_hi=False)
    rep = askey_turan_check(family.a, parse_n_range(args.n)[-1], grid, args.precision)
    rows = [{
        "n_max": rep.n_max, "grid_size": rep.grid_size, "min_delta": rep.min_delta,
        "argmin_x": rep.argmin_x, "argmin_n": rep.argmin_n,
        "violations": rep.violations, "hypothesis_edge": rep.hypothesis_edge,
        "precision_bits": rep.precision_bits, "notes": "",
    }]
    emit_rows(rows, ASKEY_FIELDS, run_config(args))
    return EXIT_OK if rep.violations == 0 else EXIT_FINDING


HERMITE_FIELDS = ("check", "n", "outcome", "min_delta", "argmin_x", "precision_bits", "notes")


def cmd_hermite_check(args) -> int:
    family = MonicSymmetric(HermiteMonicHalf())
    rows = []
    ok = True
    # exact closed form at n = 1: the monic gap times (x^2 + 1/2) is 1/4
    x = mpq(3, 7)
    val = turan_delta_exact(family, 1, HermiteFactor(), x) * (x * x + mpq(1, 2))
    exact_ok = val == mpq(1, 4)
    ok = ok and exact_ok
    rows.append({
        "check": "monic-n1-closed-form", "n": 1,
        "outcome": "exact" if exact_ok else "mismatch",
        "min_delta": val, "argmin_x": x, "precision_bits": 0, "notes": "",
    })
    ns = parse_n_range(args.n)
    for n in ns:
        cert = scan_min(
            family, n, HermiteFactor(standard=True),
            interval=(precision.to_mpq(args.x_min), precision.to_mpq(args.x_max)),
            grid_size=args.grid, precision_bits=args.precision, cluster=False,
        )
        ok = ok and cert.certified
        rows.append({
            "check": "standard-weighted-scan", "n": n, "outcome": cert.outcome,
            "min_delta": cert.details["min_delta"], "argmin_x": cert.details["argmin_x"],
            "precision_bits": cert.details["precision_bits"], "notes": "",
        })
    emit_rows(rows, HERMITE_FIELDS, run_config(args))
    return EXIT_OK if ok else EXIT_FINDING


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turankit",
        description="Evaluate, certify, and sharpen weighted Turan-type "
        "inequalities for recurrence-defined orthogonal polynomial families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, theta_default="auto"):
        p.add_argument("--family", default=None,
                       help="inline family: ultraspherical | hermite-monic")
        p.add_argument("--family-file", default=None, help="JSON family document")
        p.add_argument("--lambda", dest="lam", default=None,
                       help="ultraspherical parameter, rational like 1/2 or decimal")
        p.add_argument("--theta", default=theta_default,
                       help="exponent: explicit value, 'auto', or 'thm2'")
        p.add_argument("--n", default="1", help="index: single or range a..b")
        p.add_argument("--x", default="1/2", help="evaluation point")
        p.add_argument("--grid", type=int, default=4096, help="grid size")
        p.add_argument("--precision", type=int, default=default_precision_bits(),
                       help="working precision in bits")
        p.add_argument("--tol", default="1e-4", help="tolerance")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized selections")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_eval = sub.add_parser("eval", help="evaluate p_{n-1}, p_n, p_{n+1}, t_n")
    common(p_eval)
    p_eval.set_defaults(handler=cmd_eval)

    p_check = sub.add_parser("check", help="grid scan of the weighted gap per (lambda, n)")
    common(p_check)
    p_check.set_defaults(handler=cmd_check)

    p_cert = sub.add_parser("certify", help="exact Sturm certificates per (lambda, n)")
    common(p_cert)
    p_cert.set_defaults(handler=cmd_certify)

    p_sharp = sub.add_parser("sharp-theta", help="bracket the sharp exponent")
    common(p_sharp)
    p_sharp.set_defaults(handler=cmd_sharp_theta)

    p_claims = sub.add_parser("claims", help="vertex-vs-zeros location reports")
    common(p_claims)
    p_claims.set_defaults(handler=cmd_claims)

    p_audit = sub.add_parser("audit", help="sign quantities and factorisation residuals")
    common(p_audit)
    p_audit.add_argument("--symbolic", action=argparse.BooleanOptionalAction, default=True)
    p_audit.add_argument("--instances", type=int, default=5,
                         help="seeded instance count when --lambda is omitted")
    p_audit.set_defaults(handler=cmd_audit)

    p_remark = sub.add_parser("remark", help="large-n branch-gap probes at x_hat")
    common(p_remark)
    p_remark.set_defaults(handler=cmd_remark, theta="auto")

    p_plot = sub.add_parser("plot", help="SVG of t_n against both curve branches")
    common(p_plot)
    p_plot.add_argument("--x-min", default=None, type=float)
    p_plot.add_argument("--x-max", default=None, type=float)
    p_plot.set_defaults(handler=cmd_plot)

    p_askey = sub.add_parser("askey-check", help="plain Turan check for increasing a_n")
    common(p_askey)
    p_askey.add_argument("--x-min", default="-6")
    p_askey.add_argument("--x-max", default="6")
    p_askey.set_defaults(handler=cmd_askey_check)

    p_herm = sub.add_parser("hermite-check", help="Hermite-factor checks (monic + standard)")
    common(p_herm)
    p_herm.add_argument("--x-min", default="-8")
    p_herm.add_argument("--x-max", default="8")
    p_herm.set_defaults(handler=cmd_hermite_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except IrrationalParameterError as exc:
        # malformed numeric argument text, not a math failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TurankitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFRA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
