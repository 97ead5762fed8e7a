"""Command line interface.

Exit codes: 0 success / pass, 1 checked and failed, 2 usage error,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .ke import PairMode, check_ke, derive
from .moduli import ModuliBudgetExceeded, moduli_dimension
from .numtheory import bp_order
from .records import RecordRow, csv_header, format_fraction, to_csv_line, to_json_line
from .search import (
    Search,
    SearchCheckpoint,
    classify,
    generate_family,
    sylvester,
)
from .signature import BudgetExceeded, Method, PrecisionInsufficient

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
JOBS_ENV = "BRIESKORN_JOBS"

METHODS = {"brute": Method.BRUTE_LATTICE, "dp": Method.POLYNOMIAL_DP, "zagier": Method.ZAGIER_FLOAT}


class UsageError(Exception):
    pass


def _sequence(values: Sequence[int], min_len: int = 3):
    if len(values) < min_len:
        raise UsageError(f"need at least {min_len} exponents, got {len(values)}")
    if any(v < 2 for v in values):
        raise UsageError("every exponent must be an integer >= 2")
    return derive(values)


def _fmt(q: Fraction, with_float: bool) -> str:
    s = format_fraction(q)
    return f"{s} (~{float(q):.12g})" if with_float else s


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


# -- commands ---------------------------------------------------------------


def cmd_check(args) -> int:
    seq = _sequence(args.exponents)
    cert = check_ke(seq, args.pair_mode)
    if args.json:
        out = {
            "a": ",".join(map(str, seq.a)),
            "fano_sum": format_fraction(cert.fano_sum),
            "upper_bound": format_fraction(cert.upper_bound),
            "min_term": format_fraction(cert.min_term),
            "min_term_kind": cert.min_term_kind,
            "min_term_indices": list(cert.min_term_indices),
            "pair_mode": cert.pair_mode.value,
            "passes_fano": cert.passes_fano,
            "passes_upper": cert.passes_upper,
            "passes": cert.passes,
        }
        if args.float:
            out["fano_sum_float"] = float(cert.fano_sum)
            out["upper_bound_float"] = float(cert.upper_bound)
        print(json.dumps(out))
    else:
        f = args.float
        print(f"a = {seq}   m = {seq.m}   link dimension {seq.link_dim}")
        print(f"  b            = ({','.join(map(str, seq.b))})")
        print(f"  sum 1/a_i    = {_fmt(cert.fano_sum, f)}")
        print(
            f"  upper bound  = {_fmt(cert.upper_bound, f)}"
            f"   [min term {format_fraction(cert.min_term)}: {cert.min_term_kind}"
            f" at {cert.min_term_indices}, {cert.pair_mode.value}]"
        )
        print(f"  fano: {'pass' if cert.passes_fano else 'FAIL'}"
              f"   upper: {'pass' if cert.passes_upper else 'FAIL'}")
        print(f"  verdict: {'PASS' if cert.passes else 'FAIL'}")
    return EXIT_OK if cert.passes else EXIT_FAILED


def cmd_classify(args) -> int:
    seq = _sequence(args.exponents, min_len=4)
    rec = classify(seq, args.pair_mode, METHODS[args.method])
    row = RecordRow.from_record(rec)
    if args.json:
        print(to_json_line(row))
        return EXIT_OK
    link = rec.link
    print(f"a = {seq}   m = {seq.m}   link dimension {seq.link_dim}")
    print(f"  sum 1/a_i    = {_fmt(row.fano_sum, args.float)}")
    print(f"  upper bound  = {_fmt(row.upper_bound, args.float)}")
    print(f"  einstein     : {'PASS' if row.passes else 'not certified'}")
    print(f"  sphere       : {link.is_homotopy_sphere} ({link.criterion.value})")
    if rec.tau is not None:
        print(f"  signature    : {rec.tau}")
    if link.bp_class is not None:
        order = bp_order(seq.link_dim + 1)
        label = "standard" if link.bp_class == 0 else "exotic"
        print(f"  bP class     : {link.bp_class} of {order} ({label})")
    if link.kervaire.value != "NotApplicable":
        exotic = {True: "exotic", False: "not exotic", None: "exoticity unknown"}[link.exotic]
        print(f"  kervaire     : {link.kervaire.value} ({exotic}; arf {link.arf_invariant})")
    print(f"  moduli       : {rec.moduli_real_dim} real dimensions")
    print(f"  no contact   : {rec.contact_excluded}")
    return EXIT_OK


def _summary(search: Search) -> dict:
    d = search.tally.to_dict()
    alt = "off_diagonal_only" if search.pair_mode is PairMode.INCLUDE_DIAGONAL else "include_diagonal"
    return {
        "dimension": search.link_dim,
        "pair_mode": search.pair_mode.value,
        "partial": search.partial,
        "max_last": search.max_last,
        "total": d["total"],
        "class_count": len(d["classes"]),
        "classes": d["classes"],
        "alt_pair_mode": alt,
        "alt_total": d["alt_total"],
        "candidates": d["candidates"],
        "contact_violations": d["contact_violations"],
        "tau_violations": d["tau_violations"],
    }


def cmd_enumerate(args) -> int:
    if args.dim < 5 or args.dim % 2 == 0:
        raise UsageError(f"--dim must be odd and >= 5, got {args.dim}")
    if args.dim >= 9 and args.max_last is None:
        raise UsageError("dimensions >= 9 need --max-last (partial search)")
    resume = None
    if args.checkpoint and os.path.exists(args.checkpoint):
        try:
            resume = SearchCheckpoint.load(args.checkpoint)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"unreadable checkpoint {args.checkpoint}: {exc}")
        if (resume.dimension, resume.pair_mode.value, resume.max_last) != (
            args.dim,
            PairMode(args.pair_mode).value,
            args.max_last,
        ):
            raise UsageError("checkpoint does not match --dim/--pair-mode/--max-last")

    if args.output:
        if resume is not None and resume.output_bytes is not None and os.path.exists(args.output):
            out = open(args.output, "r+", encoding="utf-8", newline="")
            # drop anything written after the last completed prefix
            out.truncate(resume.output_bytes)
            out.seek(resume.output_bytes)
        else:
            out = open(args.output, "a" if resume else "w", encoding="utf-8", newline="")
    else:
        out = sys.stdout

    def save(ckpt: SearchCheckpoint):
        out.flush()
        if args.checkpoint:
            if out is not sys.stdout:
                ckpt.output_bytes = out.tell()
            ckpt.save(args.checkpoint)

    search = Search(
        args.dim,
        args.pair_mode,
        max_last=args.max_last,
        jobs=args.jobs,
        method=METHODS[args.method],
        resume=resume,
        on_prefix_complete=save,
    )
    start = time.perf_counter()
    try:
        if args.out == "csv" and resume is None:
            out.write(csv_header())
        for rec in search.records(stop_after_prefixes=args.stop_after_prefixes):
            row = RecordRow.from_record(rec)
            out.write(to_json_line(row) + "\n" if args.out == "json" else to_csv_line(row))
        if args.stop_after_prefixes is not None and not search.finished:
            print("stopped early; rerun with the same --checkpoint to resume", file=sys.stderr)
            return EXIT_OK
        line = json.dumps({"summary": _summary(search)})
        if args.out == "json":
            out.write(line + "\n")
        else:
            print(line, file=sys.stderr)
        print(f"{search.tally.total} families in {time.perf_counter() - start:.1f}s", file=sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()
        else:
            out.flush()
    return EXIT_OK


def cmd_moduli(args) -> int:
    seq = _sequence(args.exponents, min_len=4)
    rep = moduli_dimension(seq)
    if args.json:
        print(json.dumps({
            "a": ",".join(map(str, seq.a)),
            "dim_sections_d": rep.dim_sections_d,
            "dim_sections_wi": list(rep.dim_sections_wi) if rep.dim_sections_wi else None,
            "complex_dim": rep.complex_dim,
            "real_dim": rep.real_dim,
            "exact": rep.exact,
            "clamped": rep.clamped,
            "closed_form": rep.closed_form,
        }))
    else:
        qualifier = "exactly" if rep.exact else "at least"
        print(f"a = {seq}: {qualifier} {rep.real_dim} real ({rep.complex_dim} complex) dimensions")
        if rep.closed_form:
            print("  (closed form for the Sylvester moduli family)")
        else:
            print(f"  dim H0(C) = {rep.dim_sections_d}, dim H0(w_i) = {list(rep.dim_sections_wi)}")
    return EXIT_OK


def cmd_bp_order(args) -> int:
    try:
        print(bp_order(args.n))
    except ValueError as exc:
        raise UsageError(str(exc))
    return EXIT_OK


def cmd_sylvester(args) -> int:
    if args.k < 1:
        raise UsageError("k must be >= 1")
    print(" ".join(str(sylvester(k)) for k in range(1, args.k + 1)))
    return EXIT_OK


def _line(label: str, value: str, ok: bool) -> str:
    return f"{label:<34} {value} {'PASS' if ok else 'FAIL'}"


def table_lines(include_dim7: bool = True, jobs: int = 1) -> list[tuple[str, bool]]:
    """Headline numbers recomputed from scratch, each with its verdict."""
    rows = []

    orders = [bp_order(n) for n in (8, 12, 16)]
    rows.append(("|bP_8| |bP_12| |bP_16|", " ".join(map(str, orders)), orders == [28, 992, 8128]))

    syl = [sylvester(k) for k in range(1, 8)]
    rows.append(("Sylvester c_1..c_7", " ".join(map(str, syl)),
                 syl == [2, 3, 7, 43, 1807, 3263443, 10650056950807]))

    s5 = Search(5)
    recs5 = list(s5.records())
    all_std = all(r.link.kervaire.value == "Standard" for r in recs5)
    rows.append(("S^5 families (all standard)", f"{len(recs5)}", len(recs5) == 68 and all_std))

    fam = [x for x in range(5, 42)
           if check_ke(derive((2, 3, 7, x))).passes and classify(derive((2, 3, 7, x))).link.is_homotopy_sphere]
    rows.append(("(2,3,7,a) with 5 <= a <= 41", f"{len(fam)}", len(fam) == 27))

    if include_dim7:
        s7 = Search(7, jobs=jobs)
        n7 = sum(1 for _ in s7.records())
        counts = sorted(s7.tally.classes.values())
        rows.append(("S^7 families", f"{n7}", n7 == 8610))
        rows.append(("S^7 populated bP_8 classes", f"{len(counts)}", len(counts) == 28))
        rows.append(("S^7 per-class count range [231,452]", f"[{counts[0]},{counts[-1]}]",
                     counts[0] >= 231 and counts[-1] <= 452))

    giant = next(generate_family("ModuliGiant", 8))
    dims = [
        moduli_dimension(derive((2, 3, 7, 35))).real_dim,
        moduli_dimension(derive((2, 3, 7, 43, 1333))).real_dim,
        moduli_dimension(giant).real_dim,
    ]
    rows.append(("moduli (2,3,7,35)", str(dims[0]), dims[0] == 10))
    rows.append(("moduli (2,3,7,43,1333)", str(dims[1]), dims[1] == 82))
    rows.append(("moduli Sylvester giant m=8", str(dims[2]), dims[2] == 21300113901610))
    return [(_line(label, value, ok), ok) for label, value, ok in rows]


def cmd_tables(args) -> int:
    ok = True
    for line, passed in table_lines(include_dim7=not args.skip_dim7, jobs=args.jobs):
        print(line, flush=True)
        ok &= passed
    return EXIT_OK if ok else EXIT_FAILED


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="brieskorn",
        description="Sasakian-Einstein metrics on Brieskorn-Pham links: checks, classification, search.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def seq_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("exponents", nargs="+", type=int, metavar="A")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    pair_modes = [m.value for m in PairMode]

    sp = seq_cmd("check", "test the existence inequality")
    sp.add_argument("--pair-mode", choices=pair_modes, default=PairMode.INCLUDE_DIAGONAL.value)
    sp.add_argument("--float", action="store_true", help="add decimal approximations")
    sp.set_defaults(func=cmd_check)

    sp = seq_cmd("classify", "full classification of one sequence")
    sp.add_argument("--pair-mode", choices=pair_modes, default=PairMode.INCLUDE_DIAGONAL.value)
    sp.add_argument("--method", choices=sorted(METHODS), default="dp")
    sp.add_argument("--float", action="store_true", help="add decimal approximations")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("enumerate", help="all families in one link dimension")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--pair-mode", choices=pair_modes, default=PairMode.INCLUDE_DIAGONAL.value)
    sp.add_argument("--out", choices=["json", "csv"], default="json")
    sp.add_argument("--output", help="write records here instead of stdout")
    sp.add_argument("--checkpoint", help="checkpoint file; resumed from if it exists")
    sp.add_argument("--max-last", type=int, help="cap on the largest exponent (partial search)")
    sp.add_argument("--jobs", type=int, default=_default_jobs(),
                    help=f"worker processes (default ${JOBS_ENV} or 1)")
    sp.add_argument("--method", choices=sorted(METHODS), default="dp")
    sp.add_argument("--stop-after-prefixes", type=int, help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_enumerate)

    sp = seq_cmd("moduli", "moduli dimension of the Einstein family")
    sp.set_defaults(func=cmd_moduli)

    sp = sub.add_parser("bp-order", help="order of bP_n for n = 4m >= 8")
    sp.add_argument("n", type=int)
    sp.set_defaults(func=cmd_bp_order)

    sp = sub.add_parser("sylvester", help="first k Sylvester numbers")
    sp.add_argument("k", type=int)
    sp.set_defaults(func=cmd_sylvester)

    sp = sub.add_parser("tables", help="recompute the headline numbers")
    sp.add_argument("--skip-dim7", action="store_true", help="skip the 7-sphere search")
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    sp.set_defaults(func=cmd_tables)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"brieskorn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except (BudgetExceeded, ModuliBudgetExceeded, PrecisionInsufficient) as exc:
        print(f"brieskorn {args.command}: resource limit: {exc}", file=sys.stderr)
        if isinstance(exc, BudgetExceeded) and getattr(args, "method", None) == "brute":
            print("  retry with --method dp", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
