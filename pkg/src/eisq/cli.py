"""Command-line front end.

Subcommands: classnum, selmer, eta, heegner, eigencheck.  Output formats:
table (default), json, tsv.  All numbers are exact: integers, or rationals
rendered as [numerator, denominator] pairs; no floats anywhere.  JSON is
canonical (sorted keys, compact separators) so equal results are
byte-identical.  Exit codes: 0 ok, 2 validation error, 3 internal
consistency failure, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import classgroup, descent, etacusp, modforms, selmer
from .errors import InternalCheckError, ResourceCapError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3
EXIT_CAP = 4


def _jsonable(obj):
    if isinstance(obj, bool) or isinstance(obj, int) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, float):
        raise InternalCheckError("floats are not allowed in output")
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    raise InternalCheckError(f"cannot serialize {type(obj)}")


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _emit(doc: dict, fmt: str, table_lines, out):
    if fmt == "json":
        out.write(canonical_json(doc) + "\n")
    elif fmt == "tsv":
        for row in doc.get("rows", [doc]):
            flat = _jsonable(row)
            keys = sorted(flat) if isinstance(flat, dict) else range(len(flat))
            out.write(
                "\t".join(json.dumps(_jsonable(flat[k]), separators=(",", ":")) for k in keys)
                + "\n"
            )
    else:
        for line in table_lines:
            out.write(line + "\n")


def _fmt_arg(sub):
    sub.add_argument("--format", choices=("table", "json", "tsv"), default="table")


# --- classnum ---------------------------------------------------------------


def _cmd_classnum(args, out) -> int:
    if args.disc is None and args.p is None:
        raise ValidationError("classnum needs --p or --disc")
    if args.disc is not None:
        disc = args.disc
        forms = classgroup.reduced_forms(disc)
        doc = {"disc": disc, "h": len(forms), "forms": [[f.a, f.b, f.c] for f in forms]}
        lines = [f"disc {disc}: h = {len(forms)}"]
    else:
        p = args.p
        h = classgroup.class_number(p)
        forms = classgroup.reduced_forms(-p)
        doc = {"p": p, "h": h, "forms": [[f.a, f.b, f.c] for f in forms]}
        lines = [f"p = {p}: h = {h}"]
    lines += [f"  {f}" for f in forms]
    _emit(doc, args.format, lines, out)
    return EXIT_OK


# --- selmer -----------------------------------------------------------------


def _selmer_row(p: int, d: int, with_oracle: bool) -> dict:
    td = selmer.build_twist(p, d)
    res = selmer.selmer_rank_graph(td)
    row = {
        "p": p,
        "d": d,
        "generators": [label for label, _ in td.alpha_gens],
        "arrows": [[int(b) for b in line] for line in res.graph.arrows],
        "t": res.t,
        "nontrivial_even_partitions": res.nontrivial_even_partitions,
        "rank": res.rank,
        "dim_f2": res.dim_f2,
    }
    if with_oracle:
        brute = selmer.selmer_group_bruteforce(td)
        row["oracle_dim_f2"] = brute.dim_f2
        if brute.dim_f2 != res.dim_f2:
            raise InternalCheckError(
                f"oracle disagrees with graph at p={p}, d={d}: "
                f"{brute.dim_f2} vs {res.dim_f2}"
            )
        row["oracle_agrees"] = True
    return row


def _cmd_selmer(args, out) -> int:
    with_oracle = args.oracle
    if args.d_range:
        try:
            lo, hi = (int(x) for x in args.d_range.split(".."))
        except ValueError:
            raise ValidationError(f"bad range {args.d_range!r}, expected LO..HI")
        rows = []
        for d in selmer.admissible_twists(args.p, max(abs(lo), abs(hi))):
            if lo <= d <= hi:
                row = _selmer_row(args.p, d, with_oracle)
                rows.append(row)
                if args.format == "tsv":
                    flat = {
                        k: row[k]
                        for k in ("p", "d", "t", "rank", "dim_f2")
                    }
                    if with_oracle:
                        flat["oracle_dim_f2"] = row["oracle_dim_f2"]
                    out.write("\t".join(str(flat[k]) for k in sorted(flat)) + "\n")
        if args.format == "tsv":
            return EXIT_OK
        doc = {"rows": rows}
        lines = [
            f"p={r['p']} d={r['d']}: rank {r['rank']} (t={r['t']}, dim {r['dim_f2']})"
            for r in rows
        ]
        _emit(doc, args.format, lines, out)
        return EXIT_OK
    if args.d is None:
        raise ValidationError("selmer needs --d or --d-range")
    row = _selmer_row(args.p, args.d, with_oracle)
    lines = [
        f"p = {row['p']}, d = {row['d']}",
        f"generators: {' '.join(row['generators'])}",
        "arrows:",
    ]
    for label, arrow_row in zip(row["generators"], row["arrows"]):
        lines.append(f"  {label:>12} -> {' '.join(str(x) for x in arrow_row)}")
    lines.append(
        f"t = {row['t']} (nontrivial even partitions: {row['nontrivial_even_partitions']})"
    )
    lines.append(f"rank = {row['rank']}, dim_F2 = {row['dim_f2']}")
    if with_oracle:
        lines.append(f"oracle dim_F2 = {row['oracle_dim_f2']} (agrees)")
    _emit(row, args.format, lines, out)
    return EXIT_OK


# --- eta --------------------------------------------------------------------


def _parse_exponents(n: int, text: str) -> dict[int, int]:
    divs = etacusp.divisors(n)
    parts = [int(x) for x in text.split(",")]
    if len(parts) != len(divs):
        raise ValidationError(
            f"level {n} has {len(divs)} divisors {divs}; got {len(parts)} exponents"
        )
    return dict(zip(divs, parts))


def _cmd_eta(args, out) -> int:
    n = args.N
    if args.special:
        p0, k = etacusp._level_prime(n)
        kind = etacusp.PRIME_LEVEL if k == 1 else etacusp.P2_LEVEL
        r = etacusp.special_function(kind, p0)
    elif args.r:
        r = _parse_exponents(n, args.r)
    else:
        raise ValidationError("eta needs --r or --special")
    report = etacusp.ligozat_check(n, r)
    divs = etacusp.divisors(n)
    doc = {
        "level": n,
        "exponents": [r.get(d, 0) for d in divs],
        "divisors": divs,
        "ligozat": {
            "sum_zero": report.sum_zero,
            "weighted_mod24": report.weighted_mod24,
            "dual_mod24": report.dual_mod24,
            "square_product": report.square_product,
            "ok": report.ok,
        },
    }
    lines = [
        f"level {n}, exponents {[r.get(d, 0) for d in divs]} on divisors {divs}",
        f"rationality: sum_zero={report.sum_zero} weighted_mod24={report.weighted_mod24} "
        f"dual_mod24={report.dual_mod24} square_product={report.square_product} -> ok={report.ok}",
    ]
    image = etacusp.eta_divisor(n, r)
    doc["divisor"] = {str(d): image.coeff(d) for d in divs}
    lines.append(f"divisor: {image}")
    if report.ok and image.is_integral():
        nonzero = any(image.coeffs)
        if nonzero:
            base = _primitive_part(image)
            order = etacusp.cuspidal_class_order(n, base)
            doc["class_order"] = order
            doc["primitive_divisor"] = {str(d): base.coeff(d) for d in divs}
            lines.append(f"primitive divisor {base} has class order {order}")
    _emit(doc, args.format, lines, out)
    return EXIT_OK


def _primitive_part(div: etacusp.CuspDivisor) -> etacusp.CuspDivisor:
    vec = div.int_vector()
    g = 0
    for x in vec:
        g = math.gcd(g, abs(x))
    return etacusp.CuspDivisor(div.level, tuple(Fraction(x, g) for x in vec))


# --- heegner ----------------------------------------------------------------


def _verdict_doc(v: descent.Verdict) -> dict:
    return {
        "criterion": v.criterion_tag,
        "conclusion": v.conclusion,
        "trace": [
            {"name": t.name, "value": t.value, "passed": t.passed, "assumed": t.assumed}
            for t in v.trace
        ],
    }


def _verdict_lines(v: descent.Verdict) -> list[str]:
    lines = [f"[{v.criterion_tag}] conclusion: {v.conclusion.upper()}"]
    for t in v.trace:
        mark = "ok" if t.passed else "FAIL"
        star = " (assumed)" if t.assumed else ""
        lines.append(f"  {mark:>4}  {t.name}: {t.value}{star}")
    if v.conclusion == descent.INCONCLUSIVE:
        lines.append("  note: inconclusive does not mean torsion; the criterion is one-way")
    return lines


def _cmd_heegner(args, out) -> int:
    if args.ns is not None:
        p = args.ns
        ns = descent.neumann_setzer(p)
        doc = {
            "p": p,
            "is_ns_prime": ns.is_ns_prime,
            "u": ns.u,
            "u_mod_8": ns.u_mod_8,
            "two_eisenstein_simple": ns.two_eisenstein_simple,
        }
        lines = [
            f"p = {p}: u^2 + 64 form: {ns.is_ns_prime}"
            + (f", u = {ns.u}, u mod 8 = {ns.u_mod_8}, simple: {ns.two_eisenstein_simple}" if ns.is_ns_prime else "")
        ]
        if args.K is not None:
            v = descent.verdict_ns_curve(p, args.K)
            doc["verdict"] = _verdict_doc(v)
            lines += _verdict_lines(v)
        _emit(doc, args.format, lines, out)
        return EXIT_OK
    if args.p2 is not None:
        if args.K is None or args.q is None:
            raise ValidationError("heegner --p2 needs --K and --q")
        v = descent.verdict_p2_level(args.p2, args.K, args.q)
    elif args.p is not None:
        if args.K is None:
            raise ValidationError("heegner --p needs --K")
        if args.q == 2:
            v = descent.verdict_prime_level_2(args.p, args.K)
        elif args.q is not None:
            v = descent.verdict_prime_level_odd_q(args.p, args.K, args.q)
        else:
            raise ValidationError("heegner --p needs --q")
    else:
        raise ValidationError("heegner needs one of --p, --p2, --ns")
    _emit(_verdict_doc(v), args.format, _verdict_lines(v), out)
    return EXIT_OK


# --- eigencheck -------------------------------------------------------------


def _cmd_eigencheck(args, out) -> int:
    primes = None
    if args.primes:
        primes = [int(x) for x in args.primes.split(",")]
    report = modforms.eisenstein_eigencheck(args.p, args.prec, primes)
    doc = {
        "p": report.p,
        "prec": report.prec,
        "results": [
            {
                "ell": r.ell,
                "operator": r.operator,
                "status": r.status,
                "retained_coefficients": r.retained,
                "first_discrepancy": r.first_discrepancy,
            }
            for r in report.results
        ],
        "ok": report.ok,
    }
    lines = [f"p = {report.p}, precision {report.prec}"]
    for r in report.results:
        extra = f" (first discrepancy at {r.first_discrepancy})" if r.status == "fail" else ""
        lines.append(f"  {r.operator}_{r.ell}: {r.status} [{r.retained} coefficients]{extra}")
    if report.insufficient:
        lines.append(
            f"warning: insufficient precision for ell in {list(report.insufficient)}"
        )
    lines.append("all pass" if report.ok else "NOT all pass")
    _emit(doc, args.format, lines, out)
    return EXIT_OK if report.ok else EXIT_INTERNAL


# --- driver -----------------------------------------------------------------


def _merge_dash_values(argv: list[str]) -> list[str]:
    # let range values like "-199..199" follow their flag without being
    # mistaken for an option
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--d-range" and i + 1 < len(argv):
            out.append(f"--d-range={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eisq",
        description="Exact computations for 2-Selmer ranks of CM twists, "
        "eta-products and cuspidal divisors, Hecke eigenchecks, and Heegner "
        "point verdicts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classnum", help="class number and reduced forms")
    c.add_argument("--p", type=int, help="prime p = 3 mod 4, field Q(sqrt(-p))")
    c.add_argument("--disc", type=int, help="negative discriminant (alternative to --p)")
    _fmt_arg(c)
    c.set_defaults(func=_cmd_classnum)

    s = sub.add_parser("selmer", help="2-Selmer rank of a quadratic twist")
    s.add_argument("--p", type=int, required=True, help="prime p = 7 mod 8")
    s.add_argument("--d", type=int, help="twist parameter, squarefree, 1 mod 4")
    s.add_argument("--d-range", dest="d_range", help="sweep range LO..HI")
    s.add_argument("--oracle", action="store_true", help="run the brute-force oracle too")
    _fmt_arg(s)
    s.set_defaults(func=_cmd_selmer)

    e = sub.add_parser("eta", help="eta-product rationality, divisor, class order")
    e.add_argument("--N", type=int, required=True, help="level p or p^2")
    e.add_argument("--r", help="comma-separated exponents, ascending divisors")
    e.add_argument("--special", action="store_true", help="use the canonical eta-product")
    _fmt_arg(e)
    e.set_defaults(func=_cmd_eta)

    h = sub.add_parser("heegner", help="Heegner point verdicts")
    h.add_argument("--p", type=int, help="prime level")
    h.add_argument("--p2", type=int, help="prime p for level p^2")
    h.add_argument("--ns", type=int, help="Neumann-Setzer report for this prime")
    h.add_argument("--K", type=int, help="negative fundamental discriminant of K")
    h.add_argument("--q", type=int, help="Eisenstein prime q")
    _fmt_arg(h)
    h.set_defaults(func=_cmd_heegner)

    g = sub.add_parser("eigencheck", help="Hecke eigenform check for the Eisenstein series")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--prec", type=int, default=200)
    g.add_argument("--primes", help="comma-separated Hecke primes (default: up to 13)")
    _fmt_arg(g)
    g.set_defaults(func=_cmd_eigencheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_dash_values(list(argv))
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InternalCheckError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
