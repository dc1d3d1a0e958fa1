"""Command line front end.

Every verb builds one result dictionary; ``--format text`` renders it line by
line and ``--format json`` dumps it inside the report envelope, so both
formats carry the same data.  The exit code is 0 exactly when every
verification the verb performs succeeds.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import algebras
from .cache import ProductCache, default_cache_path
from .scalars import format_ratfunc
from .vertex_core import ExpressionSyntaxError, UnknownNameError, format_field, load_algebra

__all__ = ["main", "build_parser", "load_named_algebra", "parse_ell"]

log = logging.getLogger("voalab")

VERBS = (
    "ope",
    "normal-order",
    "verify-relation",
    "cn-table",
    "solve-decoupling",
    "solve-correction",
    "mode-bracket",
    "character",
    "verify-decomposition",
    "verify-corollary",
    "selftest",
)


class CLIError(Exception):
    pass


def parse_ell(text: str | None):
    """None for ``symbolic``; otherwise an exact rational."""
    if text is None or text == "symbolic":
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CLIError(f"--ell must be 'symbolic' or an exact rational, got {text!r}") from exc


def load_named_algebra(name: str, ell=None):
    table = {"bp": algebras.bp_algebra, "bc": algebras.bc_system, "bp-bc": algebras.bp_bc_algebra}
    if name in table:
        alg = table[name]()
    else:
        path = Path(name)
        if not path.exists():
            raise CLIError(f"unknown algebra {name!r}: use bp, bc, bp-bc or a path to an algebra file")
        alg = load_algebra(path)
    return alg.specialize(ell) if ell is not None else alg


def _integer_ell(ell) -> int:
    if ell is None or ell.denominator != 1 or ell < 1:
        raise CLIError("character commands need --ell set to a positive integer")
    return int(ell)


# -- verbs -------------------------------------------------------------------


def cmd_ope(args, alg):
    cat = algebras.catalog(alg)
    a, b = cat.parse(args.a), cat.parse(args.b)
    top = int(max(a.weights() | {0}) + max(b.weights() | {0}))
    rows = {}
    for n in range(top, -1, -1):
        p = a.nth(b, n)
        if not p.is_zero():
            rows[str(n)] = format_field(p)
    return True, {"a": format_field(a), "b": format_field(b), "products": rows}


def cmd_normal_order(args, alg):
    f = algebras.catalog(alg).parse(args.expr)
    return True, {"normal_form": format_field(f)}


def _relation_sides(text: str):
    body = "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("#"))
    if "=" in body:
        lhs, rhs = body.split("=", 1)
        return lhs, rhs
    return body, "0"


def cmd_verify_relation(args, alg):
    if args.file:
        lhs, rhs = _relation_sides(Path(args.file).read_text())
    elif args.expr:
        lhs, rhs = _relation_sides(args.expr)
    else:
        raise CLIError("verify-relation needs an expression or --file")
    cat = algebras.catalog(alg)
    diff = cat.parse(lhs) - cat.parse(rhs)
    return diff.is_zero(), {"holds": diff.is_zero(), "difference": format_field(diff) if diff else "0"}


def cmd_cn_table(args, alg):
    from .orbifold import cn_closed_form, cn_coefficients, relation_source, telescoping_formulas, telescoping_terms

    n = args.n
    coeffs, cn = cn_coefficients(relation_source(alg, n), n)
    want = cn_closed_form(n)
    if alg.specialized_at is not None:
        from .scalars import RatFuncL

        want = RatFuncL(want.specialize(alg.specialized_at))
    ok = cn == want or cn == -want
    out = {
        "n": n,
        "C_n,j": [format_ratfunc(c) for c in coeffs],
        "C_n": format_ratfunc(cn),
        "closed form": format_ratfunc(want),
        "matches closed form up to sign": ok,
    }
    if args.tables:
        if alg.specialized_at is not None:
            raise CLIError("--tables needs symbolic l")
        tabs = telescoping_terms(n, alg)["tables"]
        forms = telescoping_formulas(n)
        out["tables"] = {}
        for i, (tab, form) in enumerate(zip(tabs, forms), 1):
            row = []
            for j, v in enumerate(tab):
                agree = any(v == f for f in form.get(j, []))
                ok = ok and agree
                row.append({"j": j, "value": format_ratfunc(v), "formula agrees": agree})
            out["tables"][f"C^{i}"] = row
    return ok, out


def cmd_solve_decoupling(args, alg):
    from .orbifold import solve_decoupling

    res = solve_decoupling(args.n, reduce=False, alg=alg)
    if not res.decoupled:
        return True, {"n": args.n, "decoupled": False, "note": res.note}
    ok = res.verify()
    return ok, {
        "n": args.n,
        "target": res.target,
        "leading coefficient": format_ratfunc(res.leading_coefficient),
        "C_n": format_ratfunc(res.cn),
        "remainder": res.remainder.text(),
        "verified": ok,
    }


def cmd_solve_correction(args, alg):
    from .orbifold import commutant_check, solve_correction

    res = solve_correction(args.i, alg=alg)
    commutes = commutant_check(res.corrected, alg["J"])
    ok = res.unique and commutes and (alg.specialized_at is not None or res.denominators_allowed())
    return ok, {
        "i": args.i,
        "omega": format_field(res.omega),
        "unique": res.unique,
        "denominators": [str(f).replace("x", "l") for f in res.denominators],
        "denominators allowed": res.denominators_allowed(),
        "commutes with J": commutes,
    }


def cmd_mode_bracket(args, alg):
    from .vertex_core import mode_bracket, reduce_derivatives

    cat = algebras.catalog(alg)
    ms = mode_bracket(cat.parse(args.a), cat.parse(args.b), shifted=args.shifted)
    if not args.keep_derivatives:
        ms = reduce_derivatives(ms)
    return True, {"bracket": ms.text(), "shifted": args.shifted}


def _series_rows(series, z_graded: bool):
    from .characters.formulas import _series_json

    return _series_json(series if z_graded else series.at_one())


def cmd_character(args, alg):
    from .characters import bp_character

    if args.algebra != "bp":
        raise CLIError("characters are available for --algebra bp only")
    ell = _integer_ell(args.ell_value)
    ch = bp_character(ell, args.order, normalized=args.normalized)
    text = str(ch if args.z_power_grading else ch.at_one())
    return True, {"ell": ell, "order": args.order, "series": text, "terms": _series_rows(ch, args.z_power_grading)}


def cmd_verify_decomposition(args, alg):
    from .characters import verify_decomposition

    rep = verify_decomposition(_integer_ell(args.ell_value), args.order)
    return rep.passed, rep.to_json()


def cmd_verify_corollary(args, alg):
    from .characters import verify_corollary

    ell = _integer_ell(args.ell_value)
    if not 0 <= args.s < 2 * ell:
        raise CLIError("--s must lie in 0..2l-1")
    rep = verify_corollary(ell, args.s, args.order)
    return rep.passed, rep.to_json()


def cmd_selftest(args, alg):
    from .acceptance import run_criterion

    which = sorted({int(x) for x in args.criteria.split(",")}) if args.criteria else list(range(1, 13))
    threads = max(1, args.threads or 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run_criterion, which))
    else:
        results = [run_criterion(k) for k in which]
    return all(r.passed for r in results), {"criteria": [r.to_json() for r in results]}


HANDLERS = {
    "ope": cmd_ope,
    "normal-order": cmd_normal_order,
    "verify-relation": cmd_verify_relation,
    "cn-table": cmd_cn_table,
    "solve-decoupling": cmd_solve_decoupling,
    "solve-correction": cmd_solve_correction,
    "mode-bracket": cmd_mode_bracket,
    "character": cmd_character,
    "verify-decomposition": cmd_verify_decomposition,
    "verify-corollary": cmd_verify_corollary,
    "selftest": cmd_selftest,
}

# verbs whose work goes through the n-th product engine
_ENGINE_VERBS = {"ope", "normal-order", "verify-relation", "cn-table", "solve-decoupling", "solve-correction", "mode-bracket"}


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", default="bp", help="bp, bc, bp-bc or a path to an algebra file")
    common.add_argument("--ell", default="symbolic", help="'symbolic' or an exact rational such as 1 or 3/2")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache", default=None, help="product cache file (default: $VOALAB_CACHE)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="voalab", description="Exact OPE computations in W^l and related algebras.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("ope", parents=[common], help="all n-th products a o_n b, n >= 0")
    s.add_argument("a")
    s.add_argument("b")
    s = sub.add_parser("normal-order", parents=[common], help="normal form of an expression")
    s.add_argument("expr")
    s = sub.add_parser("verify-relation", parents=[common], help="check LHS = RHS (or EXPR = 0)")
    s.add_argument("expr", nargs="?")
    s.add_argument("--file")
    s = sub.add_parser("cn-table", parents=[common], help="C_{n,j} coefficients of the weight n+7 relation source")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tables", action="store_true", help="also compare the telescoping tables")
    s = sub.add_parser("solve-decoupling", parents=[common], help="decoupling relation for U_{0,n+4}")
    s.add_argument("--n", type=int, required=True)
    s = sub.add_parser("solve-correction", parents=[common], help="commutant correction of U_{0,i}")
    s.add_argument("--i", type=int, required=True)
    s = sub.add_parser("mode-bracket", parents=[common], help="[a_m, b_n] with symbolic m, n")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--shifted", action="store_true", help="charged fields carry the extra z^{-q/2}")
    s.add_argument("--keep-derivatives", action="store_true")
    s = sub.add_parser("character", parents=[common], help="ch W_l as a truncated series")
    s.add_argument("--order", type=Fraction, default=Fraction(8))
    s.add_argument("--z-power-grading", action="store_true", help="keep the z-grading instead of z = 1")
    s.add_argument("--normalized", action="store_true", help="drop q^{-c/24}")
    s = sub.add_parser("verify-decomposition", parents=[common])
    s.add_argument("--order", type=Fraction, default=Fraction(8))
    s = sub.add_parser("verify-corollary", parents=[common])
    s.add_argument("--order", type=Fraction, default=Fraction(8))
    s.add_argument("--s", type=int, default=0)
    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,11")
    return p


def _render_text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                out.extend(_render_text(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                out.append(f"{pad}-")
                out.extend(_render_text(v, indent + 1))
            else:
                out.append(f"{pad}- {v}")
    else:
        out.append(f"{pad}{value}")
    return out


def _render_selftest(result: dict) -> list[str]:
    lines = []
    for c in result["criteria"]:
        lines.append(f"criterion {c['criterion']:2d} {'PASS' if c['passed'] else 'FAIL'}  {c['title']}  ({c['seconds']:.1f}s)")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cache_path = args.cache or default_cache_path()
    try:
        args.ell_value = parse_ell(args.ell)
        alg = load_named_algebra(args.algebra, args.ell_value)
        cache = ProductCache(cache_path) if cache_path and args.verb in _ENGINE_VERBS else None
        if cache:
            n = cache.warm(alg)
            log.info("cache %s: %s, %d products", cache_path, cache.status, n)
        ok, result = HANDLERS[args.verb](args, alg)
        if cache:
            cache.absorb(alg)
            cache.save()
    except (CLIError, ExpressionSyntaxError, UnknownNameError, ValueError) as exc:
        print(f"voalab {args.verb}: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        doc = {"command": args.verb, "ok": ok, "result": result, "cache": str(cache_path) if cache_path else None}
        print(json.dumps(doc, indent=2, default=str))
    else:
        lines = _render_selftest(result) if args.verb == "selftest" else _render_text(result)
        print("\n".join(lines))
        print("ok" if ok else "FAILED")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
