"""Command-line entry point: ``tatelab <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import abeloid, phin, scenarios, surface
from .errors import TatelabError, fail
from .multgroup import QpContext
from .padic import DEFAULT_PRECISION, PadicNumber, PrecisionReport, hensel_sqrt, make_padic

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


# -- serialisation ---------------------------------------------------------------


def to_jsonable(x):
    if isinstance(x, PadicNumber):
        return phin.padic_literal(x)
    if isinstance(x, PrecisionReport):
        return x.to_dict()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, phin.Form):
        return x.to_text()
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return x


def dump(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    obj = to_jsonable(obj)
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, dict) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    return pad + json.dumps(obj)


# -- input helpers ----------------------------------------------------------------


def parse_matrix_text(text: str) -> list[list[str]]:
    """'p,1;1,p' -> [['p', '1'], ['1', 'p']]."""
    return [[e.strip() for e in row.split(",")] for row in text.split(";")]


def _context(args) -> QpContext:
    return QpContext(args.prime, args.precision)


def _load_input(args) -> dict | None:
    if not args.input:
        return None
    with open(args.input) as fh:
        return json.load(fh)


def _matrix(args, ctx: QpContext, text: str | None, key: str) -> abeloid.PeriodMatrix:
    data = _load_input(args)
    if text is not None:
        return abeloid.PeriodMatrix.parse(ctx, parse_matrix_text(text))
    if data is not None:
        if key in data:
            data = data[key]
        elif "entries" not in data:
            raise fail("BAD_INPUT", f"input file has no matrix {key!r}")
        data = dict(data)
        data.setdefault("p", args.prime)
        return abeloid.PeriodMatrix.from_json(data, args.precision)
    raise fail("BAD_INPUT", f"matrix {key} not given")


def parse_facts(items) -> phin.Facts | None:
    """'L1=L2', 'L1=0', 'independent:L1,L2' -> Facts."""
    if not items:
        return None
    independent, relations = set(), {}
    for item in items:
        if item.startswith("independent:"):
            independent |= {n.strip() for n in item.split(":", 1)[1].split(",") if n.strip()}
            continue
        if "=" not in item:
            raise fail("BAD_FACT", f"cannot read fact {item!r}")
        lhs, rhs = (s.strip() for s in item.split("=", 1))
        try:
            relations[lhs] = phin.Form.const(Fraction(rhs))
        except ValueError:
            relations[lhs] = phin.Form.var(rhs)
    return phin.Facts(frozenset(independent), relations)


def _hom_dict(r: abeloid.HomSpaceResult) -> dict:
    return {
        "kind": r.kind,
        "dimension": r.dimension,
        "certified": r.certified,
        "basis": r.basis,
        "integral": r.integral_data,
        "cross_check": r.cross_check,
        "notes": r.notes,
    }


# -- subcommands ------------------------------------------------------------------


def cmd_linv(args):
    ctx = _context(args)
    Q = _matrix(args, ctx, args.matrix, "Q")
    return {
        "ord": abeloid.ord_matrix(Q),
        "l_invariant": abeloid.l_invariant(Q),
        "exact_l_invariant": _exact_forms(abeloid.exact_l_invariant(Q)),
        "warnings": Q.warnings,
    }


def _exact_forms(forms):
    if forms is None:
        return None
    out = []
    for row in forms:
        out.append([" + ".join(f"{c}*{surface._constant_name(k)}" for k, c in sorted(f.items())) or "0" for f in row])
    return out


def cmd_hom(args):
    ctx = _context(args)
    A, B = _matrix(args, ctx, args.A, "A"), _matrix(args, ctx, args.B, "B")
    return _hom_dict(abeloid.hom_algebraic(A, B, args.mode))


def cmd_tate_hom(args):
    ctx = _context(args)
    A, B = _matrix(args, ctx, args.A, "A"), _matrix(args, ctx, args.B, "B")
    return _hom_dict(abeloid.hom_tate(args.ell, A, B))


def cmd_isogeny(args):
    ctx = _context(args)
    A, B = _matrix(args, ctx, args.A, "A"), _matrix(args, ctx, args.B, "B")
    ok, witness = abeloid.is_isogenous(A, B)
    return {"isogenous": ok, "witness": witness}


def cmd_dst(args):
    ctx = _context(args)
    Q = _matrix(args, ctx, args.matrix, "Q")
    D = phin.dst_of_abeloid(Q)
    out = D.to_json()
    out["newton_hodge"] = phin.newton_hodge(D)._asdict()
    return out


def _surface_module(args, ctx):
    if args.example:
        gamma = hensel_sqrt(make_padic(Fraction(args.gamma), ctx.p, ctx.N))
        return surface.example_non_admissible(gamma, make_padic(Fraction(args.lam), ctx.p, ctx.N), args.height_bound)
    return surface.build_h2(ctx, args.q1, args.q2, parse_facts(args.fact))


def cmd_raskind(args):
    ctx = _context(args)
    data = _load_input(args)
    if data is not None and "phi" in data:
        data = dict(data)
        data.setdefault("prime", args.prime)
        D = phin.FilteredPhiNModule.from_json(data, args.precision)
        rs = data.get("rational_structure") or {}
        R = phin.RationalStructure(rs, data.get("phi_V", _rational_matrix(D.phi)), data.get("N_V", _rational_matrix(D.mono)))
        verdict = phin.raskind_check(D, R, parse_facts(data.get("facts")), args.height_bound)
    else:
        W = _surface_module(args, ctx)
        verdict = phin.raskind_check(W.module, W.structure, W.facts, args.height_bound)
    return verdict.to_dict()


def _rational_matrix(M):
    out = []
    for row in M:
        out_row = []
        for x in row:
            r = phin.padic_literal(x)
            if isinstance(r, dict):
                raise fail("BAD_INPUT", "phi and N must be rational for a rational structure")
            out_row.append(Fraction(r))
        out.append(out_row)
    return out


def cmd_surface(args):
    ctx = _context(args)
    W = _surface_module(args, ctx)
    out = W.to_json()
    out["raskind"] = phin.raskind_check(W.module, W.structure, W.facts, args.height_bound).to_dict()
    out["ordinary"] = phin.is_ordinary_weight2(W.module, W.structure)
    if not args.example:
        out["picard_rank"] = surface.picard_rank(ctx, args.q1, args.q2, parse_facts(args.fact))
    return out


def cmd_ordinary(args):
    p, N = args.prime, args.precision
    v = [Fraction(x) for x in args.vector.split(",")]
    if len(v) != 6:
        raise fail("SHAPE_MISMATCH", "vector needs 6 coordinates a,b0,b1,b2,b3,c")
    fil = surface.ordinary_filtration_from_vector(v, p, N)
    back = surface.vector_from_filtration(fil)
    return {
        "vector": v,
        "fil": {str(i): fil[i] for i in sorted(fil)},
        "round_trip": back,
        "round_trip_ok": all((x - y).is_zero() for x, y in zip(back, [make_padic(c, p, N) for c in v])),
    }


def _golden(args):
    return scenarios.load_golden(args.golden)


def cmd_counterexample(args):
    return scenarios.counterexample(args.prime, args.epsilon, args.precision, _golden(args))


def cmd_appendix(args):
    return scenarios.appendix_tate_pair(args.prime, args.ell, args.epsilon, args.precision, _golden(args))


def cmd_l_independence(args):
    return scenarios.l_independence(args.prime, args.ell, args.q1, args.q2, args.precision, _golden(args))


def cmd_product_positive(args):
    return scenarios.product_positive(args.prime, args.q1, args.q2, args.precision, _golden(args))


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=7)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--height-bound", type=int, default=None)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--input", default=None, help="period-matrix or module JSON file")
    common.add_argument("--golden", default=None, help="directory holding scenarios.json")
    common.add_argument("--no-timing", action="store_true", help="omit wall-clock time from reports")

    parser = argparse.ArgumentParser(prog="tatelab", description="p-adic Hom computations for abeloid varieties")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("linv", cmd_linv, "L-invariant of a period matrix")
    sp.add_argument("--matrix", help="rows separated by ';', entries by ','")
    for name, func, text in (("hom", cmd_hom, "Hom(A, B) (x) Q"), ("isogeny", cmd_isogeny, "isogeny test"),
                             ("tate-hom", cmd_tate_hom, "Hom of Tate modules")):
        sp = add(name, func, text)
        sp.add_argument("--A")
        sp.add_argument("--B")
        if name == "hom":
            sp.add_argument("--mode", choices=("rational", "integral"), default="rational")
        if name == "tate-hom":
            sp.add_argument("--ell", type=int, required=True)
    sp = add("dst", cmd_dst, "filtered (phi, N)-module of an abeloid")
    sp.add_argument("--matrix")
    for name, func, text in (("raskind", cmd_raskind, "Raskind admissibility"),
                             ("surface", cmd_surface, "H^2 of a product of Tate curves")):
        sp = add(name, func, text)
        sp.add_argument("--q1", default="p")
        sp.add_argument("--q2", default="(1+p)*p")
        sp.add_argument("--fact", action="append", help="'L1=L2', 'L1=0' or 'independent:NAME,...'")
        sp.add_argument("--example", action="store_true", help="the non-admissible family instead")
        sp.add_argument("--gamma", default="-3", help="gamma = sqrt(GAMMA) for --example")
        sp.add_argument("--lambda", dest="lam", default="1")
    sp = add("ordinary", cmd_ordinary, "ordinary filtration from a vector")
    sp.add_argument("--vector", default="0,0,0,0,0,1", help="coordinates a,b0,b1,b2,b3,c")
    sp = add("counterexample", cmd_counterexample, "the ell = p counterexample")
    sp.add_argument("--epsilon", default="(1+p)")
    sp = add("appendix-a3", cmd_appendix, "Tate-curve pair at ell != p")
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--epsilon", default="(1+p)")
    sp = add("l-independence", cmd_l_independence, "dependence of Hom dimensions on ell")
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--q1", default="p")
    sp.add_argument("--q2", default="(1+p)*p")
    sp = add("product-positive", cmd_product_positive, "products of Tate curves")
    sp.add_argument("--q1", default="p")
    sp.add_argument("--q2", default="p^2")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except TatelabError as e:
        err = {"error": e.code, "message": e.message}
        print(dump(err) if args.format == "json" else f"error {e.code}: {e.message}", file=sys.stderr)
        return EXIT_ERROR
    code = EXIT_OK
    if isinstance(result, scenarios.ScenarioReport):
        if result.verdict in ("MISMATCH", "UNCERTIFIED"):
            code = EXIT_MISMATCH
        text = result.to_text() if args.format == "text" else dump(result.to_dict(timing=not args.no_timing))
    else:
        text = render_text(result) if args.format == "text" else dump(result)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
