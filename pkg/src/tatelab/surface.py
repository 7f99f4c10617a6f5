"""H^2 of a product of two Tate curves as a filtered (phi, N)-module.

Basis of the wedge square, with u_i = e_i of the first curve and w_i = e_i
of the second::

    a  = u1^w1          b0 = u1^w2 + u2^w1    b1 = u1^w2 - u2^w1
    b2 = u1^u2          b3 = w1^w2            c  = u2^w2

The pairing is x ^ y = Q(x, y) * (u1^u2^w1^w2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .abeloid import exact_relation, tate_l_invariant
from .errors import fail
from .linalg import det_rational, safe_height
from .multgroup import MultElement, QpContext
from .padic import PadicNumber, make_padic, rational_reconstruct
from .phin import (
    Facts,
    FilteredPhiNModule,
    Form,
    RationalStructure,
    annihilator,
    padic_span_rank,
)

LABELS = ["a", "b0", "b1", "b2", "b3", "c"]
A, B0, B1, B2, B3, C = range(6)

# each basis vector as {(i, j): coefficient} over e_i ^ e_j, i < j, indices u1 u2 w1 w2
_TWO_VECTORS = [
    {(0, 2): 1},
    {(0, 3): 1, (1, 2): 1},
    {(0, 3): 1, (1, 2): -1},
    {(0, 1): 1},
    {(2, 3): 1},
    {(1, 3): 1},
]


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def wedge_pairing_oracle(x: dict, y: dict) -> Fraction:
    """Coefficient of u1^u2^w1^w2 in x ^ y, by expanding every term."""
    total = Fraction(0)
    for (i, j), cx in x.items():
        for (k, l), cy in y.items():
            total += cx * cy * _perm_sign((i, j, k, l))
    return total


def pairing_gram() -> list[list[Fraction]]:
    return [[wedge_pairing_oracle(x, y) for y in _TWO_VECTORS] for x in _TWO_VECTORS]


def golden_gram() -> list[list[Fraction]]:
    text = resources.files("tatelab").joinpath("golden/gram.json").read_text()
    return [[Fraction(x) for x in row] for row in json.loads(text)["gram"]]


GRAM = pairing_gram()


def pairing(x, y):
    """Q(x, y) for coordinate vectors of rationals, Forms or p-adics."""
    total = 0
    for i in range(6):
        for j in range(6):
            if GRAM[i][j]:
                total = total + x[i] * y[j] * GRAM[i][j]
    return total


def gram_times(v):
    """The row vector G v, so that Q(x, v) = sum_i x_i (G v)_i."""
    return [sum((v[j] * GRAM[i][j] for j in range(6) if GRAM[i][j]), 0 * v[0]) for i in range(6)]


def phi_w(p: int) -> list[list[Fraction]]:
    diag = [1, p, p, p, p, p * p]
    return [[Fraction(diag[i]) if i == j else Fraction(0) for j in range(6)] for i in range(6)]


def n_w() -> list[list[Fraction]]:
    N = [[Fraction(0)] * 6 for _ in range(6)]
    N[B0][C] = Fraction(1)  # N(c) = b0
    N[A][B0] = Fraction(2)  # N(b0) = 2a
    return N


def rational_structure(p: int) -> RationalStructure:
    return RationalStructure({"A": [A], "B0": [B0], "B1": [B1, B2, B3], "C": [C]}, phi_w(p), n_w(), LABELS)


@dataclass
class WedgeSquareModule:
    module: FilteredPhiNModule
    structure: RationalStructure
    vector: list  # numeric spanning vector of Fil^2, c-coordinate 1
    symbolic_vector: list | None
    facts: Facts
    gram: list = field(default_factory=lambda: [row[:] for row in GRAM])
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = self.module.to_json()
        out["labels"] = LABELS
        out["gram"] = [[str(x) for x in row] for row in self.gram]
        out["rational_structure"] = {k: [LABELS[i] for i in v] for k, v in self.structure.blocks.items()}
        if self.symbolic_vector is not None:
            out["fil2_symbolic"] = [Form.lift(x).to_text() for x in self.symbolic_vector]
        out["notes"] = list(self.notes)
        return out


def _numeric(v, p: int, N: int) -> list:
    return [x if isinstance(x, PadicNumber) else make_padic(x, p, N) for x in v]


def _filtration(v, p: int, N: int) -> dict:
    one, zero = make_padic(1, p, N), make_padic(0, p, N)
    everything = [[one if k == i else zero for k in range(6)] for i in range(6)]
    fil1 = annihilator([gram_times(v)], 6, p, N)
    return {0: everything, 1: fil1, 2: [v], 3: []}


def ordinary_filtration_from_vector(v, p: int, N: int = 64) -> dict:
    """Fil^2 = span(v), Fil^1 = v-perp, for v with c-coordinate 1."""
    v = _numeric(v, p, N)
    if not (v[C] - 1).is_zero():
        raise fail("NOT_NORMALIZED", "the c-coordinate must be exactly 1")
    if not pairing(v, v).is_zero():
        raise fail("NOT_ISOTROPIC", "Q(v, v) != 0")
    # N^2(c) = 2a
    if pairing(v, _numeric([2, 0, 0, 0, 0, 0], p, N)).is_zero():
        raise fail("DEGENERATE_A_PAIRING", "Q(v, N^2 c) = 0")
    return _filtration(v, p, N)


def vector_from_filtration(fil: dict) -> list:
    """The spanning vector of Fil^2 normalised to c-coordinate 1."""
    vs = [v for v in fil.get(2, []) if not all(x.is_zero() for x in v)]
    if padic_span_rank(vs) != 1:
        raise fail("SHAPE_MISMATCH", "Fil^2 must be a line")
    v = vs[0]
    if v[C].is_zero():
        raise fail("NOT_NORMALIZED", "Fil^2 has zero c-coordinate")
    return [x / v[C] for x in v]


def _module(v, p: int, N: int, symbolic_v=None) -> FilteredPhiNModule:
    D = FilteredPhiNModule(p, N, 6, phi_w(p), n_w(), ordinary_filtration_from_vector(v, p, N), labels=LABELS)
    if symbolic_v is not None:
        D.symbolic["fil_equations"] = {1: [gram_times([Form.lift(x) for x in symbolic_v])]}
    return D


def mazur_vector(L1, L2) -> list:
    """L1 L2 a + L1 u1^w2 + L2 u2^w1 + c in the a..c basis."""
    half = Fraction(1, 2)
    return [L1 * L2, (L1 + L2) * half, (L1 - L2) * half, 0 * L1, 0 * L1, 1 + 0 * L1]


def _constant_name(key) -> str:
    g, d = key
    return f"log({g})" if d == 1 else f"sqrt({d})*log({g})"


def l_facts(ctx: QpContext, q1: MultElement, q2: MultElement) -> Facts:
    """Rewrite L1, L2 through the exact log forms when both are available.

    The constants sqrt(d)*log(u) over distinct independent generators u and
    distinct squarefree d are declared independent over Q.
    """
    values = {"L1": tate_l_invariant(ctx, q1), "L2": tate_l_invariant(ctx, q2)}
    f1, f2 = ctx.exact_log(q1), ctx.exact_log(q2)
    if f1 is None or f2 is None:
        return Facts(values=values)
    relations = {}
    names = set()
    for name, q, f in (("L1", q1, f1), ("L2", q2, f2)):
        form = Form()
        for key, c in f.items():
            form = form + Form.var(_constant_name(key)) * (Fraction(c) / q.p_exp)
            names.add(_constant_name(key))
        relations[name] = form
    for key in {k for f in (f1, f2) for k in f}:
        g, d = key
        values[_constant_name(key)] = _key_value(ctx, g, d)
    return Facts(frozenset(names), relations, values)


def _key_value(ctx: QpContext, g: str, d: int) -> PadicNumber:
    from .multgroup import Surd

    log_g = ctx.generator_coordinate(g) * ctx.log_generator
    return (log_g * Surd.sqrt(ctx.p, d).evaluate(ctx.N)).with_precision(ctx.N)


def build_h2(ctx: QpContext, q1, q2, facts: Facts | None = None) -> WedgeSquareModule:
    q1 = ctx.parse(q1) if isinstance(q1, str) else q1
    q2 = ctx.parse(q2) if isinstance(q2, str) else q2
    for q in (q1, q2):
        if q.p_exp <= 0:
            raise fail("BAD_PERIOD", "Tate parameters need positive valuation")
    p, N = ctx.p, ctx.N
    base = l_facts(ctx, q1, q2).merged(facts)
    L1, L2 = base.values["L1"], base.values["L2"]
    v = mazur_vector(L1, L2)
    v[3], v[4], v[5] = make_padic(0, p, N), make_padic(0, p, N), make_padic(1, p, N)
    sym = mazur_vector(Form.var("L1"), Form.var("L2"))
    if not pairing(sym, sym).is_zero():
        raise fail("NOT_ISOTROPIC", "Mazur vector is not isotropic")
    D = _module(v, p, N, sym)
    return WedgeSquareModule(D, rational_structure(p), v, sym, base)


def picard_rank(ctx: QpContext, q1, q2, facts: Facts | None = None, bound: int = 64) -> dict:
    """3 when the Tate curves are isogenous, else 2."""
    q1 = ctx.parse(q1) if isinstance(q1, str) else q1
    q2 = ctx.parse(q2) if isinstance(q2, str) else q2
    rel = exact_relation(ctx, q1, q2, bound)
    if rel is not None:
        return {"rank": 3, "reason": f"q1^{rel[0]} = q2^{rel[1]}"}
    merged = l_facts(ctx, q1, q2).merged(facts)
    diff = merged.normalize(Form.var("L1") - Form.var("L2"))
    if diff.is_zero():
        return {"rank": 3, "reason": "L1 = L2 by declared or exact relations"}
    if merged.splits(diff):
        return {"rank": 2, "reason": f"L1 - L2 = {diff.to_text()} is nonzero over independent constants"}
    raise fail("UNDECIDED", "no relation found and no facts decide L1 = L2")


def example_non_admissible(gamma: PadicNumber, lam, height: int | None = None) -> WedgeSquareModule:
    """Fil^2 spanned by (lam^2 - gamma) a + lam b0 - gamma b2 + b3 + c."""
    p, N = gamma.prime, gamma.abs_precision
    lam = lam if isinstance(lam, PadicNumber) else make_padic(lam, p, N)
    H = height if height is not None else safe_height(p, N)
    if gamma.is_zero() or rational_reconstruct(gamma, H) is not None:
        raise fail("GAMMA_RATIONAL", "gamma reconstructs as a rational number")
    zero, one = make_padic(0, p, N), make_padic(1, p, N)
    v = [lam * lam - gamma, lam, zero, -gamma, one, one]
    lam_r = rational_reconstruct(lam, H) if not lam.is_zero() else Fraction(0)
    lam_sym = Form.const(lam_r) if lam_r is not None else Form.var("lambda")
    g = Form.var("gamma")
    sym = [lam_sym * lam_sym - g, lam_sym, Form(), -g, Form.const(1), Form.const(1)]
    if not pairing(sym, sym).is_zero():
        raise fail("NOT_ISOTROPIC", "example vector is not isotropic")
    D = _module(v, p, N, sym)
    values = {"gamma": gamma, "lambda": lam}
    facts = Facts(frozenset({"gamma"}), {}, values)
    notes = ["gamma declared irrational: it fails rational reconstruction at height %d" % H]
    if lam.is_zero():
        notes.append("lambda = 0 accepted")
    return WedgeSquareModule(D, rational_structure(p), v, sym, facts, notes=notes)


def gram_is_nondegenerate() -> bool:
    return det_rational(GRAM) != 0

