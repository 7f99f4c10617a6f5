"""Period matrices, L-invariants and Hom spaces of abeloid varieties over Q_p.

Period-matrix entries are ``MultElement``s. A matrix ``M`` of integers acts
on period matrices through exponents, so in every coordinate (valuation,
principal-unit coordinate, exact exponent vector) ``Q (.) M`` is the
ordinary matrix product of the coordinate matrix with ``M``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import fail
from .linalg import (
    ExponentData,
    KernelResult,
    congruence_sublattice,
    det_rational,
    exact_span_solve,
    inverse_rational,
    matmul,
    rank_rational,
    rational_subspace,
    rref_rational,
    saturate,
    sylvester_kernel,
)
from .multgroup import MultElement, QpContext
from .padic import PadicNumber, padic_equal


@dataclass
class PeriodMatrix:
    ctx: QpContext
    entries: list  # g x g MultElement
    texts: list | None = None
    warnings: list = field(default_factory=list)

    @property
    def g(self) -> int:
        return len(self.entries)

    @property
    def p(self) -> int:
        return self.ctx.p

    @classmethod
    def parse(cls, ctx: QpContext, texts) -> "PeriodMatrix":
        g = len(texts)
        if g == 0 or any(len(row) != g for row in texts):
            raise fail("BAD_PERIOD", "period matrix must be square and nonempty")
        entries = [[ctx.parse(t) for t in row] for row in texts]
        return cls.build(ctx, entries, [list(row) for row in texts])

    @classmethod
    def build(cls, ctx: QpContext, entries, texts=None) -> "PeriodMatrix":
        Q = cls(ctx, entries, texts)
        for row in entries:
            for x in row:
                if x.p_exp.denominator != 1:
                    raise fail("BAD_PERIOD", "period entries need integral valuation")
        if det_rational(ord_matrix_raw(Q)) == 0:
            raise fail("SINGULAR_ORD", "ord_p(Q) is not invertible; not a lattice")
        if any(x.p_exp <= 0 for row in entries for x in row):
            Q.warnings.append("entrywise valuation positivity fails (not enforced)")
        return Q

    @classmethod
    def from_json(cls, data: dict, N: int | None = None) -> "PeriodMatrix":
        ctx = QpContext(int(data["p"]), N or int(data.get("precision", 64)), data.get("units") or {})
        Q = cls.parse(ctx, data["entries"])
        if "g" in data and int(data["g"]) != Q.g:
            raise fail("BAD_PERIOD", f"declared g={data['g']} but matrix is {Q.g}x{Q.g}")
        return Q

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "g": self.g,
            "entries": [[self.ctx.format(x) for x in row] for row in self.entries],
            "units": dict(self.ctx._unit_text),
        }


def tate_curve(ctx: QpContext, q) -> PeriodMatrix:
    """The 1x1 period matrix of E(q); q is entry text or a MultElement."""
    if isinstance(q, str):
        return PeriodMatrix.parse(ctx, [[q]])
    return PeriodMatrix.build(ctx, [[q]])


# -- coordinate matrices --------------------------------------------------------


def ord_matrix_raw(Q: PeriodMatrix) -> list[list[Fraction]]:
    return [[Fraction(x.p_exp) for x in row] for row in Q.entries]


def ord_matrix(Q: PeriodMatrix) -> list[list[Fraction]]:
    M = ord_matrix_raw(Q)
    if det_rational(M) == 0:
        raise fail("SINGULAR_ORD", "ord_p(Q) is not invertible")
    return M


def log_matrix(Q: PeriodMatrix) -> list[list[PadicNumber]]:
    return [[Q.ctx.log_of(x) for x in row] for row in Q.entries]


def _rational_times_padic(R, P, p: int, N: int):
    out = []
    for i in range(len(R)):
        row = []
        for j in range(len(P[0])):
            acc = PadicNumber.zero(p, N)
            for k in range(len(P)):
                if R[i][k]:
                    acc = acc + P[k][j] * R[i][k]
            row.append(acc)
        out.append(row)
    return out


def l_invariant(Q: PeriodMatrix) -> list[list[PadicNumber]]:
    """ord_p(Q)^-1 * log_p(Q)."""
    inv = inverse_rational(ord_matrix(Q))
    return _rational_times_padic(inv, log_matrix(Q), Q.p, Q.ctx.N)


def exact_log_matrix(Q: PeriodMatrix) -> list[list[dict]] | None:
    forms = [[Q.ctx.exact_log(x) for x in row] for row in Q.entries]
    if any(f is None for row in forms for f in row):
        return None
    return forms


def exact_l_invariant(Q: PeriodMatrix) -> list[list[dict]] | None:
    """L-invariant entries as Q-linear forms over the constants sqrt(d)*log(g)."""
    forms = exact_log_matrix(Q)
    if forms is None:
        return None
    inv = inverse_rational(ord_matrix(Q))
    g = Q.g
    out = []
    for i in range(g):
        row = []
        for j in range(g):
            acc: dict = {}
            for k in range(g):
                for key, c in forms[k][j].items():
                    acc[key] = acc.get(key, 0) + inv[i][k] * c
            row.append({k: v for k, v in acc.items() if v != 0})
        out.append(row)
    return out


# -- basis change ----------------------------------------------------------------


def _act(ctx: QpContext, entries, left, right):
    """left (.) entries (.) right for integer matrices left, right."""
    rows, inner_l = len(left), len(entries)
    inner_r, cols = len(entries[0]), len(right[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = ctx.identity()
            for k in range(inner_l):
                if not left[i][k]:
                    continue
                for l in range(inner_r):
                    e = left[i][k] * right[l][j]
                    if e:
                        acc = ctx.mult(acc, ctx.pow(entries[k][l], Fraction(e)))
            row.append(acc)
        out.append(row)
    return out


def change_basis(Q: PeriodMatrix, M) -> PeriodMatrix:
    """M^-1 (.) Q (.) M for M in GL_g(Z)."""
    M = [[int(x) for x in row] for row in M]
    if len(M) != Q.g or abs(det_rational(M)) != 1:
        raise fail("NOT_UNIMODULAR", "basis change must lie in GL_g(Z)")
    Minv = [[int(x) for x in row] for row in inverse_rational(M)]
    return PeriodMatrix.build(Q.ctx, _act(Q.ctx, Q.entries, Minv, M))


# -- Hom spaces --------------------------------------------------------------------


@dataclass
class HomSpaceResult:
    kind: str  # algebraic_Q, algebraic_Z, tate_<ell>, mf
    dimension: int
    basis: list
    certified: bool
    integral_data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    cross_check: dict | None = None


def _exponent_data(A: PeriodMatrix, B: PeriodMatrix) -> tuple[ExponentData, ExponentData] | None:
    fa, fb = exact_log_matrix(A), exact_log_matrix(B)
    if fa is None or fb is None:
        return None
    keys = sorted({k for forms in (fa, fb) for row in forms for f in row for k in f})
    gens = ("p",) + tuple(f"{g}*sqrt({d})" if d != 1 else g for g, d in keys)

    def blocks(Q, forms):
        out = {"p": ord_matrix_raw(Q)}
        for (g, d), name in zip(keys, gens[1:]):
            out[name] = [[f.get((g, d), Fraction(0)) for f in row] for row in forms]
        return out

    return ExponentData(gens, blocks(A, fa)), ExponentData(gens, blocks(B, fb))


def _vectorize(mats) -> list[list[Fraction]]:
    return [[x for row in m for x in row] for m in mats]


def _unvectorize(vecs, g: int, h: int):
    return [[list(v[i * h:(i + 1) * h]) for i in range(g)] for v in vecs]


def _padic_rational_hom(A: PeriodMatrix, B: PeriodMatrix):
    K = sylvester_kernel(l_invariant(A), l_invariant(B))
    if not K.certified:
        return K, None
    return K, rational_subspace(K)


def hom_algebraic(A: PeriodMatrix, B: PeriodMatrix, mode: str = "rational") -> HomSpaceResult:
    """Hom(A, B) (x) Q, or the lattice Hom(A, B) itself in integral mode."""
    ord_matrix(A)
    ord_matrix(B)
    g, h = A.g, B.g
    K, padic_basis = _padic_rational_hom(A, B)
    data = _exponent_data(A, B)
    notes = []
    if data is None:
        if padic_basis is None:
            raise fail("PRECISION_EXHAUSTED", "p-adic Hom rank is not certified")
        basis = padic_basis
        certified = False
        notes.append("no exact generator data: rationality of the p-adic path is uncertified")
        cross = None
    else:
        exact = exact_span_solve(*data)
        basis = _vectorize(exact)
        certified = True
        padic_dim = None if padic_basis is None else len(padic_basis)
        agree = padic_basis is not None and _same_span(basis, padic_basis)
        cross = {"exact_dim": len(basis), "padic_dim": padic_dim, "commutant_dim": K.dimension, "agree": agree}
        if not agree:
            notes.append("exact and p-adic Hom computations disagree")
    if mode == "rational":
        return HomSpaceResult("algebraic_Q", len(basis), _unvectorize(basis, g, h), certified, {}, notes, cross)
    if mode != "integral":
        raise ValueError(f"unknown mode {mode!r}")
    sat = saturate(basis, g * h)
    conditions = _integrality_conditions(A, B, A.p - 1)
    lattice, divisors = congruence_sublattice(sat, conditions)
    R = 1
    for d in divisors:
        R = R * d // _gcd(R, d)
    integral = {
        "saturated_basis": _unvectorize(sat, g, h),
        "lattice_basis": _unvectorize(lattice, g, h),
        "elementary_divisors": divisors,
        "R": R,
    }
    return HomSpaceResult("algebraic_Z", len(lattice), _unvectorize(lattice, g, h), certified, integral, notes, cross)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _same_span(U, V) -> bool:
    if len(U) != len(V):
        return False
    if not U:
        return True
    return rank_rational(U) == rank_rational(U + V) == len(U)


def _integrality_conditions(A: PeriodMatrix, B: PeriodMatrix, torsion_modulus: int):
    """Conditions on vec(M): N = ordA M ordB^-1 integral and the torsion congruence.

    Torsion: zA M - N zB = 0 mod torsion_modulus, where z* are zeta exponents.
    """
    g, h = A.g, B.g
    oa = ord_matrix(A)
    ob_inv = inverse_rational(ord_matrix(B))
    za = [[x.zeta_exp for x in row] for row in A.entries]
    zb = [[x.zeta_exp for x in row] for row in B.entries]
    nm = g * h

    def unit(k):
        return [[Fraction(int(i * h + j == k)) for j in range(h)] for i in range(g)]

    # coefficient of vec(M)_k in N_{ij} and in the torsion expression
    n_coeffs = [matmul(matmul(oa, unit(k)), ob_inv) for k in range(nm)]
    t_coeffs = [
        [[matmul(za, unit(k))[i][j] - matmul(n_coeffs[k], zb)[i][j] for j in range(h)] for i in range(g)]
        for k in range(nm)
    ]
    conds = []
    for i in range(g):
        for j in range(h):
            conds.append(([n_coeffs[k][i][j] for k in range(nm)], 1))
            if torsion_modulus > 1:
                conds.append(([t_coeffs[k][i][j] for k in range(nm)], torsion_modulus))
    return conds


def hom_tate(ell: int, A: PeriodMatrix, B: PeriodMatrix) -> HomSpaceResult:
    """Hom_{G_K}(T_ell A, T_ell B): Q_ell-dimension and integral congruence data."""
    ord_matrix(A)
    ord_matrix(B)
    g, h = A.g, B.g
    p = A.p
    from .multgroup import prime_to_part

    if ell == p:
        K = sylvester_kernel(l_invariant(A), l_invariant(B))
        modulus = p - 1
        basis = K.basis_matrices()
        certified = K.certified
        margin = K.precision_margin
    else:
        modulus = prime_to_part(p - 1, ell)
        basis = [_unvectorize([[Fraction(int(t == k)) for t in range(g * h)]], g, h)[0] for k in range(g * h)]
        certified = True
        margin = None
    full = [[int(t == k) for t in range(g * h)] for k in range(g * h)]
    _, moduli = congruence_sublattice(full, _integrality_conditions(A, B, modulus))
    integral = {"torsion_modulus": modulus, "congruence_moduli": moduli}
    if margin is not None:
        integral["precision_margin"] = margin
    return HomSpaceResult(f"tate_{ell}", len(basis), basis, certified, integral)


# -- isogenies ----------------------------------------------------------------------


def _det_identically_zero(mats) -> bool:
    import sympy

    k = len(mats)
    g = len(mats[0])
    xs = sympy.symbols(f"c0:{k}")
    M = sympy.Matrix(g, g, lambda i, j: sum(xs[t] * sympy.Rational(mats[t][i][j].numerator, mats[t][i][j].denominator) for t in range(k)))
    return sympy.expand(M.det(method="berkowitz")) == 0


def is_isogenous(A: PeriodMatrix, B: PeriodMatrix) -> tuple[bool, list | None]:
    """Isogeny test with an integral witness M (A (.) M lands in Lambda_B)."""
    if A.g != B.g:
        raise fail("DIMENSION_MISMATCH", "isogeny requires equal dimension")
    res = hom_algebraic(A, B, "integral")
    mats = [[[Fraction(x) for x in row] for row in m] for m in res.basis]
    if not mats or _det_identically_zero(mats):
        return False, None
    k = len(mats)
    g = A.g
    bound = 1
    while True:
        values = range(-bound, bound + 1)
        for coeffs in itertools.product(values, repeat=k):
            if max(abs(c) for c in coeffs) != bound and bound > 1:
                continue
            if not any(coeffs):
                continue
            M = [[sum(c * m[i][j] for c, m in zip(coeffs, mats)) for j in range(g)] for i in range(g)]
            if det_rational(M) != 0:
                return True, [[int(x) for x in row] for row in _primitive_sign(M)]
        bound += 1


def _primitive_sign(M):
    # prefer the representative whose first nonzero entry is positive
    flat = [x for row in M for x in row if x != 0]
    if flat and flat[0] < 0:
        return [[-x for x in row] for row in M]
    return M


def riemann_check(Q: PeriodMatrix) -> bool:
    """Symmetric period matrix with symmetric positive-definite ord_p(Q)."""
    g = Q.g
    for i in range(g):
        for j in range(i + 1, g):
            x, y = Q.entries[i][j], Q.entries[j][i]
            if x.zeta_exp != y.zeta_exp or x.p_exp != y.p_exp or not padic_equal(x.unit_coord, y.unit_coord):
                return False
            if x.exact is not None and y.exact is not None and x.exact != y.exact:
                return False
    O = ord_matrix_raw(Q)
    for k in range(1, g + 1):
        if det_rational([row[:k] for row in O[:k]]) <= 0:
            return False
    return True


# -- Tate curves ----------------------------------------------------------------------


def exact_relation(ctx: QpContext, q1: MultElement, q2: MultElement, bound: int = 64):
    """Smallest positive (A1, A2) <= bound with q1**A1 == q2**A2 exactly, or None."""
    if q1.exact is None or q2.exact is None:
        return None
    v1, v2 = Fraction(q1.p_exp), Fraction(q2.p_exp)
    if v1 * v2 <= 0:
        return None
    # valuations force (A1, A2) to be a multiple of the primitive solution of A1 v1 = A2 v2
    r = v2 / v1
    step1, step2 = r.numerator, r.denominator
    k = 1
    while k * max(step1, step2) <= bound:
        a1, a2 = k * step1, k * step2
        x = ctx.pow(q1, Fraction(a1))
        y = ctx.pow(q2, Fraction(a2))
        if x.zeta_exp == y.zeta_exp and x.exact == y.exact:
            return a1, a2
        k += 1
    return None


def tate_l_invariant(ctx: QpContext, q: MultElement) -> PadicNumber:
    """L(q) = log_p(q) / ord_p(q)."""
    if q.p_exp == 0:
        raise fail("BAD_PERIOD", "Tate parameter must have nonzero valuation")
    return ctx.log_of(q) * Fraction(1) / q.p_exp


def tate_criteria(ctx: QpContext, q1: MultElement, q2: MultElement, bound: int = 64) -> dict:
    """The three isogeny criteria for E(q1), E(q2), evaluated independently."""
    rel = exact_relation(ctx, q1, q2, bound)
    A, B = tate_curve(ctx, q1), tate_curve(ctx, q2)
    hom = hom_algebraic(A, B, "rational")
    L1, L2 = tate_l_invariant(ctx, q1), tate_l_invariant(ctx, q2)
    diff = L1 - L2
    return {
        "relation": rel,
        "relation_found": rel is not None,
        "hom_nonzero": hom.dimension > 0,
        "l_equal_to_precision": diff.is_zero(),
        "l_digits_agreeing": diff.precision if diff.is_zero() else diff.valuation,
    }
