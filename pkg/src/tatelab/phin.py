"""Filtered (phi, N)-modules over Q_p and their rational structures.

Vectors are columns of coordinates and matrices act on the left. A
filtration is a dict ``{i: spanning vectors}`` listing the jumps; Fil^i is
the space at the smallest listed index >= i, and zero past the last one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .abeloid import HomSpaceResult, PeriodMatrix, log_matrix, ord_matrix
from .errors import fail
from .linalg import (
    CERTIFICATION_THRESHOLD,
    _padic_rref,
    nullspace_rational,
    padic_kernel,
    padic_matrix,
    padic_matmul,
    rank_rational,
    rational_subspace,
    sylvester_kernel,
)
from .padic import PadicNumber, make_padic, rational_reconstruct


# -- symbolic coefficients ------------------------------------------------------


class Form:
    """Polynomial with rational coefficients in named p-adic constants.

    Terms map a monomial (sorted tuple of names, () for 1) to a Fraction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c) -> "Form":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Form":
        return cls({(name,): Fraction(1)})

    @staticmethod
    def lift(x) -> "Form":
        return x if isinstance(x, Form) else Form.const(x)

    def __add__(self, other):
        other = Form.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Form(out)

    __radd__ = __add__

    def __neg__(self):
        return Form({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Form.lift(other))

    def __rsub__(self, other):
        return Form.lift(other) - self

    def __mul__(self, other):
        other = Form.lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Form(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, (Form, int, Fraction)) and (self - other).terms == {}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def names(self) -> set:
        return {n for m in self.terms for n in m}

    def substitute(self, relations: dict) -> "Form":
        out = Form()
        for m, c in self.terms.items():
            term = Form.const(c)
            for n in m:
                term = term * (relations[n] if n in relations else Form.var(n))
            out = out + term
        return out

    def evaluate(self, values: dict, p: int, N: int) -> PadicNumber:
        acc = make_padic(0, p, N)
        for m, c in self.terms.items():
            term = make_padic(c, p, N)
            for n in m:
                if n not in values:
                    raise fail("INSUFFICIENT_FACTS", f"no value for constant {n!r}")
                term = term * values[n]
            acc = acc + term
        return acc

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            mono = "*".join(m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Form({self.to_text()})"


def monomial_name(m: tuple) -> str:
    return "*".join(m) if m else "1"


@dataclass
class Facts:
    """Declared relations among the constants appearing in a filtration.

    ``relations`` rewrites a constant as a Form in the others; after
    rewriting, the monomials in ``independent`` together with 1 are taken
    to be linearly independent over Q. ``values`` are p-adic values used to
    check the declarations numerically.
    """

    independent: frozenset = frozenset()
    relations: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def normalize(self, f: Form) -> Form:
        seen = 0
        while f.names() & set(self.relations):
            f = f.substitute(self.relations)
            seen += 1
            if seen > 32:
                raise fail("INSUFFICIENT_FACTS", "circular relations")
        return f

    def splits(self, f: Form) -> bool:
        return all(not m or monomial_name(m) in self.independent for m in self.normalize(f).terms)

    def check(self, p: int, N: int) -> None:
        """Relations must hold for the supplied values."""
        for name, rhs in self.relations.items():
            if name not in self.values or not rhs.names() <= set(self.values):
                continue
            diff = self.values[name] - rhs.evaluate(self.values, p, N)
            if not diff.is_zero():
                raise fail("FACT_CONTRADICTION", f"declared relation for {name} fails numerically")

    def merged(self, other: "Facts | None") -> "Facts":
        if other is None:
            return self
        return Facts(
            self.independent | other.independent,
            {**self.relations, **other.relations},
            {**self.values, **other.values},
        )


# -- modules -----------------------------------------------------------------


def _vec_zero(v) -> bool:
    return all(x.is_zero() for x in v)


def padic_span_rank(vectors) -> int:
    vectors = [v for v in vectors if not _vec_zero(v)]
    if not vectors:
        return 0
    return len(_padic_rref(vectors)[1])


def _same_matrix(A, B) -> bool:
    return all((a - b).is_zero() for ra, rb in zip(A, B) for a, b in zip(ra, rb))


@dataclass
class FilteredPhiNModule:
    prime: int
    precision: int
    dim: int
    phi: list
    mono: list
    filtration: dict
    labels: list | None = None
    symbolic: dict = field(default_factory=dict)  # {"fil_equations": {i: rows of Form}}
    notes: list = field(default_factory=list)

    def __post_init__(self):
        n, p, N = self.dim, self.prime, self.precision
        self.phi = padic_matrix(self.phi, p, N)
        self.mono = padic_matrix(self.mono, p, N)
        self.filtration = {int(i): [[x if isinstance(x, PadicNumber) else make_padic(x, p, N) for x in v] for v in vs]
                           for i, vs in self.filtration.items()}
        if len(self.phi) != n or len(self.mono) != n or any(len(r) != n for r in self.phi + self.mono):
            raise fail("SHAPE_MISMATCH", "phi and N must be dim x dim")
        if any(len(v) != n for vs in self.filtration.values() for v in vs):
            raise fail("SHAPE_MISMATCH", "filtration vectors must have length dim")
        lhs = padic_matmul(self.mono, self.phi, p, N)
        rhs = padic_matmul(self.phi, self.mono, p, N)
        if not _same_matrix(lhs, [[x * p for x in row] for row in rhs]):
            raise fail("NPHI_RELATION", "N*phi != p*phi*N")
        keys = sorted(self.filtration)
        if keys and padic_span_rank(self.filtration[keys[0]]) != n:
            raise fail("BAD_FILTRATION", "filtration is not exhaustive")
        for lo, hi in zip(keys, keys[1:]):
            big = self.filtration[lo]
            if padic_span_rank(big + self.filtration[hi]) != padic_span_rank(big):
                raise fail("BAD_FILTRATION", f"Fil^{hi} is not contained in Fil^{lo}")

    def fil(self, i: int) -> list:
        above = [k for k in self.filtration if k >= i]
        if not above:
            return []
        return [v for v in self.filtration[min(above)] if not _vec_zero(v)]

    def fil_dim(self, i: int) -> int:
        return padic_span_rank(self.fil(i))

    def jumps(self) -> list[int]:
        return sorted(self.filtration)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "prime": self.prime,
            "precision": self.precision,
            "labels": self.labels,
            "phi": [[padic_literal(x) for x in row] for row in self.phi],
            "N": [[padic_literal(x) for x in row] for row in self.mono],
            "fil": {str(i): [[padic_literal(x) for x in v] for v in self.filtration[i]] for i in self.jumps()},
        }

    @classmethod
    def from_json(cls, data: dict, N: int | None = None) -> "FilteredPhiNModule":
        p = int(data["prime"])
        N = int(N or data.get("precision", 64))
        conv = lambda x: parse_padic_literal(x, p, N)  # noqa: E731
        return cls(
            p, N, int(data["dim"]),
            [[conv(x) for x in row] for row in data["phi"]],
            [[conv(x) for x in row] for row in data["N"]],
            {int(i): [[conv(x) for x in v] for v in vs] for i, vs in data.get("fil", {}).items()},
            labels=data.get("labels"),
        )


def padic_literal(x: PadicNumber):
    """JSON form: the rational when one reconstructs, else unit and valuation."""
    r = rational_reconstruct(x) if not x.is_zero() else Fraction(0)
    if r is not None:
        return str(r)
    return {"valuation": x.valuation, "unit": x.unit, "precision": x.precision}


def parse_padic_literal(x, p: int, N: int) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x
    if isinstance(x, dict):
        v, prec = int(x["valuation"]), int(x.get("precision", N))
        unit = int(x["unit"]) % p**prec
        if prec <= 0 or unit % p == 0:
            raise fail("BAD_LITERAL", "unit must be prime to p")
        return PadicNumber(p, v, unit, prec)
    return make_padic(Fraction(str(x)), p, N)


@dataclass
class RationalStructure:
    blocks: dict  # {"A": [indices], "B0": [...], "B1": [...], "C": [...]}
    phi_V: list
    N_V: list
    labels: list | None = None

    def __post_init__(self):
        self.phi_V = [[Fraction(x) for x in row] for row in self.phi_V]
        self.N_V = [[Fraction(x) for x in row] for row in self.N_V]
        idx = sorted(i for k in ("A", "B0", "B1", "C") for i in self.blocks.get(k, []))
        n = len(self.phi_V)
        if idx != list(range(n)):
            raise fail("SHAPE_MISMATCH", "blocks must partition the basis")
        p = None
        for i in self.blocks.get("A", []):
            if self.phi_V[i][i] != 1:
                raise fail("BAD_RATIONAL_STRUCTURE", "phi must be 1 on A")
        for k in ("B0", "B1"):
            for i in self.blocks.get(k, []):
                p = p or self.phi_V[i][i]
                if self.phi_V[i][i] != p:
                    raise fail("BAD_RATIONAL_STRUCTURE", "phi must be p on B")
        for i in self.blocks.get("C", []):
            if p is not None and self.phi_V[i][i] != p * p:
                raise fail("BAD_RATIONAL_STRUCTURE", "phi must be p^2 on C")
        if any(self.phi_V[i][j] for i in range(n) for j in range(n) if i != j):
            raise fail("BAD_RATIONAL_STRUCTURE", "phi must be diagonal in the graded basis")
        for k in ("A", "B1"):
            for j in self.blocks.get(k, []):
                if any(self.N_V[i][j] for i in range(n)):
                    raise fail("BAD_RATIONAL_STRUCTURE", f"N must vanish on {k}")
        for src, dst in (("C", "B0"), ("B0", "A")):
            S, D = self.blocks.get(src, []), self.blocks.get(dst, [])
            block = [[self.N_V[i][j] for j in S] for i in D]
            if len(S) != len(D) or (S and rank_rational(block) != len(S)):
                raise fail("BAD_RATIONAL_STRUCTURE", f"N must map {src} isomorphically onto {dst}")
            rest = [i for i in range(n) if i not in D]
            if any(self.N_V[i][j] for i in rest for j in S):
                raise fail("BAD_RATIONAL_STRUCTURE", f"N must map {src} into {dst}")

    @property
    def dims(self) -> tuple:
        return tuple(len(self.blocks.get(k, [])) for k in ("A", "B0", "B1", "C"))

    def basis_vectors(self, *names, p: int, N: int) -> list:
        n = len(self.phi_V)
        return [[make_padic(int(k == i), p, N) for k in range(n)] for name in names for i in self.blocks.get(name, [])]

    def check_compatible(self, D: FilteredPhiNModule) -> None:
        if len(self.phi_V) != D.dim:
            raise fail("SHAPE_MISMATCH", "rational structure and module differ in dimension")
        p, N = D.prime, D.precision
        if not _same_matrix(padic_matrix(self.phi_V, p, N), D.phi) or not _same_matrix(padic_matrix(self.N_V, p, N), D.mono):
            raise fail("SHAPE_MISMATCH", "rational structure does not match phi and N")


# -- construction from abeloids -------------------------------------------------


def dst_of_abeloid(Q: PeriodMatrix) -> FilteredPhiNModule:
    """The filtered (phi, N)-module of V_p of an abeloid, basis x_1..x_g, y_1..y_g.

    N(y_i) = sum_j ord(q_ij) x_j and Fil^0 is spanned by
    y_i + sum_j log(q_ij) x_j.
    """
    ordQ = ord_matrix(Q)
    logQ = log_matrix(Q)
    g, p, N = Q.g, Q.p, Q.ctx.N
    n = 2 * g
    zero, one = make_padic(0, p, N), make_padic(1, p, N)
    phi = [[zero] * n for _ in range(n)]
    mono = [[zero] * n for _ in range(n)]
    for i in range(g):
        phi[i][i] = make_padic(Fraction(1, p), p, N)
        phi[g + i][g + i] = one
        for j in range(g):
            # column g+i holds N(y_i)
            mono[j][g + i] = make_padic(ordQ[i][j], p, N)
    fil0 = []
    for i in range(g):
        v = [zero] * n
        for j in range(g):
            v[j] = logQ[i][j]
        v[g + i] = one
        fil0.append(v)
    if padic_span_rank(fil0) != g:
        raise fail("BAD_FILTRATION", "Fil^0 vectors are dependent")
    everything = [[one if k == i else zero for k in range(n)] for i in range(n)]
    labels = [f"x{i + 1}" for i in range(g)] + [f"y{i + 1}" for i in range(g)]
    return FilteredPhiNModule(p, N, n, phi, mono, {-1: everything, 0: fil0, 1: []}, labels=labels)


# -- Hom in the filtered category -----------------------------------------------


def annihilator(vectors, n: int, p: int, N: int) -> list:
    """Rows w with w . v = 0 for every v; the identity when vectors span 0."""
    vectors = [v for v in vectors if not _vec_zero(v)]
    if not vectors:
        return [[make_padic(int(i == j), p, N) for j in range(n)] for i in range(n)]
    return padic_kernel(vectors, ncols=n).basis


def hom_mf(DA: FilteredPhiNModule, DB: FilteredPhiNModule, abeloid_shortcut=None) -> HomSpaceResult:
    """Maps M: D_A -> D_B commuting with phi and N and preserving Fil.

    M is dim_B x dim_A, vectorised row-major. ``abeloid_shortcut`` is a pair
    of L-invariant matrices whose commutant dimension must agree.
    """
    if DA.prime != DB.prime:
        raise fail("PRIME_MISMATCH", "modules over different primes")
    p = DA.prime
    N = min(DA.precision, DB.precision)
    a, b = DA.dim, DB.dim
    zero = make_padic(0, p, N)

    def var(r, c):
        return r * a + c

    rows = []
    # M X_A - X_B M = 0 for X = phi, N
    for XA, XB in ((DA.phi, DB.phi), (DA.mono, DB.mono)):
        for r in range(b):
            for c in range(a):
                row = [zero] * (a * b)
                for k in range(a):
                    if not XA[k][c].is_zero():
                        row[var(r, k)] = row[var(r, k)] + XA[k][c]
                for k in range(b):
                    if not XB[r][k].is_zero():
                        row[var(k, c)] = row[var(k, c)] - XB[r][k]
                rows.append(row)
    for i in sorted(set(DA.jumps()) | set(DB.jumps())):
        src = DA.fil(i)
        if not src:
            continue
        E = annihilator(DB.fil(i), b, p, N)
        for f in src:
            for w in E:
                # w . (M f) = sum_{r,c} w_r M_rc f_c
                row = [zero] * (a * b)
                for r in range(b):
                    if w[r].is_zero():
                        continue
                    for c in range(a):
                        if not f[c].is_zero():
                            row[var(r, c)] = row[var(r, c)] + w[r] * f[c]
                rows.append(row)
    rows = [r for r in rows if not _vec_zero(r)]
    if rows:
        K = padic_kernel(rows, ncols=a * b)
    else:
        K = padic_kernel([[zero] * (a * b)], ncols=a * b)
    K.shape = (b, a)
    result = HomSpaceResult("mf", K.dimension, K.basis_matrices(), K.certified,
                            notes=[f"precision margin {K.precision_margin}"])
    if abeloid_shortcut is not None:
        LA, LB = abeloid_shortcut
        S = sylvester_kernel(LA, LB)
        result.cross_check = {"general_dim": K.dimension, "sylvester_dim": S.dimension,
                              "agree": K.dimension == S.dimension}
        if K.dimension != S.dimension:
            raise fail("SHORTCUT_MISMATCH", "filtered Hom disagrees with the L-invariant commutant")
        result.certified = result.certified and S.certified
    return result


# -- invariants -----------------------------------------------------------------


def phi_n_eigenspace(D: FilteredPhiNModule, m: int):
    """Vectors with phi(x) = p^m x and N(x) = 0."""
    p, N, n = D.prime, D.precision, D.dim
    pm = make_padic(Fraction(p) ** m, p, N)
    rows = [[D.phi[i][j] - (pm if i == j else 0) for j in range(n)] for i in range(n)]
    rows += [list(r) for r in D.mono]
    rows = [r for r in rows if not _vec_zero(r)]
    if not rows:
        rows = [[make_padic(0, p, N)] * n]
    return padic_kernel(rows, ncols=n)


def padic_det(A) -> PadicNumber:
    n = len(A)
    p = A[0][0].prime
    M = [list(r) for r in A]
    det = make_padic(1, p, max(x.abs_precision for r in A for x in r))
    for c in range(n):
        best = None
        for i in range(c, n):
            if not M[i][c].is_zero() and (best is None or M[i][c].valuation < M[best][c].valuation):
                best = i
        if best is None:
            return PadicNumber.zero(p, det.precision)
        if best != c:
            M[c], M[best] = M[best], M[c]
            det = -det
        det = det * M[c][c]
        for i in range(c + 1, n):
            if not M[i][c].is_zero():
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


class NewtonHodge(NamedTuple):
    t_N: int
    t_H: int
    equal: bool


def newton_hodge(D: FilteredPhiNModule) -> NewtonHodge:
    d = padic_det(D.phi)
    if d.is_zero():
        raise fail("SINGULAR_PHI", "phi is not invertible")
    t_N = d.valuation
    keys = D.jumps()
    t_H = 0
    if keys:
        for i in range(min(keys), max(keys) + 1):
            t_H += i * (D.fil_dim(i) - D.fil_dim(i + 1))
    return NewtonHodge(t_N, t_H, t_N == t_H)


def is_ordinary_weight2(D: FilteredPhiNModule, R: RationalStructure) -> bool:
    """V = Fil^1 + A and V = Fil^2 + (A + B), both direct."""
    R.check_compatible(D)
    n, p, N = D.dim, D.prime, D.precision
    if D.fil_dim(0) != n or D.fil_dim(3) != 0:
        raise fail("SHAPE_MISMATCH", "filtration jumps must lie in {0, 1, 2}")
    A = R.basis_vectors("A", p=p, N=N)
    AB = R.basis_vectors("A", "B0", "B1", p=p, N=N)
    for F, W in ((D.fil(1), A), (D.fil(2), AB)):
        if padic_span_rank(F) + len(W) != n or padic_span_rank(F + W) != n:
            return False
    return True


# -- Raskind admissibility ------------------------------------------------------


@dataclass
class RaskindVerdict:
    dim_Q: int
    dim_Qp: int
    admissible: bool
    certified: bool
    path: str
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"dim_Q": self.dim_Q, "dim_Qp": self.dim_Qp, "admissible": self.admissible,
                "certified": self.certified, "path": self.path, "notes": list(self.notes)}


def _intersection_dim(F, W, n) -> tuple[int, int]:
    """dim(span F ∩ span W) and the precision margin of the sum."""
    F = [v for v in F if not _vec_zero(v)]
    rf = padic_span_rank(F)
    both = F + W
    _, piv, margin = _padic_rref(both)
    return rf + len(W) - len(piv), margin


def _symbolic_b1_dim(D: FilteredPhiNModule, B1: list, facts: Facts):
    eqs = D.symbolic.get("fil_equations", {}).get(1)
    if eqs is None:
        return None, "module carries no symbolic Fil^1 equations"
    split_rows = []
    for row in eqs:
        restricted = [facts.normalize(Form.lift(row[i])) for i in B1]
        monos = {m for f in restricted for m in f.terms}
        for m in monos:
            if m and monomial_name(m) not in facts.independent:
                return None, f"no independence fact covers {monomial_name(m)}"
        for m in sorted(monos):
            split_rows.append([f.terms.get(m, Fraction(0)) for f in restricted])
    if not split_rows:
        return len(B1), None
    return len(nullspace_rational(split_rows, ncols=len(B1))), None


def _check_symbolic_equations(D: FilteredPhiNModule, facts: Facts) -> None:
    """The symbolic Fil^1 equations must cut out the numeric Fil^1."""
    eqs = D.symbolic.get("fil_equations", {}).get(1)
    if eqs is None or not facts.values:
        return
    p, N = D.prime, D.precision
    try:
        rows = [[Form.lift(f).evaluate(facts.values, p, N) for f in row] for row in eqs]
    except Exception:
        return
    for w in rows:
        for v in D.fil(1):
            acc = make_padic(0, p, N)
            for a, b in zip(w, v):
                acc = acc + a * b
            if not acc.is_zero():
                raise fail("FACT_CONTRADICTION", "symbolic Fil^1 equations disagree with the module")


def raskind_check(D: FilteredPhiNModule, R: RationalStructure, facts: Facts | None = None,
                  height: int | None = None) -> RaskindVerdict:
    R.check_compatible(D)
    facts = facts or Facts()
    p, N, n = D.prime, D.precision, D.dim
    facts.check(p, N)
    _check_symbolic_equations(D, facts)
    B1 = list(R.blocks.get("B1", []))
    W = R.basis_vectors("B1", p=p, N=N)
    dim_Qp, margin = _intersection_dim(D.fil(1), W, n)
    if margin <= 0:
        raise fail("PRECISION_EXHAUSTED", "cannot decide dim Fil^1 ∩ B1")
    notes = []
    certified = margin >= CERTIFICATION_THRESHOLD
    dim_Q, why = _symbolic_b1_dim(D, B1, facts)
    path = "symbolic"
    if dim_Q is None:
        notes.append(why)
        path = "reconstruction"
        # B1 coordinates x with E x = 0, E the annihilator of Fil^1
        E = annihilator(D.fil(1), n, p, N)
        rows = [[w[i] for i in B1] for w in E]
        rows = [r for r in rows if not _vec_zero(r)]
        if rows:
            K = padic_kernel(rows, ncols=len(B1))
        else:
            K = padic_kernel([[make_padic(0, p, N)] * len(B1)], ncols=len(B1))
        if not K.certified:
            raise fail("INSUFFICIENT_FACTS", "no facts and the p-adic kernel is not certified")
        dim_Q = len(rational_subspace(K, height, system=rows or None))
        certified = False
        notes.append("dim_Q from rational reconstruction; uncertified")
    if dim_Q > dim_Qp:
        raise fail("PRECISION_EXHAUSTED", "rational dimension exceeds p-adic dimension")
    return RaskindVerdict(dim_Q, dim_Qp, dim_Q == dim_Qp, certified, path, notes)


__all__ = [
    "Facts",
    "FilteredPhiNModule",
    "Form",
    "NewtonHodge",
    "RaskindVerdict",
    "RationalStructure",
    "annihilator",
    "dst_of_abeloid",
    "hom_mf",
    "is_ordinary_weight2",
    "newton_hodge",
    "padic_det",
    "padic_span_rank",
    "phi_n_eigenspace",
    "raskind_check",
]
