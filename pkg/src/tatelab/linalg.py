"""Exact linear algebra over Q, Z and Q_p.

Rational matrices are lists of rows of ``Fraction``; p-adic matrices are
lists of rows of ``PadicNumber``. Vectors are plain lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import fail
from .padic import INFINITE, PadicNumber, make_padic, rational_reconstruct

CERTIFICATION_THRESHOLD = 16


# -- rational helpers ---------------------------------------------------------


def to_fraction_matrix(A) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in A]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)] for i in range(len(A))]


def transpose(A):
    return [list(col) for col in zip(*A)]


def rref_rational(A) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and its pivot columns."""
    R = [list(map(Fraction, row)) for row in A]
    pivots: list[int] = []
    if not R:
        return R, pivots
    rows, cols = len(R), len(R[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R[:r], pivots


def rank_rational(A) -> int:
    return len(rref_rational(A)[1]) if A else 0


def nullspace_rational(A, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}, echelon-normalised (leading coefficient 1)."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    R, pivots = rref_rational(A) if A else ([], [])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    if not basis:
        return []
    return rref_rational(basis)[0]


def det_rational(A) -> Fraction:
    n = len(A)
    M = [list(map(Fraction, row)) for row in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


def inverse_rational(A) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(map(Fraction, row)) + identity(n)[i] for i, row in enumerate(A)]
    R, pivots = rref_rational(aug)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise fail("SINGULAR", "matrix is not invertible")
    return [row[n:] for row in R]


# -- p-adic matrices ----------------------------------------------------------


def padic_matrix(A, p: int, N: int) -> list[list[PadicNumber]]:
    return [[x if isinstance(x, PadicNumber) else make_padic(x, p, N) for x in row] for row in A]


def padic_matmul(A, B, p: int, N: int):
    rows, inner, cols = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = PadicNumber.zero(p, N)
            for k in range(inner):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


@dataclass
class KernelResult:
    dimension: int
    basis: list
    certified: bool
    precision_margin: int
    shape: tuple | None = None  # (g, h) when basis vectors are vectorised matrices
    notes: list = field(default_factory=list)

    def basis_matrices(self) -> list:
        if self.shape is None:
            return self.basis
        g, h = self.shape
        return [[v[i * h:(i + 1) * h] for i in range(g)] for v in self.basis]


def _padic_rref(A):
    """Row-reduce with minimal-valuation pivoting.

    Returns (R, pivots, margin) where R holds the nonzero reduced rows.
    """
    R = [list(row) for row in A]
    if not R:
        return R, [], None
    rows, cols = len(R), len(R[0])
    p = R[0][0].prime if cols else None
    pivots: list[int] = []
    pivot_vals: list[int] = []
    zero_absprecs: list[int] = []
    r = 0
    for c in range(cols):
        best = None
        for i in range(r, rows):
            x = R[i][c]
            if x.is_zero():
                continue
            if best is None or x.valuation < R[best][c].valuation:
                best = i
        if best is None:
            zero_absprecs.extend(R[i][c].precision for i in range(r, rows))
            continue
        R[r], R[best] = R[best], R[r]
        pivot = R[r][c]
        pivot_vals.append(pivot.valuation)
        R[r] = [x / pivot for x in R[r]]
        for i in range(rows):
            if i != r and not R[i][c].is_zero():
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
            elif i != r:
                R[i][c] = PadicNumber.zero(p, R[i][c].precision)
        pivots.append(c)
        r += 1
        if r == rows:
            break
    # rows left over after elimination are residual zeros supporting the rank
    for i in range(r, rows):
        zero_absprecs.extend(x.precision if x.is_zero() else x.valuation for x in R[i])
    top = max(pivot_vals + [0])
    base_prec = min((x.precision for row in A for x in row if not x.is_zero()), default=0)
    support = min(zero_absprecs) if zero_absprecs else base_prec
    margin = support - top
    return R[:r], pivots, margin


def padic_kernel(A, threshold: int = CERTIFICATION_THRESHOLD, ncols: int | None = None) -> KernelResult:
    """Kernel of a p-adic matrix with a certified rank decision."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A or n == 0:
        return KernelResult(n, [_unit_vector(A, n, j) for j in range(n)] if A else [], True, threshold)
    p = A[0][0].prime
    R, pivots, margin = _padic_rref(A)
    if margin <= 0:
        raise fail("PRECISION_EXHAUSTED", "rank is not determinable at this precision")
    N = max(x.abs_precision for row in A for x in row)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [PadicNumber.zero(p, N) for _ in range(n)]
        v[f] = make_padic(1, p, N)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    basis = echelon_normalize(basis)
    return KernelResult(len(basis), basis, margin >= threshold, margin)


def _unit_vector(A, n, j):
    p = A[0][0].prime
    N = A[0][0].abs_precision
    return [make_padic(int(i == j), p, N) for i in range(n)]


def echelon_normalize(vectors):
    """Reduced echelon form of a list of p-adic row vectors (leading 1)."""
    if not vectors:
        return []
    R, _, _ = _padic_rref(vectors)
    return R


def sylvester_kernel(LA, LB, threshold: int = CERTIFICATION_THRESHOLD) -> KernelResult:
    """Kernel of M -> LA*M - M*LB on g x h matrices."""
    g, h = len(LA), len(LB)
    if any(len(r) != g for r in LA) or any(len(r) != h for r in LB):
        raise fail("SHAPE_MISMATCH", "Sylvester inputs must be square")
    p = (LA[0][0] if g else LB[0][0]).prime
    N = max(x.abs_precision for row in LA + LB for x in row)
    zero = PadicNumber.zero(p, N)
    rows = []
    for i in range(g):
        for j in range(h):
            row = [zero] * (g * h)
            for k in range(g):
                row[k * h + j] = row[k * h + j] + LA[i][k]
            for k in range(h):
                row[i * h + k] = row[i * h + k] - LB[k][j]
            rows.append(row)
    res = padic_kernel(rows, threshold, ncols=g * h)
    res.shape = (g, h)
    return res


def safe_height(p: int, digits: int) -> int:
    """Height bound for rationality verdicts: p**(digits // 4).

    Far below the uniqueness bound sqrt(p**digits / 2), so a p-adic number
    that is not a small-height rational reconstructs only with probability
    about p**(-digits/2).
    """
    return p ** max(digits // 4, 1)


def _reconstruct_vector(v, H):
    out = []
    for x in v:
        r = rational_reconstruct(x, H)
        if r is None:
            return None
        out.append(r)
    return out


def rational_subspace(K: KernelResult, H: int | None = None, system=None) -> list[list[Fraction]]:
    """Largest subspace of span(K) found to be defined over Q.

    Works on the reduced echelon basis: rows whose entries all reconstruct
    are kept after exact verification; rows that fail contribute nothing.
    ``system``, when given, is a p-adic matrix A with A v = 0 on span(K).
    """
    if not K.certified:
        raise fail("UNCERTIFIED", "kernel rank is not certified")
    if not K.basis:
        return []
    p = K.basis[0][0].prime
    basis = echelon_normalize(K.basis)
    if H is None:
        digits = min((x.precision for row in basis for x in row if not x.is_zero()), default=1)
        H = safe_height(p, digits)
    found = []
    for row in basis:
        r = _reconstruct_vector(row, H)
        if r is None:
            continue
        if not _in_span(r, basis, p):
            continue
        if system is not None and not _satisfies(system, r, p):
            continue
        found.append(r)
    if not found:
        return []
    return rref_rational(found)[0]


def _in_span(r, basis, p) -> bool:
    N = max(x.abs_precision for row in basis for x in row)
    v = [make_padic(x, p, N) for x in r]
    before = len(_padic_rref(basis)[1])
    after = len(_padic_rref(basis + [v])[1])
    return before == after


def _satisfies(system, r, p) -> bool:
    N = max(x.abs_precision for row in system for x in row)
    v = [make_padic(x, p, N) for x in r]
    for row in system:
        acc = PadicNumber.zero(p, N)
        for a, b in zip(row, v):
            acc = acc + a * b
        if not acc.is_zero():
            return False
    return True


def padic_rank(A) -> int:
    if not A:
        return 0
    return len(_padic_rref(A)[1])


# -- integer normal forms -----------------------------------------------------


def hnf_columns(A) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite normal form: returns (H, U) with A*U = H, U unimodular.

    H is lower echelon by columns: each pivot is positive and entries to the
    left of a pivot in its row lie in [0, pivot).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(map(int, row)) for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(dst, src, f):  # col[dst] -= f * col[src]
        for row in H:
            row[dst] -= f * row[src]
        for row in U:
            row[dst] -= f * row[src]

    def swap(a, b):
        for row in H:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    def negate(a):
        for row in H:
            row[a] = -row[a]
        for row in U:
            row[a] = -row[a]

    c = 0
    for r in range(m):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if H[r][j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda k: (abs(H[r][k]), k))
            if j != c:
                swap(c, j)
            done = True
            for k in range(c + 1, n):
                if H[r][k]:
                    col_op(k, c, H[r][k] // H[r][c])
                    if H[r][k]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            negate(c)
        for k in range(c):
            f = H[r][k] // H[r][c]
            if f:
                col_op(k, c, f)
        c += 1
    return H, U


def integer_kernel(A, ncols: int | None = None) -> list[list[int]]:
    """Z-basis of {x in Z^n : A x = 0}."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    H, U = hnf_columns(A)
    zero_cols = [j for j in range(n) if all(H[i][j] == 0 for i in range(len(H)))]
    return [[U[i][j] for i in range(n)] for j in zero_cols]


def smith_form(A):
    """Smith normal form with transforms: returns (S, L, R) with L*A*R = S."""
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(dst, src, f):
        S[dst] = [a - f * b for a, b in zip(S[dst], S[src])]
        L[dst] = [a - f * b for a, b in zip(L[dst], L[src])]

    def col_op(dst, src, f):
        for row in S:
            row[dst] -= f * row[src]
        for row in R:
            row[dst] -= f * row[src]

    def row_swap(a, b):
        S[a], S[b] = S[b], S[a]
        L[a], L[b] = L[b], L[a]

    def col_swap(a, b):
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in R:
            row[a], row[b] = row[b], row[a]

    t = 0
    while t < min(m, n):
        entries = [(abs(S[i][j]), j, i) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, j, i = min(entries)
        row_swap(t, i)
        col_swap(t, j)
        clean = True
        for i in range(t + 1, m):
            if S[i][t]:
                row_op(i, t, S[i][t] // S[t][t])
                clean = clean and S[i][t] == 0
        for j in range(t + 1, n):
            if S[t][j]:
                col_op(j, t, S[t][j] // S[t][t])
                clean = clean and S[t][j] == 0
        if not clean:
            continue
        bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]), None)
        if bad is not None:
            # pull the offending row in so the pivot can shrink to a divisor
            S[t] = [a + b for a, b in zip(S[t], S[bad[0]])]
            L[t] = [a + b for a, b in zip(L[t], L[bad[0]])]
            continue
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            L[t] = [-a for a in L[t]]
        t += 1
    return S, L, R


def det_int(A) -> int:
    return int(det_rational(A))


@dataclass
class NormalForms:
    hnf: list
    hnf_transform: list  # U with A*U = hnf
    smith: list
    smith_left: list  # L with L*A*R = smith
    smith_right: list

    @property
    def elementary_divisors(self) -> list[int]:
        k = min(len(self.smith), len(self.smith[0]) if self.smith else 0)
        return [self.smith[i][i] for i in range(k) if self.smith[i][i] != 0]


def hermite_smith(A) -> NormalForms:
    A = [list(map(int, row)) for row in A]
    H, U = hnf_columns(A)
    S, L, R = smith_form(A)
    return NormalForms(H, U, S, L, R)


# -- lattices of integer points --------------------------------------------------


def saturate(rational_basis: list, n: int) -> list[list[int]]:
    """Z-basis of span_Q(rational_basis) intersected with Z^n."""
    if not rational_basis:
        return []
    # span ∩ Z^n = kernel of the complement equations, taken over Z
    eqs = nullspace_rational(rational_basis, n)
    if not eqs:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    rows = []
    for e in eqs:
        den = 1
        for x in e:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in e])
    return _row_basis(integer_kernel(rows, n))


def _row_basis(vectors: list[list[int]]) -> list[list[int]]:
    """Deterministic row-HNF of a lattice basis (rows)."""
    if not vectors:
        return []
    H, _ = hnf_columns(transpose(vectors))
    cols = transpose(H)
    return [c for c in cols if any(c)]


def congruence_sublattice(basis: list[list[int]], conditions: list) -> tuple[list[list[int]], list[int]]:
    """Sublattice of span_Z(basis) cut out by congruences.

    ``conditions`` holds pairs ``(c, m)`` meaning ``c . x = 0 mod m`` with c a
    rational row vector and m a positive integer (m = 1 encodes integrality).
    Returns the sublattice basis and the elementary divisors of its index.
    """
    k = len(basis)
    if k == 0:
        return [], []
    n = len(basis[0])
    rows, mods = [], []
    for c, m in conditions:
        coeffs = [sum(Fraction(c[t]) * basis[i][t] for t in range(n)) for i in range(k)]
        den = 1
        for x in coeffs:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in coeffs])
        mods.append(den * m)
    if not rows:
        return basis, []
    t = len(rows)
    big = [rows[r] + [-(mods[r] if s == r else 0) for s in range(t)] for r in range(t)]
    ker = integer_kernel(big, k + t)
    gens = [v[:k] for v in ker]
    coord_basis = _row_basis(gens)
    sub = [[sum(y[i] * basis[i][j] for i in range(k)) for j in range(n)] for y in coord_basis]
    divisors = [d for d in hermite_smith(coord_basis).elementary_divisors if d != 1] if coord_basis else []
    return sub, divisors


# -- exact exponent-lattice solver ----------------------------------------------------


@dataclass(frozen=True)
class ExponentData:
    """Exponent matrices of a period matrix over a declared generator list.

    ``blocks[k]`` is the square matrix whose (i, j) entry is the exponent of
    generator k in the (i, j) entry; generator ``"p"`` must be present.
    """

    generators: tuple
    blocks: dict


def exact_span_solve(EA: ExponentData, EB: ExponentData) -> list[list[list[Fraction]]]:
    """All rational M with Q_A (.) M = N (.) Q_B for some rational N."""
    if tuple(EA.generators) != tuple(EB.generators):
        raise fail("GENERATOR_MISMATCH", "lattices use different generator lists")
    if "p" not in EA.generators:
        raise fail("GENERATOR_MISMATCH", "generator list must contain 'p'")
    g = len(EA.blocks["p"])
    h = len(EB.blocks["p"])
    nm = g * h
    rows = []
    for k in EA.generators:
        A = EA.blocks[k]
        B = EB.blocks[k]
        # (A M - N B)_{ij} = sum_t A[i][t] M[t][j] - sum_t N[i][t] B[t][j]
        for i in range(g):
            for j in range(h):
                row = [Fraction(0)] * (2 * nm)
                for t in range(g):
                    row[t * h + j] += Fraction(A[i][t])
                for t in range(h):
                    row[nm + i * h + t] -= Fraction(B[t][j])
                rows.append(row)
    kernel = nullspace_rational(rows, 2 * nm)
    projected = [v[:nm] for v in kernel]
    if not projected:
        return []
    R, _ = rref_rational(projected)
    return [[row[i * h:(i + 1) * h] for i in range(g)] for row in R]
