from fractions import Fraction

import pytest
import sympy

from tatelab.errors import TatelabError
from tatelab.linalg import (
    ExponentData,
    KernelResult,
    congruence_sublattice,
    det_rational,
    exact_span_solve,
    hermite_smith,
    integer_kernel,
    matmul,
    padic_kernel,
    padic_matrix,
    rational_subspace,
    rref_rational,
    saturate,
    sylvester_kernel,
)
from tatelab.padic import make_padic, padic_equal

P, N = 7, 40


def same_span(us, vs):
    """Exact rational span equality via ranks."""
    if len(us) != len(vs):
        return False
    return sympy.Matrix(us).rank() == sympy.Matrix(vs).rank() == sympy.Matrix(us + vs).rank()


def test_kernel_of_p_row():
    # ker [p, 1] is spanned by (1, -p); any normalisation has the same span
    K = padic_kernel(padic_matrix([[P, 1]], P, N))
    assert K.dimension == 1 and K.certified
    v = K.basis[0]
    assert padic_equal(v[0], make_padic(1, P, N))
    assert padic_equal(v[1], make_padic(-P, P, N))
    assert same_span([[1, -P]], [[-1, P]])


def test_kernel_full_rank_and_zero():
    assert padic_kernel(padic_matrix([[1, 0], [0, P]], P, N)).dimension == 0
    K = padic_kernel(padic_matrix([[0, 0], [0, 0]], P, N))
    assert K.dimension == 2


def test_kernel_precision_exhausted():
    # a pivot of valuation near the cap leaves no room to certify
    A = [[make_padic(P**3, P, 10)], [make_padic(0, P, 2)]]
    with pytest.raises(TatelabError) as e:
        padic_kernel(A)
    assert e.value.code == "PRECISION_EXHAUSTED"


def test_sylvester_commutant_of_scalar_and_diagonal():
    one = padic_matrix([[1, 0], [0, 1]], P, N)
    assert sylvester_kernel(one, one).dimension == 4
    D = padic_matrix([[1, 0], [0, 2]], P, N)
    assert sylvester_kernel(D, D).dimension == 2
    with pytest.raises(TatelabError):
        sylvester_kernel([[make_padic(1, P, N), make_padic(1, P, N)]], one)


def test_rational_subspace_examples():
    K = padic_kernel(padic_matrix([[1, -2, 0]], P, N))
    R = rational_subspace(K)
    assert same_span(R, [[2, 1, 0], [0, 0, 1]])
    # an irrational direction: sqrt(2) exists in Q_7
    from tatelab.padic import hensel_sqrt

    s = hensel_sqrt(make_padic(2, P, N))
    A = [[make_padic(1, P, N), -s, make_padic(0, P, N)]]
    R = rational_subspace(padic_kernel(A))
    assert same_span(R, [[0, 0, 1]])


def test_smith_against_sympy():
    from sympy.matrices.normalforms import smith_normal_form

    for A in ([[2, 0], [0, 3]], [[2, 4, 4], [-6, 6, 12], [10, 4, 16]], [[1, 2], [3, 4]], [[6, 0], [0, 4]]):
        nf = hermite_smith(A)
        theirs = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
        expect = [abs(theirs[i, i]) for i in range(min(theirs.shape)) if theirs[i, i] != 0]
        assert nf.elementary_divisors == expect
        assert matmul(matmul(nf.smith_left, A), nf.smith_right) == [[Fraction(x) for x in r] for r in nf.smith]
    assert hermite_smith([[2, 0], [0, 3]]).elementary_divisors == [1, 6]


def test_hnf_invariants():
    for A in ([[2, 4, 4], [-6, 6, 12], [10, 4, 16]], [[3, 5], [7, 11]], [[4, 6, 8]]):
        nf = hermite_smith(A)
        assert matmul(A, nf.hnf_transform) == [[Fraction(x) for x in r] for r in nf.hnf]
        assert abs(det_rational(nf.hnf_transform)) == 1


def test_integer_kernel_and_saturate():
    K = integer_kernel([[2, 4]])
    assert len(K) == 1 and sorted(map(abs, K[0])) == [1, 2]
    S = saturate([[Fraction(1, 2), Fraction(1, 3)]], 2)
    assert S in ([[3, 2]], [[-3, -2]])


def test_congruence_sublattice():
    sub, divisors = congruence_sublattice([[1, 0], [0, 1]], [([1, 0], 2)])
    assert divisors == [2]
    assert same_span(sub, [[2, 0], [0, 1]])
    # integrality condition x/2 in Z gives the same lattice
    sub2, d2 = congruence_sublattice([[1, 0], [0, 1]], [([Fraction(1, 2), 0], 1)])
    assert d2 == [2] and same_span(sub2, sub)


def test_exact_span_solve():
    gens = ("p",)
    EA = ExponentData(gens, {"p": [[1]]})
    EB = ExponentData(gens, {"p": [[2]]})
    M = exact_span_solve(EA, EB)
    assert len(M) == 1 and M[0][0][0] != 0
    with pytest.raises(TatelabError) as e:
        exact_span_solve(EA, ExponentData(("p", "u2"), {"p": [[1]], "u2": [[0]]}))
    assert e.value.code == "GENERATOR_MISMATCH"
    with pytest.raises(TatelabError):
        exact_span_solve(ExponentData(("u2",), {"u2": [[1]]}), ExponentData(("u2",), {"u2": [[1]]}))


def test_rref_rational_pivots():
    R, piv = rref_rational([[2, 4], [1, 2]])
    assert piv == [0] and R[0] == [1, 2]


def test_kernel_of_rank_one_square():
    # row 2 = p * row 1; the kernel is spanned by (-p, 1), normalised here to (1, -1/p)
    K = padic_kernel(padic_matrix([[1, P], [P, P * P]], P, N))
    assert K.dimension == 1
    v = K.basis[0]
    assert padic_equal(v[0], make_padic(1, P, N))
    assert padic_equal(v[1], make_padic(Fraction(-1, P), P, N))
    assert same_span([[Fraction(1), Fraction(-1, P)]], [[-P, 1]])


def test_rational_subspace_reference_cases():
    from tatelab.padic import hensel_sqrt

    one = make_padic(1, P, N)
    s = hensel_sqrt(make_padic(-3, P, N))
    rational = padic_kernel([[make_padic(Fraction(-22, 7), P, N), one]])
    assert same_span(rational_subspace(rational), [[1, Fraction(22, 7)]])
    irrational = padic_kernel([[-s, one]])
    assert rational_subspace(irrational) == []
    both = KernelResult(2, [[one, s], [one, -s]], True, N)
    assert same_span(rational_subspace(both), [[1, 0], [0, 1]])
    with pytest.raises(TatelabError) as e:
        rational_subspace(rational, H=7**N)
    assert e.value.code == "HEIGHT_TOO_LARGE"


def test_sylvester_reference_cases():
    from tatelab.padic import iwasawa_log

    zero = [[make_padic(0, P, N)]]
    assert sylvester_kernel(zero, zero).dimension == 1
    assert sylvester_kernel(zero, [[iwasawa_log(make_padic(1 + P, P, N))]]).dimension == 0


def test_smith_trivial_cases():
    assert hermite_smith([[1, 0], [0, 1]]).smith == [[1, 0], [0, 1]]
    assert hermite_smith([[0]]).smith == [[0]]
