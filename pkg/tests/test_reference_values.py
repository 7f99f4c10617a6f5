"""Published values not already pinned down by the per-module suites."""

import pytest

from tatelab.abeloid import PeriodMatrix, ord_matrix, riemann_check
from tatelab.multgroup import QpContext, Surd
from tatelab.padic import hensel_sqrt, make_padic, padic_equal
from tatelab.phin import dst_of_abeloid, raskind_check
from tatelab.scenarios import l_independence, load_golden, product_positive, reflected_matrix
from tatelab.surface import build_h2, example_non_admissible, pairing


def test_ord_of_symmetric_pair(ctx7):
    Q = PeriodMatrix.parse(ctx7, [["p", "1"], ["1", "(1+p)*p"]])
    assert ord_matrix(Q) == [[1, 0], [0, 1]]


def test_reflected_matrix_is_algebraisable(ctx7):
    a, b = Surd.rational(7, -7), Surd.sqrt(7, -3).scale(-4)
    B = reflected_matrix(ctx7, ctx7.parse("(1+p)"), a, b)
    assert ord_matrix(B) == [[1, 0], [0, 1]]
    assert riemann_check(B)


def test_dst_of_tate_curves(ctx7):
    D = dst_of_abeloid(PeriodMatrix.parse(ctx7, [["p"]]))
    assert padic_equal(D.phi[0][0], make_padic(1, 7, 64) / 7) and padic_equal(D.phi[1][1], make_padic(1, 7, 64))
    assert [[x.residue(1) if not x.is_zero() else 0 for x in row] for row in D.mono] == [[0, 1], [0, 0]]
    fil0 = D.fil(0)
    assert len(fil0) == 1 and fil0[0][0].is_zero() and padic_equal(fil0[0][1], make_padic(1, 7, 64))
    D2 = dst_of_abeloid(PeriodMatrix.parse(ctx7, [["p^2"]]))
    assert padic_equal(D2.mono[0][1], make_padic(2, 7, 64)) and D2.mono[1][0].is_zero()


@pytest.mark.parametrize("q1,q2", [("p", "(1+p)*p"), ("p", "p^2"), ("zeta*p^3", "(1+p)^(sqrt(-3))*p"), ("(1+p)*p", "(1+p)*p")])
def test_mazur_vector_isotropic_digit_exact(ctx7, q1, q2):
    v = build_h2(ctx7, q1, q2).vector
    q = pairing(v, v)
    assert q.is_zero() and q.precision >= 60


@pytest.mark.parametrize("d,lam", [(-3, 1), (-3, 0), (-3, 5), (2, 1), (2, -2)])
def test_example_vector_isotropic(d, lam):
    W = example_non_admissible(hensel_sqrt(make_padic(d, 7, 64)), lam)
    assert pairing(W.vector, W.vector).is_zero()


def test_l_independence_at_13():
    r = l_independence(13, 3, golden=load_golden())
    assert (r.computed["dim_ell"], r.computed["dim_p"]) == (3, 2) and r.verdict == "PASS"


def test_product_identical_curves():
    r = product_positive(7, "(1+p)*p", "(1+p)*p")
    assert r.computed["hom_algebraic"] == r.computed["hom_tate_p"] == 1
    assert r.computed["raskind"] == [3, 3, True]


def test_raskind_distinct_l_at_13():
    ctx = QpContext(13, 64)
    W = build_h2(ctx, "p", "(1+p)*p")
    v = raskind_check(W.module, W.structure, W.facts)
    assert (v.dim_Q, v.dim_Qp, v.admissible) == (2, 2, True)
