from fractions import Fraction

import pytest

from tatelab.abeloid import PeriodMatrix, l_invariant, tate_curve
from tatelab.errors import TatelabError
from tatelab.padic import PadicNumber, make_padic, padic_equal
from tatelab.phin import (
    Facts,
    FilteredPhiNModule,
    Form,
    RationalStructure,
    dst_of_abeloid,
    hom_mf,
    newton_hodge,
    padic_literal,
    padic_span_rank,
    parse_padic_literal,
    phi_n_eigenspace,
)
from tatelab.surface import build_h2, n_w, phi_w

P, N = 7, 40


def unit(n, i):
    return [int(k == i) for k in range(n)]


def test_form_arithmetic():
    x, y = Form.var("x"), Form.var("y")
    f = (x + y) * (x - y)
    assert f == x * x - y * y
    assert (f - x * x + y * y).is_zero()
    assert f.names() == {"x", "y"}
    assert (2 * x + 1).to_text() == "1 + 2*x"
    assert f.substitute({"y": x}).is_zero()
    vals = {"x": make_padic(3, P, N), "y": make_padic(5, P, N)}
    assert padic_equal(f.evaluate(vals, P, N), make_padic(-16, P, N))
    with pytest.raises(TatelabError) as e:
        f.evaluate({"x": vals["x"]}, P, N)
    assert e.value.code == "INSUFFICIENT_FACTS"


def test_facts():
    x, y = Form.var("x"), Form.var("y")
    facts = Facts(frozenset({"y"}), {"x": 2 * y}, {"x": make_padic(6, P, N), "y": make_padic(3, P, N)})
    assert facts.normalize(x - y) == y
    assert facts.splits(x * 3)
    assert not Facts().splits(x)
    facts.check(P, N)
    bad = Facts(frozenset(), {"x": 3 * y}, facts.values)
    with pytest.raises(TatelabError) as e:
        bad.check(P, N)
    assert e.value.code == "FACT_CONTRADICTION"
    with pytest.raises(TatelabError):
        Facts(relations={"x": y, "y": x}).normalize(x)
    merged = Facts(frozenset({"a"})).merged(Facts(frozenset({"b"})))
    assert merged.independent == {"a", "b"}


def test_module_validation():
    with pytest.raises(TatelabError) as e:
        FilteredPhiNModule(P, N, 2, [[1, 0], [0, 1]], [[0, 1], [0, 0]], {0: [unit(2, 0), unit(2, 1)]})
    assert e.value.code == "NPHI_RELATION"
    D = FilteredPhiNModule(P, N, 2, [[1, 0], [0, P]], [[0, 1], [0, 0]], {0: [unit(2, 0), unit(2, 1)]})
    assert D.fil_dim(0) == 2 and D.fil_dim(1) == 0 and D.fil_dim(-5) == 2
    with pytest.raises(TatelabError) as e:
        FilteredPhiNModule(P, N, 2, [[1, 0], [0, P]], [[0, 1], [0, 0]], {0: [unit(2, 0)]})
    assert e.value.code == "BAD_FILTRATION"
    with pytest.raises(TatelabError) as e:
        FilteredPhiNModule(P, N, 2, [[1, 0], [0, P]], [[0, 1], [0, 0]],
                           {0: [unit(2, 0), unit(2, 1)], 1: [unit(2, 0)], 2: [unit(2, 1)]})
    assert e.value.code == "BAD_FILTRATION"
    with pytest.raises(TatelabError) as e:
        FilteredPhiNModule(P, N, 2, [[1, 0]], [[0, 1], [0, 0]], {0: []})
    assert e.value.code == "SHAPE_MISMATCH"


@pytest.mark.parametrize("entries", [[["p"]], [["(1+p)*p^2"]], [["p^2", "(1+p)*p"], ["(1+p)*p", "p^3"]]])
def test_dst_of_abeloid(ctx7, entries):
    Q = PeriodMatrix.parse(ctx7, entries)
    D = dst_of_abeloid(Q)
    g = Q.g
    assert D.dim == 2 * g and D.fil_dim(0) == g and D.fil_dim(-1) == 2 * g
    assert newton_hodge(D) == (-g, -g, True)


def test_hom_mf_tate(ctx7):
    pairs = [("p", "p^2", 1), ("p", "(1+p)*p", 0), ("(1+p)*p", "(1+p)^2*p^2", 1)]
    for q1, q2, dim in pairs:
        A, B = tate_curve(ctx7, q1), tate_curve(ctx7, q2)
        r = hom_mf(dst_of_abeloid(A), dst_of_abeloid(B), (l_invariant(A), l_invariant(B)))
        assert r.dimension == dim and r.cross_check["agree"] and r.certified


def test_hom_mf_genus2(ctx7):
    Q = PeriodMatrix.parse(ctx7, [["p^2", "(1+p)*p"], ["(1+p)*p", "p^3"]])
    D = dst_of_abeloid(Q)
    L = l_invariant(Q)
    r = hom_mf(D, D, (L, L))
    assert r.cross_check["agree"] and r.dimension >= 1


def test_hom_mf_prime_mismatch(ctx7, ctx13):
    with pytest.raises(TatelabError) as e:
        hom_mf(dst_of_abeloid(tate_curve(ctx7, "p")), dst_of_abeloid(tate_curve(ctx13, "p")))
    assert e.value.code == "PRIME_MISMATCH"


def test_eigenspace_of_surface(ctx7):
    W = build_h2(ctx7, "p", "(1+p)*p")
    assert phi_n_eigenspace(W.module, 1).dimension == 3
    assert phi_n_eigenspace(W.module, 0).dimension == 1
    assert phi_n_eigenspace(W.module, 2).dimension == 0


def test_newton_hodge_surface(ctx7):
    D = build_h2(ctx7, "p", "(1+p)*p").module
    assert newton_hodge(D) == (6, 6, True)
    with pytest.raises(TatelabError) as e:
        newton_hodge(FilteredPhiNModule(P, N, 1, [[0]], [[0]], {0: [[1]]}))
    assert e.value.code == "SINGULAR_PHI"


def test_json_round_trip(ctx7):
    D = build_h2(ctx7, "p", "(1+p)*p").module
    E = FilteredPhiNModule.from_json(D.to_json())
    for i in range(4):
        assert E.fil_dim(i) == D.fil_dim(i)
        assert padic_span_rank(E.fil(i) + D.fil(i)) == D.fil_dim(i)


def test_padic_literals():
    for x in (make_padic(Fraction(-3, 49), P, N), make_padic(0, P, N)):
        assert padic_equal(parse_padic_literal(padic_literal(x), P, N), x)
    from tatelab.padic import hensel_sqrt

    s = hensel_sqrt(make_padic(2, P, N))
    lit = padic_literal(s)
    assert isinstance(lit, dict)
    assert padic_equal(parse_padic_literal(lit, P, N), s)
    with pytest.raises(TatelabError) as e:
        parse_padic_literal({"valuation": 0, "unit": 14}, P, N)
    assert e.value.code == "BAD_LITERAL"


def test_rational_structure_checks():
    blocks = {"A": [0], "B0": [1], "B1": [2, 3, 4], "C": [5]}
    RationalStructure(blocks, phi_w(P), n_w(), None)
    bad_phi = phi_w(P)
    bad_phi[0][0] = Fraction(P)
    with pytest.raises(TatelabError) as e:
        RationalStructure(blocks, bad_phi, n_w(), None)
    assert e.value.code == "BAD_RATIONAL_STRUCTURE"
    bad_n = n_w()
    bad_n[0][1] = Fraction(0)
    with pytest.raises(TatelabError) as e:
        RationalStructure(blocks, phi_w(P), bad_n, None)
    assert e.value.code == "BAD_RATIONAL_STRUCTURE"
