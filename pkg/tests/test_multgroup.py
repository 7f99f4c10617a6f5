from fractions import Fraction

import pytest

from oracles import log_one_plus_p_series
from tatelab.errors import ParseError, TatelabError
from tatelab.multgroup import QpContext, Surd
from tatelab.padic import hensel_sqrt, iwasawa_log, make_padic, padic_equal, primitive_root, teichmuller
from tatelab.parser import parse_entry, tokenize


def coords(x):
    return (x.zeta_exp, x.p_exp, x.unit_coord)


def test_parse_examples(ctx7):
    z, e, u = coords(ctx7.parse("p"))
    assert (z, e) == (0, 1) and u.is_zero()
    z, e, u = coords(ctx7.parse("(1+p)^(sqrt(-3))"))
    assert (z, e) == (0, 0)
    assert padic_equal(u, hensel_sqrt(make_padic(-3, 7, 64)))
    z, e, u = coords(ctx7.parse("(1+p) * p"))
    assert (z, e) == (0, 1) and padic_equal(u, make_padic(1, 7, 64))


def test_rational_base_decomposition(ctx7):
    # 2 = zeta^k * (1+p)^t with zeta^k the Teichmüller lift of 2
    x = ctx7.parse("2")
    w = teichmuller(make_padic(2, 7, 64))
    assert ctx7.zeta_residue == primitive_root(7)
    assert pow(ctx7.zeta.residue(64), x.zeta_exp, 7**64) == w.residue(64)
    assert x.p_exp == 0
    # the principal part 2/w has the same log as 2
    assert padic_equal(ctx7.log_of(x), iwasawa_log(make_padic(2, 7, 64)))


def test_pow_and_inverse(ctx7):
    p3 = ctx7.pow(ctx7.parse("p"), 3)
    assert (p3.zeta_exp, p3.p_exp) == (0, 3) and p3.unit_coord.is_zero()
    t = hensel_sqrt(make_padic(-3, 7, 64))
    x = ctx7.pow(ctx7.parse("(1+p)"), t)
    assert padic_equal(x.unit_coord, t)
    y = ctx7.parse("zeta^2 * (1+p)^3 * p^-2")
    assert ctx7.is_identity(ctx7.mult(y, ctx7.inverse(y)))


def test_pow_errors(ctx7):
    t = hensel_sqrt(make_padic(-3, 7, 64))
    with pytest.raises(TatelabError) as e:
        ctx7.pow(ctx7.parse("p"), t)
    assert e.value.code == "PADIC_EXPONENT_ON_NONUNIT"
    with pytest.raises(TatelabError) as e:
        ctx7.parse("p^(sqrt(-3))")
    assert e.value.code == "ILLEGAL_EXPONENT"
    with pytest.raises(TatelabError) as e:
        ctx7.pow(ctx7.parse("zeta"), Fraction(1, 4))
    assert e.value.code == "FRACTIONAL_TORSION"
    with pytest.raises(TatelabError) as e:
        ctx7.parse("(1+p)^(sqrt(3))")
    assert e.value.code == "NON_RESIDUE"


def test_gamma_examples(ctx7):
    g2 = ctx7.gamma(2, ctx7.parse("(1+p)"))
    assert g2.is_identity()
    gp = ctx7.gamma(7, ctx7.parse("(1+p)"))
    assert not gp.is_identity() and padic_equal(gp.unit_coord, make_padic(1, 7, 64))
    g3 = ctx7.gamma(3, ctx7.parse("zeta"))
    assert g3.torsion_modulus == 2 and g3.torsion_part == 1


def test_gamma_is_homomorphism(ctx7):
    xs = ["zeta * p^2", "(1+p)^3 * 5", "p * 3/2", "zeta^5 * (1+p)^(1/5)"]
    for ell in (2, 3, 5, 7):
        for a in xs:
            for b in xs:
                x, y = ctx7.parse(a), ctx7.parse(b)
                gx, gy, gxy = ctx7.gamma(ell, x), ctx7.gamma(ell, y), ctx7.gamma(ell, ctx7.mult(x, y))
                assert gxy.torsion_part == (gx.torsion_part + gy.torsion_part) % gxy.torsion_modulus
                assert gxy.p_exp == gx.p_exp + gy.p_exp


def test_log_and_ord(ctx7):
    assert ctx7.ord_of(ctx7.parse("p")) == 1 and ctx7.log_of(ctx7.parse("p")).is_zero()
    assert ctx7.ord_of(ctx7.parse("zeta")) == 0 and ctx7.log_of(ctx7.parse("zeta")).is_zero()
    x = ctx7.parse("(1+p)^2 * p^3")
    assert ctx7.ord_of(x) == 3
    assert padic_equal(ctx7.log_of(x), log_one_plus_p_series(7, 64) * 2)


@pytest.mark.parametrize("text", [
    "p", "zeta", "(1+p)^(sqrt(-3))", "(1+p)*p", "zeta^3 * p^2 * (1+p)^(2/5)", "-3/49",
    "22/7 * (1+p)^(1 + sqrt(-3))", "(1+p)^(-48)*p", "(1+p)^(-28*sqrt(-3))",
])
def test_print_parse_round_trip(ctx7, text):
    x = ctx7.parse(text)
    assert ctx7.parse(ctx7.format(x)) == x


def test_unit_symbols():
    ctx = QpContext(7, 64, {"eps": "(1+p)^2"})
    x = ctx.parse("eps * p")
    assert x.exact_map is not None and "eps" in x.exact_map
    assert padic_equal(x.unit_coord, make_padic(2, 7, 64))


def test_parse_errors(ctx7):
    with pytest.raises(ParseError) as e:
        ctx7.parse("p ^ (1 +")
    assert e.value.code == "PARSE_ERROR"
    with pytest.raises(ParseError) as e:
        ctx7.parse("q")
    assert e.value.position == 0
    with pytest.raises(ParseError) as e:
        ctx7.parse("p * $")
    assert e.value.position == 4
    with pytest.raises(ParseError):
        ctx7.parse("")
    with pytest.raises(ParseError):
        ctx7.parse("1/0")
    with pytest.raises(ParseError):
        ctx7.parse("0")


def test_tokenize_positions():
    toks = tokenize("(1+p)^(sqrt(-3))")
    assert [t.text for t in toks[:5]] == ["(", "1", "+", "p", ")"]
    assert toks[-1].kind == "end" and toks[-1].pos == 16


def test_parse_entry_wrapper():
    assert parse_entry("p^2", 7).p_exp == 2


def test_surd_arithmetic_is_exact():
    p = 7
    a = Surd.rational(p, 1) - Surd.rational(p, 8)
    b = (Surd.rational(p, 2) * Surd.sqrt(p, -3)).scale(-2)
    s = a * a + b * b
    assert s.is_rational() and s.rational_value() == 1
    # sqrt(-12) is the canonical root of -12, which may be -2 sqrt(-3)
    assert padic_equal(Surd.sqrt(p, -12).evaluate(40), hensel_sqrt(make_padic(-12, p, 40)))
    r = Surd.sqrt(p, -12).scale(Fraction(1, 2))
    assert padic_equal((r * r).evaluate(40), make_padic(-3, p, 40))


def test_fractional_exponent_must_be_p_integral(ctx7):
    with pytest.raises(TatelabError) as e:
        ctx7.parse("(1+p)^(1/7)")
    assert e.value.code == "ILLEGAL_EXPONENT"
