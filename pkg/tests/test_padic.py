from fractions import Fraction

import pytest

from oracles import brute_force_sqrt_residues, log_one_plus_p_series, teichmuller_by_power
from tatelab.errors import TatelabError
from tatelab.padic import (
    INFINITE,
    PrecisionReport,
    field_arithmetic,
    hensel_sqrt,
    iwasawa_log,
    make_padic,
    padic_equal,
    rational_reconstruct,
    teichmuller,
)


def test_make_padic_examples():
    x = make_padic(7, 7, 8)
    assert (x.valuation, x.unit % 7**8) == (1, 1)
    one = make_padic(1, 7, 8)
    assert (one.valuation, one.unit) == (0, 1)
    y = make_padic(Fraction(-3, 49), 7, 8)
    assert y.valuation == -2
    assert (y.unit + 3) % 7**8 == 0


def test_make_padic_zero_and_errors():
    z = make_padic(0, 7, 8)
    assert z.is_zero() and z.valuation == INFINITE
    with pytest.raises(TatelabError) as e:
        make_padic(1, 2, 8)
    assert e.value.code == "EVEN_PRIME"
    with pytest.raises(TatelabError) as e:
        make_padic(1, 7, 0)
    assert e.value.code == "BAD_PRECISION"
    with pytest.raises(TatelabError) as e:
        make_padic(1, 9, 8)
    assert e.value.code == "NOT_PRIME"


def test_field_arithmetic_examples():
    seven, one = make_padic(7, 7, 8), make_padic(1, 7, 8)
    assert field_arithmetic(seven, seven, "mul").valuation == 2
    assert field_arithmetic(one, one, "sub").is_zero()
    r = PrecisionReport(8)
    d = field_arithmetic(make_padic(8, 7, 8), one, "sub", r)
    assert (d.valuation, d.unit) == (1, 1)
    assert r.lossy_steps  # cancellation is recorded


def test_division_by_zero():
    with pytest.raises(TatelabError) as e:
        field_arithmetic(make_padic(1, 7, 8), make_padic(0, 7, 8), "div")
    assert e.value.code == "DIV_BY_ZERO"


def test_teichmuller_against_power_oracle():
    p, N = 7, 20
    for a in range(1, p):
        w = teichmuller(make_padic(a, p, N))
        assert w.residue(N) == teichmuller_by_power(a, p, N)
        assert pow(w.residue(N), p - 1, p**N) == 1
    assert teichmuller(make_padic(8, 7, N)).residue(N) == 1
    with pytest.raises(TatelabError) as e:
        teichmuller(make_padic(7, 7, N))
    assert e.value.code == "NOT_A_UNIT"


def test_log_examples():
    p, N = 7, 64
    assert iwasawa_log(make_padic(p, p, N)).is_zero()
    assert iwasawa_log(make_padic(1, p, N)).is_zero()
    L = iwasawa_log(make_padic(1 + p, p, N))
    assert padic_equal(L, log_one_plus_p_series(p, N))
    assert padic_equal(iwasawa_log(make_padic((1 + p) ** 5, p, N)), L * 5)
    with pytest.raises(TatelabError) as e:
        iwasawa_log(make_padic(0, p, N))
    assert e.value.code == "ZERO_INPUT"


@pytest.mark.parametrize("p", [3, 5, 13])
def test_log_series_oracle_other_primes(p):
    assert padic_equal(iwasawa_log(make_padic(1 + p, p, 30)), log_one_plus_p_series(p, 30))


def test_log_kills_teichmuller_and_p():
    p, N = 11, 40
    for a in range(1, p):
        assert iwasawa_log(teichmuller(make_padic(a, p, N))).is_zero()
        assert iwasawa_log(make_padic(a * p**3, p, N)) == iwasawa_log(make_padic(a, p, N))


def test_hensel_sqrt_examples():
    p, N = 7, 64
    r = hensel_sqrt(make_padic(-3, p, N))
    assert r.residue(1) == 2 and 2 in brute_force_sqrt_residues(-3, p)
    assert padic_equal(r * r, make_padic(-3, p, N))
    assert hensel_sqrt(make_padic(1, p, N)).residue(N) == 1
    with pytest.raises(TatelabError) as e:
        hensel_sqrt(make_padic(-3, 11, N))
    assert e.value.code == "NON_RESIDUE"
    assert brute_force_sqrt_residues(-3, 11) == []
    with pytest.raises(TatelabError) as e:
        hensel_sqrt(make_padic(49, 7, N))
    assert e.value.code == "NOT_A_UNIT"


def test_rational_reconstruct_examples():
    assert rational_reconstruct(make_padic(Fraction(22, 7), 7, 40), 100) == Fraction(22, 7)
    root = hensel_sqrt(make_padic(-3, 7, 40))
    assert rational_reconstruct(root, 10**4) is None
    assert rational_reconstruct(make_padic(0, 7, 40)) == 0
    with pytest.raises(TatelabError) as e:
        rational_reconstruct(make_padic(3, 7, 4), 10**6)
    assert e.value.code == "HEIGHT_TOO_LARGE"


def test_valuation_rules():
    p, N = 5, 30
    x, y = make_padic(Fraction(50, 3), p, N), make_padic(Fraction(2, 125), p, N)
    assert (x * y).valuation == x.valuation + y.valuation
    assert (x + y).valuation == min(x.valuation, y.valuation)
