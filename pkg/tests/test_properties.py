from fractions import Fraction

from hypothesis import given, settings, strategies as st

from tatelab.linalg import det_rational, hermite_smith, matmul
from tatelab.multgroup import QpContext
from tatelab.padic import default_height, hensel_sqrt, make_padic, padic_equal, rational_reconstruct
from tatelab.phin import Form

P, N = 7, 30
CTX = QpContext(P, N)

nonzero_rationals = st.fractions(max_denominator=10**6).filter(lambda r: r != 0)
small = st.integers(-20, 20)


@given(nonzero_rationals, nonzero_rationals, nonzero_rationals)
def test_field_laws(a, b, c):
    x, y, z = (make_padic(r, P, N) for r in (a, b, c))
    assert padic_equal(x * (y + z), x * y + x * z)
    assert padic_equal((x * y) / y, x)
    assert padic_equal(x + y - y, x)


@given(nonzero_rationals)
def test_reconstruct_round_trip(r):
    H = default_height(P, N)
    if r.denominator % P == 0 or abs(r.numerator) > H or r.denominator > H:
        return
    assert rational_reconstruct(make_padic(r, P, N), H) == r


@given(st.integers(1, 10**9).filter(lambda n: n % P != 0))
def test_sqrt_squares_back(n):
    d = make_padic(n * n, P, N)
    s = hensel_sqrt(d)
    assert padic_equal(s * s, d)


@given(st.integers(0, 5), small, st.integers(-5, 5), st.integers(-5, 5))
def test_format_parse_round_trip(a, b, c, d):
    x = CTX.parse(f"zeta^{a} * p^({b}) * (1+p)^({c} + {d}*sqrt(-3))")
    assert CTX.parse(CTX.format(x)) == x


@given(st.integers(0, 5), small, small, st.integers(0, 5), small, small)
def test_log_and_ord_are_homomorphisms(a1, b1, c1, a2, b2, c2):
    x = CTX.parse(f"zeta^{a1} * p^({b1}) * (1+p)^({c1})")
    y = CTX.parse(f"zeta^{a2} * p^({b2}) * (1+p)^({c2})")
    xy = CTX.mult(x, y)
    assert padic_equal(CTX.log_of(xy), CTX.log_of(x) + CTX.log_of(y))
    assert CTX.ord_of(xy) == CTX.ord_of(x) + CTX.ord_of(y)


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=2, max_size=3))
def test_normal_form_invariants(A):
    nf = hermite_smith(A)
    assert matmul(A, nf.hnf_transform) == [[Fraction(x) for x in r] for r in nf.hnf]
    assert abs(det_rational(nf.hnf_transform)) == 1
    d = nf.elementary_divisors
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@given(small, small, small, small)
def test_form_ring_laws(a, b, c, d):
    x, y = Form.var("x"), Form.var("y")
    f, g = a * x + b, c * y + d * x
    assert f * g == g * f
    assert (f + g) * (f - g) == f * f - g * g
