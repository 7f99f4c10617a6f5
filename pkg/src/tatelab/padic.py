"""Capped-precision arithmetic in Q_p for odd p.

A nonzero element is stored as ``p**valuation * unit`` where ``unit`` is a
residue modulo ``p**precision`` coprime to p, so ``precision`` counts the
significant digits. Zero is stored with ``valuation = INFINITE`` and its
``precision`` is the absolute precision: the value is known to be 0 modulo
``p**precision``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .errors import fail

INFINITE = math.inf
DEFAULT_PRECISION = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> None:
    if p == 2:
        raise fail("EVEN_PRIME", "p = 2 is not supported")
    if not is_prime(p):
        raise fail("NOT_PRIME", f"{p} is not prime")


def vp_int(n: int, p: int) -> int:
    if n == 0:
        return math.inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass
class PrecisionReport:
    """Digits requested versus digits that survived, with per-step losses."""

    requested: int
    effective: int | None = None
    lossy_steps: list = field(default_factory=list)

    def __post_init__(self):
        if self.effective is None:
            self.effective = self.requested

    def record(self, tag: str, loss: int) -> None:
        if loss > 0:
            self.lossy_steps.append({"op": tag, "loss": loss})

    def absorb(self, value: "PadicNumber") -> None:
        if not value.is_zero():
            self.effective = min(self.effective, value.precision)

    def to_dict(self) -> dict:
        return {
            "requested": self.requested,
            "effective": self.effective,
            "lossy_steps": list(self.lossy_steps),
        }


@dataclass(frozen=True)
class PadicNumber:
    prime: int
    valuation: float | int
    unit: int
    precision: int

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PadicNumber":
        return cls(p, INFINITE, 0, absprec)

    @classmethod
    def from_residue(cls, p: int, value: int, absprec: int, shift: int = 0) -> "PadicNumber":
        """The element ``p**shift * value`` with ``value`` known modulo ``p**absprec``."""
        modulus = p**absprec
        value %= modulus
        if value == 0:
            return cls.zero(p, absprec + shift)
        v = 0
        while value % p == 0:
            value //= p
            v += 1
        return cls(p, v + shift, value, absprec - v)

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return self.valuation == INFINITE

    @property
    def abs_precision(self) -> int:
        if self.is_zero():
            return self.precision
        return self.valuation + self.precision

    def residue(self, digits: int) -> int:
        """Integer representative modulo ``p**digits``; requires integrality."""
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise fail("NOT_INTEGRAL", "element has negative valuation")
        return (self.unit * self.prime**self.valuation) % self.prime**digits

    def to_fraction(self) -> Fraction:
        """The stored representative as an exact rational."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def with_precision(self, absprec: int) -> "PadicNumber":
        """Reduce to absolute precision ``absprec`` (never increases precision)."""
        if self.is_zero():
            return PadicNumber.zero(self.prime, min(self.precision, absprec))
        rel = min(self.precision, absprec - self.valuation)
        if rel <= 0:
            return PadicNumber.zero(self.prime, absprec)
        return PadicNumber(self.prime, self.valuation, self.unit % self.prime**rel, rel)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O({self.prime}^{self.precision})"
        return f"{self.prime}^{self.valuation}*{self.unit} + O({self.prime}^{self.abs_precision})"

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise fail("PRIME_MISMATCH", f"{self.prime} vs {other.prime}")
            return other
        if isinstance(other, (int, Rational)):
            r = Fraction(other)
            if r == 0:
                return PadicNumber.zero(self.prime, max(self.abs_precision, 1))
            v = vp_int(r.numerator, self.prime) - vp_int(r.denominator, self.prime)
            return make_padic(r, self.prime, max(1, self.precision, self.abs_precision - v))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        if self.is_zero():
            return self
        return PadicNumber(self.prime, self.valuation, (-self.unit) % self.prime**self.precision, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, -self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _div(other, self)

    def __pow__(self, e: int) -> "PadicNumber":
        if e < 0:
            return make_padic(1, self.prime, self.precision) / self ** (-e)
        result = make_padic(1, self.prime, max(self.precision, 1))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def _add(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    p = x.prime
    absprec = min(x.abs_precision, y.abs_precision)
    if x.is_zero() and y.is_zero():
        return PadicNumber.zero(p, absprec)
    if x.is_zero():
        return y.with_precision(absprec)
    if y.is_zero():
        return x.with_precision(absprec)
    v = min(x.valuation, y.valuation)
    s = x.unit * p ** (x.valuation - v) + y.unit * p ** (y.valuation - v)
    return PadicNumber.from_residue(p, s, absprec - v, shift=v)


def _mul(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    p = x.prime
    if x.is_zero() or y.is_zero():
        if x.is_zero() and y.is_zero():
            return PadicNumber.zero(p, x.precision + y.precision)
        z, w = (x, y) if x.is_zero() else (y, x)
        return PadicNumber.zero(p, z.precision + w.valuation)
    prec = min(x.precision, y.precision)
    return PadicNumber(p, x.valuation + y.valuation, (x.unit * y.unit) % p**prec, prec)


def _div(x: PadicNumber, y: PadicNumber) -> PadicNumber:
    p = x.prime
    if y.is_zero():
        raise fail("DIV_BY_ZERO", "division by a p-adic zero")
    if x.is_zero():
        return PadicNumber.zero(p, x.precision - y.valuation)
    prec = min(x.precision, y.precision)
    mod = p**prec
    return PadicNumber(p, x.valuation - y.valuation, (x.unit * pow(y.unit, -1, mod)) % mod, prec)


# -- public operations ------------------------------------------------


def make_padic(r, p: int, N: int = DEFAULT_PRECISION) -> PadicNumber:
    """Embed a rational into Q_p with N significant digits."""
    check_prime(p)
    if N < 1:
        raise fail("BAD_PRECISION", f"precision must be >= 1, got {N}")
    r = Fraction(r)
    if r == 0:
        return PadicNumber.zero(p, N)
    num, den = r.numerator, r.denominator
    vn, vd = vp_int(num, p), vp_int(den, p)
    num //= p**vn
    den //= p**vd
    mod = p**N
    return PadicNumber(p, vn - vd, (num * pow(den, -1, mod)) % mod, N)


def field_arithmetic(x: PadicNumber, y: PadicNumber, op: str, report: PrecisionReport | None = None) -> PadicNumber:
    if x.prime != y.prime:
        raise fail("PRIME_MISMATCH", f"{x.prime} vs {y.prime}")
    if op == "add":
        out = x + y
    elif op == "sub":
        out = x - y
    elif op == "mul":
        out = x * y
    elif op == "div":
        out = x / y
    else:
        raise ValueError(f"unknown op {op!r}")
    if not out.is_zero() and out.precision <= 0:
        raise fail("PRECISION_EXHAUSTED", f"{op} left no significant digits")
    if report is not None:
        before = min(t.precision for t in (x, y) if not t.is_zero()) if not (x.is_zero() and y.is_zero()) else 0
        if not out.is_zero():
            report.record(op, before - out.precision)
        report.absorb(out)
    return out


def _require_unit(x: PadicNumber) -> None:
    if x.is_zero() or x.valuation != 0:
        raise fail("NOT_A_UNIT", f"{x!r} is not a p-adic unit")


def teichmuller(x: PadicNumber) -> PadicNumber:
    """The (p-1)-th root of unity congruent to ``x`` mod p."""
    _require_unit(x)
    p, N = x.prime, x.precision
    mod = p**N
    w = x.unit % mod
    while True:
        nxt = pow(w, p, mod)
        if nxt == w:
            return PadicNumber(p, 0, w, N)
        w = nxt


def _log_principal(z: int, p: int, N: int) -> int:
    """log(1 + z) modulo p**N for integer z divisible by p."""
    if z % p**N == 0:
        return 0
    vz = vp_int(z, p)
    # terms z^n/n have valuation >= n*vz - floor(log_p n), which is nondecreasing in n
    n_max = 1
    while n_max * vz - _floor_log(n_max, p) < N:
        n_max += 1
    extra = _floor_log(n_max, p)
    big = p ** (N + extra)
    mod = p**N
    total = 0
    zn = 1
    for n in range(1, n_max):
        zn = (zn * z) % big
        k = vp_int(n, p)
        term = (zn // p**k) * pow(n // p**k, -1, mod)
        total += term if n % 2 else -term
    return total % mod


def _floor_log(n: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """Iwasawa branch of the p-adic logarithm (log p = 0)."""
    if x.is_zero():
        raise fail("ZERO_INPUT", "log of zero")
    p, N = x.prime, x.precision
    mod = p**N
    unit = PadicNumber(p, 0, x.unit, N)
    w = teichmuller(unit).unit
    u = (x.unit * pow(w, -1, mod)) % mod
    return PadicNumber.from_residue(p, _log_principal(u - 1, p, N), N)


def hensel_sqrt(d: PadicNumber) -> PadicNumber:
    """Square root of a unit, with residue chosen in {1, ..., (p-1)/2}."""
    _require_unit(d)
    p, N = d.prime, d.precision
    r0 = d.unit % p
    root = next((r for r in range(1, (p - 1) // 2 + 1) if (r * r - r0) % p == 0), None)
    if root is None:
        raise fail("NON_RESIDUE", f"{r0} is not a square modulo {p}")
    x = root
    k = 1
    while k < N:
        k = min(2 * k, N)
        mod = p**k
        x = ((x + d.unit * pow(x, -1, mod)) * pow(2, -1, mod)) % mod
    return PadicNumber(p, 0, x, N)


def default_height(p: int, N: int) -> int:
    """Largest H with 2*H**2 < p**N."""
    return math.isqrt((p**N - 1) // 2)


def _reconstruct_mod(a: int, m: int, H: int):
    if a % m == 0:
        return Fraction(0)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > H:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > H or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def rational_reconstruct(x: PadicNumber, H: int | None = None):
    """Smallest-height rational a/b congruent to x, or None.

    None only means no fraction with |a|, |b| <= H matches the known digits.
    """
    p = x.prime
    if x.is_zero():
        return Fraction(0)
    eff = x.abs_precision if x.valuation >= 0 else x.precision
    if H is None:
        H = default_height(p, eff)
    if 2 * H * H >= p**eff:
        raise fail("HEIGHT_TOO_LARGE", f"2*H^2 must be below p^{eff}")
    if x.valuation >= 0:
        m = p**eff
        out = _reconstruct_mod(x.unit * p**x.valuation, m, H)
    else:
        out = _reconstruct_mod(x.unit, p**eff, H)
        if out is not None:
            out = out / Fraction(p) ** (-x.valuation)
    if out is None or abs(out.numerator) > H or out.denominator > H:
        return None
    return out


def padic_equal(x: PadicNumber, y: PadicNumber) -> bool:
    """True when x and y agree on every digit both know."""
    return (x - y).is_zero()


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo the odd prime p."""
    order = p - 1
    factors = prime_factors(order)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    return 1  # p = 3 -> 2 is found above; unreachable for odd primes


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    n = abs(n)
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    n = abs(n)
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
