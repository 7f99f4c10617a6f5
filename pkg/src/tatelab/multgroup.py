"""Coordinates on Q_p^x and its l-adic completions, and the entry parser.

Every element is kept in two forms at once:

* numeric coordinates ``(zeta_exp, p_exp, unit_coord)`` with
  ``x = zeta**zeta_exp * p**p_exp * (1+p)**unit_coord``;
* when available, an exact exponent vector of the principal-unit part over
  multiplicatively independent generators: ``u<l>`` (the principal part of a
  prime l != p) and user-declared unit symbols. Exponents live in the
  Q-span of square roots (``Surd``).

Independence of the ``u<l>`` follows from unique factorisation in Q; user
symbols are independent by declaration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import fail
from .padic import (
    DEFAULT_PRECISION,
    PadicNumber,
    check_prime,
    factorize,
    hensel_sqrt,
    iwasawa_log,
    make_padic,
    primitive_root,
    teichmuller,
    vp_int,
)


def squarefree_split(n: int) -> tuple[int, int]:
    """n = s**2 * d with d squarefree (sign kept in d)."""
    sign = -1 if n < 0 else 1
    s, d = 1, sign
    for q, e in factorize(n).items():
        s *= q ** (e // 2)
        if e % 2:
            d *= q
    return s, d


def _root_residue(r: Fraction, p: int) -> int:
    """Residue mod p of hensel_sqrt(r) (r a p-adic unit)."""
    a = r.numerator * pow(r.denominator, -1, p) % p
    for x in range(1, (p - 1) // 2 + 1):
        if (x * x - a) % p == 0:
            return x
    raise fail("NON_RESIDUE", f"{r} is not a square modulo {p}")


@dataclass(frozen=True)
class Surd:
    """A Q-linear combination of square roots of squarefree integers.

    ``sqrt(d)`` denotes the Hensel root of d in Z_p with the residue sign
    convention, so products carry a sign fixed by p.
    """

    prime: int
    terms: tuple = ()  # sorted ((d, coeff), ...), coeff != 0, d squarefree

    @classmethod
    def rational(cls, p: int, r) -> "Surd":
        r = Fraction(r)
        return cls(p, ((1, r),) if r else ())

    @classmethod
    def sqrt(cls, p: int, r) -> "Surd":
        r = Fraction(r)
        if r == 0:
            return cls(p, ())
        if vp_int(r.numerator, p) or vp_int(r.denominator, p):
            raise fail("NOT_A_UNIT", f"sqrt({r}) needs a p-adic unit radicand")
        s, d = squarefree_split(r.numerator * r.denominator)
        mag = Fraction(s, r.denominator)
        lhs = _root_residue(r, p)
        rhs = mag.numerator * pow(mag.denominator, -1, p)
        if d != 1:
            rhs *= _root_residue(Fraction(d), p)
        sign = 1 if (lhs - rhs) % p == 0 else -1
        return cls(p, ((d, sign * mag),))

    @staticmethod
    def _norm(p, items: dict) -> "Surd":
        return Surd(p, tuple(sorted((d, c) for d, c in items.items() if c != 0)))

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(d == 1 for d, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise fail("NOT_RATIONAL", "surd has irrational part")
        return dict(self.terms).get(1, Fraction(0))

    def __add__(self, other: "Surd") -> "Surd":
        items = dict(self.terms)
        for d, c in other.terms:
            items[d] = items.get(d, 0) + c
        return Surd._norm(self.prime, items)

    def __neg__(self) -> "Surd":
        return Surd(self.prime, tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other: "Surd") -> "Surd":
        return self + (-other)

    def scale(self, r) -> "Surd":
        r = Fraction(r)
        return Surd._norm(self.prime, {d: c * r for d, c in self.terms})

    def __mul__(self, other: "Surd") -> "Surd":
        p = self.prime
        items: dict = {}
        for d1, c1 in self.terms:
            for d2, c2 in other.terms:
                if d1 == 1 or d2 == 1:
                    key, coeff = d1 * d2, c1 * c2
                elif d1 == d2:
                    key, coeff = 1, c1 * c2 * d1
                else:
                    # sqrt(d1)*sqrt(d2) = +-s*sqrt(d); the sign depends on the root choices
                    s, d = squarefree_split(d1 * d2)
                    lhs = _root_residue(Fraction(d1), p) * _root_residue(Fraction(d2), p)
                    rhs = s * _root_residue(Fraction(d), p)
                    sign = 1 if (lhs - rhs) % p == 0 else -1
                    key, coeff = d, sign * s * c1 * c2
                items[key] = items.get(key, 0) + coeff
        return Surd._norm(p, items)

    def evaluate(self, N: int) -> PadicNumber:
        total = PadicNumber.zero(self.prime, N)
        for d, c in self.terms:
            root = make_padic(1, self.prime, N) if d == 1 else hensel_sqrt(make_padic(d, self.prime, N))
            total = total + root * make_padic(c, self.prime, N)
        return total

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms:
            if d == 1:
                parts.append(str(c))
            else:
                parts.append(f"{c}*sqrt({d})")
        return "+".join(parts).replace("+-", "-")

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class MultElement:
    """zeta**zeta_exp * p**p_exp * (1+p)**unit_coord, plus optional exact data."""

    prime: int
    zeta_exp: int
    p_exp: Fraction
    unit_coord: PadicNumber
    exact: tuple | None = ()  # sorted ((generator, Surd), ...); None when unknown

    @property
    def exact_map(self) -> dict | None:
        return None if self.exact is None else dict(self.exact)

    def is_principal(self) -> bool:
        return self.zeta_exp == 0 and self.p_exp == 0

    def coords(self) -> tuple:
        return (self.zeta_exp, self.p_exp, self.unit_coord)


@dataclass(frozen=True)
class CompletionElement:
    ell: int
    torsion_part: int
    torsion_modulus: int
    p_exp: Fraction
    unit_coord: PadicNumber | None

    def is_identity(self) -> bool:
        if self.torsion_part % self.torsion_modulus or self.p_exp != 0:
            return False
        return self.unit_coord is None or self.unit_coord.is_zero()


def prime_to_part(n: int, ell: int) -> int:
    while n % ell == 0:
        n //= ell
    return n


def _exact_combine(a: tuple | None, b: tuple | None) -> tuple | None:
    if a is None or b is None:
        return None
    items = dict(a)
    for g, s in b:
        items[g] = items[g] + s if g in items else s
    return tuple(sorted((g, s) for g, s in items.items() if not s.is_zero()))


def _exact_scale(a: tuple | None, e: Surd) -> tuple | None:
    if a is None:
        return None
    return tuple(sorted((g, s * e) for g, s in a if not (s * e).is_zero()))


class QpContext:
    """Prime, precision and declared unit symbols shared by a computation."""

    def __init__(self, p: int, N: int = DEFAULT_PRECISION, units: dict | None = None):
        check_prime(p)
        if N < 1:
            raise fail("BAD_PRECISION", f"precision must be >= 1, got {N}")
        self.p = p
        self.N = N
        self.unit_definitions: dict[str, MultElement] = {}
        self._unit_text = dict(units or {})
        for name, text in self._unit_text.items():
            if not name.isidentifier() or name in ("p", "zeta", "sqrt"):
                raise fail("BAD_UNIT_SYMBOL", f"illegal unit symbol {name!r}")
            elem = self.parse(text)
            if not elem.is_principal():
                raise fail("BAD_UNIT_SYMBOL", f"unit symbol {name!r} must be a principal unit")
            self.unit_definitions[name] = MultElement(
                p, 0, Fraction(0), elem.unit_coord, ((name, Surd.rational(p, 1)),)
            )

    # -- fixed generators -------------------------------------------------

    @cached_property
    def zeta_residue(self) -> int:
        return primitive_root(self.p)

    @cached_property
    def zeta(self) -> PadicNumber:
        return teichmuller(make_padic(self.zeta_residue, self.p, self.N))

    @cached_property
    def log_generator(self) -> PadicNumber:
        """log_p(1+p)."""
        return iwasawa_log(make_padic(1 + self.p, self.p, self.N + 1))

    def discrete_log(self, residue: int) -> int:
        p = self.p
        residue %= p
        x = 1
        for k in range(p - 1):
            if x == residue:
                return k
            x = x * self.zeta_residue % p
        raise fail("NOT_A_UNIT", f"{residue} is not a unit mod {p}")

    def unit_coordinate(self, u: PadicNumber) -> PadicNumber:
        """Z_p-coordinate t of a unit u with principal part (1+p)**t."""
        lg = iwasawa_log(u)
        if lg.is_zero():
            return PadicNumber.zero(self.p, self.N)
        return (lg / self.log_generator).with_precision(self.N)

    # -- element constructors ---------------------------------------------

    def identity(self) -> MultElement:
        return MultElement(self.p, 0, Fraction(0), PadicNumber.zero(self.p, self.N), ())

    def from_rational(self, r) -> MultElement:
        r = Fraction(r)
        if r == 0:
            raise fail("ZERO_INPUT", "0 is not in Q_p^x")
        p = self.p
        x = make_padic(r, p, self.N + 2)
        unit = PadicNumber(p, 0, x.unit, x.precision)
        zeta_exp = self.discrete_log(x.unit % p)
        exact = {}
        for part, sign in ((r.numerator, 1), (r.denominator, -1)):
            for q, e in factorize(part).items():
                if q != p:
                    exact[f"u{q}"] = exact.get(f"u{q}", 0) + sign * e
        exact_t = tuple(sorted((g, Surd.rational(p, c)) for g, c in exact.items() if c))
        return MultElement(p, zeta_exp, Fraction(x.valuation), self.unit_coordinate(unit), exact_t)

    def p_element(self) -> MultElement:
        return MultElement(self.p, 0, Fraction(1), PadicNumber.zero(self.p, self.N), ())

    def zeta_element(self) -> MultElement:
        return MultElement(self.p, 1, Fraction(0), PadicNumber.zero(self.p, self.N), ())

    def generator_coordinate(self, name: str) -> PadicNumber:
        """Numeric Z_p-coordinate of an exact generator."""
        if name in self.unit_definitions:
            return self.unit_definitions[name].unit_coord
        q = int(name[1:])
        return self.from_rational(q).unit_coord

    # -- group operations ---------------------------------------------------

    def mult(self, x: MultElement, y: MultElement) -> MultElement:
        return MultElement(
            self.p,
            (x.zeta_exp + y.zeta_exp) % (self.p - 1),
            x.p_exp + y.p_exp,
            (x.unit_coord + y.unit_coord).with_precision(self.N),
            _exact_combine(x.exact, y.exact),
        )

    def inverse(self, x: MultElement) -> MultElement:
        return MultElement(
            self.p,
            (-x.zeta_exp) % (self.p - 1),
            -x.p_exp,
            -x.unit_coord,
            None if x.exact is None else tuple((g, -s) for g, s in x.exact),
        )

    def pow(self, x: MultElement, e) -> MultElement:
        """x**e for e rational, Surd (principal units only) or p-adic integer."""
        p = self.p
        if isinstance(e, PadicNumber):
            if not x.is_principal():
                raise fail("PADIC_EXPONENT_ON_NONUNIT", "p-adic exponents need a principal unit")
            if not e.is_zero() and e.valuation < 0:
                raise fail("PADIC_EXPONENT_ON_NONUNIT", "exponent must be a p-adic integer")
            return MultElement(p, 0, Fraction(0), (x.unit_coord * e).with_precision(self.N), None)
        if isinstance(e, Surd):
            if e.is_rational():
                return self.pow(x, e.rational_value())
            if not x.is_principal():
                raise fail("ILLEGAL_EXPONENT", "irrational exponents need a principal-unit base")
            coord = (x.unit_coord * e.evaluate(self.N + 2)).with_precision(self.N)
            return MultElement(p, 0, Fraction(0), coord, _exact_scale(x.exact, e))
        e = Fraction(e)
        zeta_exp = self._torsion_power(x.zeta_exp, e)
        ep = make_padic(e, p, self.N + 2) if e else PadicNumber.zero(p, self.N)
        if e and ep.valuation < 0 and not x.unit_coord.is_zero():
            raise fail("ILLEGAL_EXPONENT", f"exponent {e} is not p-integral")
        coord = (x.unit_coord * ep).with_precision(self.N) if e else PadicNumber.zero(p, self.N)
        return MultElement(p, zeta_exp, x.p_exp * e, coord, _exact_scale(x.exact, Surd.rational(p, e)))

    def _torsion_power(self, z: int, e: Fraction) -> int:
        m = self.p - 1
        if e.denominator == 1:
            return z * e.numerator % m
        if z % m == 0:
            return 0
        if math.gcd(e.denominator, m) != 1:
            raise fail("FRACTIONAL_TORSION", f"zeta^{z} has no canonical {e} power")
        return z * e.numerator * pow(e.denominator, -1, m) % m

    # -- maps -------------------------------------------------------------

    def gamma(self, ell: int, x: MultElement) -> CompletionElement:
        if ell == self.p:
            return CompletionElement(ell, x.zeta_exp % (self.p - 1), self.p - 1, x.p_exp, x.unit_coord)
        m = prime_to_part(self.p - 1, ell)
        return CompletionElement(ell, x.zeta_exp % m, m, x.p_exp, None)

    def log_of(self, x: MultElement) -> PadicNumber:
        if x.unit_coord.is_zero():
            return PadicNumber.zero(self.p, self.N)
        return (x.unit_coord * self.log_generator).with_precision(self.N)

    @staticmethod
    def ord_of(x: MultElement) -> Fraction:
        return x.p_exp

    def exact_log(self, x: MultElement) -> dict | None:
        """log_p(x) as a Q-linear form over the constants ``sqrt(d)*log(g)``."""
        if x.exact is None:
            return None
        form: dict = {}
        for g, s in x.exact:
            for d, c in s.terms:
                key = (g, d)
                form[key] = form.get(key, 0) + c
        return {k: v for k, v in form.items() if v != 0}

    def is_identity(self, x: MultElement) -> bool:
        return x.zeta_exp % (self.p - 1) == 0 and x.p_exp == 0 and x.unit_coord.is_zero()

    # -- text --------------------------------------------------------------

    def parse(self, text: str) -> MultElement:
        from .parser import EntryParser

        return EntryParser(self, text).parse()

    def format(self, x: MultElement) -> str:
        """Render an element in the entry grammar (exact data required)."""
        if x.exact is None:
            raise fail("NOT_EXACT", "element has no exact representation")
        p = self.p
        parts = []
        z = x.zeta_exp
        gen_parts = []
        for g, s in x.exact:
            if g in self.unit_definitions:
                base = g
            else:
                q = int(g[1:])
                # u(q) = (q**(p-1))**(1/(p-1)) has the same zeta part as 1
                base = str(q ** (p - 1))
                s = s.scale(Fraction(1, p - 1))
            gen_parts.append(f"{base}^({_surd_text(s)})")
        parts.append(f"zeta^{z}" if z else None)
        if x.p_exp:
            parts.append(f"p^({x.p_exp})")
        parts.extend(gen_parts)
        parts = [t for t in parts if t]
        return " * ".join(parts) if parts else "1"


def _surd_text(s: Surd) -> str:
    """Exponent grammar text for a surd, with the 1/(p-1) folded back in."""
    if not s.terms:
        return "0"
    pieces = []
    for d, c in s.terms:
        pieces.append(str(c) if d == 1 else f"{c}*sqrt({d})")
    out = pieces[0]
    for t in pieces[1:]:
        out += t if t.startswith("-") else "+" + t
    return out
