"""Recursive-descent parser for period-matrix entry expressions.

Grammar::

    entry    := term { "*" term }
    term     := base [ "^" "(" exponent ")" | "^" ["-"] integer ]
    base     := "p" | "zeta" | rational | "(" rational "+" "p" ")" | symbol
    exponent := product { ("+" | "-") product }
    product  := atom { "*" atom }
    atom     := rational | "sqrt" "(" rational ")" | "(" exponent ")"
    rational := ["-"] digits [ "/" digits ]

``symbol`` is a unit name declared in the context's unit manifest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .multgroup import MultElement, QpContext, Surd

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "*^()+-/":
                raise ParseError(f"unexpected character {ch!r}", start)
            out.append(Token("op", ch, start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class EntryParser:
    def __init__(self, ctx: QpContext, text: str):
        self.ctx = ctx
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            raise ParseError(f"expected {text!r}", self.tok.pos)

    def _integer(self) -> int:
        if self.tok.kind != "int":
            raise ParseError("expected digits", self.tok.pos)
        value = int(self.tok.text)
        self.i += 1
        return value

    def _rational(self) -> Fraction:
        neg = self._accept("-")
        num = self._integer()
        den = 1
        if self._accept("/"):
            pos = self.tok.pos
            den = self._integer()
            if den == 0:
                raise ParseError("zero denominator", pos)
        value = Fraction(num, den)
        return -value if neg else value

    # -- grammar ---------------------------------------------------------

    def parse(self) -> MultElement:
        if self.tok.kind == "end":
            raise ParseError("empty entry", 0)
        value = self._term()
        while self._accept("*"):
            value = self.ctx.mult(value, self._term())
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return value

    def _term(self) -> MultElement:
        base = self._base()
        if not self._accept("^"):
            return base
        if self._accept("("):
            exponent = self._exponent()
            self._expect(")")
        else:
            neg = self._accept("-")
            n = self._integer()
            exponent = Surd.rational(self.ctx.p, -n if neg else n)
        return self.ctx.pow(base, exponent)

    def _base(self) -> MultElement:
        tok = self.tok
        if tok.kind == "name":
            self.i += 1
            if tok.text == "p":
                return self.ctx.p_element()
            if tok.text == "zeta":
                return self.ctx.zeta_element()
            if tok.text in self.ctx.unit_definitions:
                return self.ctx.unit_definitions[tok.text]
            raise ParseError(f"unknown symbol {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            r = self._rational()
            self._expect("+")
            if not (self.tok.kind == "name" and self.tok.text == "p"):
                raise ParseError("expected 'p'", self.tok.pos)
            self.i += 1
            self._expect(")")
            return self._rational_base(r + self.ctx.p, tok.pos)
        if tok.kind == "int" or (tok.kind == "op" and tok.text == "-"):
            return self._rational_base(self._rational(), tok.pos)
        raise ParseError("expected a base", tok.pos)

    def _rational_base(self, r: Fraction, pos: int) -> MultElement:
        if r == 0:
            raise ParseError("zero is not a multiplicative element", pos)
        return self.ctx.from_rational(r)

    def _exponent(self) -> Surd:
        value = self._product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            rhs = self._product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _product(self) -> Surd:
        value = self._atom()
        while self._accept("*"):
            value = value * self._atom()
        return value

    def _atom(self) -> Surd:
        p = self.ctx.p
        tok = self.tok
        if tok.kind == "name" and tok.text == "sqrt":
            self.i += 1
            self._expect("(")
            r = self._rational()
            self._expect(")")
            return Surd.sqrt(p, r)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            value = self._exponent()
            self._expect(")")
            return value
        if tok.kind == "int" or (tok.kind == "op" and tok.text == "-"):
            if tok.text == "-" and self._peek().kind == "name":
                # unary minus on sqrt(...) or a parenthesised exponent
                self.i += 1
                return -self._atom()
            if tok.text == "-" and self._peek().kind == "op" and self._peek().text == "(":
                self.i += 1
                return -self._atom()
            return Surd.rational(p, self._rational())
        raise ParseError("expected an exponent", tok.pos)


def parse_entry(text: str, p: int, N: int = 64, units: dict | None = None) -> MultElement:
    return QpContext(p, N, units).parse(text)
