"""Recursive-descent parser for polynomial expressions with rational-function coefficients in E.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'

Names are either ``E`` (part of the coefficient field) or one of the
caller-supplied variables.  Division is only allowed by expressions free of
those variables, so the result is always a polynomial in the variables.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .poly import MultiPoly, affine_names, homogeneous_names
from .ratfunc import ONE, RationalFunction

_NUM = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUM.match(text, pos)
        if m:
            tokens.append(("num", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME.match(text, pos)
        if m:
            tokens.append(("name", m.group(), pos))
            pos = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", len(text)))
    return tokens


class _Poly:
    """Sparse polynomial in the parser's variables: exponent tuple -> RationalFunction."""

    __slots__ = ("nv", "t")

    def __init__(self, nv, t):
        self.nv = nv
        self.t = {e: c for e, c in t.items() if c}

    @classmethod
    def const(cls, nv, c):
        return cls(nv, {(0,) * nv: RationalFunction.coerce(c)})

    def is_const(self):
        return all(not any(e) for e in self.t)

    def const_value(self):
        return self.t.get((0,) * self.nv, RationalFunction())

    def add(self, o, sign=1):
        out = dict(self.t)
        for e, c in o.t.items():
            c = c if sign == 1 else -c
            out[e] = out[e] + c if e in out else c
        return _Poly(self.nv, out)

    def mul(self, o):
        out = {}
        for e1, c1 in self.t.items():
            for e2, c2 in o.t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return _Poly(self.nv, out)


class _Parser:
    def __init__(self, text: str, variables: list[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = {v: k for k, v in enumerate(variables)}
        self.nv = len(variables)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", tok[2])

    def parse(self) -> _Poly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        val = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return val

    def expr(self):
        val = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = val.add(rhs, 1 if op == "+" else -1)
        return val

    def term(self):
        val = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                val = val.mul(rhs)
            else:
                if not rhs.is_const():
                    raise ParseError("division by a non-constant expression (not a polynomial)", pos)
                c = rhs.const_value()
                if not c:
                    raise ParseError("division by zero", pos)
                val = val.mul(_Poly.const(self.nv, c.inverse()))
        return val

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.unary()
            return val if tok[1] == "+" else _Poly.const(self.nv, -1).mul(val)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a non-negative integer literal", tok[2])
            k = int(tok[1])
            out = _Poly.const(self.nv, 1)
            for _ in range(k):
                out = out.mul(base)
            return out
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return _Poly.const(self.nv, Fraction(val))
        if kind == "name":
            if val == "E":
                return _Poly.const(self.nv, RationalFunction.E())
            if val in self.vars:
                e = [0] * self.nv
                e[self.vars[val]] = 1
                return _Poly(self.nv, {tuple(e): ONE})
            raise ParseError(f"unknown name {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_polynomial(text: str, variables: list[str]) -> MultiPoly:
    p = _Parser(text, variables).parse()
    return MultiPoly(len(variables), p.t, list(variables), _clean=True)


def parse_hamiltonian(text: str, n: int | None = None) -> MultiPoly:
    """Parse H(x1..xn, p1..pn).  With n omitted, n is the largest index used (at least 1)."""
    if n is None:
        idx = [int(m) for m in re.findall(r"\b[xp](\d+)\b", text)]
        n = max(idx) if idx else 1
    return parse_polynomial(text, affine_names(n))


def parse_homogeneous(text: str, nvars: int) -> MultiPoly:
    return parse_polynomial(text, homogeneous_names(nvars))


def parse_ratfunc(text: str) -> RationalFunction:
    p = _Parser(text, []).parse()
    return p.const_value()


def parse_tpoly(text: str) -> tuple:
    """'c0 + c1*t + ...' -> tuple of RationalFunction coefficients (trailing zeros dropped)."""
    p = _Parser(text, ["t"]).parse()
    if not p.t:
        return ()
    deg = max(e[0] for e in p.t)
    out = [p.t.get((k,), RationalFunction()) for k in range(deg + 1)]
    while out and not out[-1]:
        out.pop()
    return tuple(out)
