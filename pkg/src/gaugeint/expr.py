"""Recursive-descent parser for function and gauge expressions.

Grammar (whitespace is ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ['^' ['-'] int]
    atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

Names are the variables ``x`` and ``eps``, the constant ``sqrt2``, and the
functions ``sqrt recip abs exp log sin cos min max piecewise`` plus the
builtin integrands ``sqrt_recip dirichlet kappa``.  ``piecewise(c, a, b)``
is ``a`` where ``c > 0`` and ``b`` elsewhere; ``recip(0)`` is 0.

Expressions built from field operations evaluate exactly in Q(sqrt 2);
the rest fall back to binary64.

>>> parse_expr("0.1 * x^2")
BinOp(op='*', left=Num(value=Fraction(1, 10)), right=Pow(base=Var(name='x'), exp=2))
>>> parse_expr("1/sqrt(x)").eval_float(x=4)
0.5
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import DomainError, ParseError
from .exact import SQRT2, Tag, to_tag

__all__ = ["parse_expr", "NotExact", "Node", "Num", "Var", "BinOp", "Neg", "Pow", "Call", "VARIABLES", "FUNCTIONS"]

VARIABLES = ("x", "eps")
CONSTANTS = ("sqrt2",)
FUNCTIONS = {
    "sqrt": 1, "recip": 1, "abs": 1, "exp": 1, "log": 1, "sin": 1, "cos": 1,
    "min": 2, "max": 2, "piecewise": 3,
    "sqrt_recip": 1, "dirichlet": 1, "kappa": 1,
}


class NotExact(Exception):
    """Raised when an expression cannot be evaluated exactly in Q(sqrt 2)."""


class Node:
    def eval_exact(self, **env) -> Tag:
        raise NotImplementedError

    def eval_float(self, **env) -> float:
        raise NotImplementedError

    def eval_array(self, **env) -> np.ndarray:
        raise NotImplementedError

    def names(self) -> set:
        return set()

    def value(self, **env) -> Union[Tag, float]:
        """Exact value when possible, else a float."""
        try:
            return self.eval_exact(**env)
        except NotExact:
            return self.eval_float(**env)


def _env_tag(env, name):
    if name not in env or env[name] is None:
        raise DomainError(f"variable {name!r} is unbound")
    v = env[name]
    if isinstance(v, float):
        raise NotExact(name)
    return to_tag(v)


def _env_float(env, name):
    if name not in env or env[name] is None:
        raise DomainError(f"variable {name!r} is unbound")
    return float(env[name])


@dataclass(frozen=True)
class Num(Node):
    value: Fraction

    def eval_exact(self, **env):
        return Tag(self.value)

    def eval_float(self, **env):
        return float(self.value)

    def eval_array(self, **env):
        return float(self.value)


@dataclass(frozen=True)
class Var(Node):
    name: str

    def eval_exact(self, **env):
        if self.name == "sqrt2":
            return SQRT2
        return _env_tag(env, self.name)

    def eval_float(self, **env):
        if self.name == "sqrt2":
            return math.sqrt(2.0)
        return _env_float(env, self.name)

    def eval_array(self, **env):
        if self.name == "sqrt2":
            return math.sqrt(2.0)
        v = env.get(self.name)
        if v is None:
            raise DomainError(f"variable {self.name!r} is unbound")
        return v if isinstance(v, np.ndarray) else float(v)

    def names(self):
        return {self.name}


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def eval_exact(self, **env):
        a, b = self.left.eval_exact(**env), self.right.eval_exact(**env)
        return _apply(self.op, a, b)

    def eval_float(self, **env):
        return _apply(self.op, self.left.eval_float(**env), self.right.eval_float(**env))

    def eval_array(self, **env):
        a, b = self.left.eval_array(**env), self.right.eval_array(**env)
        if self.op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.divide(a, b)
        return _apply(self.op, a, b)

    def names(self):
        return self.left.names() | self.right.names()


def _apply(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return a / b


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def eval_exact(self, **env):
        return -self.operand.eval_exact(**env)

    def eval_float(self, **env):
        return -self.operand.eval_float(**env)

    def eval_array(self, **env):
        return -self.operand.eval_array(**env)

    def names(self):
        return self.operand.names()


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exp: int

    def eval_exact(self, **env):
        return self.base.eval_exact(**env) ** self.exp

    def eval_float(self, **env):
        b = self.base.eval_float(**env)
        if b == 0 and self.exp < 0:
            raise ZeroDivisionError("zero to a negative power")
        return b**self.exp

    def eval_array(self, **env):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.power(np.asarray(self.base.eval_array(**env), dtype=float), float(self.exp))

    def names(self):
        return self.base.names()


def _exact_sqrt(t: Tag) -> Tag:
    if not t.is_rational() or t.a < 0:
        raise NotExact("sqrt")
    q = t.a
    for scale, unit in ((1, Tag(1)), (2, SQRT2)):
        v = q / scale
        n, d = v.numerator, v.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return unit * Fraction(rn, rd)
    raise NotExact("sqrt")


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple

    def eval_exact(self, **env):
        n = self.name
        if n in ("exp", "log", "sin", "cos", "sqrt_recip", "dirichlet", "kappa"):
            raise NotExact(n)
        vals = [a.eval_exact(**env) for a in self.args]
        if n == "sqrt":
            return _exact_sqrt(vals[0])
        if n == "recip":
            return Tag(0) if vals[0] == 0 else 1 / vals[0]
        if n == "abs":
            return abs(vals[0])
        if n == "min":
            return min(vals)
        if n == "max":
            return max(vals)
        if n == "piecewise":
            return vals[1] if vals[0] > 0 else vals[2]
        raise NotExact(n)  # pragma: no cover

    def eval_float(self, **env):
        n = self.name
        if n in ("dirichlet", "kappa"):
            # these need the exact argument
            from .funcs import kappa_eval

            t = self.args[0].eval_exact(**env)
            return (1.0 if t.is_rational() else 0.0) if n == "dirichlet" else kappa_eval(t)
        vals = [a.eval_float(**env) for a in self.args]
        v = vals[0]
        if n == "sqrt":
            if v < 0:
                raise ValueError("sqrt of a negative number")
            return math.sqrt(v)
        if n == "recip":
            return 0.0 if v == 0 else 1.0 / v
        if n == "sqrt_recip":
            return 1.0 / math.sqrt(v) if v > 0 else 0.0
        if n == "abs":
            return abs(v)
        if n == "exp":
            return math.exp(v)
        if n == "log":
            if v <= 0:
                raise ValueError("log of a non-positive number")
            return math.log(v)
        if n == "sin":
            return math.sin(v)
        if n == "cos":
            return math.cos(v)
        if n == "min":
            return min(vals)
        if n == "max":
            return max(vals)
        if n == "piecewise":
            return vals[1] if vals[0] > 0 else vals[2]
        raise DomainError(f"unknown function {n}")  # pragma: no cover

    def eval_array(self, **env):
        n = self.name
        if n in ("dirichlet", "kappa"):
            raise NotExact(n)
        vals = [np.asarray(a.eval_array(**env), dtype=float) for a in self.args]
        v = vals[0]
        with np.errstate(all="ignore"):
            if n == "sqrt":
                return np.sqrt(v)
            if n == "recip":
                return np.where(v == 0, 0.0, 1.0 / np.where(v == 0, 1.0, v))
            if n == "sqrt_recip":
                return np.where(v > 0, 1.0 / np.sqrt(np.where(v > 0, v, 1.0)), 0.0)
            if n == "abs":
                return np.abs(v)
            if n == "exp":
                return np.exp(v)
            if n == "log":
                return np.log(v)
            if n == "sin":
                return np.sin(v)
            if n == "cos":
                return np.cos(v)
            if n == "min":
                return np.minimum(vals[0], vals[1])
            if n == "max":
                return np.maximum(vals[0], vals[1])
            if n == "piecewise":
                return np.where(vals[0] > 0, vals[1], vals[2])
        raise DomainError(f"unknown function {n}")  # pragma: no cover

    def names(self):
        out = {self.name}
        for a in self.args:
            out |= a.names()
        return out

    def needs_exact(self) -> bool:
        return self.name in ("dirichlet", "kappa")


def needs_exact_tags(node: Node) -> bool:
    return bool(node.names() & {"dirichlet", "kappa"})


# parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", self._off(len(text) - len(text[pos:].lstrip())))
            kind = m.lastgroup
            start = m.start(kind)
            val = m.group(kind)
            if val == "**":
                val = "^"
            self.toks.append((kind, val, start))
            pos = m.end()
        self.i = 0

    def _off(self, char_index: int) -> int:
        return len(self.text[:char_index].encode("utf-8"))

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val: str):
        kind, v, pos = self.next()
        if v != val:
            got = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {val!r}, got {got}", self._off(pos))

    def parse(self) -> Node:
        if not self.toks:
            raise ParseError("empty expression", 0)
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", self._off(pos))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.next()
            return Neg(self.factor())
        if self.peek()[:2] == ("op", "+"):
            self.next()
            return self.factor()
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.next()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.next()
                sign = -1
            kind, v, pos = self.next()
            if kind != "num" or not re.fullmatch(r"\d+", v):
                raise ParseError("exponent must be an integer literal", self._off(pos))
            node = Pow(node, sign * int(v))
        return node

    def atom(self) -> Node:
        kind, v, pos = self.next()
        if kind == "num":
            return Num(Fraction(v))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if v not in FUNCTIONS:
                    raise ParseError(f"unknown function {v!r}; known: {', '.join(sorted(FUNCTIONS))}", self._off(pos))
                self.next()
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[v]:
                    raise ParseError(f"{v} takes {FUNCTIONS[v]} argument(s), got {len(args)}", self._off(pos))
                return Call(v, tuple(args))
            if v in VARIABLES or v in CONSTANTS:
                return Var(v)
            known = ", ".join(VARIABLES + CONSTANTS)
            raise ParseError(f"unknown identifier {v!r}; known: {known}", self._off(pos))
        if (kind, v) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        got = "end of input" if kind == "end" else repr(v)
        raise ParseError(f"unexpected {got}", self._off(pos))


def parse_expr(text: str) -> Node:
    """Parse ``text`` into an expression tree (see module docstring)."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text).parse()


# adapters ------------------------------------------------------------------


def expr_function(node: Node, name: str = "expr"):
    """A :class:`RealFn` for an expression in ``x``."""
    from .core import RealFn

    exact = needs_exact_tags(node)

    def ev(t: Tag) -> float:
        return node.eval_float(x=t)

    def vec(xs):
        out = node.eval_array(x=xs)
        return np.broadcast_to(np.asarray(out, dtype=float), xs.shape)

    return RealFn(ev, name, vectorized=None if exact else vec, exact_tags=exact)


def expr_gauge(node: Node, eps=None, name: str = "expr"):
    """A gauge whose radius at ``t`` is the expression's value at ``x = t``.

    Exact values are rounded down to rationals; float values are shrunk by a
    relative 1e-12 before conversion so the radius stays a lower bound.
    """
    from .core import ConstantGauge, FunctionGauge
    from .exact import round_down

    env = {} if eps is None else {"eps": Fraction(eps)}
    if "x" not in node.names():
        v = node.value(**env)
        r = round_down(v) if isinstance(v, Tag) else Fraction(v * (1 - 1e-12))
        return ConstantGauge(r)

    def radius(t: Tag):
        v = node.value(x=t, **env)
        if isinstance(v, Tag):
            return v
        return Fraction(v * (1 - 1e-12))

    return FunctionGauge(radius, name)
