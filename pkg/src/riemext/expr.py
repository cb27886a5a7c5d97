"""Scalar expressions in chart coordinates and second-order forward-mode jets.

Expressions are parsed from strings such as ``"2*x1^2 - sin(x2)"`` into an
immutable tree.  Evaluating a tree on :class:`Jet` seeds propagates the value,
gradient and Hessian exactly (up to rounding), which is how all derivatives of
base-manifold data are obtained.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "Jet",
    "Expression",
    "Const",
    "Coord",
    "Unary",
    "Binary",
    "Pow",
    "ExpressionError",
    "ExprSyntaxError",
    "UnknownSymbolError",
    "CoordinateRangeError",
    "DomainError",
    "parse",
    "evaluate",
    "eval_jet2",
    "eval_jet",
    "seed_jets",
]


class ExpressionError(ValueError):
    """Base class for all expression errors."""


class ExprSyntaxError(ExpressionError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


class UnknownSymbolError(ExprSyntaxError):
    pass


class CoordinateRangeError(ExprSyntaxError):
    pass


class DomainError(ExpressionError):
    """Raised when an expression is evaluated outside its domain."""

    def __init__(self, message: str, node: "Expression"):
        self.node = node
        super().__init__(f"{message} in {node}")


# --------------------------------------------------------------------------
# Jets


class Jet:
    """Value, gradient and Hessian of a scalar w.r.t. ``m`` seed variables."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, m: int) -> "Jet":
        return cls(value, np.zeros(m), np.zeros((m, m)))

    @classmethod
    def variable(cls, value: float, index: int, m: int) -> "Jet":
        g = np.zeros(m)
        g[index] = 1.0
        return cls(value, g, np.zeros((m, m)))

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet({self.value!r}, grad={self.grad.tolist()!r})"

    def chain(self, g0: float, g1: float, g2: float) -> "Jet":
        """Compose with a scalar function whose derivatives at ``value`` are g0, g1, g2."""
        return Jet(g0, g1 * self.grad, g1 * self.hess + g2 * np.outer(self.grad, self.grad))

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return Jet(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            cross = np.outer(self.grad, other.grad)
            return Jet(
                self.value * other.value,
                self.value * other.grad + other.value * self.grad,
                self.value * other.hess + other.value * self.hess + (cross + cross.T),
            )
        return Jet(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self.chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.value / other, self.grad / other, self.hess / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p: float) -> "Jet":
        return self.chain(*_pow_derivs(self.value, float(p)))

    def sqrt(self) -> "Jet":
        r = math.sqrt(self.value)
        return self.chain(r, 0.5 / r, -0.25 / (r * self.value))


def _pow_derivs(u: float, p: float) -> tuple[float, float, float]:
    if p == 0.0:
        return 1.0, 0.0, 0.0
    g0 = u**p
    g1 = p * u ** (p - 1) if p != 1.0 else 1.0
    g2 = p * (p - 1) * u ** (p - 2) if p not in (1.0, 2.0) else (2.0 if p == 2.0 else 0.0)
    return g0, g1, g2


Number = Union[float, Jet]


# --------------------------------------------------------------------------
# Expression tree


class Expression:
    """Immutable expression node."""

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_string()!r})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError

    def to_string(self) -> str:
        raise NotImplementedError

    def max_index(self) -> int:
        """Largest coordinate index (1-based) used, 0 for none."""
        raise NotImplementedError

    def ev(self, env: Sequence[Number]) -> Number:
        raise NotImplementedError

    def is_constant(self) -> bool:
        return self.max_index() == 0


class Const(Expression):
    def __init__(self, value: float):
        self.value = float(value)

    def _key(self):
        return self.value

    def to_string(self) -> str:
        s = repr(self.value)
        return f"({s})" if self.value < 0 or s.startswith("-") else s

    def max_index(self) -> int:
        return 0

    def ev(self, env):
        return self.value


class Coord(Expression):
    def __init__(self, index: int):
        self.index = int(index)  # 1-based

    def _key(self):
        return self.index

    def to_string(self) -> str:
        return f"x{self.index}"

    def max_index(self) -> int:
        return self.index

    def ev(self, env):
        return env[self.index - 1]


def _check_log(u, node):
    if _val(u) <= 0.0:
        raise DomainError(f"log of nonpositive value {_val(u)!r}", node)


def _check_sqrt(u, node):
    v = _val(u)
    if v < 0.0 or (v == 0.0 and isinstance(u, Jet)):
        raise DomainError(f"sqrt of value {v!r}", node)


def _val(u: Number) -> float:
    return u.value if isinstance(u, Jet) else u


_UNARY: dict[str, tuple[Callable, Callable, Callable | None]] = {
    # name: (float fn, jet derivative triple fn, domain check)
    "sin": (math.sin, lambda v: (math.sin(v), math.cos(v), -math.sin(v)), None),
    "cos": (math.cos, lambda v: (math.cos(v), -math.sin(v), -math.cos(v)), None),
    "exp": (math.exp, lambda v: (math.exp(v),) * 3, None),
    "log": (math.log, lambda v: (math.log(v), 1.0 / v, -1.0 / v**2), _check_log),
    "sqrt": (math.sqrt, lambda v: (math.sqrt(v), 0.5 / math.sqrt(v), -0.25 / v**1.5), _check_sqrt),
}


class Unary(Expression):
    def __init__(self, op: str, arg: Expression):
        if op != "neg" and op not in _UNARY:
            raise ValueError(f"unknown unary operator {op!r}")
        self.op = op
        self.arg = arg

    def _key(self):
        return (self.op, self.arg)

    def to_string(self) -> str:
        if self.op == "neg":
            return f"(-{self.arg.to_string()})"
        return f"{self.op}({self.arg.to_string()})"

    def max_index(self) -> int:
        return self.arg.max_index()

    def ev(self, env):
        u = self.arg.ev(env)
        if self.op == "neg":
            return -u
        fn, derivs, check = _UNARY[self.op]
        if check is not None:
            check(u, self)
        if isinstance(u, Jet):
            return u.chain(*derivs(u.value))
        try:
            return fn(u)
        except (ValueError, OverflowError) as exc:
            raise DomainError(str(exc), self) from None


class Binary(Expression):
    _SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/"}

    def __init__(self, op: str, left: Expression, right: Expression):
        if op not in self._SYMBOLS:
            raise ValueError(f"unknown binary operator {op!r}")
        self.op = op
        self.left = left
        self.right = right

    def _key(self):
        return (self.op, self.left, self.right)

    def to_string(self) -> str:
        return f"({self.left.to_string()} {self._SYMBOLS[self.op]} {self.right.to_string()})"

    def max_index(self) -> int:
        return max(self.left.max_index(), self.right.max_index())

    def ev(self, env):
        u = self.left.ev(env)
        w = self.right.ev(env)
        if self.op == "add":
            return u + w
        if self.op == "sub":
            return u - w
        if self.op == "mul":
            return u * w
        if _val(w) == 0.0:
            raise DomainError("division by zero", self)
        return u / w


class Pow(Expression):
    """Power with a constant real exponent."""

    def __init__(self, base: Expression, exponent: float):
        self.base = base
        self.exponent = float(exponent)

    def _key(self):
        return (self.base, self.exponent)

    def to_string(self) -> str:
        return f"({self.base.to_string()} ^ {Const(self.exponent).to_string()})"

    def max_index(self) -> int:
        return self.base.max_index()

    def ev(self, env):
        u = self.base.ev(env)
        v = _val(u)
        p = self.exponent
        integral = p == int(p)
        if v < 0.0 and not integral:
            raise DomainError(f"negative base {v!r} with non-integer exponent", self)
        if v == 0.0:
            if p < 0:
                raise DomainError("zero base with negative exponent", self)
            if isinstance(u, Jet) and not integral and p < 2:
                raise DomainError("power not twice differentiable at zero", self)
        if isinstance(u, Jet):
            return u**p
        return v**p


# --------------------------------------------------------------------------
# Parser: precedence ^ > unary minus > * / > + -


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)
_COORD = re.compile(r"x([1-9][0-9]*)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", self.text, pos)

    def parse(self) -> Expression:
        e = self.additive()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", self.text, pos)
        return e

    def additive(self) -> Expression:
        left = self.multiplicative()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = Binary("add" if op == "+" else "sub", left, self.multiplicative())
        return left

    def multiplicative(self) -> Expression:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = Binary("mul" if op == "*" else "div", left, self.unary())
        return left

    def unary(self) -> Expression:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            arg = self.unary()
            if val == "+":
                return arg
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Unary("neg", arg)
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            epos = self.peek()[2]
            exponent = self.unary()  # right associative, allows x^-1
            if not exponent.is_constant():
                raise ExprSyntaxError("exponent must be constant", self.text, epos)
            return Pow(base, float(exponent.ev(())))
        return base

    def atom(self) -> Expression:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            m = _COORD.match(val)
            if m:
                k = int(m.group(1))
                if k > self.n:
                    raise CoordinateRangeError(
                        f"coordinate {val} out of range 1..{self.n}", self.text, pos
                    )
                return Coord(k)
            if val in _UNARY:
                self.expect("(")
                arg = self.additive()
                self.expect(")")
                return Unary(val, arg)
            raise UnknownSymbolError(f"unknown symbol {val!r}", self.text, pos)
        if kind == "op" and val == "(":
            e = self.additive()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", self.text, pos)


def parse(text: str, n: int) -> Expression:
    """Parse ``text`` as a scalar expression in coordinates ``x1..xn``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return _Parser(text, n).parse()


# --------------------------------------------------------------------------
# Evaluation


def evaluate(e: Expression, x: Sequence[float]) -> float:
    """Plain float evaluation."""
    _check_dim(e, x)
    try:
        return float(e.ev([float(v) for v in x]))
    except ZeroDivisionError:
        raise DomainError("division by zero", e) from None


def seed_jets(x: Sequence[float], m: int | None = None, offset: int = 0) -> list[Jet]:
    """Independent-variable jets for ``x``; variable ``i`` is seeded at slot ``offset + i``."""
    m = len(x) if m is None else m
    return [Jet.variable(float(v), offset + i, m) for i, v in enumerate(x)]


def eval_jet(e: Expression, seeds: Sequence[Jet]) -> Jet:
    """Evaluate ``e`` with coordinate ``k`` replaced by ``seeds[k-1]``."""
    _check_dim(e, seeds)
    m = seeds[0].dim
    out = e.ev(seeds)
    if not isinstance(out, Jet):
        out = Jet.constant(out, m)
    return out


def eval_jet2(e: Expression, x: Sequence[float]) -> Jet:
    """Value, gradient and Hessian of ``e`` at ``x``."""
    return eval_jet(e, seed_jets(x))


def _check_dim(e: Expression, x: Sequence) -> None:
    if e.max_index() > len(x):
        raise ValueError(f"expression uses x{e.max_index()} but point has {len(x)} coordinates")
