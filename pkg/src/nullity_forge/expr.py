"""Arithmetic expression language for chart-level metric and vector-field definitions.

Expressions use coordinates ``x0 .. x{n-1}``, the operators ``+ - * / ^``,
unary minus and the functions ``sin cos exp sinh cosh tanh sqrt pow``::

    >>> ast = parse("exp(2*x0)*sin(x1)^2", 2)
    >>> evaluate(ast, (0.0, 1.0))  # doctest: +ELLIPSIS
    0.708...

Derivatives come from :class:`Jet2`, a second-order truncated Taylor element
in two coordinate directions, so first and mixed second partials are exact up
to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "sinh", "cosh", "tanh", "sqrt", "pow")


class ExprError(ValueError):
    """Base class for expression errors; ``offset`` is a UTF-8 byte offset."""

    def __init__(self, message: str, source: str = "", pos: int = 0):
        self.source = source
        self.offset = len(source[:pos].encode("utf-8"))
        super().__init__(f"{message} at byte {self.offset}")


class ExprSyntaxError(ExprError):
    pass


class UnknownFunctionError(ExprError):
    pass


class CoordinateIndexError(ExprError):
    pass


class ExprDomainError(ArithmeticError):
    """Raised when evaluation leaves a function's domain."""

    def __init__(self, message: str, subexpr: str):
        self.subexpr = subexpr
        super().__init__(f"{message} in '{subexpr}'")


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Node = Union[Const, Var, Neg, BinOp, Call]
ExprAst = Node


# --------------------------------------------------------------------------
# Parsing


class _Parser:
    def __init__(self, source: str, n: int):
        self.s = source
        self.n = n
        self.pos = 0

    def error(self, msg, pos=None):
        raise ExprSyntaxError(msg, self.s, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.s) and self.s[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.pos] if self.pos < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            self.error(f"expected '{ch}', found {found}")
        self.pos += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.s[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.s[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        negate = False
        if self.peek() == "-":
            self.pos += 1
            negate = True
        node = self.atom()
        if self.peek() == "^":
            self.pos += 1
            node = BinOp("^", node, self.atom())
        return Neg(node) if negate else node

    def atom(self) -> Node:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha():
            while self.pos < len(self.s) and (self.s[self.pos].isalnum() or self.s[self.pos] == "_"):
                self.pos += 1
            word = self.s[start:self.pos]
            if word[0] == "x" and word[1:].isdigit():
                index = int(word[1:])
                if index >= self.n:
                    raise CoordinateIndexError(
                        f"coordinate {word} out of range for dimension {self.n}", self.s, start)
                return Var(index)
            if word not in FUNCTIONS:
                raise UnknownFunctionError(f"unknown function '{word}'", self.s, start)
            self.expect("(")
            args = [self.expr()]
            if word == "pow":
                self.expect(",")
                args.append(self.expr())
            self.expect(")")
            return Call(word, tuple(args))
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")

    def number(self) -> Const:
        s, i = self.s, self.pos
        start = i
        while i < len(s) and s[i].isdigit():
            i += 1
        if i < len(s) and s[i] == ".":
            i += 1
            while i < len(s) and s[i].isdigit():
                i += 1
        if i < len(s) and s[i] in "eE":
            j = i + 1
            if j < len(s) and s[j] in "+-":
                j += 1
            if j < len(s) and s[j].isdigit():
                while j < len(s) and s[j].isdigit():
                    j += 1
                i = j
        text = s[start:i]
        if text == ".":
            self.error("malformed number", start)
        self.pos = i
        return Const(float(text))


def parse(source: str, n: int) -> Node:
    """Parse ``source`` into an AST whose coordinates are all below ``n``."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return _Parser(source, n).parse()


def to_source(node: Node) -> str:
    """Render an AST so that ``parse(to_source(a), n) == a``."""
    if isinstance(node, Const):
        if node.value < 0 or not math.isfinite(node.value):
            raise ValueError(f"constant {node.value} has no literal form")
        return repr(float(node.value))
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)}{node.op}{to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def max_coordinate(node: Node) -> int:
    """Largest coordinate index referenced, or -1 for constant expressions."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Neg):
        return max_coordinate(node.operand)
    if isinstance(node, BinOp):
        return max(max_coordinate(node.left), max_coordinate(node.right))
    if isinstance(node, Call):
        return max(max_coordinate(a) for a in node.args)
    return -1


# --------------------------------------------------------------------------
# Jets


@dataclass(frozen=True)
class Jet2:
    """Value, two directional first derivatives and their mixed second derivative."""

    value: float
    d_a: float = 0.0
    d_b: float = 0.0
    d_ab: float = 0.0

    @property
    def is_constant(self) -> bool:
        return self.d_a == 0.0 and self.d_b == 0.0 and self.d_ab == 0.0

    def chain(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Compose with a scalar function given f, f', f'' at ``self.value``."""
        return Jet2(f0, f1 * self.d_a, f1 * self.d_b,
                    f2 * self.d_a * self.d_b + f1 * self.d_ab)

    def __add__(self, o: "Jet2") -> "Jet2":
        return Jet2(self.value + o.value, self.d_a + o.d_a, self.d_b + o.d_b, self.d_ab + o.d_ab)

    def __sub__(self, o: "Jet2") -> "Jet2":
        return Jet2(self.value - o.value, self.d_a - o.d_a, self.d_b - o.d_b, self.d_ab - o.d_ab)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.d_a, -self.d_b, -self.d_ab)

    def __mul__(self, o: "Jet2") -> "Jet2":
        return Jet2(
            self.value * o.value,
            self.d_a * o.value + self.value * o.d_a,
            self.d_b * o.value + self.value * o.d_b,
            self.d_ab * o.value + self.d_a * o.d_b + self.d_b * o.d_a + self.value * o.d_ab,
        )

    def reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError
        return self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, o: "Jet2") -> "Jet2":
        return self * o.reciprocal()

    def __pow__(self, o: "Jet2") -> "Jet2":
        if o.is_constant:
            c, x = o.value, self.value
            if x < 0.0 and c != int(c):
                raise ValueError("negative base with fractional exponent")
            if c == 0.0:
                return Jet2(1.0)
            f1 = c * x ** (c - 1.0)
            f2 = 0.0 if c == 1.0 else c * (c - 1.0) * x ** (c - 2.0)
            return self.chain(x ** c, f1, f2)
        if self.value <= 0.0:
            raise ValueError("non-positive base with variable exponent")
        return (o * _unary("log", self)).exp()

    def exp(self) -> "Jet2":
        e = math.exp(self.value)
        return self.chain(e, e, e)


def _unary(name: str, u: Jet2) -> Jet2:
    x = u.value
    if name == "sin":
        s, c = math.sin(x), math.cos(x)
        return u.chain(s, c, -s)
    if name == "cos":
        s, c = math.sin(x), math.cos(x)
        return u.chain(c, -s, -c)
    if name == "exp":
        return u.exp()
    if name == "sinh":
        s, c = math.sinh(x), math.cosh(x)
        return u.chain(s, c, s)
    if name == "cosh":
        s, c = math.sinh(x), math.cosh(x)
        return u.chain(c, s, c)
    if name == "tanh":
        t = math.tanh(x)
        sech2 = 1.0 - t * t
        return u.chain(t, sech2, -2.0 * t * sech2)
    if name == "sqrt":
        if x <= 0.0:
            raise ValueError("sqrt of non-positive value")
        r = math.sqrt(x)
        return u.chain(r, 0.5 / r, -0.25 / (r * x))
    if name == "log":
        return u.chain(math.log(x), 1.0 / x, -1.0 / (x * x))
    raise KeyError(name)


def eval_jet(node: Node, point: Sequence[float], dir_a: int, dir_b: int) -> Jet2:
    """Evaluate ``node`` at ``point`` carrying derivatives along ``dir_a`` and ``dir_b``."""
    n = len(point)
    if not (0 <= dir_a < n and 0 <= dir_b < n):
        raise IndexError("direction index out of range")

    def walk(nd: Node) -> Jet2:
        if isinstance(nd, Const):
            return Jet2(float(nd.value))
        if isinstance(nd, Var):
            return Jet2(float(point[nd.index]), float(nd.index == dir_a), float(nd.index == dir_b))
        if isinstance(nd, Neg):
            return -walk(nd.operand)
        try:
            if isinstance(nd, BinOp):
                left, right = walk(nd.left), walk(nd.right)
                if nd.op == "+":
                    return left + right
                if nd.op == "-":
                    return left - right
                if nd.op == "*":
                    return left * right
                if nd.op == "/":
                    return left / right
                return left ** right
            args = [walk(a) for a in nd.args]
            if nd.name == "pow":
                return args[0] ** args[1]
            return _unary(nd.name, args[0])
        except ExprDomainError:
            raise
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise ExprDomainError(str(exc) or "division by zero", to_source(nd)) from None

    return walk(node)


def evaluate(node: Node, point: Sequence[float]) -> float:
    """Plain value of ``node`` at ``point``."""
    if len(point) == 0:
        return eval_jet(node, (0.0,), 0, 0).value
    return eval_jet(node, point, 0, 0).value


# --------------------------------------------------------------------------
# Postfix tapes for the compiled kernels

OP_CONST, OP_VAR, OP_NEG, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW = range(8)
OP_SIN, OP_COS, OP_EXP, OP_SINH, OP_COSH, OP_TANH, OP_SQRT = range(8, 15)

_BINARY = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}
_CALLS = {"sin": OP_SIN, "cos": OP_COS, "exp": OP_EXP, "sinh": OP_SINH,
          "cosh": OP_COSH, "tanh": OP_TANH, "sqrt": OP_SQRT, "pow": OP_POW}


@dataclass(frozen=True)
class Tape:
    """Postfix program: ``ops[i]`` with integer ``args[i]`` (constant slot or coordinate)."""

    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    nodes: tuple  # AST node that produced each instruction, for error messages
    depth: int

    def describe(self, index: int) -> str:
        return to_source(self.nodes[index])


def compile_tape(node: Node) -> Tape:
    ops, args, consts, nodes = [], [], [], []
    depth = [0, 0]

    def emit(op, arg, nd, delta):
        ops.append(op)
        args.append(arg)
        nodes.append(nd)
        depth[0] += delta
        depth[1] = max(depth[1], depth[0])

    def walk(nd):
        if isinstance(nd, Const):
            consts.append(float(nd.value))
            emit(OP_CONST, len(consts) - 1, nd, 1)
        elif isinstance(nd, Var):
            emit(OP_VAR, nd.index, nd, 1)
        elif isinstance(nd, Neg):
            walk(nd.operand)
            emit(OP_NEG, 0, nd, 0)
        elif isinstance(nd, BinOp):
            walk(nd.left)
            walk(nd.right)
            emit(_BINARY[nd.op], 0, nd, -1)
        else:
            for a in nd.args:
                walk(a)
            emit(_CALLS[nd.name], 0, nd, 1 - len(nd.args))

    walk(node)
    return Tape(np.asarray(ops, dtype=np.int32), np.asarray(args, dtype=np.int32),
                np.asarray(consts if consts else [0.0], dtype=np.float64),
                tuple(nodes), max(depth[1], 1))
