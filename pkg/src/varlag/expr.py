"""Expression trees over (s, u, p, q) and their evaluation.

Nodes are immutable and may be shared between trees; evaluation memoizes on
node identity so factored subexpressions are computed once.  The same tree
evaluates over plain numbers, numpy arrays, TaylorScalar, and DualDirection
bindings, which is how values, total derivatives, and partial derivatives
are all obtained from a single definition.
"""

from __future__ import annotations

import math
import operator

from .errors import DomainError, UnboundVariable
from .taylor import (
    DualDirection,
    TaylorScalar,
    fatan,
    fatan2,
    fcos,
    fcosh,
    fexp,
    flog,
    fsin,
    fsinh,
    fsqrt,
    ftan,
    powi,
)


class Node:
    __slots__ = ()


class Num(Node):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = float(value)

    def __repr__(self):
        return f"Num({self.value})"


class Const(Node):
    """Named constant (currently only pi)."""

    __slots__ = ("name", "value")

    def __init__(self, name, value):
        self.name = name
        self.value = float(value)


class Var(Node):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"Var({self.name})"


class Neg(Node):
    __slots__ = ("child",)

    def __init__(self, child):
        self.child = child


class BinOp(Node):
    __slots__ = ("op", "left", "right")

    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right


class Pow(Node):
    """Integer power; non-integer exponents are rewritten at parse time."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent: int):
        self.base = base
        self.exponent = int(exponent)


class Call(Node):
    __slots__ = ("fn", "args")

    def __init__(self, fn, args):
        self.fn = fn
        self.args = tuple(args)


PI = Const("pi", math.pi)

FUNCTIONS = {
    "sin": (fsin, 1),
    "cos": (fcos, 1),
    "tan": (ftan, 1),
    "sinh": (fsinh, 1),
    "cosh": (fcosh, 1),
    "sqrt": (fsqrt, 1),
    "exp": (fexp, 1),
    "log": (flog, 1),
    "atan": (fatan, 1),
    "atan2": (fatan2, 2),
}

_BINOPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def evaluate(node: Node, env: dict):
    """Evaluate ``node`` with variable bindings ``env`` (any common ring)."""
    cache: dict[int, object] = {}

    def rec(n):
        key = id(n)
        hit = cache.get(key)
        if hit is not None:
            return hit
        t = type(n)
        if t is Var:
            try:
                val = env[n.name]
            except KeyError:
                raise UnboundVariable(n.name) from None
        elif t is Num or t is Const:
            val = n.value
        elif t is BinOp:
            left = rec(n.left)
            right = rec(n.right)
            try:
                val = _BINOPS[n.op](left, right)
            except DomainError as e:
                if e.expr is None:
                    e.expr = pretty(n)
                raise
            except ZeroDivisionError:
                raise DomainError("division by zero", pretty(n)) from None
        elif t is Neg:
            val = -rec(n.child)
        elif t is Pow:
            base = rec(n.base)
            try:
                val = powi(base, n.exponent)
            except DomainError as e:
                if e.expr is None:
                    e.expr = pretty(n)
                raise
            except ZeroDivisionError:
                raise DomainError("zero base with negative exponent", pretty(n)) from None
        elif t is Call:
            fn = FUNCTIONS[n.fn][0]
            args = [rec(a) for a in n.args]
            try:
                val = fn(*args)
            except DomainError as e:
                if e.expr is None:
                    e.expr = pretty(n)
                raise
        else:
            raise TypeError(f"unknown node type {t!r}")
        cache[key] = val
        return val

    return rec(node)


def taylor_eval(node: Node, bindings: dict) -> TaylorScalar:
    """Evaluate an expression over TaylorScalar bindings.

    Coefficient j of the result equals (1/j!) d^j/ds^j of the expression
    along the bound values.  All bindings must share the same order.
    """
    orders = {v.order for v in bindings.values() if isinstance(v, TaylorScalar)}
    if len(orders) > 1:
        raise ValueError(f"bindings mix Taylor orders {sorted(orders)}")
    order = orders.pop() if orders else 2
    out = evaluate(node, bindings)
    if not isinstance(out, TaylorScalar):
        out = TaylorScalar.constant(out, order)
    return out


def partial(node: Node, bindings: dict, direction: str) -> TaylorScalar:
    """d(expr)/d(direction) at the bindings, itself a TaylorScalar in s."""
    if direction not in bindings:
        raise UnboundVariable(direction)
    base = bindings[direction]
    if isinstance(base, TaylorScalar):
        one = TaylorScalar.constant(base.coeffs[0] * 0.0 + 1.0, base.order)
        order = base.order
    else:
        one = 1.0
        order = 0
    env = dict(bindings)
    env[direction] = DualDirection(base, one)
    out = evaluate(node, env)
    if isinstance(out, DualDirection):
        out = out.perturbation
    else:
        # expression independent of the direction
        out = base * 0.0
    if not isinstance(out, TaylorScalar):
        out = TaylorScalar.constant(out, order)
    return out


def free_variables(node: Node) -> set[str]:
    seen: set[int] = set()
    out: set[str] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        t = type(n)
        if t is Var:
            out.add(n.name)
        elif t is BinOp:
            stack.append(n.left)
            stack.append(n.right)
        elif t is Neg:
            stack.append(n.child)
        elif t is Pow:
            stack.append(n.base)
        elif t is Call:
            stack.extend(n.args)
    return out


# -- pretty printing ----------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def pretty(node: Node) -> str:
    text, _ = _pretty(node)
    return text


def _pretty(n: Node):
    t = type(n)
    if t is Num:
        if n.value < 0:
            return f"-{_fmt_number(-n.value)}", _PREC_NEG
        return _fmt_number(n.value), _PREC_ATOM
    if t is Const:
        return n.name, _PREC_ATOM
    if t is Var:
        return n.name, _PREC_ATOM
    if t is Neg:
        inner, prec = _pretty(n.child)
        if prec < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}", _PREC_NEG
    if t is Pow:
        base, prec = _pretty(n.base)
        if prec <= _PREC_POW:
            base = f"({base})"
        return f"{base}^{n.exponent}", _PREC_POW
    if t is Call:
        args = ", ".join(pretty(a) for a in n.args)
        return f"{n.fn}({args})", _PREC_ATOM
    if t is BinOp:
        lt, lp = _pretty(n.left)
        rt, rp = _pretty(n.right)
        if n.op in "+-":
            if lp < _PREC_ADD:
                lt = f"({lt})"
            if rp <= _PREC_ADD:
                rt = f"({rt})"
            return f"{lt} {n.op} {rt}", _PREC_ADD
        if lp < _PREC_MUL:
            lt = f"({lt})"
        if rp <= _PREC_MUL:
            rt = f"({rt})"
        return f"{lt}{n.op}{rt}", _PREC_MUL
    raise TypeError(f"unknown node type {t!r}")


# -- AST construction helpers (used by the catalog and the builders) ----------


def num(x) -> Node:
    return Num(x)


def var(name: str) -> Node:
    return Var(name)


def add(*terms: Node) -> Node:
    out = terms[0]
    for t in terms[1:]:
        out = BinOp("+", out, t)
    return out


def sub(a: Node, b: Node) -> Node:
    return BinOp("-", a, b)


def mul(*factors: Node) -> Node:
    out = factors[0]
    for f in factors[1:]:
        out = BinOp("*", out, f)
    return out


def div(a: Node, b: Node) -> Node:
    return BinOp("/", a, b)


def pown(a: Node, k: int) -> Node:
    return Pow(a, k)


def call(fn: str, *args: Node) -> Node:
    return Call(fn, args)
