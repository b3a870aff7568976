"""Text grammar and expression model for Lagrangians L(s, u, p, q).

Grammar: infix + - * / ^ (right-assoc, precedence ^ > unary- > */ > +-),
parentheses, calls sin, cos, tan, sinh, cosh, sqrt, exp, log, atan, atan2;
identifiers s, u<k>, p<k>, q<k>, pi, and declared parameter names.
Parameters are bound at parse time, so evaluation needs no symbol table.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from . import expr as E
from .errors import DomainError, IndexOutOfRange, ParseError, UnknownIdentifier
from .expr import BinOp, Call, Neg, Num, Pow, Var, evaluate, free_variables, pretty


@dataclass(frozen=True)
class ParseDiagnostic:
    message: str
    offset: int
    expected: tuple = ()


@dataclass(frozen=True)
class LagrangianDef:
    """A Lagrangian as an expression tree over {s, u1..un, p1..pn, q1..qn}."""

    name: str
    n: int
    order: int
    body: object
    parameters: dict = field(default_factory=dict)

    def eval(self, s, u, p, q=None):
        """Numeric value of the density at a point (or arrays of points)."""
        env = {"s": s}
        for i in range(self.n):
            env[f"u{i + 1}"] = u[i]
            env[f"p{i + 1}"] = p[i]
        if self.order == 2:
            if q is None:
                raise ValueError(f"{self.name}: second-order density needs q")
            for i in range(self.n):
                env[f"q{i + 1}"] = q[i]
        return evaluate(self.body, env)

    def eval_jet(self, jet):
        q = jet.d2u if self.order == 2 else None
        return self.eval(jet.s, jet.u, jet.du, q)

    def source(self) -> str:
        return pretty(self.body)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[+\-*/^(),]))"
)

_VAR_RE = re.compile(r"^([upq])([0-9]+)$")


@dataclass
class _Token:
    kind: str  # num | ident | op | end
    text: str
    offset: int


def _diag(message, offset, expected=()):
    return ParseError(ParseDiagnostic(message, offset, tuple(expected)))


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            at = len(source) - len(stripped)
            raise _diag(f"unexpected character {source[at]!r}", at)
        if m.lastgroup == "num":
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens, n, params):
        self.tokens = tokens
        self.pos = 0
        self.n = n
        self.params = params

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text):
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            return self.advance()
        raise _diag(f"expected {text!r}", tok.offset, (text,))

    def parse_expr(self):
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                node = BinOp(tok.text, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                node = BinOp(tok.text, node, self.parse_unary())
            else:
                return node

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            at = self.peek().offset
            exponent = self.parse_unary()  # right-assoc; binds tighter than unary-
            return _make_power(base, exponent, at)
        return base

    def parse_atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if tok.kind == "ident":
            name = tok.text
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.parse_call(name, tok.offset)
            return self.resolve(name, tok.offset)
        raise _diag(
            f"expected a value, found {tok.text!r}" if tok.text else "unexpected end of input",
            tok.offset,
            ("number", "identifier", "("),
        )

    def parse_call(self, name, offset):
        if name not in E.FUNCTIONS:
            raise UnknownIdentifier(
                ParseDiagnostic(f"unknown function {name!r}", offset)
            )
        arity = E.FUNCTIONS[name][1]
        self.expect_op("(")
        args = [self.parse_expr()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.parse_expr())
        self.expect_op(")")
        if len(args) != arity:
            raise _diag(
                f"{name} takes {arity} argument(s), got {len(args)}", offset
            )
        return Call(name, args)

    def resolve(self, name, offset):
        if name == "s":
            return Var("s")
        if name == "pi":
            return E.PI
        m = _VAR_RE.match(name)
        if m:
            index = int(m.group(2))
            if not 1 <= index <= self.n:
                raise IndexOutOfRange(
                    ParseDiagnostic(
                        f"variable {name!r} out of range for n={self.n}", offset
                    )
                )
            return Var(name)
        if name in self.params:
            return Num(self.params[name])
        raise UnknownIdentifier(
            ParseDiagnostic(f"unknown identifier {name!r}", offset)
        )


def _make_power(base, exponent, offset):
    sign = 1
    node = exponent
    while isinstance(node, Neg):
        sign = -sign
        node = node.child
    if isinstance(node, Num) and float(node.value).is_integer():
        return Pow(base, sign * int(node.value))
    # non-integer exponent: rewrite as exp(b*log(a))
    exp_node = Neg(node) if sign < 0 else node
    return Call("exp", (BinOp("*", exp_node, Call("log", (base,))),))


def parse_expression(source: str, n: int, params: dict | None = None):
    """Parse one expression over {s, u<k>, p<k>, q<k>, pi, params}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    parser = _Parser(_tokenize(source), n, dict(params or {}))
    node = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise _diag(f"unexpected trailing input {tail.text!r}", tail.offset)
    return node


def infer_order(body) -> int:
    return 2 if any(v.startswith("q") for v in free_variables(body)) else 1


def parse(source: str, n: int, params: dict | None = None, name: str = "anonymous") -> LagrangianDef:
    """Parse a Lagrangian body; order is inferred from q-variable usage."""
    body = parse_expression(source, n, params)
    return LagrangianDef(
        name=name, n=n, order=infer_order(body), body=body,
        parameters=dict(params or {}),
    )


# -- .lag file format ----------------------------------------------------------

_HEADER_KEYS = {"name", "n", "order"}


def parse_lag(text: str, path: str = "<string>") -> LagrangianDef:
    """Read the .lag format: header lines, `param k = v` lines, then `L = expr`."""
    name = None
    n = None
    declared_order = None
    params: dict[str, float] = {}
    body_src = None
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.split("#", 1)[0].strip()
        if not line:
            offset += len(raw)
            continue
        if body_src is not None:
            raise _diag("content after the L = line", offset)
        if line.startswith("L"):
            rest = line[1:].lstrip()
            if not rest.startswith("="):
                raise _diag("expected '=' after L", offset)
            body_src = rest[1:].strip()
        elif line.startswith("param "):
            m = re.match(r"^param\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(\S+)$", line)
            if m is None:
                raise _diag("malformed param line", offset)
            try:
                params[m.group(1)] = float(m.group(2))
            except ValueError:
                raise _diag(f"bad param value {m.group(2)!r}", offset) from None
        else:
            key, sep, value = line.partition(":")
            key = key.strip()
            if not sep or key not in _HEADER_KEYS:
                raise _diag(f"unknown header key {key!r}", offset)
            value = value.strip()
            if key == "name":
                name = value
            elif key == "n":
                n = int(value)
            else:
                declared_order = int(value)
        offset += len(raw)
    if n is None:
        raise _diag("missing 'n:' header", 0)
    if body_src is None:
        raise _diag("missing 'L =' line", 0)
    ldef = parse(body_src, n, params, name=name or path)
    if declared_order is not None and declared_order != ldef.order:
        raise _diag(
            f"declared order {declared_order} but body has order {ldef.order}", 0
        )
    return ldef


def load_lag(path) -> LagrangianDef:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lag(fh.read(), path=str(path))


def format_lag(ldef: LagrangianDef) -> str:
    lines = [f"name: {ldef.name}", f"n: {ldef.n}", f"order: {ldef.order}"]
    for key in sorted(ldef.parameters):
        lines.append(f"param {key} = {ldef.parameters[key]!r}")
    lines.append(f"L = {ldef.source()}")
    return "\n".join(lines) + "\n"
