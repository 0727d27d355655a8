"""A small expression language for Finsler fundamental functions.

Grammar (statements separated by newlines or ``;``)::

    program   := { name "=" expr SEP } expr
    expr      := term { ("+" | "-") term }
    term      := unary { ("*" | "/") unary }
    unary     := ("-" | "+") unary | power
    power     := atom [ "^" unary ]
    atom      := NUMBER | name | name "(" [expr {"," expr}] ")" | "(" expr ")"

Names are ``x`` and ``y`` (whole vectors), ``x1 .. xn`` / ``y1 .. yn``
(1-based components), metric parameters (scalars or constant vectors) and
names bound by earlier assignments.  Functions: ``sqrt exp log`` (scalar),
``dot(u, v)``, ``norm2(u)`` and ``norm(u)``.

Evaluation is generic over the scalar type: the same tree runs on floats
and on :class:`~finslercurv.jets.Jet` values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from . import jets
from .errors import ArityError, DslError, DslSyntaxError, UnknownIdentifier


# -- AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Program:
    assignments: tuple  # of (name, expr)
    result: object


Node = Union[Num, Name, Call, BinOp, Neg]

FUNCTIONS = {"sqrt": 1, "exp": 1, "log": 1, "dot": 2, "norm2": 1, "norm": 1}
_VECTOR_ARGS = {"dot": ("v", "v"), "norm2": ("v",), "norm": ("v",)}


# -- tokenizer -----------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),=;])"
    r"|(?P<nl>\n)"
    r"|(?P<ws>[ \t\r]+)"
    r"|(?P<comment>\#[^\n]*)"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            toks.append(_Tok("sep", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "op" and m.group() == ";":
            toks.append(_Tok("sep", ";", line, col))
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, len(text) - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return DslSyntaxError(f"{msg}, found {found}", tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind not in ("op",):
            raise self.error(f"expected {text!r}")
        return self.next()

    def skip_seps(self):
        while self.tok.kind == "sep":
            self.next()

    def program(self) -> Program:
        assigns = []
        self.skip_seps()
        while True:
            t0 = self.tok
            if t0.kind == "name" and self.toks[self.i + 1].text == "=":
                self.next()
                self.next()
                if t0.text in FUNCTIONS:
                    raise DslSyntaxError(f"cannot assign to function name {t0.text!r}", t0.line, t0.col)
                assigns.append((t0.text, self.expr()))
                if self.tok.kind != "sep":
                    raise self.error("expected end of statement")
                self.skip_seps()
                continue
            result = self.expr()
            self.skip_seps()
            if self.tok.kind != "eof":
                raise self.error("expected end of input")
            return Program(tuple(assigns), result)

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.next().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.next()
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.next()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.next()
            return Num(float(t.text))
        if t.kind == "name":
            self.next()
            if self.tok.kind == "op" and self.tok.text == "(":
                self.next()
                args = []
                if not (self.tok.kind == "op" and self.tok.text == ")"):
                    args.append(self.expr())
                    while self.tok.kind == "op" and self.tok.text == ",":
                        self.next()
                        args.append(self.expr())
                self.expect(")")
                if t.text not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {t.text!r}", t.line, t.col)
                if len(args) != FUNCTIONS[t.text]:
                    raise ArityError(
                        f"{t.text}() takes {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                        t.line, t.col,
                    )
                return Call(t.text, tuple(args), t.line, t.col)
            return Name(t.text, t.line, t.col)
        if t.kind == "op" and t.text == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        raise self.error("expected an expression")


def parse(text: str, n: int | None = None, params: Mapping | None = None) -> Program:
    """Parse metric source text; with ``n`` and ``params`` also resolve names."""
    prog = _Parser(text).program()
    if n is not None:
        check(prog, n, params or {})
    return prog


# -- name resolution and shape checking ----------------------------------

_COMPONENT = re.compile(r"^([xy])(\d+)$")


def _kind_of_param(v):
    return "v" if isinstance(v, (list, tuple)) else "s"


def check(prog: Program, n: int, params: Mapping) -> str:
    """Resolve every name and check scalar/vector consistency; return result kind."""
    env = {"x": "v", "y": "v"}
    for name, v in params.items():
        if name in env or _COMPONENT.match(name):
            raise DslError(f"parameter name {name!r} shadows a coordinate")
        if _kind_of_param(v) == "v" and len(v) != n:
            raise DslError(f"vector parameter {name!r} has length {len(v)}, expected {n}")
        env[name] = _kind_of_param(v)

    def kind(node):
        if isinstance(node, Num):
            return "s"
        if isinstance(node, Name):
            m = _COMPONENT.match(node.name)
            if m and node.name not in env:
                idx = int(m.group(2))
                if not 1 <= idx <= n:
                    raise UnknownIdentifier(
                        f"coordinate {node.name!r} out of range for dimension {n}", node.line, node.col
                    )
                return "s"
            if node.name not in env:
                raise UnknownIdentifier(f"unknown identifier {node.name!r}", node.line, node.col)
            return env[node.name]
        if isinstance(node, Neg):
            return kind(node.operand)
        if isinstance(node, Call):
            kinds = [kind(a) for a in node.args]
            want = _VECTOR_ARGS.get(node.func, ("s",) * len(kinds))
            if tuple(kinds) != want:
                raise DslError(f"{node.func}() got arguments of kinds {kinds}", node.line, node.col)
            return "s"
        kl, kr = kind(node.left), kind(node.right)
        if node.op in "+-":
            if kl != kr:
                raise DslError(f"cannot combine scalar and vector with {node.op!r}")
            return kl
        if node.op == "*":
            if kl == kr == "v":
                raise DslError("vector * vector is ambiguous; use dot()")
            return "v" if "v" in (kl, kr) else "s"
        if node.op == "/":
            if kr == "v":
                raise DslError("division by a vector")
            return kl
        if kl == "v" or kr == "v":
            raise DslError("'^' needs scalar operands")
        return "s"

    for name, expr in prog.assignments:
        env[name] = kind(expr)
    result = kind(prog.result)
    if result != "s":
        raise DslError("metric expression must be scalar")
    return result


# -- evaluation ----------------------------------------------------------

def _dot(u, v):
    s = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        s = s + a * b
    return s


def _binop(op, a, b):
    av, bv = isinstance(a, list), isinstance(b, list)
    if op == "+":
        return [p + q for p, q in zip(a, b)] if av else a + b
    if op == "-":
        return [p - q for p, q in zip(a, b)] if av else a - b
    if op == "*":
        if av:
            return [p * b for p in a]
        if bv:
            return [a * q for q in b]
        return a * b
    if op == "/":
        return [p / b for p in a] if av else a / b
    if isinstance(b, jets.Jet):
        return jets.exp(jets.log(a) * b)
    return jets.power(a, float(b))


def evaluate(prog: Program, x, y, params: Mapping):
    """Evaluate ``prog`` at coordinates ``x``, ``y`` (sequences of floats or jets)."""
    x, y = list(x), list(y)
    env = {"x": x, "y": y}
    for k, v in params.items():
        env[k] = [float(c) for c in v] if isinstance(v, (list, tuple)) else float(v)

    def ev(node):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            if node.name in env:
                return env[node.name]
            m = _COMPONENT.match(node.name)
            return (x if m.group(1) == "x" else y)[int(m.group(2)) - 1]
        if isinstance(node, Neg):
            v = ev(node.operand)
            return [-c for c in v] if isinstance(v, list) else -v
        if isinstance(node, Call):
            args = [ev(a) for a in node.args]
            f = node.func
            if f == "dot":
                return _dot(*args)
            if f == "norm2":
                return _dot(args[0], args[0])
            if f == "norm":
                return jets.sqrt(_dot(args[0], args[0]))
            return getattr(jets, f)(args[0])
        return _binop(node.op, ev(node.left), ev(node.right))

    for name, expr in prog.assignments:
        env[name] = ev(expr)
    return ev(prog.result)


# -- canonical serializer ------------------------------------------------

def _fmt(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_fmt(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_fmt(a) for a in node.args)})"
    return f"({_fmt(node.left)} {node.op} {_fmt(node.right)})"


def unparse(prog: Program) -> str:
    lines = [f"{name} = {_fmt(expr)}" for name, expr in prog.assignments]
    lines.append(_fmt(prog.result))
    return "\n".join(lines)


def strip_positions(node):
    """Copy of an AST with source positions zeroed (for structural comparison)."""
    if isinstance(node, Program):
        return Program(
            tuple((n, strip_positions(e)) for n, e in node.assignments), strip_positions(node.result)
        )
    if isinstance(node, Name):
        return Name(node.name)
    if isinstance(node, Call):
        return Call(node.func, tuple(strip_positions(a) for a in node.args))
    if isinstance(node, BinOp):
        return BinOp(node.op, strip_positions(node.left), strip_positions(node.right))
    if isinstance(node, Neg):
        return Neg(strip_positions(node.operand))
    return node
