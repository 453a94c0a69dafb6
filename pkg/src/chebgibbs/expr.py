"""Small expression language for IFS branch maps and potential weights.

Grammar (conventional precedence, loosest to tightest)::

    additive       := multiplicative (('+' | '-') multiplicative)*
    multiplicative := unary (('*' | '/') unary)*
    unary          := '-' unary | power
    power          := atom ('^' unary)?          # right-associative
    atom           := NUMBER | 'pi' | 'e' | 'x'
                    | FUNC '(' additive ')' | '(' additive ')'

Known functions: exp, log, sin, cos, sqrt, abs, atan, and sign (the latter
appears in derivatives of abs).  The only variable is ``x``.

ASTs are immutable after parsing and safe to share across threads.
Evaluation accepts floats, complex numbers, or numpy arrays; real
evaluation raises :class:`DomainError` instead of returning NaN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExprError",
    "ParseError",
    "UnknownIdentifierError",
    "DomainError",
    "Node",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Func",
    "parse",
    "to_source",
    "evaluate",
    "differentiate",
    "as_callable",
]


class ExprError(Exception):
    """Base class for expression-language errors."""


class ParseError(ExprError):
    """Syntax error; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """An identifier that is neither ``x``, a constant, nor a known function."""


class DomainError(ExprError):
    """Evaluation left the real domain (log of non-positive, 0^negative, ...)."""


# ---------------------------------------------------------------------------
# AST nodes


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


_CONSTANTS = {"pi": math.pi, "e": math.e}
_FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "abs", "atan", "sign")


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            if source[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {source[pos:].lstrip()[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.peek()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", off)
        return self.next()

    def parse(self) -> Node:
        node = self.additive()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"expected operator or end of input, found {text!r}", off)
        return node

    def additive(self) -> Node:
        node = self.multiplicative()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            node = BinOp(op, node, self.multiplicative())
        return node

    def multiplicative(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[1] == "-":
            self.next()
            operand = self.unary()
            # fold literal negation so printing "-0.5" round-trips structurally
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Neg(operand)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[1] == "^":
            self.next()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, off = self.next()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if text == "x":
                return Var()
            if text in _CONSTANTS:
                return Const(_CONSTANTS[text])
            if text in _FUNCTIONS:
                self.expect("(")
                arg = self.additive()
                self.expect(")")
                return Func(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", off)
        if text == "(":
            node = self.additive()
            self.expect(")")
            return node
        raise ParseError(f"expected number, identifier or '(', found {text or 'end of input'!r}", off)


def parse(source: str) -> Node:
    """Parse expression text into an AST.

    Raises :class:`ParseError` (with byte offset) on malformed input and
    :class:`UnknownIdentifierError` for names outside the grammar.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_ATOM = 5
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Const) and node.value < 0:
        return 3  # prints with a leading '-', binds like unary minus
    return _PREC_ATOM


def _paren(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def to_source(node: Node) -> str:
    """Render an AST back to parseable text; ``parse(to_source(t)) == t``."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return "-" + _paren(to_source(node.operand), _prec(node.operand) < 3)
    if isinstance(node, Func):
        return f"{node.name}({to_source(node.arg)})"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = _paren(
            to_source(node.left),
            _prec(node.left) < p or (node.op == "^" and _prec(node.left) == p),
        )
        right = _paren(
            to_source(node.right),
            _prec(node.right) < p or (node.op in ("+", "-", "*", "/") and _prec(node.right) == p),
        )
        sep = f" {node.op} " if node.op in ("+", "-") else node.op
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation


def _is_real(x) -> bool:
    return not np.iscomplexobj(x)


def _check(cond, message: str):
    ok = bool(np.all(cond))
    if not ok:
        raise DomainError(message)


def _pow_real(base, expo):
    b = np.asarray(base)
    e = np.asarray(expo)
    integral = np.equal(e, np.round(e))
    _check(integral | (b > 0), "x^y needs x > 0 for non-integer y")
    _check(~(integral & (e < 0) & (b == 0)), "0^negative is undefined")
    return np.power(b, e)


def evaluate(node: Node, x):
    """Evaluate ``node`` at ``x`` (float, complex, or numpy array).

    Real inputs get domain checking: log of non-positive, sqrt of negative,
    division by zero, 0^negative and sign(0) raise :class:`DomainError`
    rather than producing NaN/Inf.  Complex inputs use the principal
    branches without domain checks.
    """
    real = _is_real(x)
    if isinstance(node, Const):
        return node.value if np.isscalar(x) else np.full(np.shape(x), node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -evaluate(node.operand, x)
    if isinstance(node, BinOp):
        a = evaluate(node.left, x)
        b = evaluate(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if real:
                _check(np.asarray(b) != 0, "division by zero")
            return a / b
        if real:
            return _pow_real(a, b)
        return np.power(a, b)
    if isinstance(node, Func):
        a = evaluate(node.arg, x)
        if real:
            if node.name == "log":
                _check(np.asarray(a) > 0, "log of non-positive value")
            elif node.name == "sqrt":
                _check(np.asarray(a) >= 0, "sqrt of negative value")
            elif node.name == "sign":
                _check(np.asarray(a) != 0, "sign(0) is undefined")
                return np.sign(a)
        else:
            if node.name == "sign":
                return np.sign(np.real(a))
            if node.name in ("log", "sqrt"):
                a = np.asarray(a, dtype=complex)
        if node.name == "abs":
            return np.abs(a)
        if node.name == "atan":
            return np.arctan(a)
        return getattr(np, node.name)(a)
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Differentiation

_ZERO = Const(0.0)
_ONE = Const(1.0)


def _literal(node: Node) -> bool:
    if isinstance(node, Const):
        return True
    if isinstance(node, Neg):
        return _literal(node.operand)
    if isinstance(node, BinOp):
        return _literal(node.left) and _literal(node.right)
    if isinstance(node, Func):
        return _literal(node.arg)
    return False


def _fold(node: Node) -> Node:
    """Collapse literal-only subtrees to constants (left alone on domain errors)."""
    if _literal(node) and not isinstance(node, Const):
        try:
            return Const(float(evaluate(node, 0.0)))
        except DomainError:
            return node
    return node


def _is_const(node: Node, value: float) -> bool:
    return isinstance(node, Const) and node.value == value


def _add(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return _fold(BinOp("+", a, b))


def _sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return Neg(b) if not isinstance(b, Const) else Const(-b.value)
    return _fold(BinOp("-", a, b))


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return _fold(BinOp("*", a, b))


def _div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return _ZERO
    if _is_const(b, 1.0):
        return a
    return _fold(BinOp("/", a, b))


def differentiate(node: Node) -> Node:
    """Symbolic derivative with respect to ``x``.

    Only literal constant folding is applied; no further simplification is
    guaranteed.  ``abs`` differentiates to ``sign(.) * .'``, which raises a
    domain error when evaluated at the kink.
    """
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE
    if isinstance(node, Neg):
        d = differentiate(node.operand)
        return Const(-d.value) if isinstance(d, Const) else Neg(d)
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du, dv = differentiate(u), differentiate(v)
        if node.op == "+":
            return _add(du, dv)
        if node.op == "-":
            return _sub(du, dv)
        if node.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        if node.op == "/":
            return _div(_sub(_mul(du, v), _mul(u, dv)), _fold(BinOp("^", v, Const(2.0))))
        # power: constant exponent gets the power rule, else d(e^{v log u})
        if _literal(v):
            vm1 = _fold(BinOp("-", v, _ONE))
            return _mul(_mul(v, _fold(BinOp("^", u, vm1))), du)
        base_term = _mul(dv, Func("log", u))
        expo_term = _div(_mul(v, du), u)
        return _mul(_fold(BinOp("^", u, v)), _add(base_term, expo_term))
    if isinstance(node, Func):
        u = node.arg
        du = differentiate(u)
        name = node.name
        if name == "exp":
            outer = Func("exp", u)
        elif name == "log":
            return _div(du, u)
        elif name == "sin":
            outer = Func("cos", u)
        elif name == "cos":
            outer = Neg(Func("sin", u))
        elif name == "sqrt":
            return _div(du, _mul(Const(2.0), Func("sqrt", u)))
        elif name == "abs":
            outer = Func("sign", u)
        elif name == "atan":
            return _div(du, _add(_ONE, _fold(BinOp("^", u, Const(2.0)))))
        elif name == "sign":
            return _ZERO
        else:
            raise ExprError(f"cannot differentiate {name}")
        return _mul(_fold(outer), du)
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Compilation to fast numpy callables

_NP_FUNCS = {
    "exp": "np.exp",
    "log": "np.log",
    "sin": "np.sin",
    "cos": "np.cos",
    "sqrt": "np.sqrt",
    "abs": "np.abs",
    "atan": "np.arctan",
    "sign": "np.sign",
}


def _emit(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{_emit(node.operand)})"
    if isinstance(node, BinOp):
        op = "**" if node.op == "^" else node.op
        return f"({_emit(node.left)}{op}{_emit(node.right)})"
    if isinstance(node, Func):
        return f"{_NP_FUNCS[node.name]}({_emit(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def as_callable(node: Node):
    """Compile an AST to a vectorized numpy callable.

    The compiled function skips per-operation domain checks (use
    :func:`evaluate` for checked evaluation) and always returns an array
    matching the input's shape.
    """
    src = _emit(node)
    fn = eval(f"lambda x, np=np: {src}", {"np": np})  # noqa: S307 - generated from our own AST

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = fn(x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape) if np.ndim(out) != np.ndim(x) else out

    return wrapped
