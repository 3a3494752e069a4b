"""One-variable symbolic expressions: parse, evaluate, differentiate, simplify.

This is the coefficient-function language for the whole package: warp
factors g(t), weights f(t), variation profiles lambda(r) and growth
derivatives V'(r) are all expressions in a single declared variable.

Grammar (standard precedence, ^ binds tighter than unary minus, which
binds tighter than * and /; + - * / associate left, ^ associates right)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # exponent must fold to a constant
    atom   := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

Exponents are restricted to constants so the grammar is closed under
differentiation.  Trees are immutable; evaluation accepts scalars or
numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import DomainError, WarpstabError

__all__ = [
    "Expr",
    "Constant",
    "Variable",
    "Negate",
    "BinaryOp",
    "Call",
    "ExprSyntaxError",
    "ExprDomainError",
    "FUNCTIONS",
    "parse",
    "evaluate",
    "differentiate",
    "simplify",
    "render",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "tanh", "sqrt")

_UFUNC = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
}


class ExprSyntaxError(WarpstabError):
    """Parse failure; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class ExprDomainError(DomainError):
    """Evaluation hit a domain error; names the offending subexpression."""

    def __init__(self, node: "Expr", message: str):
        self.node = node
        super().__init__(f"{message} in '{render(node)}'")


class Expr:
    """Base node.  Python operators build trees, so coefficient algebra
    (e.g. assembling Ricci expressions from g, g', g'') stays readable."""

    __slots__ = ()

    def __add__(self, other):
        return BinaryOp("+", self, _coerce(other))

    def __radd__(self, other):
        return BinaryOp("+", _coerce(other), self)

    def __sub__(self, other):
        return BinaryOp("-", self, _coerce(other))

    def __rsub__(self, other):
        return BinaryOp("-", _coerce(other), self)

    def __mul__(self, other):
        return BinaryOp("*", self, _coerce(other))

    def __rmul__(self, other):
        return BinaryOp("*", _coerce(other), self)

    def __truediv__(self, other):
        return BinaryOp("/", self, _coerce(other))

    def __rtruediv__(self, other):
        return BinaryOp("/", _coerce(other), self)

    def __pow__(self, other):
        exponent = _coerce(other)
        if not isinstance(exponent, Constant):
            raise ValueError("exponent must be a constant")
        return BinaryOp("^", self, exponent)

    def __neg__(self):
        if isinstance(self, Constant):
            return Constant(-self.value)
        return Negate(self)

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return render(self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, Real):
        return Constant(float(value))
    raise TypeError(f"cannot use {value!r} as an expression")


@dataclass(frozen=True, eq=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Negate(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinaryOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


# --------------------------------------------------------------------------
# tokenizer / parser

_NUMBER_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(("num", m.group(0), i))
            i = m.end()
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(("name", m.group(0), i))
            i = m.end()
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


def _contains_variable(e: Expr) -> bool:
    if isinstance(e, Variable):
        return True
    if isinstance(e, Negate):
        return _contains_variable(e.arg)
    if isinstance(e, BinaryOp):
        return _contains_variable(e.left) or _contains_variable(e.right)
    if isinstance(e, Call):
        return _contains_variable(e.arg)
    return False


class _Parser:
    def __init__(self, tokens, variable: str):
        self.tokens = tokens
        self.variable = variable
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected '{op}'", off)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinaryOp(val, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinaryOp(val, node, self.parse_unary())
            else:
                return node

    def parse_unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            inner = self.parse_unary()
            if isinstance(inner, Constant):
                return Constant(-inner.value)
            return Negate(inner)
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exponent = self.parse_unary()
            if _contains_variable(exponent):
                raise ExprSyntaxError("exponent must be a constant", off)
            try:
                c = evaluate(exponent, 0.0)
            except DomainError:
                raise ExprSyntaxError("exponent must be a finite constant", off)
            if not math.isfinite(c):
                raise ExprSyntaxError("exponent must be a finite constant", off)
            return BinaryOp("^", base, Constant(c))
        return base

    def parse_atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            value = float(val)
            if not math.isfinite(value):
                raise ExprSyntaxError("number literal out of range", off)
            return Constant(value)
        if kind == "name":
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "(":
                if val not in _UFUNC:
                    raise ExprSyntaxError(f"unknown function '{val}'", off)
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(val, arg)
            if val == self.variable:
                return Variable(val)
            raise ExprSyntaxError(
                f"unknown identifier '{val}' (declared variable is '{self.variable}')",
                off,
            )
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", off)
        raise ExprSyntaxError(f"unexpected token '{val}'", off)


def parse(text: str, variable: str) -> Expr:
    """Parse infix ``text`` into an expression over the named variable."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    parser = _Parser(_tokenize(text), variable)
    node = parser.parse_expr()
    kind, val, off = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected token '{val}'", off)
    return node


# --------------------------------------------------------------------------
# evaluation

def _eval(e: Expr, x):
    if isinstance(e, Constant):
        return np.full_like(x, e.value)
    if isinstance(e, Variable):
        return x
    if isinstance(e, Negate):
        return -_eval(e.arg, x)
    if isinstance(e, BinaryOp):
        lv = _eval(e.left, x)
        if e.op == "^":
            rv = _eval(e.right, x)
            c = e.right.value if isinstance(e.right, Constant) else float(np.max(rv))
            if c != round(c) and np.any(lv < 0):
                raise ExprDomainError(e, "fractional power of negative value")
            if c < 0 and np.any(lv == 0):
                raise ExprDomainError(e, "zero raised to a negative power")
            return np.power(lv, rv)
        rv = _eval(e.right, x)
        if e.op == "+":
            return lv + rv
        if e.op == "-":
            return lv - rv
        if e.op == "*":
            return lv * rv
        if np.any(rv == 0.0):
            raise ExprDomainError(e, "division by zero")
        return lv / rv
    if isinstance(e, Call):
        av = _eval(e.arg, x)
        if e.func == "log" and np.any(av <= 0):
            raise ExprDomainError(e, "log of non-positive argument")
        if e.func == "sqrt" and np.any(av < 0):
            raise ExprDomainError(e, "sqrt of negative argument")
        return _UFUNC[e.func](av)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x`` (scalar or ndarray).

    Total for finite inputs apart from domain errors (log/sqrt out of
    range, division by zero, zero to a negative power), which raise
    :class:`ExprDomainError` naming the offending subexpression.
    Overflow follows IEEE semantics and yields infinities.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        out = _eval(e, arr)
    if arr.ndim == 0:
        return float(out)
    return out


# --------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to the expression's variable."""
    if isinstance(e, Constant):
        return Constant(0.0)
    if isinstance(e, Variable):
        return Constant(1.0)
    if isinstance(e, Negate):
        return Negate(differentiate(e.arg))
    if isinstance(e, BinaryOp):
        l, r = e.left, e.right
        dl = differentiate(l)
        if e.op in "+-":
            return BinaryOp(e.op, dl, differentiate(r))
        if e.op == "*":
            return BinaryOp("+", BinaryOp("*", dl, r), BinaryOp("*", l, differentiate(r)))
        if e.op == "/":
            num = BinaryOp("-", BinaryOp("*", dl, r), BinaryOp("*", l, differentiate(r)))
            return BinaryOp("/", num, BinaryOp("^", r, Constant(2.0)))
        # power rule; the exponent is a constant by grammar invariant
        if not isinstance(r, Constant):
            raise ValueError("exponent must be a constant")
        c = r.value
        if c == 0.0:
            return Constant(0.0)
        lowered = BinaryOp("^", l, Constant(c - 1.0))
        return BinaryOp("*", BinaryOp("*", Constant(c), lowered), dl)
    if isinstance(e, Call):
        u, du = e.arg, differentiate(e.arg)
        if e.func == "exp":
            outer = Call("exp", u)
        elif e.func == "log":
            return BinaryOp("/", du, u)
        elif e.func == "sin":
            outer = Call("cos", u)
        elif e.func == "cos":
            return Negate(BinaryOp("*", Call("sin", u), du))
        elif e.func == "tan":
            return BinaryOp("/", du, BinaryOp("^", Call("cos", u), Constant(2.0)))
        elif e.func == "sinh":
            outer = Call("cosh", u)
        elif e.func == "cosh":
            outer = Call("sinh", u)
        elif e.func == "tanh":
            return BinaryOp("/", du, BinaryOp("^", Call("cosh", u), Constant(2.0)))
        elif e.func == "sqrt":
            return BinaryOp("/", du, BinaryOp("*", Constant(2.0), Call("sqrt", u)))
        else:  # pragma: no cover - guarded by the parser
            raise ValueError(f"unknown function {e.func}")
        return BinaryOp("*", outer, du)
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# simplification (conservative: folding and identity elimination only)

def simplify(e: Expr) -> Expr:
    if isinstance(e, (Constant, Variable)):
        return e
    if isinstance(e, Negate):
        arg = simplify(e.arg)
        if isinstance(arg, Constant):
            return Constant(-arg.value)
        if isinstance(arg, Negate):
            return arg.arg
        return Negate(arg)
    if isinstance(e, Call):
        arg = simplify(e.arg)
        if isinstance(arg, Constant):
            folded = _try_fold(Call(e.func, arg))
            if folded is not None:
                return folded
        return Call(e.func, arg)
    if isinstance(e, BinaryOp):
        l = simplify(e.left)
        r = simplify(e.right)
        node = BinaryOp(e.op, l, r)
        if isinstance(l, Constant) and isinstance(r, Constant):
            folded = _try_fold(node)
            if folded is not None:
                return folded
        if e.op == "+":
            if _is_const(l, 0.0):
                return r
            if _is_const(r, 0.0):
                return l
        elif e.op == "-":
            if _is_const(r, 0.0):
                return l
            if _is_const(l, 0.0):
                return simplify(Negate(r))
        elif e.op == "*":
            if _is_const(l, 0.0) or _is_const(r, 0.0):
                return Constant(0.0)
            if _is_const(l, 1.0):
                return r
            if _is_const(r, 1.0):
                return l
        elif e.op == "/":
            if _is_const(r, 1.0):
                return l
            if _is_const(l, 0.0):
                return Constant(0.0)
        elif e.op == "^":
            if _is_const(r, 1.0):
                return l
            if _is_const(r, 0.0):
                return Constant(1.0)
        return node
    raise TypeError(f"not an expression node: {e!r}")


def _is_const(e: Expr, v: float) -> bool:
    return isinstance(e, Constant) and e.value == v


def _try_fold(e: Expr):
    """Fold an all-constant node; keep it unfolded on domain errors or
    non-finite results so rendering stays parseable."""
    try:
        v = evaluate(e, 0.0)
    except DomainError:
        return None
    if not math.isfinite(v):
        return None
    return Constant(v)


# --------------------------------------------------------------------------
# rendering

_BIN_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) <= 1e15:
        return str(int(v))
    return repr(v)


def _render(e: Expr, ctx: int) -> str:
    if isinstance(e, Constant):
        s = _fmt_number(e.value)
        p = _ATOM_PREC if e.value >= 0 else _NEG_PREC
    elif isinstance(e, Variable):
        s, p = e.name, _ATOM_PREC
    elif isinstance(e, Negate):
        s, p = "-" + _render(e.arg, _NEG_PREC), _NEG_PREC
    elif isinstance(e, Call):
        s, p = f"{e.func}({_render(e.arg, 0)})", _ATOM_PREC
    elif isinstance(e, BinaryOp):
        p = _BIN_PREC[e.op]
        if e.op == "^":
            s = _render(e.left, _ATOM_PREC) + "^" + _render(e.right, _NEG_PREC)
        elif e.op in "+-":
            s = _render(e.left, p) + f" {e.op} " + _render(e.right, p + 1)
        else:
            s = _render(e.left, p) + e.op + _render(e.right, p + 1)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    if p < ctx:
        return f"({s})"
    return s


def render(e: Expr) -> str:
    """Infix text that re-parses to a structurally equal tree."""
    return _render(e, 0)
