"""Scalar weight expressions: parsing, evaluation, printing, periodicity analysis.

Grammar (whitespace insignificant, decimal number literals)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' integer)?
    atom   := number | variable | 'pi' | ('sin'|'cos') '(' expr ')'
            | '(' expr ')' | '-' atom

The single free variable defaults to ``t`` (time); initial-density profiles
reuse the same grammar with variable ``x``. Exponents must be integer
literals. Evaluation accepts scalars or numpy arrays; sin/cos are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError

Expr = Union["Num", "Var", "Pi", "Neg", "BinOp", "Power", "Trig"]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Power:
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Trig:
    func: str
    arg: Expr


_NUMBER, _NAME, _OP, _END = "number", "name", "op", "end"


def _tokenize(source: str):
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                if source[j] == ".":
                    seen_dot = True
                j += 1
            text = source[i:j]
            if text == ".":
                raise ExprSyntaxError("malformed number", i)
            tokens.append((_NUMBER, text, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append((_NAME, source[i:j], i))
            i = j
            continue
        if c in "+-*/^()":
            tokens.append((_OP, c, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unknown character {c!r}", i)
    tokens.append((_END, "", n))
    return tokens


class _Parser:
    def __init__(self, tokens, var: str):
        self.tokens = tokens
        self.pos = 0
        self.var = var

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, at = self.peek()
        if kind != _OP or text != op:
            raise ExprSyntaxError(f"expected {op!r}", at)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, at = self.peek()
        if kind != _END:
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", at)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "+-":
                self.advance()
                e = BinOp(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "*/":
                self.advance()
                e = BinOp(text, e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        e = self.atom()
        kind, text, _ = self.peek()
        if kind == _OP and text == "^":
            self.advance()
            e = Power(e, self.integer())
        return e

    def integer(self) -> int:
        sign = 1
        kind, text, at = self.peek()
        if kind == _OP and text == "-":
            self.advance()
            sign = -1
            kind, text, at = self.peek()
        if kind != _NUMBER:
            raise ExprSyntaxError("expected integer exponent", at)
        self.advance()
        value = float(text)
        if value != int(value) or "." in text:
            raise ExprSyntaxError(f"exponent must be an integer, got {text!r}", at)
        return sign * int(value)

    def atom(self) -> Expr:
        kind, text, at = self.advance()
        if kind == _NUMBER:
            return Num(float(text))
        if kind == _NAME:
            if text == "pi":
                return Pi()
            if text in ("sin", "cos"):
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Trig(text, arg)
            if text == self.var:
                return Var(text)
            raise ExprSyntaxError(f"unknown name {text!r}", at)
        if kind == _OP and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == _OP and text == "-":
            return Neg(self.atom())
        raise ExprSyntaxError(
            f"expected expression, got {text!r}" if text else "expected expression, got end of input",
            at,
        )


def parse_expr(source: str, var: str = "t") -> Expr:
    """Parse a weight expression over the given free variable."""
    return _Parser(_tokenize(source), var).parse()


def evaluate(e: Expr, value):
    """Evaluate at a scalar or numpy array of points for the free variable."""
    scalar = not isinstance(value, np.ndarray)
    result = _eval(e, value)
    return float(result) if scalar else result


def _eval(e: Expr, v):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return v
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Neg):
        return -_eval(e.operand, v)
    if isinstance(e, BinOp):
        a = _eval(e.left, v)
        b = _eval(e.right, v)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if np.any(b == 0):
            raise ExprEvalError("division by zero")
        return a / b
    if isinstance(e, Power):
        base = _eval(e.base, v)
        if e.exponent < 0 and np.any(base == 0):
            raise ExprEvalError("zero raised to a negative power")
        return base ** e.exponent
    if isinstance(e, Trig):
        arg = _eval(e.arg, v)
        return np.sin(arg) if e.func == "sin" else np.cos(arg)
    raise TypeError(f"not an expression node: {e!r}")


_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Power):
        return _PREC_POW
    return _PREC_ATOM


def to_source(e: Expr) -> str:
    """Canonical printer; parse(to_source(e)) reproduces e exactly."""
    if isinstance(e, Num):
        # positional form only: the grammar has no exponent notation
        return np.format_float_positional(e.value, unique=True, trim="-")
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        # the grammar negates atoms, so anything below atom level (except a
        # chained negation) must be wrapped: -t^2 reparses as (-t)^2
        if not isinstance(e.operand, Neg) and _prec(e.operand) < _PREC_ATOM:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        op_prec = _prec(e)
        left = to_source(e.left)
        right = to_source(e.right)
        if _prec(e.left) < op_prec:
            left = f"({left})"
        if _prec(e.right) <= op_prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, Power):
        base = to_source(e.base)
        if _prec(e.base) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Trig):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def depends_on_var(e: Expr) -> bool:
    """Whether the free variable occurs anywhere in the expression."""
    if isinstance(e, Var):
        return True
    if isinstance(e, Neg):
        return depends_on_var(e.operand)
    if isinstance(e, BinOp):
        return depends_on_var(e.left) or depends_on_var(e.right)
    if isinstance(e, Power):
        return depends_on_var(e.base)
    if isinstance(e, Trig):
        return depends_on_var(e.arg)
    return False


def _affine_in_var(e: Expr):
    """(slope, intercept) if e is affine in the free variable, else None."""
    if isinstance(e, Num):
        return (0.0, e.value)
    if isinstance(e, Pi):
        return (0.0, math.pi)
    if isinstance(e, Var):
        return (1.0, 0.0)
    if isinstance(e, Neg):
        inner = _affine_in_var(e.operand)
        return None if inner is None else (-inner[0], -inner[1])
    if isinstance(e, BinOp):
        a = _affine_in_var(e.left)
        b = _affine_in_var(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return (a[0] + b[0], a[1] + b[1])
        if e.op == "-":
            return (a[0] - b[0], a[1] - b[1])
        if e.op == "*":
            if a[0] == 0.0:
                return (a[1] * b[0], a[1] * b[1])
            if b[0] == 0.0:
                return (a[0] * b[1], a[1] * b[1])
            return None
        if b[0] == 0.0 and b[1] != 0.0:
            return (a[0] / b[1], a[1] / b[1])
        return None
    if isinstance(e, Power):
        base = _affine_in_var(e.base)
        if base is None:
            return None
        if e.exponent == 1:
            return base
        if base[0] == 0.0:
            try:
                return (0.0, base[1] ** e.exponent)
            except ZeroDivisionError:
                return None
        return None
    if isinstance(e, Trig):
        arg = _affine_in_var(e.arg)
        if arg is not None and arg[0] == 0.0:
            f = math.sin if e.func == "sin" else math.cos
            return (0.0, f(arg[1]))
        return None
    return None


_INT_TOL = 1e-9


def is_periodic_in_time(e: Expr) -> bool:
    """Structural check that e has period 1 in the free variable.

    The variable may occur only inside sin/cos whose argument is affine with
    slope an integer multiple of pi; any polynomial dependence outside a trig
    argument fails the check. This is the checkable fragment of 1-periodicity,
    not a full semantic test.
    """
    if not depends_on_var(e):
        return True
    if isinstance(e, Trig):
        arg = _affine_in_var(e.arg)
        if arg is None:
            return False
        k = arg[0] / math.pi
        return abs(k - round(k)) <= _INT_TOL
    if isinstance(e, Neg):
        return is_periodic_in_time(e.operand)
    if isinstance(e, BinOp):
        return is_periodic_in_time(e.left) and is_periodic_in_time(e.right)
    if isinstance(e, Power):
        return is_periodic_in_time(e.base)
    return False


def critical_times(e: Expr) -> frozenset[float]:
    """Times in [0, 1) where some trig subterm crosses a zero or an extremum.

    For the restricted grammar, support-pattern changes of an assembled matrix
    can only happen where a trig factor hits a quarter-period point, so these
    times augment any equispaced sampling of one period.
    """
    found: set[float] = set()
    _collect_critical(e, found)
    return frozenset(found)


def _collect_critical(e: Expr, out: set[float]) -> None:
    if isinstance(e, Trig):
        arg = _affine_in_var(e.arg)
        if arg is not None and arg[0] != 0.0:
            slope, intercept = arg
            # quarter-period points: slope*t + intercept = j*pi/2
            j_lo = math.floor(2 * intercept / math.pi) - 1
            j_hi = math.ceil(2 * (slope + intercept) / math.pi) + 1
            lo, hi = min(j_lo, j_hi), max(j_lo, j_hi)
            for j in range(lo, hi + 1):
                t = (j * math.pi / 2 - intercept) / slope
                if 0.0 <= t < 1.0:
                    out.add(t)
        _collect_critical(e.arg, out)
    elif isinstance(e, Neg):
        _collect_critical(e.operand, out)
    elif isinstance(e, BinOp):
        _collect_critical(e.left, out)
        _collect_critical(e.right, out)
    elif isinstance(e, Power):
        _collect_critical(e.base, out)
