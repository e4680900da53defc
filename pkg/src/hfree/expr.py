"""Expression trees: parsing, symbolic differentiation, simplification, evaluation.

The grammar is deliberately tiny -- {+, -, *, /, ^, sin, cos, exp} over named
coordinates with integer exponents -- and every operation here is a pure
function on immutable trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class EvalError(Exception):
    """Raised when an expression cannot be evaluated at a point."""


@dataclass(frozen=True)
class Expr:
    """Base node. Subclasses are the only valid instances."""

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("exponents must be integers")
        return Pow(self, n)

    def __neg__(self):
        return Neg(self)


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float)):
        return Const(float(v))
    raise TypeError(f"cannot build an expression from {v!r}")


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Coord(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


ZERO = Const(0.0)
ONE = Const(1.0)

_FUNCS = {"sin": Sin, "cos": Cos, "exp": Exp}


# ---------------------------------------------------------------------------
# Parsing


class ParseError(Exception):
    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {position}: expected {expected}, found {found}")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, expected: str):
        found = self.src[self.pos] if self.pos < len(self.src) else "end of input"
        raise ParseError(self.pos, expected, found)

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.accept(ch):
            self.error(f"'{ch}'")

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            self.error("end of input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Mul(e, self.unary())
            elif self.accept("/"):
                e = Div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() != "^":
            return base
        # exponents are integer literals; chains like x^2^3 fold right to left
        exps = []
        while self.accept("^"):
            exps.append(self.integer())
        n = exps[-1]
        for e in reversed(exps[:-1]):
            if n < 0:
                self.error("non-negative exponent in exponent chain")
            n = e**n
        return Pow(base, n)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.src) and self.src[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.error("integer exponent")
        if self.pos < len(self.src) and self.src[self.pos] == ".":
            raise ParseError(self.pos, "integer exponent", ".")
        return int(self.src[start : self.pos])

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha() or ch == "_":
            name = self.ident()
            if self.peek() == "(":
                if name not in _FUNCS:
                    raise ParseError(self.pos, "one of sin, cos, exp", name)
                self.pos += 1
                e = self.expr()
                self.expect(")")
                return _FUNCS[name](e)
            if name == "pi":
                return Const(math.pi)
            return Coord(name)
        self.error("a number, coordinate, function call or '('")

    def number(self) -> Expr:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.src) and self.src[self.pos] == ".":
            self.pos += 1
            while self.pos < len(self.src) and self.src[self.pos].isdigit():
                self.pos += 1
        if self.pos == start or self.src[start : self.pos] == ".":
            self.error("a number")
        return Const(float(self.src[start : self.pos]))

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.src) and (
            self.src[self.pos].isalnum() or self.src[self.pos] == "_"
        ):
            self.pos += 1
        return self.src[start : self.pos]


def parse(src: str) -> Expr:
    """Parse the textual DSL into an expression tree."""
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Const) and e.value < 0:
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expr, minimum: int) -> str:
    s = to_str(e)
    return f"({s})" if _prec(e) < minimum else s


def to_str(e: Expr) -> str:
    """Render an expression in the DSL syntax; parse(to_str(e)) evaluates like e."""
    if isinstance(e, Const):
        v = e.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        # exact positional decimal, so parsing reproduces the float bit for bit
        from decimal import Decimal

        return format(Decimal(v), "f")
    if isinstance(e, Coord):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC_NEG)
    if isinstance(e, Add):
        return f"{_wrap(e.left, _PREC_ADD)} + {_wrap(e.right, _PREC_ADD)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.left, _PREC_ADD)} - {_wrap(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.left, _PREC_MUL)}*{_wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Div):
        return f"{_wrap(e.left, _PREC_MUL)}/{_wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{e.exponent}"
    if isinstance(e, Sin):
        return f"sin({to_str(e.arg)})"
    if isinstance(e, Cos):
        return f"cos({to_str(e.arg)})"
    if isinstance(e, Exp):
        return f"exp({to_str(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(e: Expr, point: dict) -> float:
    """Evaluate at a coordinate binding. Raises EvalError on unbound names,
    division by zero, and 0 raised to a negative power."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Coord):
        try:
            return float(point[e.name])
        except KeyError:
            raise EvalError(f"unbound coordinate '{e.name}'") from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, point)
    if isinstance(e, Add):
        return evaluate(e.left, point) + evaluate(e.right, point)
    if isinstance(e, Sub):
        return evaluate(e.left, point) - evaluate(e.right, point)
    if isinstance(e, Mul):
        return evaluate(e.left, point) * evaluate(e.right, point)
    if isinstance(e, Div):
        denom = evaluate(e.right, point)
        if denom == 0.0:
            raise EvalError("division by zero")
        return evaluate(e.left, point) / denom
    if isinstance(e, Pow):
        base = evaluate(e.base, point)
        if base == 0.0 and e.exponent < 0:
            raise EvalError("0 raised to a negative power")
        return float(base**e.exponent)
    if isinstance(e, Sin):
        return math.sin(evaluate(e.arg, point))
    if isinstance(e, Cos):
        return math.cos(evaluate(e.arg, point))
    if isinstance(e, Exp):
        return math.exp(evaluate(e.arg, point))
    raise TypeError(f"not an expression node: {e!r}")


def free_vars(e: Expr) -> frozenset:
    """The set of coordinate names occurring in the tree."""
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Coord):
        return frozenset({e.name})
    if isinstance(e, (Neg, Sin, Cos, Exp)):
        return free_vars(e.arg)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Pow):
        return free_vars(e.base)
    raise TypeError(f"not an expression node: {e!r}")


def substitute(e: Expr, bindings: dict) -> Expr:
    """Replace coordinates by expressions (simultaneous substitution)."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Coord):
        return bindings.get(e.name, e)
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, bindings))
    if isinstance(e, Add):
        return Add(substitute(e.left, bindings), substitute(e.right, bindings))
    if isinstance(e, Sub):
        return Sub(substitute(e.left, bindings), substitute(e.right, bindings))
    if isinstance(e, Mul):
        return Mul(substitute(e.left, bindings), substitute(e.right, bindings))
    if isinstance(e, Div):
        return Div(substitute(e.left, bindings), substitute(e.right, bindings))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, bindings), e.exponent)
    if isinstance(e, Sin):
        return Sin(substitute(e.arg, bindings))
    if isinstance(e, Cos):
        return Cos(substitute(e.arg, bindings))
    if isinstance(e, Exp):
        return Exp(substitute(e.arg, bindings))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Differentiation


def diff(e: Expr, coord: str) -> Expr:
    """Exact partial derivative with respect to a coordinate name."""
    return simplify(_diff(e, coord))


def _diff(e: Expr, x: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Coord):
        return ONE if e.name == x else ZERO
    if isinstance(e, Neg):
        return Neg(_diff(e.arg, x))
    if isinstance(e, Add):
        return Add(_diff(e.left, x), _diff(e.right, x))
    if isinstance(e, Sub):
        return Sub(_diff(e.left, x), _diff(e.right, x))
    if isinstance(e, Mul):
        return Add(Mul(_diff(e.left, x), e.right), Mul(e.left, _diff(e.right, x)))
    if isinstance(e, Div):
        num = Sub(Mul(_diff(e.left, x), e.right), Mul(e.left, _diff(e.right, x)))
        return Div(num, Pow(e.right, 2))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return ZERO
        return Mul(Mul(Const(float(e.exponent)), Pow(e.base, e.exponent - 1)), _diff(e.base, x))
    if isinstance(e, Sin):
        return Mul(Cos(e.arg), _diff(e.arg, x))
    if isinstance(e, Cos):
        return Neg(Mul(Sin(e.arg), _diff(e.arg, x)))
    if isinstance(e, Exp):
        return Mul(Exp(e.arg), _diff(e.arg, x))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Simplification


def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def _local(e: Expr) -> Expr:
    """One rewrite step at the root; children are assumed simplified."""
    if isinstance(e, Neg):
        a = e.arg
        if isinstance(a, Neg):
            return a.arg
        if isinstance(a, Const):
            return Const(-a.value)
        return e
    if isinstance(e, Add):
        l, r = e.left, e.right
        if _is_const(l) and _is_const(r):
            return Const(l.value + r.value)
        if _is_const(l, 0.0):
            return r
        if _is_const(r, 0.0):
            return l
        if isinstance(r, Neg):
            return Sub(l, r.arg)
        if isinstance(l, Neg):
            return Sub(r, l.arg)
        return e
    if isinstance(e, Sub):
        l, r = e.left, e.right
        if _is_const(l) and _is_const(r):
            return Const(l.value - r.value)
        if _is_const(r, 0.0):
            return l
        if _is_const(l, 0.0):
            return Neg(r)
        if isinstance(r, Neg):
            return Add(l, r.arg)
        if l == r:
            return ZERO
        return e
    if isinstance(e, Mul):
        l, r = e.left, e.right
        if _is_const(l) and _is_const(r):
            return Const(l.value * r.value)
        if _is_const(l, 0.0) or _is_const(r, 0.0):
            return ZERO
        if _is_const(l, 1.0):
            return r
        if _is_const(r, 1.0):
            return l
        if isinstance(l, Neg):
            return Neg(Mul(l.arg, r))
        if isinstance(r, Neg):
            return Neg(Mul(l, r.arg))
        return e
    if isinstance(e, Div):
        l, r = e.left, e.right
        if _is_const(l) and _is_const(r) and r.value != 0.0:
            return Const(l.value / r.value)
        if _is_const(l, 0.0):
            return ZERO
        if _is_const(r, 1.0):
            return l
        if isinstance(l, Neg):
            return Neg(Div(l.arg, r))
        return e
    if isinstance(e, Pow):
        if e.exponent == 0:
            return ONE
        if e.exponent == 1:
            return e.base
        if _is_const(e.base) and not (e.base.value == 0.0 and e.exponent < 0):
            return Const(float(e.base.value**e.exponent))
        return e
    if isinstance(e, Sin) and _is_const(e.arg):
        return Const(math.sin(e.arg.value))
    if isinstance(e, Cos) and _is_const(e.arg):
        return Const(math.cos(e.arg.value))
    if isinstance(e, Exp) and _is_const(e.arg):
        return Const(math.exp(e.arg.value))
    return e


def simplify(e: Expr) -> Expr:
    """Best-effort normalization: constant folding, 0/1 identities, Neg pulling.
    Semantics-preserving and idempotent; not a canonical form."""
    if isinstance(e, Neg):
        out = Neg(simplify(e.arg))
    elif isinstance(e, Add):
        out = Add(simplify(e.left), simplify(e.right))
    elif isinstance(e, Sub):
        out = Sub(simplify(e.left), simplify(e.right))
    elif isinstance(e, Mul):
        out = Mul(simplify(e.left), simplify(e.right))
    elif isinstance(e, Div):
        out = Div(simplify(e.left), simplify(e.right))
    elif isinstance(e, Pow):
        out = Pow(simplify(e.base), e.exponent)
    elif isinstance(e, Sin):
        out = Sin(simplify(e.arg))
    elif isinstance(e, Cos):
        out = Cos(simplify(e.arg))
    elif isinstance(e, Exp):
        out = Exp(simplify(e.arg))
    else:
        return e
    reduced = _local(out)
    if reduced != out:
        return simplify(reduced)
    return out


# ---------------------------------------------------------------------------
# Compilation (fast repeated evaluation over many sample points)


def _pysrc(e: Expr) -> str:
    if isinstance(e, Const):
        return f"({e.value!r})"
    if isinstance(e, Coord):
        return f"_p[{e.name!r}]"
    if isinstance(e, Neg):
        return f"(-{_pysrc(e.arg)})"
    if isinstance(e, Add):
        return f"({_pysrc(e.left)} + {_pysrc(e.right)})"
    if isinstance(e, Sub):
        return f"({_pysrc(e.left)} - {_pysrc(e.right)})"
    if isinstance(e, Mul):
        return f"({_pysrc(e.left)} * {_pysrc(e.right)})"
    if isinstance(e, Div):
        return f"({_pysrc(e.left)} / {_pysrc(e.right)})"
    if isinstance(e, Pow):
        return f"({_pysrc(e.base)} ** {e.exponent})"
    if isinstance(e, Sin):
        return f"_sin({_pysrc(e.arg)})"
    if isinstance(e, Cos):
        return f"_cos({_pysrc(e.arg)})"
    if isinstance(e, Exp):
        return f"_exp({_pysrc(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def compile_expr(e: Expr):
    """Compile to a callable point-dict -> float. Division by zero and 0^-n
    surface as EvalError, matching evaluate()."""
    src = f"lambda _p: ({_pysrc(e)})"
    fn = eval(src, {"_sin": math.sin, "_cos": math.cos, "_exp": math.exp})

    def call(point: dict) -> float:
        try:
            return float(fn(point))
        except ZeroDivisionError as exc:
            raise EvalError(str(exc)) from None
        except KeyError as exc:
            raise EvalError(f"unbound coordinate {exc}") from None

    return call
