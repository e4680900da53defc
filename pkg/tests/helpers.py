"""Shared test utilities: a bounded random expression generator and the
central-difference oracle used to validate symbolic derivatives."""

import math
import random

from hfree.expr import (
    Add,
    Const,
    Coord,
    Cos,
    Div,
    EvalError,
    Exp,
    Mul,
    Neg,
    Pow,
    Sin,
    Sub,
    evaluate,
)

COORDS = ("x", "y")


def random_expr(rng: random.Random, depth: int = 3):
    """A random expression whose values and low-order derivatives stay small
    on [-1, 1]^2, so central differences are a trustworthy oracle."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Coord(rng.choice(COORDS))
        return Const(round(rng.uniform(-2.0, 2.0), 3))
    op = rng.randrange(8)
    if op == 0:
        return Add(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == 1:
        return Sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == 2:
        return Mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if op == 3:
        # keep denominators bounded away from zero
        denom = Add(Const(2.0), Pow(Coord(rng.choice(COORDS)), 2))
        return Div(random_expr(rng, depth - 1), denom)
    if op == 4:
        return Pow(random_expr(rng, depth - 1), rng.randrange(2, 4))
    if op == 5:
        return Sin(random_expr(rng, depth - 1))
    if op == 6:
        return Cos(random_expr(rng, depth - 1))
    if op == 7 and depth <= 2:
        return Exp(random_expr(rng, depth - 1))
    return Neg(random_expr(rng, depth - 1))


def random_point(rng: random.Random) -> dict:
    return {c: rng.uniform(-1.0, 1.0) for c in COORDS}


def central_difference(e, coord: str, point: dict, h: float = 1e-5) -> float:
    lo = dict(point)
    hi = dict(point)
    lo[coord] -= h
    hi[coord] += h
    return (evaluate(e, hi) - evaluate(e, lo)) / (2.0 * h)


def bounded_pair(rng: random.Random, limit: float = 1e3):
    """Draw (expr, point) pairs until all stencil values stay below limit."""
    while True:
        e = random_expr(rng)
        p = random_point(rng)
        try:
            values = [abs(evaluate(e, p))]
            for c in COORDS:
                for delta in (-1e-5, 1e-5, -1e-2, 1e-2):
                    q = dict(p)
                    q[c] += delta
                    values.append(abs(evaluate(e, q)))
        except (EvalError, OverflowError):
            continue
        if max(values) < limit and all(math.isfinite(v) for v in values):
            return e, p
