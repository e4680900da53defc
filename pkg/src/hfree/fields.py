"""Charts, vector fields, frames and the Lie-derivative calculus."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import Add, Expr, Mul, Pow, ZERO, free_vars, simplify
from .expr import diff as ddx


class ChartMismatch(Exception):
    """An expression or field refers to coordinates outside its chart."""


class OutsideDomain(Exception):
    """A sample point lies outside the chart's box."""


@dataclass(frozen=True)
class Chart:
    """A single coordinate system with a sampling box.

    Periodic axes are angular with period 2*pi and box exactly [0, 2*pi);
    periodicity is sampler metadata only.
    """

    coords: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    periodic: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.coords:
            raise ValueError("chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("coordinate names must be distinct")
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * len(self.coords))
        if len(self.box) != len(self.coords) or len(self.periodic) != len(self.coords):
            raise ValueError("box and periodic must match the coordinate count")
        for (lo, hi), per in zip(self.box, self.periodic):
            if not lo < hi:
                raise ValueError(f"degenerate box interval [{lo}, {hi}]")
            if per and not (lo == 0.0 and abs(hi - 2 * math.pi) < 1e-12):
                raise ValueError("periodic axes must use the box [0, 2*pi)")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def check_expr(self, e: Expr):
        extra = free_vars(e) - set(self.coords)
        if extra:
            raise ChartMismatch(f"coordinates {sorted(extra)} not in chart {self.coords}")

    def bind(self, point) -> dict:
        if len(point) != self.dim:
            raise ChartMismatch(f"point of length {len(point)} on a {self.dim}-dim chart")
        return dict(zip(self.coords, point))

    def contains(self, point) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(point, self.box))


@dataclass(frozen=True)
class VectorField:
    """Coefficients of the coordinate basis fields on a chart."""

    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.chart.dim:
            raise ChartMismatch("vector field needs one component per coordinate")
        for c in self.components:
            self.chart.check_expr(c)


@dataclass(frozen=True)
class Frame:
    """An ordered list of vector fields spanning a distribution on a chart.

    Pointwise linear independence is not assumed; it is checked numerically.
    """

    chart: Chart
    vectors: tuple[VectorField, ...]

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if not 1 <= len(self.vectors) <= self.chart.dim:
            raise ChartMismatch("frame size must be between 1 and the chart dimension")
        for v in self.vectors:
            if v.chart != self.chart:
                raise ChartMismatch("all frame fields must share the frame's chart")

    @property
    def k(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class SmoothMap:
    """A map into R^q given by q scalar expression components."""

    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ChartMismatch("a map needs at least one component")
        for c in self.components:
            self.chart.check_expr(c)

    @property
    def q(self) -> int:
        return len(self.components)


def lie_derivative(xi: VectorField, f: Expr) -> Expr:
    """Directional derivative of f along xi: sum_i xi^i * d f / d x^i."""
    xi.chart.check_expr(f)
    total: Expr = ZERO
    for comp, name in zip(xi.components, xi.chart.coords):
        total = Add(total, Mul(comp, ddx(f, name)))
    return simplify(total)


def anticommutator(xa: VectorField, xb: VectorField, f: Expr) -> Expr:
    """The symmetrized second-order operator (L_a L_b + L_b L_a) applied to f."""
    if xa.chart != xb.chart:
        raise ChartMismatch("anticommutator fields must share a chart")
    return simplify(
        Add(
            lie_derivative(xa, lie_derivative(xb, f)),
            lie_derivative(xb, lie_derivative(xa, f)),
        )
    )


def flat_norm_sq(xi: VectorField) -> Expr:
    """Squared Euclidean norm of the field (flat metric)."""
    total: Expr = ZERO
    for comp in xi.components:
        total = Add(total, Pow(comp, 2))
    return simplify(total)


def frame_rank_check(frame: Frame, point, tol: float = 1e-9) -> bool:
    """True iff the frame's component matrix has full numerical rank at the point."""
    from .jets import numerical_rank  # local import: jets depends on fields

    import numpy as np

    if not frame.chart.contains(point):
        raise OutsideDomain(f"point {tuple(point)} outside box {frame.chart.box}")
    binding = frame.chart.bind(point)
    from .expr import evaluate

    mat = np.array(
        [[evaluate(c, binding) for c in v.components] for v in frame.vectors]
    )
    return numerical_rank(mat, tol) == frame.k
