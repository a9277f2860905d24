"""Uniform grids, sampled functions with analytic derivatives, and quadrature.

Two sampling conventions coexist deliberately:

* node arrays (n+1 points) feed finite-difference consistency checks and the
  composite trapezoid rule of :func:`quadrature_integral`;
* cell-center samples (n points, midpoint rule) feed everything
  measure-theoretic -- rearrangements, norms, averaging operators -- where an
  exact "step function on cells" representation makes the verified identities
  hold to rounding error instead of quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegionError


@dataclass(frozen=True)
class Grid1D:
    """Uniform partition of [a, b] into n cells."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"window must satisfy a < b, got [{self.a}, {self.b}]")
        if self.n < 8:
            raise ValueError(f"cell count must be >= 8, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n + 1)

    def centers(self) -> np.ndarray:
        return self.a + self.h * (np.arange(self.n) + 0.5)


@dataclass(frozen=True)
class Grid2D:
    """Product of two 1D grids; axis 1 is x, axis 2 is y."""

    gx: Grid1D
    gy: Grid1D

    def centers(self):
        return np.meshgrid(self.gx.centers(), self.gy.centers(), indexing="ij")

    def nodes(self):
        return np.meshgrid(self.gx.nodes(), self.gy.nodes(), indexing="ij")

    @property
    def cell_area(self) -> float:
        return self.gx.h * self.gy.h


class GridFunction1D:
    """Node samples of u, u', u'' plus the analytic evaluators behind them.

    The evaluators take a float or array and a derivative order (0..3); they
    are what escape-interval bisection and interval quadrature consume, so
    those computations are not limited to grid resolution.
    """

    dim = 1

    def __init__(self, grid: Grid1D, evaluate, orders: int = 2, label: str = ""):
        self.grid = grid
        self.evaluate = evaluate
        self.max_order = orders
        self.label = label
        x = grid.nodes()
        self.values = np.asarray(evaluate(x, 0), dtype=float)
        self.d1 = np.asarray(evaluate(x, 1), dtype=float)
        self.d2 = np.asarray(evaluate(x, 2), dtype=float)
        for name, arr in (("values", self.values), ("d1", self.d1), ("d2", self.d2)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {name} in sampled function {label!r}")

    def center_values(self, order: int = 0) -> np.ndarray:
        return np.asarray(self.evaluate(self.grid.centers(), order), dtype=float)

    def sup_norm(self, order: int = 0, probe: int = 8192) -> float:
        """Sup norm from a fixed fine probe, independent of grid resolution."""
        x = np.linspace(self.grid.a, self.grid.b, probe + 1)
        return float(np.max(np.abs(self.evaluate(x, order))))


class GridFunction2D:
    """Node samples of u and its pure partials along one axis, plus evaluators.

    ``evaluate(x, y, jx, jy)`` returns the mixed partial of order (jx, jy);
    the stored arrays cover (0,0), the first and the second pure partial
    along ``axis``.
    """

    dim = 2

    def __init__(self, grid: Grid2D, evaluate, axis: int = 1, orders: int = 2, label: str = ""):
        if axis not in (1, 2):
            raise ValueError(f"axis must be 1 or 2, got {axis}")
        self.grid = grid
        self.evaluate = evaluate
        self.axis = axis
        self.max_order = orders
        self.label = label
        X, Y = grid.nodes()
        self.values = np.asarray(evaluate(X, Y, 0, 0), dtype=float)
        self.d1 = np.asarray(self._axis_partial(X, Y, 1), dtype=float)
        self.d2 = np.asarray(self._axis_partial(X, Y, 2), dtype=float)
        for name, arr in (("values", self.values), ("d1", self.d1), ("d2", self.d2)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {name} in sampled function {label!r}")

    def _axis_partial(self, X, Y, order):
        if self.axis == 1:
            return self.evaluate(X, Y, order, 0)
        return self.evaluate(X, Y, 0, order)

    def center_values(self, order: int = 0):
        X, Y = self.grid.centers()
        if order == 0:
            return np.asarray(self.evaluate(X, Y, 0, 0), dtype=float)
        return np.asarray(self._axis_partial(X, Y, order), dtype=float)

    def sup_norm(self, order: int = 0, probe: int = 512) -> float:
        """Sup norm from a fixed fine probe, independent of grid resolution."""
        x = np.linspace(self.grid.gx.a, self.grid.gx.b, probe + 1)
        y = np.linspace(self.grid.gy.a, self.grid.gy.b, probe + 1)
        X, Y = np.meshgrid(x, y, indexing="ij")
        if order == 0:
            vals = self.evaluate(X, Y, 0, 0)
        else:
            vals = self._axis_partial(X, Y, order)
        return float(np.max(np.abs(vals)))

    def line_function(self, transverse_value: float):
        """The restriction to one grid line as callables of the axis variable.

        Returns ``(window, eval_line)`` where ``eval_line(t, order)`` is the
        pure partial along ``axis`` of that order, evaluated on the line.
        """
        if self.axis == 1:
            window = (self.grid.gx.a, self.grid.gx.b)

            def eval_line(t, order):
                t = np.asarray(t, dtype=float)
                y = np.full_like(t, transverse_value)
                return self.evaluate(t, y, order, 0)

        else:
            window = (self.grid.gy.a, self.grid.gy.b)

            def eval_line(t, order):
                t = np.asarray(t, dtype=float)
                x = np.full_like(t, transverse_value)
                return self.evaluate(x, t, 0, order)

        return window, eval_line


def fd_consistency_error(f) -> float:
    """Max deviation of analytic d1 from the central difference of values.

    Used by the O(h^2) refinement property: halving h quarters this number
    for smooth functions.
    """
    if f.dim == 1:
        h = f.grid.h
        fd = (f.values[2:] - f.values[:-2]) / (2.0 * h)
        return float(np.max(np.abs(f.d1[1:-1] - fd)))
    if f.axis == 1:
        h = f.grid.gx.h
        fd = (f.values[2:, :] - f.values[:-2, :]) / (2.0 * h)
        return float(np.max(np.abs(f.d1[1:-1, :] - fd)))
    h = f.grid.gy.h
    fd = (f.values[:, 2:] - f.values[:, :-2]) / (2.0 * h)
    return float(np.max(np.abs(f.d1[:, 1:-1] - fd)))


def quadrature_integral(f, region=None) -> float:
    """Composite trapezoid integral of node samples over a node-index range.

    ``f`` is a GridFunction1D or a pair ``(node_values, Grid1D)``.  ``region``
    is ``None`` for the whole window or a contiguous ``(i0, i1)`` node-index
    range with i0 < i1.
    """
    if isinstance(f, GridFunction1D):
        vals, grid = f.values, f.grid
    else:
        vals, grid = np.asarray(f[0], dtype=float), f[1]
    if region is None:
        i0, i1 = 0, len(vals) - 1
    else:
        i0, i1 = region
    if not i0 < i1:
        raise EmptyRegionError(f"degenerate node range ({i0}, {i1})")
    seg = vals[i0 : i1 + 1]
    return float(grid.h * (np.sum(seg) - 0.5 * (seg[0] + seg[-1])))


def quadrature_integral_2d(values, grid: Grid2D, region=None) -> float:
    """Product-trapezoid integral of 2D node samples over index ranges."""
    vals = np.asarray(values, dtype=float)
    if region is None:
        ri, rj = (0, vals.shape[0] - 1), (0, vals.shape[1] - 1)
    else:
        ri, rj = region
    if not (ri[0] < ri[1] and rj[0] < rj[1]):
        raise EmptyRegionError(f"degenerate node range {region}")
    sub = vals[ri[0] : ri[1] + 1, rj[0] : rj[1] + 1]
    wx = np.ones(sub.shape[0])
    wx[0] = wx[-1] = 0.5
    wy = np.ones(sub.shape[1])
    wy[0] = wy[-1] = 0.5
    return float(grid.cell_area * (wx @ sub @ wy))


def interval_integral(fn, z: float, y: float, h_ref: float) -> float:
    """Trapezoid integral of a callable over [z, y] at sub-grid resolution.

    Panel count scales with the interval length measured in reference grid
    steps, with a floor so that intervals shorter than one cell still get a
    stable rule.
    """
    if not y > z:
        raise EmptyRegionError(f"degenerate interval ({z}, {y})")
    panels = max(64, 8 * int(math.ceil((y - z) / h_ref)))
    t = np.linspace(z, y, panels + 1)
    v = np.asarray(fn(t), dtype=float)
    step = (y - z) / panels
    return float(step * (np.sum(v) - 0.5 * (v[0] + v[-1])))


def interval_average(fn, z: float, y: float, h_ref: float) -> float:
    return interval_integral(fn, z, y, h_ref) / (y - z)
