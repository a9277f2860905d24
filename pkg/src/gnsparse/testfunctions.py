"""Closed-form test-function families and the default verification corpora.

Families (all provide derivatives up to third order in closed form):

* ``gaussian``        A * exp(-((x-c)/w)^2)
* ``smooth-bump``     A * cos^4(pi (x-c) / (2 w)) on |x-c| < w, zero outside
* ``modulated-bump``  smooth-bump times cos(freq * (x-c))
* ``sine-window``     A * sin(freq * (x-c)) on the whole window

The compact bump uses a raised-cosine profile rather than the classical
exp(-1/(1-t^2)) shape: both are legitimate compactly supported C^2 bumps,
but the raised cosine has third-derivative constants roughly an order of
magnitude smaller, which is what makes the two-dimensional continuity-modulus
construction resolvable at desk-scale grids (the mollifier kernel, which
never enters a modulus scan, keeps the classical shape).

In 2D a spec is either a ``product`` of two 1D profiles or ``radial``
(profile of r = sqrt(x^2+y^2)); only bump-type families may be radial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CorpusConfigError, UnresolvableFunctionError
from .grid import Grid1D, Grid2D, GridFunction1D, GridFunction2D

FAMILIES = ("gaussian", "smooth-bump", "modulated-bump", "sine-window")
COMPACT_FAMILIES = ("smooth-bump", "modulated-bump")

_HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class TestFunctionSpec:
    """Parameters of one corpus member; ``window`` decides the dimension.

    1D: center/width are floats and window is (a, b).
    2D: center/width are pairs, window is ((ax, bx), (ay, by)) and ``layout``
    selects product or radial structure (radial uses width[0]).
    """

    __test__ = False  # not a pytest class despite the name

    family: str
    center: object = 0.0
    width: object = 1.0
    amplitude: float = 1.0
    frequency: float = 0.0
    window: object = (-1.0, 1.0)
    layout: str = "product"
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise CorpusConfigError(f"unknown family {self.family!r}")
        if self.layout not in ("product", "radial"):
            raise CorpusConfigError(f"unknown layout {self.layout!r}")
        if self.dim == 2 and self.layout == "radial" and self.family not in COMPACT_FAMILIES and self.family != "gaussian":
            raise CorpusConfigError(f"family {self.family!r} has no radial form")

    @property
    def dim(self) -> int:
        return 2 if isinstance(self.window[0], (tuple, list)) else 1

    def centers(self):
        c = self.center
        return (float(c[0]), float(c[1])) if isinstance(c, (tuple, list)) else (float(c), float(c))

    def widths(self):
        w = self.width
        return (float(w[0]), float(w[1])) if isinstance(w, (tuple, list)) else (float(w), float(w))


# ---------------------------------------------------------------------------
# 1D profiles.  Each returns the order-m derivative of the profile at x.


def _gaussian(x, c, w, A, m):
    t = (np.asarray(x, dtype=float) - c) / w
    e = A * np.exp(-t * t)
    if m == 0:
        return e
    if m == 1:
        return -2.0 * t * e / w
    if m == 2:
        return (4.0 * t * t - 2.0) * e / (w * w)
    if m == 3:
        return (12.0 * t - 8.0 * t ** 3) * e / (w ** 3)
    raise ValueError(f"derivative order {m} not available")


def _bump(x, c, w, A, m):
    t = (np.asarray(x, dtype=float) - c) / w
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    th = _HALF_PI * t[inside]
    cs, sn = np.cos(th), np.sin(th)
    if m == 0:
        out[inside] = A * cs ** 4
    elif m == 1:
        out[inside] = -4.0 * A * (_HALF_PI / w) * cs ** 3 * sn
    elif m == 2:
        out[inside] = A * (_HALF_PI / w) ** 2 * (12.0 * cs ** 2 * sn ** 2 - 4.0 * cs ** 4)
    elif m == 3:
        out[inside] = A * (_HALF_PI / w) ** 3 * 8.0 * cs * sn * (5.0 * cs ** 2 - 3.0 * sn ** 2)
    else:
        raise ValueError(f"derivative order {m} not available")
    return out


def _modulated(x, c, w, A, nu, m):
    x = np.asarray(x, dtype=float)
    ph = nu * (x - c)
    C, S = np.cos(ph), np.sin(ph)
    B = [_bump(x, c, w, A, j) for j in range(m + 1)]
    if m == 0:
        return B[0] * C
    if m == 1:
        return B[1] * C - B[0] * nu * S
    if m == 2:
        return B[2] * C - 2.0 * B[1] * nu * S - B[0] * nu * nu * C
    if m == 3:
        return B[3] * C - 3.0 * B[2] * nu * S - 3.0 * B[1] * nu * nu * C + B[0] * nu ** 3 * S
    raise ValueError(f"derivative order {m} not available")


def _sine(x, c, A, nu, m):
    ph = nu * (np.asarray(x, dtype=float) - c)
    cycle = (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))
    if not 0 <= m <= 3:
        raise ValueError(f"derivative order {m} not available")
    return A * nu ** m * cycle[m](ph)


def profile_derivative(spec: TestFunctionSpec, x, m: int, component: int = 0):
    """Order-m derivative of the (1D or per-axis) profile of ``spec`` at x."""
    c = spec.centers()[component]
    w = spec.widths()[component]
    A = spec.amplitude if component == 0 else 1.0
    if spec.family == "gaussian":
        return _gaussian(x, c, w, A, m)
    if spec.family == "smooth-bump":
        return _bump(x, c, w, A, m)
    if spec.family == "modulated-bump":
        if component == 0:
            return _modulated(x, c, w, A, spec.frequency, m)
        return _bump(x, c, w, A, m)
    if spec.family == "sine-window":
        return _sine(x, c, A, spec.frequency, m)
    raise CorpusConfigError(f"unknown family {spec.family!r}")


# ---------------------------------------------------------------------------
# radial 2D profiles: u = P(r/w) with P the cos^4 (or gaussian) shape.


def _radial_profile(spec, s, m):
    A = spec.amplitude
    if spec.family == "gaussian":
        return _gaussian(s, 0.0, 1.0, A, m)
    return _bump(s, 0.0, 1.0, A, m)


def _radial_partials(spec, X, Y, jx, jy):
    """Mixed partials of P(r/w) up to total order 2 (plus pure order 3)."""
    cx, cy = spec.centers()
    w = spec.widths()[0]
    dx = (np.asarray(X, dtype=float) - cx) / w
    dy = (np.asarray(Y, dtype=float) - cy) / w
    r = np.hypot(dx, dy)
    order = jx + jy
    if order == 0:
        return _radial_profile(spec, r, 0)
    safe = r > 1e-12
    rs = np.where(safe, r, 1.0)
    P1 = _radial_profile(spec, r, 1)
    # P'(s)/s has a finite limit at s=0 (the profile is even in s)
    lim = -np.pi ** 2 * spec.amplitude if spec.family != "gaussian" else -2.0 * spec.amplitude
    p1_over_s = np.where(safe, P1 / rs, lim)
    ex = np.where(safe, dx / rs, 0.0)
    ey = np.where(safe, dy / rs, 0.0)
    if order == 1:
        e = ex if jx == 1 else ey
        return p1_over_s * (dx if jx == 1 else dy) / w
    P2 = _radial_profile(spec, r, 2)
    if order == 2:
        if jx == 2 or jy == 2:
            e2 = np.where(safe, (ex if jx == 2 else ey) ** 2, 1.0 if jx == 2 else 0.0)
            # at r=0 both pure second partials equal P''(0)/w^2
            e2 = np.where(safe, e2, 1.0)
            return (P2 * e2 + p1_over_s * (1.0 - e2)) / w ** 2
        cross = np.where(safe, ex * ey, 0.0)
        return (P2 - p1_over_s) * cross / w ** 2
    if order == 3 and (jx == 3 or jy == 3):
        P3 = _radial_profile(spec, r, 3)
        e = np.where(safe, ex if jx == 3 else ey, 0.0)
        q = np.where(safe, (P2 - p1_over_s) / rs, 0.0)
        return (P3 * e ** 3 + 3.0 * q * e * (1.0 - e * e)) / w ** 3
    raise ValueError(f"radial partial of order ({jx},{jy}) not available")


def make_evaluator_1d(spec: TestFunctionSpec):
    def evaluate(x, order=0):
        return profile_derivative(spec, x, order, 0)

    return evaluate


def make_evaluator_2d(spec: TestFunctionSpec):
    if spec.layout == "radial":

        def evaluate(X, Y, jx=0, jy=0):
            return _radial_partials(spec, X, Y, jx, jy)

        return evaluate

    def evaluate(X, Y, jx=0, jy=0):
        px = profile_derivative(spec, X, jx, 0)
        py = profile_derivative(spec, Y, jy, 1)
        return px * py

    return evaluate


def make_test_function(spec: TestFunctionSpec, grid, axis: int = 1):
    """Sample a spec on a grid, rejecting unresolvable or ill-posed setups."""
    if spec.dim == 1:
        if not isinstance(grid, Grid1D):
            raise CorpusConfigError("1D spec requires a Grid1D")
        wa, wb = spec.window
        if not (math.isclose(wa, grid.a) and math.isclose(wb, grid.b)):
            raise CorpusConfigError(
                f"grid window [{grid.a}, {grid.b}] does not match spec window {spec.window}"
            )
        if spec.widths()[0] <= 4.0 * grid.h:
            raise UnresolvableFunctionError(
                f"width {spec.widths()[0]} <= 4h = {4.0 * grid.h} for {spec.name or spec.family}"
            )
        _check_support(spec, 0)
        return GridFunction1D(grid, make_evaluator_1d(spec), orders=3, label=spec.name or spec.family)

    if not isinstance(grid, Grid2D):
        raise CorpusConfigError("2D spec requires a Grid2D")
    for comp, g in ((0, grid.gx), (1, grid.gy)):
        if spec.widths()[comp] <= 4.0 * g.h:
            raise UnresolvableFunctionError(
                f"width {spec.widths()[comp]} <= 4h on axis {comp + 1} for {spec.name or spec.family}"
            )
        _check_support(spec, comp)
    return GridFunction2D(grid, make_evaluator_2d(spec), axis=axis, orders=3, label=spec.name or spec.family)


def _check_support(spec: TestFunctionSpec, component: int):
    """Compact families must be supported strictly inside the window."""
    if spec.family not in COMPACT_FAMILIES:
        return
    window = spec.window[component] if spec.dim == 2 else spec.window
    c = spec.centers()[component]
    if spec.layout == "radial" and spec.dim == 2:
        w = spec.widths()[0]
    else:
        w = spec.widths()[component]
    if c - w <= window[0] or c + w >= window[1]:
        raise CorpusConfigError(
            f"support [{c - w}, {c + w}] not strictly inside window {window} "
            f"for {spec.name or spec.family}"
        )


def grid_for_spec(spec: TestFunctionSpec, n: int):
    if spec.dim == 1:
        a, b = spec.window
        return Grid1D(float(a), float(b), n)
    (ax, bx), (ay, by) = spec.window
    return Grid2D(Grid1D(float(ax), float(bx), n), Grid1D(float(ay), float(by), n))


def _sine_spec(name, amplitude, frequency, center, half_periods):
    """Sine window aligned so u' vanishes at both window edges."""
    half = (half_periods + 0.5) * math.pi / frequency
    return TestFunctionSpec(
        family="sine-window",
        center=center,
        width=1.0 / frequency,
        amplitude=amplitude,
        frequency=frequency,
        window=(center - half, center + half),
        name=name,
    )


def default_corpus_1d():
    """The bundled 1D corpus: 21 members spanning all four families.

    Sine windows are aligned to quarter periods (u' = 0 at both edges) so
    that every escape interval closes inside the window; gaussians get wide
    windows for the same reason.
    """
    specs = [
        TestFunctionSpec("gaussian", 0.0, 1.0, 1.0, 0.0, (-6.0, 6.0), name="g1"),
        TestFunctionSpec("gaussian", 0.5, 0.8, 1.3, 0.0, (-6.0, 7.0), name="g2"),
        TestFunctionSpec("gaussian", -1.0, 1.5, 0.7, 0.0, (-9.0, 7.0), name="g3"),
        TestFunctionSpec("gaussian", 0.0, 2.0, 1.0, 0.0, (-11.0, 11.0), name="g4"),
        TestFunctionSpec("gaussian", 1.2, 0.6, 0.9, 0.0, (-4.0, 6.0), name="g5"),
        TestFunctionSpec("gaussian", -0.7, 1.1, 1.8, 0.0, (-7.5, 6.5), name="g6"),
        TestFunctionSpec("smooth-bump", 0.0, 1.0, 1.0, 0.0, (-1.5, 1.5), name="b1"),
        TestFunctionSpec("smooth-bump", 0.3, 2.0, 1.4, 0.0, (-2.6, 3.2), name="b2"),
        TestFunctionSpec("smooth-bump", -0.8, 0.9, 0.8, 0.0, (-2.2, 1.0), name="b3"),
        TestFunctionSpec("smooth-bump", 0.0, 3.0, 2.0, 0.0, (-4.0, 4.0), name="b4"),
        TestFunctionSpec("smooth-bump", 0.5, 1.6, 1.1, 0.0, (-1.8, 2.8), name="b5"),
        TestFunctionSpec("modulated-bump", 0.0, 2.0, 1.0, 3.0, (-2.6, 2.6), name="m1"),
        TestFunctionSpec("modulated-bump", 0.0, 2.5, 1.0, 5.0, (-3.2, 3.2), name="m2"),
        TestFunctionSpec("modulated-bump", 0.4, 1.8, 1.2, 4.0, (-2.0, 2.8), name="m3"),
        TestFunctionSpec("modulated-bump", -0.5, 3.0, 0.9, 2.5, (-4.2, 3.2), name="m4"),
        TestFunctionSpec("modulated-bump", 0.0, 2.2, 1.5, 6.0, (-2.9, 2.9), name="m5"),
        _sine_spec("s1", 1.0, 1.0, 0.0, 1),
        _sine_spec("s2", 1.0, 2.0, 0.0, 2),
        _sine_spec("s3", 1.5, 1.0, 0.0, 0),
        _sine_spec("s4", 0.8, 3.0, 0.2, 3),
        _sine_spec("s5", 1.2, 1.5, -0.3, 1),
    ]
    return specs


def default_corpus_2d():
    """The bundled 2D corpus: six compactly supported bumps, tuned so the
    top level passes the discrete continuity-modulus test at n = 128.

    The tuning logic: the level-k modulus budget is
    min(2^(k-4), 2^(2k-4)/M), which is maximized relative to the fields'
    Lipschitz constants when max|d1| sits just above a dyadic threshold and
    the sup norms of u, d1, d11 are balanced near 1.  Width ~3.4-3.65 with
    amplitude <= 1 lands max|d1| in [0.55, 0.56) (level 0, budget 1/16) and
    leaves one admissible grid step of transverse radius at n = 128.
    """

    def product(name, w, A, cx=0.0, cy=0.0, wy=None, pad=1.05):
        wy = w if wy is None else wy
        hx = pad * w + abs(cx)
        hy = pad * wy + abs(cy)
        half = max(hx, hy)
        return TestFunctionSpec(
            family="smooth-bump",
            center=(cx, cy),
            width=(w, wy),
            amplitude=A,
            window=((-half, half), (-half, half)),
            layout="product",
            name=name,
        )

    def radial(name, w, A, pad=1.05):
        half = pad * w
        return TestFunctionSpec(
            family="smooth-bump",
            center=(0.0, 0.0),
            width=(w, w),
            amplitude=A,
            window=((-half, half), (-half, half)),
            layout="radial",
            name=name,
        )

    return [
        product("p1", 3.65, 1.0),
        product("p2", 3.4, 0.932),
        product("p3", 3.65, 1.0, wy=3.2),
        radial("r1", 3.5, 0.96),
        product("p4", 3.4, 0.932, cx=0.2, cy=-0.3),
        product("p5", 3.65, -1.0),
    ]
