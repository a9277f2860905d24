"""Discrete mollification with the classical compactly supported kernel."""

from __future__ import annotations

import warnings

import numpy as np

from .grid import Grid1D, GridFunction1D


class BoundaryContaminationWarning(UserWarning):
    """The support of the input reaches within l of the window boundary."""


def kernel_weights(l: float, h: float):
    """Samples of c*exp(-1/(1-(x/l)^2)) on the grid lattice, summing to 1.

    The normalization is discrete (sum * h = 1 before folding h into the
    weights), so convolution with the weights preserves mass exactly and is
    a convex combination of translates.
    """
    if l < 2.0 * h:
        raise ValueError(f"mollifier scale l = {l} must be >= 2h = {2.0 * h}")
    m = int(np.floor(l / h))
    if m * h >= l:
        m -= 1
    x = h * np.arange(-m, m + 1)
    t = x / l
    w = np.exp(-1.0 / (1.0 - t * t))
    w /= np.sum(w)
    return w


def mollify(u: GridFunction1D, l: float) -> GridFunction1D:
    """Convolve a sampled function with the scale-l kernel.

    Derivatives commute with convolution, so the result's d1/d2 are the
    convolved d1/d2 of the input; the evaluator interpolates linearly
    between nodes (the result is a genuine grid-level object, no longer
    closed form).
    """
    grid = u.grid
    w = kernel_weights(l, grid.h)
    m = (len(w) - 1) // 2

    support = np.nonzero(np.abs(u.values) > 1e-14)[0]
    if support.size and (support[0] < m or support[-1] > grid.n - m):
        warnings.warn(
            f"support of {u.label!r} is within l = {l} of the window boundary; "
            "mollified values near the edge are truncated",
            BoundaryContaminationWarning,
            stacklevel=2,
        )

    def conv(arr):
        return np.convolve(arr, w, mode="same")

    values = conv(u.values)
    d1 = conv(u.d1)
    d2 = conv(u.d2)

    nodes = grid.nodes()

    def evaluate(x, order=0):
        arr = (values, d1, d2)[order]
        return np.interp(np.asarray(x, dtype=float), nodes, arr)

    out = GridFunction1D.__new__(GridFunction1D)
    out.grid = grid
    out.evaluate = evaluate
    out.max_order = 2
    out.label = f"{u.label}*phi_{l:g}"
    out.values = values
    out.d1 = d1
    out.d2 = d2
    return out
