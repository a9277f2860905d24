"""Two-dimensional sparse slab coverings from level sets of one pure partial.

Each grid line parallel to the chosen axis carries the 1D escape-interval
construction for d1 = the first partial along that axis; an interval (z, y)
found on the line through a seed cell is thickened transversely by an open
ball of radius delta_k, where delta_k keeps the oscillation of u, d1 u and
d1^2 u below the level-dependent bound

    b_k = min(2^(k-4), 2^(2k-4) / M),   M = max of the three sup norms.

That bound is what keeps the thickened slabs inside the widened band
{2^(k-3) <= s * d1 u < 2^(k+2)}, caps the per-sign overlap at 5, and keeps
the slab averages of |d1^2 u| and |u| comparable to the line averages.
delta_k must be a positive integer multiple of the grid step; levels where
no such multiple exists are skipped and reported with a resolution
diagnostic instead of being silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, CorpusConfigError, WindowExitError
from .sparse1d import band_edges, escape_interval, level_floor, level_index

OVERLAP_LIMIT_2D = 5


@dataclass(frozen=True)
class DeltaResult:
    """Outcome of the admissible-thickness scan for one oscillation bound."""

    steps: int
    delta: float
    bound: float
    variation_at_one: float

    @property
    def admissible(self) -> bool:
        return self.steps >= 1


@dataclass(frozen=True)
class SkippedLevel:
    k: int
    bound: float
    seed_cells: int
    variation_at_one: float
    suggested_cells: int

    def diagnostic(self) -> str:
        return (
            f"level {self.k}: no grid-commensurate thickness; one-step oscillation "
            f"{self.variation_at_one:.3e} exceeds bound {self.bound:.3e}; "
            f"roughly {self.suggested_cells} cells per side would resolve it"
        )


@dataclass
class SlabSet:
    k: int
    sign: int
    mask: np.ndarray  # bool over cells, indexed [ix, iy]
    delta: float
    delta_steps: int
    seed_cells: int
    pieces: int


@dataclass
class SparseFamily2D:
    axis: int
    slabs: list
    skipped: list
    k_min: int
    k_top: int
    exit_cells: list
    eligible_count: int
    grid: object
    uc: np.ndarray
    d1c: np.ndarray
    d2c: np.ndarray
    deltas: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.slabs)

    def analyzed_levels(self):
        return sorted({s.k for s in self.slabs})

    def sign_counts(self) -> np.ndarray:
        """Per-cell covering counts, maximized over the two signs."""
        shape = self.uc.shape
        plus = np.zeros(shape, dtype=np.int64)
        minus = np.zeros(shape, dtype=np.int64)
        for s in self.slabs:
            (plus if s.sign > 0 else minus)[s.mask] += 1
        return np.maximum(plus, minus)


def _shift_variation(arr: np.ndarray, a: int, b: int) -> float:
    """max |f(x + (a,b)h) - f(x)| over the overlap of the lattice with itself."""
    nx, ny = arr.shape
    i0, i1 = max(0, -a), nx - max(0, a)
    j0, j1 = max(0, -b), ny - max(0, b)
    if i0 >= i1 or j0 >= j1:
        return 0.0
    base = arr[i0:i1, j0:j1]
    shifted = arr[i0 + a : i1 + a, j0 + b : j1 + b]
    return float(np.max(np.abs(shifted - base)))


def _field_lattices(u):
    """The three controlled fields on both sampling lattices."""
    return (
        u.values,
        u.d1,
        u.d2,
        u.center_values(0),
        u.center_values(1),
        u.center_values(2),
    )


def compute_delta(u, bound: float, lattices=None) -> DeltaResult:
    """Largest delta = m*h whose displacements keep all field oscillations
    within ``bound``, checked on the node and cell-center lattices.

    Displacements are all integer offsets with Euclidean length <= m.  When
    even the global range of every field fits the bound, the window itself
    is no constraint and delta is its diameter.
    """
    if bound <= 0.0:
        raise ValueError(f"oscillation bound must be positive, got {bound}")
    fields = _field_lattices(u) if lattices is None else lattices
    hx, hy = u.grid.gx.h, u.grid.gy.h
    if not math.isclose(hx, hy, rel_tol=1e-12):
        raise ConstructionError(f"anisotropic cells ({hx} x {hy}) have no common step")
    h = hx

    var_one = max(
        _shift_variation(f, a, b) for f in fields for a, b in ((1, 0), (0, 1))
    )
    global_range = max(float(np.max(f) - np.min(f)) for f in fields)
    if global_range <= bound:
        diameter = math.hypot(u.grid.gx.b - u.grid.gx.a, u.grid.gy.b - u.grid.gy.a)
        return DeltaResult(steps=min(u.grid.gx.n, u.grid.gy.n), delta=diameter, bound=bound, variation_at_one=var_one)
    if var_one > bound:
        return DeltaResult(steps=0, delta=0.0, bound=bound, variation_at_one=var_one)

    m_cap = min(u.grid.gx.n, u.grid.gy.n)
    worst = var_one
    m = 1
    while m + 1 <= m_cap:
        nxt = m + 1
        ring = [
            (a, b)
            for a in range(0, nxt + 1)
            for b in range(-nxt, nxt + 1)
            if (a > 0 or b > 0) and m * m < a * a + b * b <= nxt * nxt
        ]
        ring_worst = max(
            (_shift_variation(f, a, b) for f in fields for a, b in ring), default=0.0
        )
        worst = max(worst, ring_worst)
        if worst > bound:
            break
        m = nxt
    return DeltaResult(steps=m, delta=m * h, bound=bound, variation_at_one=var_one)


def oscillation_bound(k: int, big_m: float) -> float:
    """b_k = min(2^(k-4), 2^(2k-4)/M)."""
    first = math.ldexp(1.0, k - 4)
    if big_m <= 0.0:
        return first
    return min(first, math.ldexp(1.0, 2 * k - 4) / big_m)


def field_sup_bound(u) -> float:
    """M: the largest of the sup norms of u, d1 u, d1^2 u (fixed fine probe)."""
    return max(u.sup_norm(order=j) for j in (0, 1, 2))


def default_k_min_2d(u, rel_floor: float = 1e-6) -> int:
    sup = u.sup_norm(order=1)
    if sup == 0.0:
        return 0
    m, e = math.frexp(rel_floor * sup)
    return e if m == 0.5 else e + 1


def _check_compact_support(u):
    border = max(
        float(np.max(np.abs(u.values[0, :]))),
        float(np.max(np.abs(u.values[-1, :]))),
        float(np.max(np.abs(u.values[:, 0]))),
        float(np.max(np.abs(u.values[:, -1]))),
    )
    scale = max(float(np.max(np.abs(u.values))), 1e-300)
    if border > 1e-9 * scale:
        raise CorpusConfigError(
            f"function {u.label!r} is not compactly supported inside its window "
            f"(boundary magnitude {border:.3e})"
        )


def build_family_2d(u, axis: int = 1, k_min=None, exit_fraction_limit: float = 0.01) -> SparseFamily2D:
    """Assemble the two-sign slab family of one pure partial of u.

    Per analyzed level: line escape intervals through every seed cell,
    thickened transversely by the admissible delta.  Levels without an
    admissible delta >= h are recorded as skipped.  Window-exiting seeds
    follow the same 1% budget as the 1D build.
    """
    if axis != u.axis:
        raise ConstructionError(f"function carries partials for axis {u.axis}, not {axis}")
    _check_compact_support(u)

    uc = u.center_values(0)
    d1c = u.center_values(1)
    d2c = u.center_values(2)
    lattices = (u.values, u.d1, u.d2, uc, d1c, d2c)

    # canonical orientation: line axis first
    d1_lines = d1c if axis == 1 else d1c.T
    n_line, n_trans = d1_lines.shape
    if axis == 1:
        line_coords = u.grid.gx.centers()
        trans_coords = u.grid.gy.centers()
    else:
        line_coords = u.grid.gy.centers()
        trans_coords = u.grid.gx.centers()
    h = u.grid.gx.h

    big_m = field_sup_bound(u)
    sup_d1 = max(u.sup_norm(order=1), float(np.max(np.abs(d1c))))
    if sup_d1 == 0.0:
        return SparseFamily2D(
            axis, [], [], 0, 0, [], 0, u.grid, uc, d1c, d2c, {}
        )
    k_top = level_index(sup_d1)
    if k_min is None:
        k_min = default_k_min_2d(u)

    thr = level_floor(k_min)
    eligible_count = int(np.sum(np.abs(d1c) >= thr))

    slabs = []
    skipped = []
    exit_cells = []
    deltas = {}

    for k in range(k_top, k_min - 1, -1):
        abs_d1 = np.abs(d1_lines)
        own = (abs_d1 >= level_floor(k)) & (abs_d1 < math.ldexp(1.0, k))
        seed_count = int(np.sum(own))
        if seed_count == 0:
            continue
        bound = oscillation_bound(k, big_m)
        res = compute_delta(u, bound, lattices=lattices)
        deltas[k] = res
        if not res.admissible:
            suggested = int(math.ceil(n_line * res.variation_at_one / bound)) if bound > 0 else 0
            skipped.append(
                SkippedLevel(
                    k=k,
                    bound=bound,
                    seed_cells=seed_count,
                    variation_at_one=res.variation_at_one,
                    suggested_cells=suggested,
                )
            )
            continue
        m_steps = res.steps
        lo, hi = band_edges(k)
        for sign in (1, -1):
            g_lines = sign * d1_lines
            in_band_all = (g_lines >= lo) & (g_lines < hi)
            seed_rows = np.nonzero(np.any(own & (g_lines > 0.0), axis=0))[0]
            if seed_rows.size == 0:
                continue
            mask = np.zeros((n_line, n_trans), dtype=bool)
            pieces = 0
            level_seeds = 0
            for j in seed_rows:
                col = own[:, j] & (g_lines[:, j] > 0.0)
                seeds = np.nonzero(col)[0]
                level_seeds += int(seeds.size)
                _, line_eval = u.line_function(float(trans_coords[j]))
                g = lambda t, s=sign: s * np.asarray(line_eval(t, 1), dtype=float)
                in_band = in_band_all[:, j]
                current = None
                j0 = max(0, int(j) - (m_steps - 1))
                j1 = min(n_trans, int(j) + m_steps)
                for i in seeds:
                    x = float(line_coords[i])
                    if current is not None and current.contains(x):
                        continue
                    try:
                        current = escape_interval(
                            None, x, sign, g=g, in_band_nodes=in_band,
                            nodes=line_coords, node_index=int(i),
                        )
                    except WindowExitError:
                        cell = (int(i), int(j)) if axis == 1 else (int(j), int(i))
                        exit_cells.append((cell[0], cell[1], k, sign))
                        current = None
                        continue
                    i0 = int(np.searchsorted(line_coords, current.z, side="right"))
                    i1 = int(np.searchsorted(line_coords, current.y, side="left"))
                    mask[i0:i1, j0:j1] = True
                    pieces += 1
            if pieces == 0:
                continue
            final_mask = mask if axis == 1 else mask.T
            slabs.append(
                SlabSet(
                    k=k,
                    sign=sign,
                    mask=final_mask,
                    delta=res.delta,
                    delta_steps=m_steps,
                    seed_cells=level_seeds,
                    pieces=pieces,
                )
            )

    if eligible_count and len(exit_cells) > exit_fraction_limit * eligible_count:
        raise CorpusConfigError(
            f"{len(exit_cells)} of {eligible_count} eligible cells exit the window "
            f"({len(exit_cells) / eligible_count:.1%} > {exit_fraction_limit:.0%})"
        )

    return SparseFamily2D(
        axis=axis,
        slabs=slabs,
        skipped=skipped,
        k_min=k_min,
        k_top=k_top,
        exit_cells=exit_cells,
        eligible_count=eligible_count,
        grid=u.grid,
        uc=uc,
        d1c=d1c,
        d2c=d2c,
        deltas=deltas,
    )


@dataclass(frozen=True)
class Family2DReport:
    max_overlap: int
    max_ratio: float
    covered_cells: int
    analyzed_levels: tuple
    skipped_levels: tuple
    level_ratios: dict


def verify_family_2d(u, family: SparseFamily2D) -> Family2DReport:
    """Structural checks (raise ConstructionError) plus the reported ratio.

    Checks: per-sign overlap <= 5, disjointness of the two sign unions,
    widened band inclusion at every covered cell center, and coverage of
    every non-exiting seed cell of each analyzed level.  The pointwise
    ratio (d1 u)^2 / sum of slab-average products is reported, never
    thresholded.
    """
    shape = family.uc.shape
    plus = np.zeros(shape, dtype=np.int64)
    minus = np.zeros(shape, dtype=np.int64)
    denom = np.zeros(shape)
    level_ratios = {}

    for s in family.slabs:
        counts = plus if s.sign > 0 else minus
        counts[s.mask] += 1
        g = s.sign * family.d1c[s.mask]
        lo = math.ldexp(1.0, s.k - 3)
        hi = math.ldexp(1.0, s.k + 2)
        if float(np.min(g)) < lo or float(np.max(g)) >= hi:
            raise ConstructionError(
                f"slab (k={s.k}, sign={s.sign}) leaves its widened band "
                f"[{lo}, {hi}): values in [{np.min(g)}, {np.max(g)}]"
            )
        a2 = float(np.mean(np.abs(family.d2c[s.mask])))
        a0 = float(np.mean(np.abs(family.uc[s.mask])))
        if a2 <= 0.0:
            raise ConstructionError(f"slab (k={s.k}, sign={s.sign}) has zero |d1^2 u| average")
        denom[s.mask] += a2 * a0

    max_overlap = int(max(np.max(plus), np.max(minus))) if family.slabs else 0
    if max_overlap > OVERLAP_LIMIT_2D:
        raise ConstructionError(f"per-sign overlap {max_overlap} exceeds {OVERLAP_LIMIT_2D}")
    if np.any((plus > 0) & (minus > 0)):
        raise ConstructionError("positive and negative slab unions intersect")

    exit_set = {(i, j, k, sign) for (i, j, k, sign) in family.exit_cells}
    for s in family.slabs:
        g = s.sign * family.d1c
        own = (g >= level_floor(s.k)) & (g < math.ldexp(1.0, s.k))
        missing = own & ~s.mask
        if np.any(missing):
            bad = [
                (int(i), int(j))
                for i, j in zip(*np.nonzero(missing))
                if (int(i), int(j), s.k, s.sign) not in exit_set
            ]
            if bad:
                raise ConstructionError(
                    f"{len(bad)} seed cells of level {s.k} sign {s.sign} are not in "
                    f"their own slab, first at {bad[0]}"
                )

    covered = denom > 0.0
    ratios = np.zeros(shape)
    np.divide(family.d1c**2, denom, out=ratios, where=covered)
    max_ratio = float(np.max(ratios)) if family.slabs else 0.0
    for s in family.slabs:
        level_ratios[(s.k, s.sign)] = float(np.max(ratios[s.mask]))

    return Family2DReport(
        max_overlap=max_overlap,
        max_ratio=max_ratio,
        covered_cells=int(np.sum(covered)),
        analyzed_levels=tuple(family.analyzed_levels()),
        skipped_levels=tuple(sk.k for sk in family.skipped),
        level_ratios=level_ratios,
    )
