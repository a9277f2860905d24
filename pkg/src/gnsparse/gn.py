"""Gagliardo-Nirenberg interpolation ratios in rearrangement-invariant norms.

The inequality under study bounds an intermediate derivative by its
endpoints,

    ||D^j u||_Z <= C ||D^k u||_X^(j/k) ||u||_Y^(1-j/k),

with Z = X^(j/k) Y^(1-j/k) the Calderon-Lozanovskii product of the two
spaces.  gn_ratio measures the three norms on one test function and
reports the empirical ratio, a lower witness for the best constant.
first_order_chain_check walks the sparse-averaging route to the
(j, k) = (1, 2) case link by link.  lorentz_parameter_solve and
induction_identity_check cover the exponent algebra that reduces higher
orders to that case, and run_corpus drives everything over a case list,
attaching structural verdicts from the sparse construction itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AdmissibilityError, ConstructionError
from .norms import cl_factorization_check, space_norm
from .operator import (
    CellFamily,
    apply_sparse_operator,
    modular_contraction_check,
    operator_norm_check,
)
from .sparse1d import build_family_1d, default_k_min, overlap_profile, verify_pointwise_1d
from .sparse2d import build_family_2d, verify_family_2d
from .spaces import (
    INF,
    SpaceDescriptor,
    YoungFunction,
    cl_combine,
    index_from_reciprocal,
    index_reciprocal,
    parse_index,
)
from .testfunctions import TestFunctionSpec, grid_for_spec, make_test_function

MODES = ("pure", "gradient", "pure-sum")
CHECK_NAMES = ("overlap", "pointwise", "operator-norm", "modular", "gn", "induction")
STABILITY_TOL = 0.01
CHAIN_SLACK = 0.02
POINTWISE_CONSTANT = 128.0

# the modular contraction is checked against this spread of growth rates
MODULAR_YOUNGS = (
    YoungFunction("pow", (Fraction(1),)),
    YoungFunction("pow", (Fraction(3, 2),)),
    YoungFunction("pow", (Fraction(2),)),
    YoungFunction("pow", (Fraction(3),)),
    YoungFunction("exp"),
)

_L1 = SpaceDescriptor("lebesgue", primary=Fraction(1))
_LINF = SpaceDescriptor("lebesgue", primary=INF)


@dataclass(frozen=True)
class GNCase:
    """One measurement: function, derivative orders, spaces, mode, resolution.

    Modes differ only in two dimensions: ``pure`` compares the pure partials
    along ``axis``, ``gradient`` sums |d^a u| over all multi-indices of each
    total order, ``pure-sum`` sums the pure partials of the two axes.  In
    one dimension the three coincide.
    """

    spec: TestFunctionSpec
    j: int
    k: int
    x_space: SpaceDescriptor
    y_space: SpaceDescriptor
    mode: str = "pure"
    axis: int = 1
    n: int = 1024

    def __post_init__(self):
        if not 1 <= self.j < self.k <= 3:
            raise AdmissibilityError(
                f"derivative orders must satisfy 1 <= j < k <= 3, got ({self.j}, {self.k})"
            )
        if self.mode not in MODES:
            raise AdmissibilityError(f"unknown mode {self.mode!r}")
        if self.axis not in (1, 2) or (self.dim == 1 and self.axis != 1):
            raise AdmissibilityError(f"axis {self.axis} invalid for a {self.dim}D function")
        if self.x_space.kind != self.y_space.kind:
            raise AdmissibilityError(
                f"{self.x_space.format()} and {self.y_space.format()} do not combine"
            )
        if self.n < 8:
            raise AdmissibilityError(f"resolution {self.n} is too small to mean anything")

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def theta(self) -> Fraction:
        return Fraction(self.j, self.k)

    def case_id(self) -> str:
        name = self.spec.name or self.spec.family
        parts = [
            name,
            self.mode,
            f"j{self.j}k{self.k}",
            self.x_space.format(),
            self.y_space.format(),
            f"n{self.n}",
        ]
        if self.dim == 2:
            parts.insert(1, f"ax{self.axis}")
        return "-".join(parts)


@dataclass(frozen=True)
class GNReport:
    case: GNCase
    z_space: SpaceDescriptor
    lhs: float
    rhs_x: float
    rhs_y: float
    ratio: float
    refined_ratio: float
    drift: float
    stable: bool


def _abs_field(u, order: int, mode: str, axis: int) -> np.ndarray:
    """|derivative expression| of the given total order at cell centers."""
    if u.dim == 1:
        return np.abs(np.asarray(u.evaluate(u.grid.centers(), order), dtype=float))
    X, Y = u.grid.centers()

    def part(jx, jy):
        return np.asarray(u.evaluate(X, Y, jx, jy), dtype=float)

    if order == 0:
        out = np.abs(part(0, 0))
    elif mode == "pure":
        out = np.abs(part(order, 0) if axis == 1 else part(0, order))
    elif mode == "pure-sum":
        out = np.abs(part(order, 0)) + np.abs(part(0, order))
    else:  # gradient: every multi-index of the given total order
        out = sum(np.abs(part(jx, order - jx)) for jx in range(order + 1))
    return out.ravel()


def _cell_measure(u) -> float:
    return u.grid.h if u.dim == 1 else u.grid.cell_area


def _norms_at(case: GNCase, z_space: SpaceDescriptor, n: int):
    u = make_test_function(case.spec, grid_for_spec(case.spec, n), axis=case.axis)
    mu = _cell_measure(u)
    lhs = space_norm(z_space, _abs_field(u, case.j, case.mode, case.axis), mu)
    rhs_x = space_norm(case.x_space, _abs_field(u, case.k, case.mode, case.axis), mu)
    rhs_y = space_norm(case.y_space, _abs_field(u, 0, case.mode, case.axis), mu)
    return lhs, rhs_x, rhs_y


def _ratio_of(lhs: float, rhs_x: float, rhs_y: float, theta: Fraction) -> float:
    t = float(theta)
    denom = rhs_x**t * rhs_y ** (1.0 - t)
    if denom > 0.0:
        return lhs / denom
    return 0.0 if lhs == 0.0 else math.inf


def gn_ratio(case: GNCase) -> GNReport:
    """Empirical ratio at case.n plus a refinement rerun at 2n.

    Zero functions give ratio 0 by convention.  The stability flag compares
    the two resolutions at 1% relative; norm failures propagate.
    """
    z_space = cl_combine(case.x_space, case.y_space, case.theta)
    lhs, rhs_x, rhs_y = _norms_at(case, z_space, case.n)
    ratio = _ratio_of(lhs, rhs_x, rhs_y, case.theta)
    lhs2, rhs_x2, rhs_y2 = _norms_at(case, z_space, 2 * case.n)
    refined = _ratio_of(lhs2, rhs_x2, rhs_y2, case.theta)
    if ratio == refined:
        drift = 0.0
    elif math.isfinite(refined) and refined > 0.0:
        drift = abs(ratio - refined) / refined
    else:
        drift = math.inf
    stable = math.isfinite(ratio) and drift <= STABILITY_TOL
    return GNReport(case, z_space, lhs, rhs_x, rhs_y, ratio, refined, drift, stable)


# ---------------------------------------------------------------------------
# the chained route to the first-order inequality


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: float
    rhs: float
    ok: bool


@dataclass(frozen=True)
class ChainReport:
    links: tuple
    overlap: int
    pointwise_max: float

    @property
    def ok(self) -> bool:
        return all(link.ok for link in self.links)

    def link(self, name: str) -> ChainLink:
        for item in self.links:
            if item.name == name:
                return item
        raise KeyError(name)


def first_order_chain_check(u, x_space: SpaceDescriptor, y_space: SpaceDescriptor, family=None) -> ChainReport:
    """||u' chi_cov||_Z <= sqrt(128) K ||u''||_X^(1/2) ||u||_Y^(1/2), link by link.

    With T the sparse averaging operator of the escape-interval family and
    K its overlap constant, the route is

      (1) pointwise-to-norm:  |u'| <= sqrt(128) (T|u''|)^(1/2) (T|u|)^(1/2)
          on covered cells, so the Z norms compare the same way;
      (2) factorization:      ||(T|u''|)^(1/2) (T|u|)^(1/2)||_Z
                                <= ||T|u''|||_X^(1/2) ||T|u|||_Y^(1/2);
      (3) operator-x / operator-y:  ||T f||_X <= K ||f||_X and likewise in Y;
      (4) end-to-end: the composition of the three.

    Discrete cell means stand in for exact interval averages, so the two
    pointwise-based links carry a 2% cushion.  Z is X^(1/2) Y^(1/2).
    """
    if u.dim != 1:
        raise ConstructionError("the chained first-order route runs on 1D functions")
    z_space = cl_combine(x_space, y_space, Fraction(1, 2))
    if family is None:
        family = build_family_1d(u, default_k_min(u))
    cells = CellFamily.from_intervals(family.intervals, u.grid)
    f2 = np.abs(u.center_values(2))
    f0 = np.abs(u.center_values(0))
    t2 = apply_sparse_operator(cells, f2)
    t0 = apply_sparse_operator(cells, f0)
    covered = cells.counts() > 0
    geo = np.sqrt(t2 * t0)
    lhs_vec = np.where(covered, np.abs(u.center_values(1)), 0.0)
    mu = u.grid.h
    root = math.sqrt(POINTWISE_CONSTANT)

    denom = POINTWISE_CONSTANT * t2 * t0
    pw = np.zeros_like(denom)
    np.divide(lhs_vec**2, denom, out=pw, where=denom > 0.0)
    pointwise_max = float(np.max(pw)) if pw.size else 0.0

    links = []
    lhs1 = space_norm(z_space, lhs_vec, mu)
    rhs1 = root * space_norm(z_space, geo, mu)
    links.append(ChainLink("pointwise-to-norm", lhs1, rhs1, lhs1 <= rhs1 * (1.0 + CHAIN_SLACK)))

    lhs2, rhs2, ok2 = cl_factorization_check(
        z_space, x_space, y_space, geo, t2, t0, Fraction(1, 2), mu
    )
    links.append(ChainLink("factorization", lhs2, rhs2, ok2))

    lx, rx, K, okx = operator_norm_check(x_space, cells, f2)
    links.append(ChainLink("operator-x", lx, rx, okx))
    ly, ry, _, oky = operator_norm_check(y_space, cells, f0)
    links.append(ChainLink("operator-y", ly, ry, oky))

    rhs_end = root * K * math.sqrt(space_norm(x_space, f2, mu) * space_norm(y_space, f0, mu))
    links.append(ChainLink("end-to-end", lhs1, rhs_end, lhs1 <= rhs_end * (1.0 + CHAIN_SLACK)))

    return ChainReport(links=tuple(links), overlap=K, pointwise_max=pointwise_max)


# ---------------------------------------------------------------------------
# exponent algebra


def _coerce_index(value) -> Fraction:
    if isinstance(value, str):
        return parse_index(value)
    v = value if isinstance(value, Fraction) else Fraction(value)
    if v != INF and v < 1:
        raise AdmissibilityError(f"index {v} out of range [1, inf]")
    return v


def _solve_exponent(first: Fraction, second: Fraction, j: int, k: int) -> Fraction:
    rec = j * index_reciprocal(first) + (k - j) * index_reciprocal(second)
    return index_from_reciprocal(rec / k)


def lorentz_parameter_solve(P, p, Q, q, j: int, k: int):
    """Exact (R, r) with j/P + (k-j)/Q = k/R and j/p + (k-j)/q = k/r.

    Infinity enters as reciprocal zero (the INF sentinel, or the strings
    the descriptor grammar accepts).  A first index landing on an endpoint
    forces the secondary index to match, exactly as in the descriptor
    grammar; any other combination is inadmissible.
    """
    if not 1 <= j < k:
        raise AdmissibilityError(f"orders must satisfy 1 <= j < k, got ({j}, {k})")
    big = _solve_exponent(_coerce_index(P), _coerce_index(Q), j, k)
    small = _solve_exponent(_coerce_index(p), _coerce_index(q), j, k)
    if big == Fraction(1) and small != Fraction(1):
        raise AdmissibilityError(f"(R, r) = (1, {small}) is not an admissible Lorentz pair")
    if big == INF and small != INF:
        raise AdmissibilityError(f"(R, r) = (inf, {small}) is not an admissible Lorentz pair")
    return big, small


@dataclass(frozen=True)
class InductionResult:
    k: int
    ok: bool
    failures: tuple


def induction_identity_check(x_space: SpaceDescriptor, y_space: SpaceDescriptor, k: int) -> InductionResult:
    """Descriptor identities behind the reduction from order k to order k-1.

    With V = X^(1/k) Y^((k-1)/k):

      (A)  X^((k-1)/k) Y^(1/k)             =  X^((k-2)/(k-1)) V^(1/(k-1))
      (B)  X^((j-1)/(k-1)) V^((k-j)/(k-1)) =  X^(j/k) Y^((k-j)/k)   (1 < j < k-1)

    Both sides are assembled by repeated cl_combine and compared as
    descriptors (exact rationals; Orlicz through sampled inverses).
    Failures are reported with the offending parameters, not raised.
    """
    if k < 3:
        raise AdmissibilityError(f"the induction starts at k = 3, got {k}")
    failures = []
    inner = cl_combine(x_space, y_space, Fraction(1, k))
    lhs = cl_combine(x_space, y_space, Fraction(k - 1, k))
    rhs = cl_combine(x_space, inner, Fraction(k - 2, k - 1))
    if lhs != rhs:
        failures.append(f"step-down identity at k={k}: {lhs.format()} != {rhs.format()}")
    for j in range(2, k - 1):
        lhs_j = cl_combine(x_space, inner, Fraction(j - 1, k - 1))
        rhs_j = cl_combine(x_space, y_space, Fraction(j, k))
        if lhs_j != rhs_j:
            failures.append(
                f"intermediate identity at j={j}, k={k}: {lhs_j.format()} != {rhs_j.format()}"
            )
    return InductionResult(k=k, ok=not failures, failures=tuple(failures))


# ---------------------------------------------------------------------------
# corpus runner


@dataclass(frozen=True)
class RunLimits:
    """Verdict thresholds; the defaults are the proven constants."""

    max_overlap_1d: int = 3
    max_overlap_2d: int = 5
    pointwise_slack: float = 0.02


@dataclass
class CaseResult:
    case: GNCase
    z_text: str
    verdicts: tuple  # ordered (check-name, "pass" | "fail: ..." | "error") pairs
    report: GNReport = None
    overlap_max: int = None
    pointwise_max: float = None
    intervals: tuple = ()  # 1D escape intervals, when a family was built
    slabs: tuple = ()  # 2D slab sets, when a family was built
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and all(v == "pass" for _, v in self.verdicts)

    def first_failure(self):
        """(check-name, verdict) of the first non-pass entry, or None."""
        for name, verdict in self.verdicts:
            if verdict != "pass":
                return name, verdict
        return None


def _needs_family(checks) -> bool:
    return any(c in checks for c in ("overlap", "pointwise", "operator-norm", "modular"))


def _cells_for(case: GNCase, u, family) -> CellFamily:
    if case.dim == 1:
        return CellFamily.from_intervals(family.intervals, u.grid)
    labels = [(s.k, s.sign) for s in family.slabs]
    return CellFamily.from_masks([s.mask for s in family.slabs], labels, u.grid.cell_area)


def run_case(case: GNCase, checks, limits: RunLimits = None) -> CaseResult:
    """Execute the selected checks for one case; errors become verdicts."""
    limits = limits or RunLimits()
    selected = [c for c in CHECK_NAMES if c in checks]
    verdicts = []
    z_text = ""
    report = None
    overlap_max = None
    pointwise_max = None
    intervals = ()
    slabs = ()
    error = ""
    try:
        z_text = cl_combine(case.x_space, case.y_space, case.theta).format()
        u = family = rep2d = cells = None
        if _needs_family(selected):
            u = make_test_function(case.spec, grid_for_spec(case.spec, case.n), axis=case.axis)
            if case.dim == 1:
                family = build_family_1d(u, default_k_min(u))
                intervals = tuple(family.intervals)
            else:
                family = build_family_2d(u, axis=case.axis)
                slabs = tuple(family.slabs)
        for name in selected:
            if name == "overlap":
                counts, worst = overlap_profile(family)
                overlap_max = worst
                limit = limits.max_overlap_1d if case.dim == 1 else limits.max_overlap_2d
                if worst <= limit:
                    verdicts.append((name, "pass"))
                elif case.dim == 1:
                    node = int(np.argmax(counts))
                    x = float(family.nodes[node])
                    verdicts.append(
                        (name, f"fail: overlap {worst} > {limit} at node {node} (x={x!r})")
                    )
                else:
                    ix, iy = np.unravel_index(int(np.argmax(counts)), counts.shape)
                    verdicts.append(
                        (name, f"fail: overlap {worst} > {limit} at cell ({int(ix)}, {int(iy)})")
                    )
            elif name == "pointwise":
                if case.dim == 1:
                    _, max_ratio = verify_pointwise_1d(u, family)
                    pointwise_max = max_ratio
                    bound = POINTWISE_CONSTANT * (1.0 + limits.pointwise_slack)
                    if max_ratio <= bound:
                        verdicts.append((name, "pass"))
                    else:
                        verdicts.append(
                            (name, f"fail: pointwise ratio {max_ratio!r} exceeds {bound!r}")
                        )
                else:
                    if rep2d is None:
                        rep2d = verify_family_2d(u, family)
                    pointwise_max = rep2d.max_ratio
                    if math.isfinite(rep2d.max_ratio):
                        verdicts.append((name, "pass"))
                    else:
                        verdicts.append((name, "fail: pointwise ratio is not finite"))
            elif name == "operator-norm":
                if cells is None:
                    cells = _cells_for(case, u, family)
                f0 = np.abs(np.asarray(u.center_values(0), dtype=float)).ravel()
                f2 = np.abs(np.asarray(u.center_values(2), dtype=float)).ravel()
                bad = None
                for label, vec in (("|u''|", f2), ("|u|", f0)):
                    for sp in (_L1, _LINF):
                        lhs, rhs, _, ok = operator_norm_check(sp, cells, vec)
                        if not ok:
                            bad = f"fail: {sp.format()} of T{label}: {lhs!r} > {rhs!r}"
                            break
                    if bad:
                        break
                verdicts.append((name, bad or "pass"))
            elif name == "modular":
                if cells is None:
                    cells = _cells_for(case, u, family)
                f0 = np.abs(np.asarray(u.center_values(0), dtype=float)).ravel()
                bad = None
                for young in MODULAR_YOUNGS:
                    lhs, rhs, ok = modular_contraction_check(young, cells, f0)
                    if not ok:
                        bad = f"fail: modular of {young.describe()}: {lhs!r} > {rhs!r}"
                        break
                verdicts.append((name, bad or "pass"))
            elif name == "gn":
                report = gn_ratio(case)
                if math.isfinite(report.ratio) and report.stable:
                    verdicts.append((name, "pass"))
                else:
                    verdicts.append(
                        (name, f"fail: ratio {report.ratio!r} drifts {report.drift!r} under refinement")
                    )
            elif name == "induction":
                results = [
                    induction_identity_check(case.x_space, case.y_space, 3),
                    induction_identity_check(case.x_space, case.y_space, 4),
                ]
                bad = [msg for res in results if not res.ok for msg in res.failures]
                verdicts.append((name, f"fail: {bad[0]}" if bad else "pass"))
    except Exception as exc:  # recorded, never fatal to the run
        error = f"{type(exc).__name__}: {exc}"
        done = {n for n, _ in verdicts}
        for name in selected:
            if name not in done:
                verdicts.append((name, "error"))
    return CaseResult(
        case=case,
        z_text=z_text,
        verdicts=tuple(verdicts),
        report=report,
        overlap_max=overlap_max,
        pointwise_max=pointwise_max,
        intervals=intervals,
        slabs=slabs,
        error=error,
    )


def run_corpus(cases, checks, limits: RunLimits = None):
    """Ordered CaseResults, one per case; per-case failures are recorded.

    Cases are independent, so their order is the report order no matter
    how execution is scheduled; this runner keeps it sequential, which
    also makes reruns byte-for-byte reproducible.
    """
    checks = tuple(checks)
    unknown = [c for c in checks if c not in CHECK_NAMES]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    return [run_case(case, checks, limits) for case in cases]
