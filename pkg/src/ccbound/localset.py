"""Locality of finite correlations: deterministic strategies, CHSH-type
facets, and local-weight maximization by linear programming.

Membership in the local polytope is decided with a single dense LP that
maximizes the local content q: the largest q such that the correlation
splits as q * (mixture of deterministic strategies) + (1-q) * remainder
with a nonnegative remainder.  Because every deterministic strategy is
nonsignaling, the remainder of a nonsignaling correlation is automatically
a valid nonsignaling correlation, and q = 1 exactly when the correlation
is local.  The LP has only inequality rows with nonnegative right-hand
sides, so the slack basis is feasible and no phase-1 step is ever needed.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .correlations import Correlation, CorrelationError, CorrelatorForm, Scenario, to_correlators

VERTEX_GUARD = 10**6

MEMBERSHIP_ATOL = 1e-9


class LPError(RuntimeError):
    """The LP solver failed numerically (distinct from a 'nonlocal' verdict)."""


class VertexGuardError(ValueError):
    """The deterministic-strategy count exceeds the enumeration guard."""


@dataclass(frozen=True)
class DeterministicVertex:
    """A product deterministic strategy a(x), b(y) and its correlation."""

    alice_outputs: tuple
    bob_outputs: tuple
    correlation: Correlation


@dataclass(frozen=True)
class FacetValue:
    """A CHSH-type facet expression value for one ordered index pair."""

    x0: int
    x1: int
    y0: int
    y1: int
    value: float


def _vertex_count(scenario: Scenario) -> int:
    return scenario.k_a**scenario.n_a * scenario.k_b**scenario.n_b


def _check_guard(scenario: Scenario) -> None:
    count = _vertex_count(scenario)
    if count > VERTEX_GUARD:
        raise VertexGuardError(
            f"{count} deterministic strategies exceed the guard of {VERTEX_GUARD}"
        )


def enumerate_vertices(scenario: Scenario) -> list[DeterministicVertex]:
    """All k_a^n_a * k_b^n_b product deterministic strategies, in a fixed order.

    Alice assignments iterate in the outer loop, Bob assignments in the
    inner loop, each in lexicographic order of the output tuples.
    """
    _check_guard(scenario)
    vertices = []
    for a_out in itertools.product(range(scenario.k_a), repeat=scenario.n_a):
        for b_out in itertools.product(range(scenario.k_b), repeat=scenario.n_b):
            table = np.zeros(scenario.table_shape)
            for x in range(scenario.n_a):
                for y in range(scenario.n_b):
                    table[a_out[x], b_out[y], x, y] = 1.0
            vertices.append(
                DeterministicVertex(a_out, b_out, Correlation(scenario, table))
            )
    return vertices


@functools.lru_cache(maxsize=32)
def vertex_matrix(scenario: Scenario) -> np.ndarray:
    """Dense matrix whose columns are the raveled vertex tables.

    Row order matches Correlation.table.ravel(); column order matches
    enumerate_vertices.
    """
    _check_guard(scenario)
    count = _vertex_count(scenario)
    rows = scenario.k_a * scenario.k_b * scenario.n_a * scenario.n_b
    mat = np.zeros((rows, count))
    col = 0
    for a_out in itertools.product(range(scenario.k_a), repeat=scenario.n_a):
        for b_out in itertools.product(range(scenario.k_b), repeat=scenario.n_b):
            table = np.zeros(scenario.table_shape)
            for x in range(scenario.n_a):
                for y in range(scenario.n_b):
                    table[a_out[x], b_out[y], x, y] = 1.0
            mat[:, col] = table.ravel()
            col += 1
    mat.setflags(write=False)
    return mat


def facet_values(form: CorrelatorForm) -> list[FacetValue]:
    """CHSH-type facet expressions for every ordered pair x0 != x1, y0 != y1.

    S = <A_x0 B_y0> + <A_x0 B_y1> + <A_x1 B_y0> - <A_x1 B_y1>.  A binary
    correlation in the three- and four-setting scenarios studied here is
    local exactly when all |S| <= 2.
    """
    co = form.correlators
    n_a, n_b = co.shape
    values = []
    for x0, x1 in itertools.permutations(range(n_a), 2):
        for y0, y1 in itertools.permutations(range(n_b), 2):
            s = co[x0, y0] + co[x0, y1] + co[x1, y0] - co[x1, y1]
            values.append(FacetValue(x0, x1, y0, y1, float(s)))
    return values


def local_visibility(theta: float) -> float:
    """Visibility threshold 1/(cos theta + sin theta) below which the
    theta-protocol correlation is local."""
    if not 0.0 < theta < math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2), got {theta!r}")
    return 1.0 / (math.cos(theta) + math.sin(theta))


@dataclass(frozen=True)
class LocalityResult:
    """Verdict of the local-polytope membership LP."""

    is_local: bool
    local_content: float
    weights: np.ndarray | None  # vertex weights when local, in vertex order
    witness: FacetValue | None  # maximal violated CHSH-type facet when nonlocal


def _local_content_lp(corr: Correlation) -> tuple[float, np.ndarray]:
    """Maximal q with corr >= q * (convex mixture of vertices), entrywise.

    Returns (q, m) where m are the unnormalized vertex weights summing to q.
    """
    _check_guard(corr.scenario)
    mat = vertex_matrix(corr.scenario)
    b = corr.table.ravel().copy()
    obj = np.ones(mat.shape[1])
    status, q, m = kernels.simplex_maximize(mat, b, obj, 1e-11, 20000)
    if status != kernels.SIMPLEX_OPTIMAL:
        raise LPError(f"simplex did not reach an optimum (status {status})")
    if not -1e-9 <= q <= 1.0 + 1e-9:
        raise LPError(f"local content {q!r} outside [0, 1]; LP is inconsistent")
    return float(q), m


def is_local_lp(corr: Correlation, atol: float = MEMBERSHIP_ATOL) -> LocalityResult:
    """Decide membership in the local polytope by linear programming.

    Local verdicts come with vertex weights reproducing the correlation;
    nonlocal verdicts on binary scenarios come with the maximally violated
    CHSH-type facet as a witness (first by index order on ties).
    """
    q, m = _local_content_lp(corr)
    if q >= 1.0 - atol:
        return LocalityResult(True, q, m, None)
    witness = None
    if corr.scenario.binary:
        worst = None
        for facet in facet_values(to_correlators(corr)):
            if worst is None or abs(facet.value) > abs(worst.value) + 1e-15:
                worst = facet
        if worst is not None and abs(worst.value) > 2.0:
            witness = worst
    return LocalityResult(False, q, None, witness)


@dataclass(frozen=True)
class NSLocalWeight:
    """Maximal-q decomposition corr = q*local + (1-q)*nonsignaling rest."""

    q: float
    weights: np.ndarray
    local: Correlation | None
    rest: Correlation | None


def max_local_weight_ns(corr: Correlation) -> NSLocalWeight:
    """Largest q such that corr = q*p_local + (1-q)*p_ns with p_ns nonsignaling.

    Single LP over vertex weights; the remainder corr - q*p_local is
    automatically nonsignaling whenever corr is.
    """
    q, m = _local_content_lp(corr)
    q = min(max(q, 0.0), 1.0)
    mat = vertex_matrix(corr.scenario)
    local_flat = mat @ m
    local = None
    rest = None
    if q > 1e-12:
        local_table = (local_flat / q).reshape(corr.scenario.table_shape)
        local = Correlation(corr.scenario, np.clip(local_table, 0.0, None))
    if q < 1.0 - 1e-12:
        rest_flat = (corr.table.ravel() - local_flat) / (1.0 - q)
        if rest_flat.min() < -1e-8:
            raise LPError(f"LP remainder has negative mass {rest_flat.min()!r}")
        rest_table = np.clip(rest_flat, 0.0, None).reshape(corr.scenario.table_shape)
        # renormalize away simplex rounding before the 1e-12 construction check
        rest_table = rest_table / rest_table.sum(axis=(0, 1), keepdims=True)
        rest = Correlation(corr.scenario, rest_table)
    return NSLocalWeight(q, m, local, rest)


@dataclass(frozen=True)
class SegmentLocalWeight:
    """Maximal q with corr = q*p_local + (1-q)*target along a fixed target."""

    q: float
    local: Correlation | None
    on_segment: bool  # False when no local decomposition along the target exists


def _segment_point(corr: Correlation, target: Correlation, q: float) -> Correlation | None:
    """(corr - (1-q)*target)/q as a Correlation, or None when invalid."""
    table = (corr.table - (1.0 - q) * target.table) / q
    if table.min() < -1e-12:
        return None
    table = np.clip(table, 0.0, None)
    try:
        return Correlation(corr.scenario, table)
    except CorrelationError:
        return None


def max_local_weight_along(
    corr: Correlation, target: Correlation, tol: float = 1e-8, scan_points: int = 96
) -> SegmentLocalWeight:
    """Maximize q such that (corr - (1-q)*target)/q is a local correlation.

    The candidate local component traces a ray from corr away from target as
    q decreases, so the feasible q form an interval; its upper endpoint is
    located by a geometric scan (the ray leaves the nonnegative orthant at a
    computable q, which bounds the scan) followed by bisection to ``tol``.
    """
    if corr.scenario != target.scenario:
        raise CorrelationError("correlation and target live on different scenarios")
    if corr.allclose(target, atol=1e-12):
        if is_local_lp(corr).is_local:
            return SegmentLocalWeight(1.0, corr, True)
        return SegmentLocalWeight(0.0, None, True)
    if is_local_lp(corr).is_local:
        return SegmentLocalWeight(1.0, corr, True)

    # validity bound: p(u) = target + u*(corr - target) with u = 1/q stays
    # nonnegative up to u_valid
    diff = corr.table.ravel() - target.table.ravel()
    tgt = target.table.ravel()
    with np.errstate(divide="ignore"):
        limits = np.where(diff < -1e-15, tgt / -diff, np.inf)
    u_valid = float(min(limits.min(), 1e12))
    if u_valid <= 1.0:
        u_valid = 1.0

    def feasible(q: float) -> bool:
        point = _segment_point(corr, target, q)
        return point is not None and is_local_lp(point).is_local

    # ascending log-spaced scan in u = 1/q; the first feasible point brackets
    # the upper q endpoint together with the previous (infeasible) point
    us = np.geomspace(1.0, u_valid, num=scan_points) if u_valid > 1.0 else np.array([1.0])
    q_feasible = None
    q_infeasible = 1.0  # corr itself is nonlocal here
    for u in us[1:]:
        q = 1.0 / float(u)
        if feasible(q):
            q_feasible = q
            break
        q_infeasible = q
    if q_feasible is None:
        return SegmentLocalWeight(0.0, None, False)

    lo, hi = q_feasible, q_infeasible
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return SegmentLocalWeight(lo, _segment_point(corr, target, lo), True)
