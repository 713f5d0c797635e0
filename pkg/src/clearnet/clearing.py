"""Clearing operator ``Φ = A∘D``, its edge-side dual ``D∘A``, and solvers.

States are dicts: institution states map vertex ids to values, edge states
map edge ids to payments.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .lattice import INF, RATIONAL, LatticeError, MetricSpec, distance, is_number
from .network import LiabilityNetwork, check_payments, check_state, find_cycle
from .specs import is_capped

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 10_000
DEFAULT_TOL = 1e-9

LEAST = "least"
GREATEST = "greatest"
UNIQUE = "unique"
UNKNOWN = "unknown"


class SolverError(RuntimeError):
    """A solver's precondition does not hold for this network."""


class CyclicNetworkError(SolverError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("network has a directed cycle " + " -> ".join(self.cycle))


class NotAFixedPointError(ValueError):
    pass


@dataclass
class ClearingSection:
    x: dict
    p: dict


@dataclass
class SolveReport:
    solver: str
    iterations: int
    converged: bool
    extremality: str = UNKNOWN
    diverged: bool = False
    residual: object = None
    lipschitz: object = None
    saturated: dict | None = None
    trace: list = field(default_factory=list, repr=False)


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------

def distribute(net: LiabilityNetwork, x: Mapping) -> dict:
    """Collective distribution ``D(x)_e = d_e(x_s(e))``."""
    return {e.id: net.distribute_edge(e.id, x[e.source]) for e in net.edges}


def aggregate(net: LiabilityNetwork, p: Mapping) -> dict:
    """Collective aggregation ``A(p)_v = a_v((p_e)_{t(e)=v})``."""
    return {v: net.partial_aggregate(v, tuple(p[e.id] for e in net.incoming[v]))
            for v in net.vertices}


def phi(net: LiabilityNetwork, x: Mapping) -> dict:
    return aggregate(net, distribute(net, x))


def phi_dual(net: LiabilityNetwork, p: Mapping) -> dict:
    return distribute(net, aggregate(net, p))


def states_equal(net: LiabilityNetwork, x: Mapping, y: Mapping, tol: float | None = None) -> bool:
    tol = net.tol if tol is None else tol
    return all(net.spaces[v].equal(x[v], y[v], tol) for v in net.vertices)


def state_leq(net: LiabilityNetwork, x: Mapping, y: Mapping) -> bool:
    return all(net.spaces[v].leq(x[v], y[v]) for v in net.vertices)


def _gap(net, x, y):
    """Largest coordinate difference (numeric) or 1 for unequal finite values."""
    worst = 0
    for v in net.vertices:
        a, b = x[v], y[v]
        if a == b:
            continue
        if is_number(a) and is_number(b) and INF not in (a, b):
            worst = max(worst, abs(a - b))
        else:
            return INF
    return worst


def bottom_state(net: LiabilityNetwork) -> dict:
    return {v: net.spaces[v].bottom() for v in net.vertices}


def top_state(net: LiabilityNetwork) -> dict:
    return {v: net.spaces[v].top() for v in net.vertices}


def _section(net, x) -> ClearingSection:
    return ClearingSection(dict(x), distribute(net, x))


# --------------------------------------------------------------------------
# Kleene iteration
# --------------------------------------------------------------------------

def _require_lattices(net):
    bad = [v for v in net.vertices if not net.spaces[v].is_lattice]
    if bad:
        raise SolverError(f"payment spaces of {bad} are not complete lattices")


def _kleene(net, x, solver, label, max_iter, tol, record, ascending):
    trace = [dict(x)] if record else []
    prev = None
    for it in range(1, max_iter + 1):
        y = phi(net, x)
        if record:
            trace.append(y)
        if states_equal(net, x, y):
            return _section(net, x), SolveReport(solver, it, True, label, trace=trace,
                                                 residual=_gap(net, x, y))
        if net.backend != RATIONAL and _gap(net, x, y) <= tol:
            return _section(net, x), SolveReport(solver, it, True, UNKNOWN, trace=trace,
                                                 residual=_gap(net, x, y))
        prev, x = x, y
    if ascending:
        monotone = state_leq(net, prev, x)
    else:
        monotone = state_leq(net, x, prev)
    report = SolveReport(solver, max_iter, False, UNKNOWN, diverged=monotone,
                         residual=_gap(net, prev, x), trace=trace)
    if monotone and ascending:
        report.saturated = _saturate(net, prev, x)
    log.info("%s: budget of %d exhausted (diverging=%s)", solver, max_iter, monotone)
    return _section(net, x), report


def _saturate(net, prev, x):
    """Push still-rising coordinates to their top; keep the state if it is a section."""
    sat = dict(x)
    for v in net.vertices:
        if not net.spaces[v].equal(prev[v], x[v]):
            try:
                sat[v] = net.spaces[v].top()
            except LatticeError:
                return None
    return sat if states_equal(net, phi(net, sat), sat) else None


def kleene_least(net: LiabilityNetwork, max_iter: int = DEFAULT_MAX_ITER,
                 tol: float = DEFAULT_TOL, record: bool = False):
    """Ascending iteration ``⊥, Φ(⊥), Φ²(⊥), ...`` to the least clearing section.

    Exact stabilization labels the result ``least``.  Under floats a step
    smaller than ``tol`` also stops, labelled ``unknown``.  If the budget runs
    out on a rising chain the report is flagged ``diverged`` and, when the
    rising coordinates saturated to their tops form a section, that state is
    returned in ``report.saturated``.
    """
    _require_lattices(net)
    return _kleene(net, bottom_state(net), "kleene_least", LEAST, max_iter, tol, record, True)


def kleene_greatest(net: LiabilityNetwork, max_iter: int = DEFAULT_MAX_ITER,
                    tol: float = DEFAULT_TOL, record: bool = False,
                    assume_filtered_infima: bool = False):
    """Descending iteration from ``⊤`` to the greatest clearing section.

    Vertices with an infinite top must have a capped aggregator (so the first
    step lands in a bounded box) unless the caller vouches for the operator
    via ``assume_filtered_infima``.
    """
    _require_lattices(net)
    if not assume_filtered_infima:
        open_top = [v for v in net.vertices
                    if net.spaces[v].top() == INF and not is_capped(net.aggregator[v], net.spaces[v])]
        if open_top:
            raise SolverError(
                f"descending iteration from an infinite top at {open_top} needs capped "
                "aggregators (pass assume_filtered_infima=True to override)")
    return _kleene(net, top_state(net), "kleene_greatest", GREATEST, max_iter, tol, record, False)


# --------------------------------------------------------------------------
# acyclic propagation
# --------------------------------------------------------------------------

def longest_path(net: LiabilityNetwork) -> int:
    cycle = find_cycle(net)
    if cycle:
        raise CyclicNetworkError(cycle)
    level: dict = {}

    def lv(v):
        if v not in level:
            level[v] = max((lv(e.source) + 1 for e in net.incoming[v]), default=0)
        return level[v]

    return max((lv(v) for v in net.vertices), default=0)


def default_seed(net: LiabilityNetwork) -> dict:
    """Bottom where a space has one, otherwise its first listed element."""
    seed = {}
    for v in net.vertices:
        space = net.spaces[v]
        seed[v] = space.bottom() if space.is_lattice else space.enumerate()[0]
    return seed


def acyclic_solve(net: LiabilityNetwork, seed: Mapping | None = None, record: bool = False):
    """Apply ``Φ`` exactly ``r + 1`` times, ``r`` the longest path length.

    On an acyclic graph the result does not depend on the seed and is the
    unique clearing section.  No order or metric is used.
    """
    r = longest_path(net)
    x = default_seed(net) if seed is None else check_state(net, seed)
    trace = [dict(x)] if record else []
    for _ in range(r + 1):
        x = phi(net, x)
        if record:
            trace.append(x)
    return _section(net, x), SolveReport("acyclic", r + 1, True, UNIQUE, trace=trace)


# --------------------------------------------------------------------------
# Banach iteration
# --------------------------------------------------------------------------

def lipschitz_bound(net: LiabilityNetwork, metric: MetricSpec | None = None):
    """``max_w Σ_{s(e)=w} L_{t(e),e} k_e`` from structural constants, or None.

    The constants are for the absolute-value distance on intervals; any spec
    without one (tables, joins) makes the bound unavailable.
    """
    metric = metric or MetricSpec()
    if metric.interval not in ("abs", None):
        return None
    best = 0
    for w in net.vertices:
        total = 0
        for e in net.outgoing[w]:
            k = net.distributor[e.id].lipschitz
            lip = net.aggregator[e.target].lipschitz
            if k is None or lip is None:
                return None
            total = total + lip * k
        best = max(best, total)
    return best


def _state_distance(net, metric, x, y):
    total = 0
    for v in net.vertices:
        total = total + distance(metric, net.spaces[v], x[v], y[v])
    return total


def _solve_exact(a: list, b: list) -> list | None:
    """Gaussian elimination over Fractions; None when singular."""
    n = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a_ - f * c for a_, c in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def affine_refine(net: LiabilityNetwork, x: Mapping) -> dict | None:
    """Exact fixed point of the affine piece of ``Φ`` active at ``x``.

    Every closed-form numeric spec is piecewise affine.  Freezing the branch
    each ``min`` takes at ``x`` gives a linear system ``y = My + c`` solved in
    exact arithmetic.  The candidate is returned only if ``Φ`` fixes it.
    """
    if any(v == INF for v in x.values()):
        return None
    idx = {v: i for i, v in enumerate(net.vertices)}
    n = len(idx)
    p = distribute(net, x)
    a = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    c = [Fraction(0)] * n
    try:
        for v in net.vertices:
            piece = net.aggregator[v].affine_piece(
                net.exogenous[v], tuple(p[e.id] for e in net.incoming[v]))
            if piece is None:
                return None
            tag, const = piece
            if tag == "const":
                c[idx[v]] = Fraction(const)
                continue
            c[idx[v]] = Fraction(const)
            for e in net.incoming[v]:
                dp = net.distributor[e.id].affine_piece(x[e.source])
                if dp is None:
                    return None
                slope, intercept = dp
                a[idx[v]][idx[e.source]] -= Fraction(slope)
                c[idx[v]] += Fraction(intercept)
    except (TypeError, ValueError, OverflowError):
        return None
    sol = _solve_exact(a, c)
    if sol is None:
        return None
    cand = {v: sol[idx[v]] for v in net.vertices}
    if not all(net.spaces[v].contains(cand[v]) for v in net.vertices):
        return None
    return cand if states_equal(net, phi(net, cand), cand, tol=0) else None


def banach_solve(net: LiabilityNetwork, metric: MetricSpec | None = None,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 seed: Mapping | None = None, lipschitz=None, record: bool = False):
    """Picard iteration with an a-posteriori stopping rule.

    With a contraction constant ``k < 1`` (given, or from
    :func:`lipschitz_bound`) iteration stops once a step is below
    ``tol * (1 - k) / k``, which bounds the true error by ``tol``.  Under the
    rational backend the stopped iterate is then snapped to the exact fixed
    point of the active affine piece when one exists; otherwise the result is
    only tol-accurate and is reported as not converged, since it is not an
    exact section.
    """
    metric = metric or MetricSpec()
    k = lipschitz_bound(net, metric) if lipschitz is None else lipschitz
    certified = k is not None and k < 1
    if certified and k > 0:
        threshold = tol * (1 - k) / k
    else:
        threshold = tol
    x = default_seed(net) if seed is None else check_state(net, seed)
    trace = [dict(x)] if record else []
    label = UNIQUE if certified else UNKNOWN
    for it in range(max_iter + 1):
        y = phi(net, x)
        step = _state_distance(net, metric, x, y)
        if step == 0:
            return _section(net, x), SolveReport("banach", it, True, label, residual=0,
                                                 lipschitz=k, trace=trace)
        if it == max_iter:
            break
        if record:
            trace.append(y)
        if step < threshold:
            x = y
            if net.backend == RATIONAL:
                exact = affine_refine(net, x)
                if exact is not None:
                    if record:
                        trace.append(exact)
                    return _section(net, exact), SolveReport(
                        "banach", it + 1, True, label, residual=0, lipschitz=k, trace=trace)
                return _section(net, x), SolveReport(
                    "banach", it + 1, False, UNKNOWN, lipschitz=k, trace=trace,
                    residual=_state_distance(net, metric, x, phi(net, x)))
            residual = _state_distance(net, metric, x, phi(net, x))
            return _section(net, x), SolveReport("banach", it + 1, True, label,
                                                 residual=residual, lipschitz=k, trace=trace)
        x = y
    return _section(net, x), SolveReport("banach", max_iter, False, UNKNOWN, residual=step,
                                         lipschitz=k, trace=trace)


# --------------------------------------------------------------------------
# exhaustive oracle and duality transport
# --------------------------------------------------------------------------

def enumerate_sections(net: LiabilityNetwork) -> list[ClearingSection]:
    """Every clearing section, by brute force over all institution states."""
    bad = [v for v in net.vertices if not net.spaces[v].is_finite]
    if bad:
        raise SolverError(f"cannot enumerate: spaces of {bad} are infinite")
    out = []
    for values in itertools.product(*(net.spaces[v].enumerate() for v in net.vertices)):
        x = dict(zip(net.vertices, values))
        if states_equal(net, phi(net, x), x):
            out.append(_section(net, x))
    return out


def extreme_section(net: LiabilityNetwork, sections: Sequence[ClearingSection],
                    greatest: bool = False) -> ClearingSection | None:
    """The coordinatewise least (or greatest) member, if one exists."""
    for s in sections:
        if all((state_leq(net, t.x, s.x) if greatest else state_leq(net, s.x, t.x))
               for t in sections):
            return s
    return None


def transport_to_edges(net: LiabilityNetwork, x: Mapping) -> dict:
    """``D`` restricted to fixed points of ``Φ``: lands on fixed points of ``D∘A``."""
    x = check_state(net, x)
    if not states_equal(net, phi(net, x), x):
        raise NotAFixedPointError("state is not a fixed point of the clearing operator")
    return distribute(net, x)


def transport_to_institutions(net: LiabilityNetwork, p: Mapping) -> dict:
    """``A`` restricted to fixed points of ``D∘A``."""
    p = check_payments(net, p)
    q = phi_dual(net, p)
    if not all(net.ideals[e.id].equal(p[e.id], q[e.id], net.tol) for e in net.edges):
        raise NotAFixedPointError("payments are not a fixed point of the edge-side operator")
    return aggregate(net, p)
