"""Liability networks: data model, validation and the section check."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping

from .lattice import (
    FLOAT, FLOAT_TOL, INF, RATIONAL, Interval, LatticeError, PaymentSpace,
    ProductSpace, principal_ideal,
)
from .specs import (
    IdentityCapped, JoinAll, LinearCapped, Proportional, Sum, SumCapped,
    TableAggregator, TableDistributor, TableEntryError,
)


class NetworkError(ValueError):
    """Structurally malformed network (unknown vertex, missing spec, ...)."""


class NetworkValidationError(NetworkError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"network fails validation:\n{lines}")


class SectionValueError(ValueError):
    """A proposed section value lies outside its stalk."""


def id_key(ident: str):
    """Sort key: numeric ids numerically, others lexicographically after them."""
    return (0, int(ident), "") if ident.isdigit() else (1, 0, ident)


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Violation:
    where: str
    law: str
    detail: str

    def __str__(self):
        return f"{self.where}: {self.law}: {self.detail}"


@dataclass(frozen=True)
class LiabilityNetwork:
    """Directed graph decorated with payment spaces, liabilities, exogenous
    resources, one distributor per edge and one aggregator per vertex.

    Vertices and edges are kept sorted by id.  Values must already be in the
    representation of ``backend`` (``Fraction`` or ``float``).
    """

    vertices: tuple
    edges: tuple
    spaces: Mapping[str, PaymentSpace]
    liability: Mapping[str, Any]
    exogenous: Mapping[str, Any]
    distributor: Mapping[str, Any]
    aggregator: Mapping[str, Any]
    backend: str = RATIONAL
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        verts = tuple(sorted((str(v) for v in self.vertices), key=id_key))
        edges = tuple(sorted((e if isinstance(e, Edge) else Edge(*map(str, e))
                              for e in self.edges), key=lambda e: id_key(e.id)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        if len(set(verts)) != len(verts):
            raise NetworkError("duplicate vertex ids")
        if len({e.id for e in edges}) != len(edges):
            raise NetworkError("duplicate edge ids")
        vs = set(verts)
        for e in edges:
            if e.source not in vs or e.target not in vs:
                raise NetworkError(f"edge {e.id} references an unknown vertex")
        for name, keys in (("spaces", vs), ("exogenous", vs), ("aggregator", vs),
                           ("liability", {e.id for e in edges}),
                           ("distributor", {e.id for e in edges})):
            got = set(getattr(self, name))
            if got != keys:
                missing, extra = sorted(keys - got), sorted(got - keys)
                raise NetworkError(f"{name}: missing {missing}, unexpected {extra}")
        if self.backend not in (RATIONAL, FLOAT):
            raise NetworkError(f"unknown backend {self.backend!r}")

    # -- derived structure --------------------------------------------------

    @cached_property
    def edge(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def incoming(self) -> dict:
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.target].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def outgoing(self) -> dict:
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def ideals(self) -> dict:
        """Payment-vertex stalks ``↓λ_e`` inside the debtor's space."""
        return {e.id: principal_ideal(self.spaces[e.source], self.liability[e.id])
                for e in self.edges}

    @property
    def tol(self) -> float:
        return 0 if self.backend == RATIONAL else FLOAT_TOL

    @property
    def state_space(self) -> ProductSpace:
        return ProductSpace(tuple(self.spaces[v] for v in self.vertices))

    @property
    def edge_space(self) -> ProductSpace:
        return ProductSpace(tuple(self.ideals[e.id] for e in self.edges))

    # -- local evaluation ---------------------------------------------------

    def distribute_edge(self, edge_id: str, x_source):
        e = self.edge[edge_id]
        return self.distributor[edge_id](x_source, self.spaces[e.source])

    def partial_aggregate(self, v: str, incoming: tuple):
        """``a_v = â_v(ι_v, ·)`` on the tuple of incoming payments (edge-id order)."""
        return self.aggregator[v](self.exogenous[v], tuple(incoming), self.spaces[v])

    def is_acyclic(self) -> bool:
        return find_cycle(self) is None

    def replace(self, **changes) -> "LiabilityNetwork":
        fields = dict(vertices=self.vertices, edges=self.edges, spaces=self.spaces,
                      liability=self.liability, exogenous=self.exogenous,
                      distributor=self.distributor, aggregator=self.aggregator,
                      backend=self.backend, metadata=self.metadata)
        fields.update(changes)
        return LiabilityNetwork(**fields)


def find_cycle(net: LiabilityNetwork) -> list | None:
    """One directed cycle as a vertex list ``[v0, ..., v0]``, or None."""
    color = {v: 0 for v in net.vertices}
    stack: list = []

    def visit(v):
        color[v] = 1
        stack.append(v)
        for e in net.outgoing[v]:
            w = e.target
            if color[w] == 1:
                return stack[stack.index(w):] + [w]
            if color[w] == 0:
                found = visit(w)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in net.vertices:
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    return None


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def _sample_points(space: Interval, extra=()) -> list:
    pts = {space.lo, space.hi}
    pts.update(p for p in extra if p is not None and space.contains(p))
    ref = max(p for p in pts if p != INF)
    if space.hi == INF:
        pts.update((ref + 1, 2 * ref + 1, 10 * ref + 10))
    pts.add((space.lo + ref) / 2)
    return sorted(pts)


def _check_distributor(net: LiabilityNetwork, e, out: list) -> None:
    where = f"edge {e.id}"
    spec = net.distributor[e.id]
    src = net.spaces[e.source]
    ideal = net.ideals[e.id]
    numeric = isinstance(src, Interval)
    if isinstance(spec, (Proportional, LinearCapped)) and not numeric:
        out.append(Violation(where, "kind-mismatch",
                             f"{spec.kind} distributor on non-interval space {src}"))
        return
    if isinstance(spec, Proportional) and (spec.total < 0 or spec.cap < 0):
        out.append(Violation(where, "non-monotone", "proportional rate is negative"))
        return
    if isinstance(spec, LinearCapped) and spec.slope < 0:
        out.append(Violation(where, "non-monotone", "linear slope is negative"))
        return
    if isinstance(spec, IdentityCapped) and not src.contains(spec.cap):
        out.append(Violation(where, "kind-mismatch", f"cap {spec.cap!r} not in {src}"))
        return
    if src.is_finite:
        domain = src.enumerate()
    elif isinstance(spec, TableDistributor):
        out.append(Violation(where, "table-not-total", f"table on infinite space {src}"))
        return
    else:
        kinks = []
        if isinstance(spec, Proportional) and spec.cap:
            kinks.append(spec.total)
        elif isinstance(spec, LinearCapped) and spec.slope and spec.cap != INF:
            kinks.append(spec.cap / spec.slope)
        elif isinstance(spec, IdentityCapped):
            kinks.append(spec.cap)
        domain = _sample_points(src, kinks + [net.liability[e.id]])
    try:
        image = [spec(x, src) for x in domain]
    except TableEntryError as exc:
        out.append(Violation(where, "table-not-total", str(exc)))
        return
    except LatticeError as exc:
        out.append(Violation(where, "kind-mismatch", str(exc)))
        return
    for x, y in zip(domain, image):
        if not ideal.contains(y):
            out.append(Violation(where, "codomain-breach",
                                 f"d({x!r}) = {y!r} is not below the liability"))
            return
    for (x1, y1), (x2, y2) in itertools.product(zip(domain, image), repeat=2):
        if src.leq(x1, x2) and not ideal.leq(y1, y2):
            out.append(Violation(where, "non-monotone",
                                 f"{x1!r} <= {x2!r} but d gives {y1!r} > {y2!r}"))
            return


def _check_aggregator(net: LiabilityNetwork, v, out: list) -> None:
    where = f"vertex {v}"
    spec = net.aggregator[v]
    space = net.spaces[v]
    ins = net.incoming[v]
    ideals = [net.ideals[e.id] for e in ins]
    if isinstance(spec, (Sum, SumCapped)):
        bad = [str(s) for s in [space, *ideals] if not isinstance(s, Interval)]
        if bad:
            out.append(Violation(where, "kind-mismatch",
                                 f"{spec.kind} aggregator over non-interval spaces {bad}"))
            return
    if isinstance(spec, JoinAll):
        for e, ideal in zip(ins, ideals):
            parent = net.spaces[e.source]
            if isinstance(space, Interval) and isinstance(parent, Interval):
                if not (space.contains(ideal.lo) and space.contains(ideal.hi)):
                    out.append(Violation(where, "codomain-breach",
                                         f"payments on {e.id} range outside {space}"))
                    return
            elif parent != space:
                out.append(Violation(where, "kind-mismatch",
                                     f"join over edge {e.id} from a different space"))
                return
    if all(i.is_finite for i in ideals):
        domain = list(itertools.product(*(i.enumerate() for i in ideals)))
    elif isinstance(spec, TableAggregator):
        out.append(Violation(where, "table-not-total", "table over an infinite domain"))
        return
    else:
        # closed forms are monotone; extreme corners bound the range
        domain = [tuple(i.bottom() for i in ideals), tuple(i.top() for i in ideals)]
    try:
        image = [net.partial_aggregate(v, p) for p in domain]
    except TableEntryError as exc:
        out.append(Violation(where, "table-not-total", str(exc)))
        return
    except LatticeError as exc:
        out.append(Violation(where, "kind-mismatch", str(exc)))
        return
    for p, y in zip(domain, image):
        if not space.contains(y):
            out.append(Violation(where, "codomain-breach",
                                 f"a{p!r} = {y!r} lies outside {space}"))
            return
    dom = ProductSpace(tuple(ideals))
    for (p1, y1), (p2, y2) in itertools.product(zip(domain, image), repeat=2):
        if dom.leq(p1, p2) and not space.leq(y1, y2):
            out.append(Violation(where, "non-monotone",
                                 f"{p1!r} <= {p2!r} but a gives {y1!r} > {y2!r}"))
            return


def validate_network(net: LiabilityNetwork) -> list[Violation]:
    """All violated laws; empty iff the network is a valid liability network."""
    out: list[Violation] = []
    ok_edges = []
    for e in net.edges:
        if not net.spaces[e.source].contains(net.liability[e.id]):
            out.append(Violation(f"edge {e.id}", "liability-outside-space",
                                 f"{net.liability[e.id]!r} not in {net.spaces[e.source]}"))
        else:
            ok_edges.append(e)
    for v in net.vertices:
        if not net.spaces[v].contains(net.exogenous[v]):
            out.append(Violation(f"vertex {v}", "exogenous-outside-space",
                                 f"{net.exogenous[v]!r} not in {net.spaces[v]}"))
    if out:
        return out
    for e in ok_edges:
        _check_distributor(net, e, out)
    for v in net.vertices:
        _check_aggregator(net, v, out)
    return out


def check_network(net: LiabilityNetwork) -> LiabilityNetwork:
    """Return ``net`` unchanged, or raise :class:`NetworkValidationError`."""
    if not isinstance(net, LiabilityNetwork):
        raise TypeError(f"expected a LiabilityNetwork, got {type(net).__name__}")
    violations = validate_network(net)
    if violations:
        raise NetworkValidationError(violations)
    return net


def check_state(net: LiabilityNetwork, x: Mapping) -> dict:
    """Validate an institution state and return it as a plain dict."""
    if set(x) != set(net.vertices):
        raise SectionValueError(f"state must assign every vertex {list(net.vertices)}")
    for v in net.vertices:
        if not net.spaces[v].contains(x[v]):
            raise SectionValueError(f"x[{v}] = {x[v]!r} is outside {net.spaces[v]}")
    return {v: x[v] for v in net.vertices}


def check_payments(net: LiabilityNetwork, p: Mapping) -> dict:
    if set(p) != {e.id for e in net.edges}:
        raise SectionValueError("payments must assign every edge")
    for e in net.edges:
        if not net.ideals[e.id].contains(p[e.id]):
            raise SectionValueError(f"p[{e.id}] = {p[e.id]!r} exceeds its liability")
    return {e.id: p[e.id] for e in net.edges}


def check_section(net: LiabilityNetwork, x: Mapping, p: Mapping, tol: float | None = None) -> bool:
    """Do ``p_e = d_e(x_s(e))`` and ``x_v = a_v((p_e)_{t(e)=v})`` hold everywhere?

    Equality is exact under the rational backend and within ``tol``
    (default ``FLOAT_TOL``) under floats.
    """
    x = check_state(net, x)
    p = check_payments(net, p)
    if tol is None:
        tol = net.tol
    for e in net.edges:
        if not net.ideals[e.id].equal(p[e.id], net.distribute_edge(e.id, x[e.source]), tol):
            return False
    for v in net.vertices:
        got = net.partial_aggregate(v, tuple(p[e.id] for e in net.incoming[v]))
        if not net.spaces[v].equal(x[v], got, tol):
            return False
    return True
