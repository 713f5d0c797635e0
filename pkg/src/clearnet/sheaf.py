"""The liability hypergraph and the liability sheaf on it.

Each institution ``v`` gets a distribution hyperedge ``{v} -> {e* : s(e)=v}``
and a collection hyperedge ``{} -> {e* : t(e)=v} + {v}``; every edge ``e``
becomes a payment vertex ``e*``.  Global sections of the sheaf are exactly
clearing sections.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, NamedTuple

from .lattice import PaymentSpace, ProductSpace
from .network import LiabilityNetwork

INSTITUTION = "institution"
PAYMENT = "payment"
DISTRIBUTION = "distribution"
COLLECTION = "collection"


class Node(NamedTuple):
    kind: str
    id: str

    def __str__(self):
        return self.id if self.kind == INSTITUTION else f"{self.id}*"


@dataclass(frozen=True)
class Hyperedge:
    kind: str
    institution: str
    sources: tuple
    targets: tuple

    def __str__(self):
        tag = "dis" if self.kind == DISTRIBUTION else "col"
        return f"h[{tag}]{self.institution}"


@dataclass(frozen=True)
class LiabilityHypergraph:
    institutions: tuple
    payments: tuple
    hyperedges: tuple

    @property
    def nodes(self) -> tuple:
        return self.institutions + self.payments

    def hyperedge(self, kind: str, v: str) -> Hyperedge:
        return next(h for h in self.hyperedges if h.kind == kind and h.institution == v)


def build_hypergraph(net: LiabilityNetwork) -> LiabilityHypergraph:
    institutions = tuple(Node(INSTITUTION, v) for v in net.vertices)
    payments = tuple(Node(PAYMENT, e.id) for e in net.edges)
    hyperedges = []
    for v in net.vertices:
        hyperedges.append(Hyperedge(
            DISTRIBUTION, v, (Node(INSTITUTION, v),),
            tuple(Node(PAYMENT, e.id) for e in net.outgoing[v])))
        hyperedges.append(Hyperedge(
            COLLECTION, v, (),
            tuple(Node(PAYMENT, e.id) for e in net.incoming[v]) + (Node(INSTITUTION, v),)))
    return LiabilityHypergraph(institutions, payments, tuple(hyperedges))


def incidence_arrows(h: LiabilityHypergraph) -> list[tuple[Hyperedge, Node]]:
    """Generating arrows ``hyperedge -> node`` of the incidence category."""
    return [(he, node) for he in h.hyperedges for node in he.sources + he.targets]


class LiabilitySheaf:
    """Stalks and restriction maps over the incidence category."""

    def __init__(self, net: LiabilityNetwork):
        self.network = net
        self.hypergraph = build_hypergraph(net)
        self.stalks: dict[Any, PaymentSpace] = {}
        for v in net.vertices:
            self.stalks[Node(INSTITUTION, v)] = net.spaces[v]
            self.stalks[self.hypergraph.hyperedge(DISTRIBUTION, v)] = net.spaces[v]
            self.stalks[self.hypergraph.hyperedge(COLLECTION, v)] = ProductSpace(
                tuple(net.ideals[e.id] for e in net.incoming[v]))
        for e in net.edges:
            self.stalks[Node(PAYMENT, e.id)] = net.ideals[e.id]

    def stalk(self, cell) -> PaymentSpace:
        return self.stalks[cell]

    def restriction(self, h: Hyperedge, node: Node) -> Callable:
        net = self.network
        if node not in h.sources + h.targets:
            raise KeyError(f"no incidence {h} -> {node}")
        if h.kind == DISTRIBUTION:
            if node.kind == INSTITUTION:
                return lambda x: x
            return lambda x, _e=node.id: net.distribute_edge(_e, x)
        if node.kind == INSTITUTION:
            return lambda p, _v=h.institution: net.partial_aggregate(_v, p)
        i = [e.id for e in net.incoming[h.institution]].index(node.id)
        return lambda p, _i=i: p[_i]

    def arrows(self):
        return incidence_arrows(self.hypergraph)

    def section_from(self, x, p) -> dict:
        """Assemble a full assignment on every cell from ``(x, p)``."""
        net = self.network
        sigma: dict = {}
        for v in net.vertices:
            sigma[Node(INSTITUTION, v)] = x[v]
            sigma[self.hypergraph.hyperedge(DISTRIBUTION, v)] = x[v]
            sigma[self.hypergraph.hyperedge(COLLECTION, v)] = tuple(
                p[e.id] for e in net.incoming[v])
        for e in net.edges:
            sigma[Node(PAYMENT, e.id)] = p[e.id]
        return sigma

    def is_section(self, sigma: dict, tol: float | None = None) -> bool:
        """Check every restriction map agrees with the assignment."""
        tol = self.network.tol if tol is None else tol
        for cell, space in self.stalks.items():
            if not space.contains(sigma[cell]):
                return False
        for h, node in self.arrows():
            image = self.restriction(h, node)(sigma[h])
            if not self.stalks[node].equal(image, sigma[node], tol):
                return False
        return True


def build_sheaf(net: LiabilityNetwork) -> LiabilitySheaf:
    return LiabilitySheaf(net)
