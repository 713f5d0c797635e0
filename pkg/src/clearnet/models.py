"""Front-ends for Eisenberg–Noe and lattice liability networks, plus redenomination."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .lattice import (
    INF, RATIONAL, FiniteLattice, Interval, coerce, scale,
)
from .network import Edge, LiabilityNetwork, NetworkError, Violation, id_key
from .specs import (
    IdentityCapped, JoinAll, LinearCapped, Proportional, Sum, SumCapped,
    TableAggregator, TableDistributor,
)


@dataclass
class EisenbergNoeInstance:
    """External assets per institution and positive nominal liabilities ``(i, j) -> ℓ_ij``."""

    assets: Mapping[str, object]
    liabilities: Mapping[tuple, object]

    def __post_init__(self):
        if not isinstance(self.assets, Mapping):
            self.assets = {str(i + 1): c for i, c in enumerate(self.assets)}
        self.assets = {str(k): v for k, v in self.assets.items()}
        self.liabilities = {(str(i), str(j)): v for (i, j), v in self.liabilities.items()}
        for (i, j), amount in self.liabilities.items():
            if i not in self.assets or j not in self.assets:
                raise NetworkError(f"liability {i}->{j} names an unknown institution")
            if not amount > 0:
                raise NetworkError(f"liability {i}->{j} must be positive, got {amount}")
        for v, c in self.assets.items():
            if c < 0:
                raise NetworkError(f"assets of {v} must be nonnegative, got {c}")

    def total_liabilities(self, backend: str = RATIONAL) -> dict:
        out = {v: coerce(0, backend) for v in self.assets}
        for (i, _), amount in self.liabilities.items():
            out[i] = out[i] + coerce(amount, backend)
        return out


def edge_id(i: str, j: str) -> str:
    return f"{i}->{j}"


def _eisenberg_noe(inst: EisenbergNoeInstance, backend: str, bounded: bool) -> LiabilityNetwork:
    totals = inst.total_liabilities(backend)
    zero = coerce(0, backend)
    vertices = sorted(inst.assets, key=id_key)
    edges, liability, distributor = [], {}, {}
    for (i, j), amount in inst.liabilities.items():
        eid = edge_id(i, j)
        ell = coerce(amount, backend)
        edges.append(Edge(eid, i, j))
        liability[eid] = ell
        distributor[eid] = Proportional(totals[i], ell)
    spaces, exogenous, aggregator = {}, {}, {}
    for v in vertices:
        c = coerce(inst.assets[v], backend)
        spaces[v] = Interval(zero, totals[v] if bounded else INF)
        exogenous[v] = min(c, totals[v]) if bounded else c
        aggregator[v] = SumCapped(totals[v])
    return LiabilityNetwork(vertices, edges, spaces, liability, exogenous, distributor,
                            aggregator, backend,
                            metadata={"model": "eisenberg-noe",
                                      "presentation": "bounded" if bounded else "unbounded"})


def eisenberg_noe(inst: EisenbergNoeInstance, backend: str = RATIONAL) -> LiabilityNetwork:
    """Unbounded presentation: every payment space is ``[0, inf]``."""
    return _eisenberg_noe(inst, backend, bounded=False)


def eisenberg_noe_bounded(inst: EisenbergNoeInstance, backend: str = RATIONAL) -> LiabilityNetwork:
    """Bounded presentation: ``[0, ℓ̄_v]`` spaces and exogenous ``min(c_v, ℓ̄_v)``."""
    return _eisenberg_noe(inst, backend, bounded=True)


@dataclass
class LLNInstance:
    """A lattice liability network given by finite tables.

    ``distrib[v]`` maps each element index of ``L_v`` to a tuple of payments,
    one per out-edge of ``v`` in edge-id order.  ``inagg[v]`` maps tuples of
    incoming payments (in-edge order) to ``L_v``; exogenous resources are
    folded into it.  ``outagg`` is only used by :func:`conservation_audit`.
    """

    vertices: Sequence[str]
    edges: Sequence[Edge]
    lattices: Mapping[str, FiniteLattice]
    liabilities: Mapping[str, int]
    exogenous: Mapping[str, int]
    distrib: Mapping[str, Mapping[int, tuple]]
    inagg: Mapping[str, Mapping[tuple, int]]
    outagg: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)

    def out_edges(self, v) -> list:
        return sorted((e for e in self.edges if e.source == v), key=lambda e: id_key(e.id))


def lln(inst: LLNInstance) -> LiabilityNetwork:
    """``d_e = π_e ∘ distrib_v`` and ``a_v = inagg_v`` restricted to the ideals."""
    distributor = {}
    for v in inst.vertices:
        for pos, e in enumerate(inst.out_edges(v)):
            distributor[e.id] = TableDistributor(
                {x: out[pos] for x, out in inst.distrib[v].items()})
    aggregator = {v: TableAggregator(dict(inst.inagg[v])) for v in inst.vertices}
    return LiabilityNetwork(
        tuple(inst.vertices), tuple(inst.edges), dict(inst.lattices),
        dict(inst.liabilities), dict(inst.exogenous), distributor, aggregator,
        metadata={"model": "lln"})


def conservation_audit(inst: LLNInstance) -> list[Violation]:
    """Check ``outagg_v ∘ distrib_v = id`` wherever an ``outagg`` table is given."""
    out = []
    for v, table in inst.outagg.items():
        for x, payments in inst.distrib[v].items():
            back = table.get(tuple(payments))
            if back != x:
                out.append(Violation(f"vertex {v}", "not-conservative",
                                     f"outagg(distrib({x})) = {back!r}"))
    return out


def join_network(lattices: Mapping[str, FiniteLattice], edges: Sequence[Edge],
                 liabilities: Mapping[str, int], exogenous: Mapping[str, int]) -> LiabilityNetwork:
    """LLN with capped-identity distributors and join aggregators."""
    distributor = {e.id: IdentityCapped(liabilities[e.id]) for e in edges}
    aggregator = {v: JoinAll() for v in lattices}
    return LiabilityNetwork(tuple(lattices), tuple(edges), dict(lattices), dict(liabilities),
                            dict(exogenous), distributor, aggregator,
                            metadata={"model": "lln"})


_SCALABLE = (Proportional, LinearCapped, IdentityCapped, SumCapped, Sum, JoinAll)


def redenominate(net: LiabilityNetwork, alpha) -> LiabilityNetwork:
    """Scale every monetary datum (endpoints, liabilities, resources, caps) by ``alpha > 0``."""
    alpha = coerce(alpha, net.backend)
    if not alpha > 0:
        raise ValueError("redenomination factor must be positive")
    for v in net.vertices:
        if not isinstance(net.spaces[v], Interval):
            raise NetworkError(f"vertex {v}: only interval spaces can be redenominated")
    for spec in [*net.distributor.values(), *net.aggregator.values()]:
        if not isinstance(spec, _SCALABLE):
            raise NetworkError(f"{spec.kind} specs have no canonical rescaling")
    spaces = {v: Interval(scale(alpha, s.lo), scale(alpha, s.hi)) for v, s in net.spaces.items()}
    return net.replace(
        spaces=spaces,
        liability={e: scale(alpha, x) for e, x in net.liability.items()},
        exogenous={v: scale(alpha, x) for v, x in net.exogenous.items()},
        distributor={e: d.scaled(alpha) for e, d in net.distributor.items()},
        aggregator={v: a.scaled(alpha) for v, a in net.aggregator.items()},
        metadata={**net.metadata, "redenominated": str(alpha)},
    )
