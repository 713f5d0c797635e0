"""Named test networks and a seeded generator of small finite-lattice networks."""
from __future__ import annotations

import random
from fractions import Fraction as F

from clearnet import (
    INF, Edge, EisenbergNoeInstance, FiniteLattice, Interval, JoinAll, LiabilityNetwork,
    LinearCapped, Sum, TableAggregator, TableDistributor, eisenberg_noe,
)
from clearnet.models import join_network

EN_A = EisenbergNoeInstance({"1": 0, "2": 0}, {("1", "2"): 10, ("2", "1"): 10})
EN_B = EisenbergNoeInstance({"1": 5, "2": 0}, {("1", "2"): 10, ("2", "1"): 10})
EN_C = EisenbergNoeInstance({"1": 7, "2": 0, "3": 0}, {("1", "2"): 10, ("2", "3"): 5})

CYCLE = [Edge("1->2", "1", "2"), Edge("2->1", "2", "1")]


def net_a(backend="rational"):
    return eisenberg_noe(EN_A, backend)


def net_b(backend="rational"):
    return eisenberg_noe(EN_B, backend)


def net_c(backend="rational"):
    return eisenberg_noe(EN_C, backend)


def net_d(exogenous=(0, 0)):
    """Two-cycle over 2-chains, identity distributors capped at the top, join aggregators."""
    two = FiniteLattice.chain(2)
    return join_network({"1": two, "2": two}, CYCLE, {"1->2": 1, "2->1": 1},
                        {"1": exogenous[0], "2": exogenous[1]})


def net_e():
    """Amplifying two-cycle on [1, inf]: each payment doubles the debtor's state."""
    return LiabilityNetwork(
        ["1", "2"], CYCLE, {v: Interval(F(1), INF) for v in "12"},
        {"1->2": INF, "2->1": INF}, {"1": F(1), "2": F(1)},
        {e.id: LinearCapped(F(2), INF) for e in CYCLE}, {v: JoinAll() for v in "12"})


def net_f(backend="rational"):
    """Attenuated two-cycle: d(x) = min(x/2, 10), a = c + sum, c = (1, 0)."""
    conv = F if backend == "rational" else float
    return LiabilityNetwork(
        ["1", "2"], CYCLE, {v: Interval(conv(0), INF) for v in "12"},
        {"1->2": conv(10), "2->1": conv(10)}, {"1": conv(1), "2": conv(0)},
        {e.id: LinearCapped(conv(F(1, 2)), conv(10)) for e in CYCLE},
        {v: Sum() for v in "12"}, backend)


def random_finite_network(rng: random.Random, max_vertices=3, max_size=3) -> LiabilityNetwork:
    """Chains of 1..max_size elements, random monotone table/join specs.

    Element indices of a chain are its ranks, so monotone maps are built as
    nondecreasing integer functions.
    """
    n = rng.randint(1, max_vertices)
    verts = [str(i) for i in range(1, n + 1)]
    sizes = {v: rng.randint(1, max_size) for v in verts}
    lattices = {v: FiniteLattice.chain(sizes[v]) for v in verts}
    edges = [Edge(f"{s}->{t}", s, t) for s in verts for t in verts if rng.random() < 0.5]
    # full liabilities, pass-through payments and zero resources make
    # self-reinforcing cycles (several sections) common
    liability = {e.id: sizes[e.source] - 1 if rng.random() < 0.6 else rng.randrange(sizes[e.source])
                 for e in edges}
    distributor = {}
    for e in edges:
        lam = liability[e.id]
        if rng.random() < 0.5:
            values = [min(x, lam) for x in range(sizes[e.source])]
        else:
            values = sorted(rng.randint(0, lam) for _ in range(sizes[e.source]))
        distributor[e.id] = TableDistributor(dict(enumerate(values)))
    exogenous = {v: 0 if rng.random() < 0.6 else rng.randrange(sizes[v]) for v in verts}
    aggregator = {}
    for v in verts:
        incoming = [e for e in edges if e.target == v]
        same = all(sizes[e.source] == sizes[v] for e in incoming)
        if same and rng.random() < 0.3:
            aggregator[v] = JoinAll()
            continue
        top = sizes[v] - 1
        weights = [int(rng.random() < 0.8) for _ in incoming]
        use_sum = rng.random() < 0.5
        base = exogenous[v]
        table = {}

        def tuples(i):
            if i == len(incoming):
                yield ()
                return
            for p in range(liability[incoming[i].id] + 1):
                for rest in tuples(i + 1):
                    yield (p,) + rest

        for ps in tuples(0):
            terms = [w * p for w, p in zip(weights, ps)]
            raw = base + sum(terms) if use_sum else max([base, *terms])
            table[ps] = min(top, raw)
        aggregator[v] = TableAggregator(table)
    return LiabilityNetwork(verts, edges, lattices, liability, exogenous, distributor, aggregator)


def finite_family(count=250, seed=20240601):
    rng = random.Random(seed)
    return [random_finite_network(rng) for _ in range(count)]


def random_en_instance(rng: random.Random, n: int, density=0.5) -> EisenbergNoeInstance:
    assets = {str(i): F(rng.randint(0, 20)) for i in range(1, n + 1)}
    liabilities = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and rng.random() < density:
                liabilities[(str(i), str(j))] = F(rng.randint(1, 30))
    return EisenbergNoeInstance(assets, liabilities)
