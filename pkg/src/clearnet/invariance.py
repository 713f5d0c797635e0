"""Strict comparisons between two presentations of one clearing problem.

A comparison pairs a source and a target network over the same graph with
a per-vertex value map.  It holds when the map intertwines the clearing
operators and carries the source's sections onto the target's.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .clearing import (
    SolverError, enumerate_sections, kleene_greatest, kleene_least, phi, states_equal,
)
from .lattice import INF, RATIONAL, Interval, coerce, scale
from .models import EisenbergNoeInstance, eisenberg_noe, eisenberg_noe_bounded, redenominate
from .network import LiabilityNetwork

SECTION_BIJECTION = "section-bijection"
INCLUSION_ISO = "section-inclusion-iso"


class ComparisonError(ValueError):
    pass


@dataclass
class ComparisonCase:
    name: str
    source: LiabilityNetwork
    target: LiabilityNetwork
    value_map: Callable  # (vertex, value) -> value
    relation: str = SECTION_BIJECTION

    def map_state(self, x: dict) -> dict:
        return {v: self.value_map(v, x[v]) for v in x}


@dataclass
class CheckReport:
    case: str
    check: str
    passed: bool
    checked: int = 0
    failures: list = field(default_factory=list)

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.case} [{self.check}] ({self.checked} checked)"


def scaling_case(net: LiabilityNetwork, alpha, name: str | None = None,
                 target: LiabilityNetwork | None = None) -> ComparisonCase:
    """Redenomination by ``alpha``; ``target`` overrides the built network."""
    a = coerce(alpha, net.backend)
    tgt = redenominate(net, a) if target is None else target
    return ComparisonCase(name or f"redenominate x{alpha}", net, tgt,
                          lambda v, x: scale(a, x))


def presentation_case(inst: EisenbergNoeInstance, backend: str = RATIONAL,
                      name: str = "bounded-vs-unbounded") -> ComparisonCase:
    """Inclusion of the bounded Eisenberg–Noe presentation into the unbounded one."""
    return ComparisonCase(name, eisenberg_noe_bounded(inst, backend),
                          eisenberg_noe(inst, backend), lambda v, x: x, INCLUSION_ISO)


def identity_case(net: LiabilityNetwork, name: str = "identity") -> ComparisonCase:
    return ComparisonCase(name, net, net, lambda v, x: x)


def _check_shapes(case):
    s, t = case.source, case.target
    if s.vertices != t.vertices or [e.id for e in s.edges] != [e.id for e in t.edges]:
        raise ComparisonError(f"{case.name}: source and target graphs differ")


def sample_states(net: LiabilityNetwork, n: int, seed: int = 0) -> list[dict]:
    """Lattice extremes followed by ``n`` deterministic pseudo-random states."""
    rng = random.Random(seed)
    out = []
    if all(net.spaces[v].is_lattice for v in net.vertices):
        out.append({v: net.spaces[v].bottom() for v in net.vertices})
        out.append({v: net.spaces[v].top() for v in net.vertices})
    scale_ref = max([x for x in (*net.liability.values(), *net.exogenous.values())
                     if isinstance(x, (int, float, Fraction)) and x != INF] + [1])
    for _ in range(n):
        x = {}
        for v in net.vertices:
            space = net.spaces[v]
            if isinstance(space, Interval):
                hi = space.hi if space.hi != INF else space.lo + 2 * scale_ref
                frac = Fraction(rng.randrange(0, 1001), 1000)
                val = space.lo + frac * (hi - space.lo)
                x[v] = coerce(val, net.backend)
            else:
                x[v] = rng.choice(space.enumerate())
        out.append(x)
    return out


def verify_operator_intertwining(case: ComparisonCase, samples=100, seed: int = 0) -> CheckReport:
    """``map(Φ_source(x)) == Φ_target(map(x))`` on sampled source states."""
    _check_shapes(case)
    states = sample_states(case.source, samples, seed) if isinstance(samples, int) else samples
    report = CheckReport(case.name, "intertwining", True)
    for x in states:
        lhs = case.map_state(phi(case.source, x))
        y = case.map_state(x)
        if not all(case.target.spaces[v].contains(y[v]) for v in y):
            report.failures.append({"state": x, "reason": "mapped state outside target"})
            continue
        rhs = phi(case.target, y)
        if not states_equal(case.target, lhs, rhs):
            report.failures.append({"state": x, "mapped_phi": lhs, "phi_mapped": rhs})
        report.checked += 1
    report.passed = not report.failures
    return report


def _extremes(net):
    least, r1 = kleene_least(net)
    greatest, r2 = kleene_greatest(net)
    if not (r1.converged and r2.converged):
        raise SolverError(f"extremal solvers did not converge ({r1.iterations}, {r2.iterations})")
    return [least.x, greatest.x]


def verify_section_bijection(case: ComparisonCase) -> CheckReport:
    """The value map carries source sections onto target sections.

    Finite networks compare full enumerated section sets; interval networks
    compare the least and greatest sections.
    """
    _check_shapes(case)
    s, t = case.source, case.target
    report = CheckReport(case.name, "section-bijection", True)
    finite = all(sp.is_finite for sp in (*s.spaces.values(), *t.spaces.values()))
    if finite:
        src = [sec.x for sec in enumerate_sections(s)]
        tgt = [sec.x for sec in enumerate_sections(t)]
    else:
        src, tgt = _extremes(s), _extremes(t)
    mapped = [case.map_state(x) for x in src]
    report.checked = len(mapped)
    if len(mapped) != len(tgt):
        report.failures.append({"reason": "cardinality", "source": len(src), "target": len(tgt)})
    for m, y in zip(mapped, tgt):
        if not states_equal(t, m, y):
            report.failures.append({"mapped": m, "target": y})
    if finite:
        unmatched = [y for y in tgt if not any(states_equal(t, m, y) for m in mapped)]
        if unmatched:
            report.failures.append({"reason": "not surjective", "missing": unmatched})
    report.passed = not report.failures
    return report


def verify_case(case: ComparisonCase, samples: int = 100, seed: int = 0) -> list[CheckReport]:
    return [verify_operator_intertwining(case, samples, seed), verify_section_bijection(case)]


def default_cases(backend: str = RATIONAL) -> list[ComparisonCase]:
    """The shipped comparison cases (two-bank cycles under redenomination and presentation change)."""
    net_a = EisenbergNoeInstance({"1": 0, "2": 0}, {("1", "2"): 10, ("2", "1"): 10})
    net_b = EisenbergNoeInstance({"1": 5, "2": 0}, {("1", "2"): 10, ("2", "1"): 10})
    cases = []
    for name, inst in (("NET-A", net_a), ("NET-B", net_b)):
        for alpha in (2, Fraction(1, 3)):
            cases.append(scaling_case(eisenberg_noe(inst, backend), alpha,
                                      name=f"{name} redenominate x{alpha}"))
        cases.append(presentation_case(inst, backend, name=f"{name} bounded-vs-unbounded"))
    return cases
