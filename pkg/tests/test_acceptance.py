"""The acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line (printed, and repeated in the terminal
summary) before asserting.
"""
import itertools
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

from clearnet import (
    INF, MetricSpec, acyclic_solve, aggregate, banach_solve, check_network, check_section,
    distribute, eisenberg_noe, enumerate_sections, extreme_section, kleene_greatest,
    kleene_least, lipschitz_bound, phi, phi_dual,
)
from clearnet.clearing import state_leq
from clearnet.invariance import default_cases, verify_case
from clearnet.lattice import distance, format_value
from networks import finite_family, net_a, net_b, net_c, net_e, net_f, random_en_instance

ROOT = Path(__file__).parent
FAMILY = finite_family(250)


def show(state):
    return "(" + ", ".join(format_value(v) for v in state.values()) + ")"


def _best_time(fn, repeats=25):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_01_net_a_extremes(record_criterion):
    net = net_a()
    lo, r1 = kleene_least(net)
    hi, r2 = kleene_greatest(net)
    t1 = _best_time(lambda: kleene_least(net))
    t2 = _best_time(lambda: kleene_greatest(net))
    ok = (lo.x == {"1": 0, "2": 0} and hi.x == {"1": 10, "2": 10}
          and r1.converged and r2.converged and r1.residual == 0 and r2.residual == 0
          and r1.iterations <= 5 and r2.iterations <= 5 and t1 < 1e-3 and t2 < 1e-3)
    record_criterion(1, ok, f"least={show(lo.x)} in {r1.iterations} it ({t1 * 1e3:.3f} ms), "
                            f"greatest={show(hi.x)} in {r2.iterations} it ({t2 * 1e3:.3f} ms)")
    assert ok


def test_criterion_02_net_b_ascent(record_criterion):
    net = net_b()
    lo, r1 = kleene_least(net, record=True)
    hi, r2 = kleene_greatest(net)
    want = [(0, 0), (5, 0), (5, 5), (10, 5), (10, 10), (10, 10)]
    got = [(x["1"], x["2"]) for x in r1.trace]
    path = " -> ".join(show(x) for x in r1.trace)
    ok = (lo.x == hi.x == {"1": 10, "2": 10} and r1.iterations == 5 and got == want
          and r1.converged and r2.converged)
    record_criterion(2, ok, f"least={show(lo.x)} greatest={show(hi.x)} "
                            f"steps={r1.iterations} trace {path}")
    assert ok


def test_criterion_03_net_c_acyclic(record_criterion):
    net = net_c()
    sec, rep = acyclic_solve(net)
    rng = random.Random(2024)
    outs = set()
    for _ in range(10):
        seed = {v: F(rng.randint(0, 1000), rng.randint(1, 7)) for v in net.vertices}
        s, r = acyclic_solve(net, seed=seed)
        outs.add((tuple(s.x.values()), tuple(s.p.values()), r.iterations))
    ok = (sec.x == {"1": 7, "2": 5, "3": 0} and sec.p == {"1->2": 7, "2->3": 5}
          and rep.iterations == 3 and outs == {((7, 5, 0), (7, 5), 3)})
    record_criterion(3, ok, f"x={show(sec.x)} p={show(sec.p)} applications={rep.iterations}, "
                            f"{len(outs)} distinct result(s) over 10 seeds")
    assert ok


def test_criterion_04_oracle_equivalence(record_criterion):
    t0 = time.perf_counter()
    bad = []
    for i, net in enumerate(FAMILY):
        check_network(net)
        secs = enumerate_sections(net)
        lo = extreme_section(net, secs)
        hi = extreme_section(net, secs, greatest=True)
        if not secs or lo is None or hi is None:
            bad.append(i)
            continue
        if kleene_least(net)[0].x != lo.x or kleene_greatest(net)[0].x != hi.x:
            bad.append(i)
    elapsed = time.perf_counter() - t0
    ok = not bad and len(FAMILY) >= 200 and elapsed < 10
    record_criterion(4, ok, f"{len(FAMILY)} networks, {len(bad)} mismatches, {elapsed:.2f} s")
    assert ok


def _edge_fixed_points(net):
    edges = [e.id for e in net.edges]
    out = []
    for values in itertools.product(*(net.ideals[e].enumerate() for e in edges)):
        p = dict(zip(edges, values))
        if phi_dual(net, p) == p:
            out.append(p)
    return out


def test_criterion_05_duality(record_criterion):
    bad = []
    total = 0
    for i, net in enumerate(FAMILY):
        fix = [s.x for s in enumerate_sections(net)]
        dual = _edge_fixed_points(net)
        total += len(fix)
        images = [distribute(net, x) for x in fix]
        ok = (len(fix) == len(dual)
              and all(p in dual for p in images)
              and all(aggregate(net, distribute(net, x)) == x for x in fix)
              and all(distribute(net, aggregate(net, p)) == p for p in dual))
        if not ok:
            bad.append(i)
    ok = not bad
    record_criterion(5, ok, f"{len(FAMILY)} networks, {total} fixed points matched, "
                            f"{len(bad)} failures")
    assert ok


def test_criterion_06_amplifying_cycle(record_criterion):
    net = net_e()
    _, rep = kleene_least(net)
    top = {v: INF for v in net.vertices}
    passes = check_section(net, top, distribute(net, top))
    ok = rep.diverged and rep.iterations <= 10_000 and passes and rep.saturated == top
    record_criterion(6, ok, f"diverged={rep.diverged} after {rep.iterations} steps, "
                            f"all-inf section={passes}")
    assert ok


def test_criterion_07_banach(record_criterion):
    star = {"1": F(4, 3), "2": F(2, 3)}
    exact, r1 = banach_solve(net_f())
    fl, r2 = banach_solve(net_f("float"), tol=1e-12, record=True)
    m = MetricSpec()
    space = net_f().state_space
    d = lambda a, b: distance(m, space, tuple(a.values()), tuple(b.values()))  # noqa: E731
    steps = [d(a, b) for a, b in zip(r2.trace, r2.trace[1:])]
    ratios = [b / a for a, b in zip(steps, steps[1:]) if a > 0]
    worst = max(ratios)
    k = lipschitz_bound(net_f())
    float_err = max(abs(fl.x[v] - float(star[v])) for v in star)
    ok = (exact.x == star and r1.converged and r1.residual == 0
          and float_err <= 1e-9 and worst <= 0.5 + 1e-12 and k == F(1, 2))
    record_criterion(7, ok, f"rational={show(exact.x)}, float error={float_err:.2e}, "
                            f"max step ratio={worst:.12f}, lipschitz={k}")
    assert ok


def test_criterion_08_invariance(record_criterion):
    cases = default_cases()
    failed = []
    for case in cases:
        reports = verify_case(case, samples=100)
        if not all(r.passed for r in reports):
            failed.append(case.name)
    names = sorted(c.name for c in cases)
    ok = not failed and any("x2" in n for n in names) and any("x1/3" in n for n in names) \
        and any("bounded" in n for n in names)
    record_criterion(8, ok, f"{len(cases)} cases, failed={failed}")
    assert ok


def test_criterion_09_monotonicity_and_containment(record_criterion):
    pairs = 0
    bad = 0
    for net in FAMILY:
        states = [dict(zip(net.vertices, vals)) for vals in
                  itertools.product(*(net.spaces[v].enumerate() for v in net.vertices))]
        images = [phi(net, x) for x in states]
        for (x, fx), (y, fy) in itertools.product(zip(states, images), repeat=2):
            if state_leq(net, x, y):
                pairs += 1
                bad += not state_leq(net, fx, fy)
    rng = random.Random(99)
    en_bad = 0
    for _ in range(1000):
        inst = random_en_instance(rng, rng.randint(2, 10), density=rng.choice([0.2, 0.5, 0.8]))
        net = eisenberg_noe(inst)
        bar = inst.total_liabilities()
        x = {v: rng.choice([F(0), F(rng.randint(0, 200), rng.randint(1, 4)), INF])
             for v in net.vertices}
        y = {v: x[v] + rng.choice([0, F(rng.randint(0, 100)), INF]) for v in net.vertices}
        fx, fy = phi(net, x), phi(net, y)
        inside = all(F(0) <= f[v] <= bar[v] for f in (fx, fy) for v in net.vertices)
        en_bad += not (state_leq(net, fx, fy) and inside)
    ok = bad == 0 and en_bad == 0
    record_criterion(9, ok, f"finite family: {pairs} ordered pairs, {bad} violations; "
                            f"EN: 1000 sampled pairs, {en_bad} violations")
    assert ok


GOLDEN_RUNS = [
    (["solve", "net_a.json"], "solve_net_a_least.json"),
    (["solve", "net_a.json", "--solver", "greatest"], "solve_net_a_greatest.json"),
    (["solve", "net_b.json"], "solve_net_b_least.json"),
    (["solve", "net_b.json", "--solver", "greatest"], "solve_net_b_greatest.json"),
    (["solve", "net_c.json", "--solver", "acyclic"], "solve_net_c_acyclic.json"),
    (["enumerate", "net_d.json"], "enumerate_net_d.json"),
]


def test_criterion_10_cli_golden(record_criterion):
    mismatched = []
    for argv, golden in GOLDEN_RUNS:
        proc = subprocess.run([sys.executable, "-m", "clearnet", *argv], cwd=ROOT / "data",
                              capture_output=True, env={"PATH": "/usr/bin:/bin"})
        if proc.returncode != 0 or proc.stdout != (ROOT / "golden" / golden).read_bytes():
            mismatched.append(golden)
    ok = not mismatched
    record_criterion(10, ok, f"{len(GOLDEN_RUNS)} reports, mismatched={mismatched}")
    assert ok
