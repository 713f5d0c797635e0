"""Command-line front-end.

Exit codes: 0 success, 1 load/validation/precondition error, 2 the solver
ran but did not converge (or a verification check failed).
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import clearing
from .invariance import (
    ComparisonCase, identity_case, presentation_case, scaling_case, verify_case,
)
from .io import (
    FormatError, default_backend, dumps, en_from_compact, en_instance_from_compact,
    is_compact_en, load_json, load_network, network_from_json, network_to_json,
    payments_to_json, state_from_json, state_to_json,
)
from .lattice import BACKENDS, LatticeError, MetricSpec, format_value, parse_value
from .network import NetworkError, NetworkValidationError, SectionValueError, check_network

log = logging.getLogger("clearnet")

OK, ERROR, NOT_CONVERGED = 0, 1, 2
SOLVERS = ("least", "greatest", "acyclic", "banach")


def _emit(doc, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _error_report(message: str, violations=()) -> dict:
    return {"error": message, "violations": [str(v) for v in violations]}


def _fmt(v):
    return None if v is None else format_value(v)


def solve_file(path: str, options: dict) -> tuple[int, dict]:
    """Load, validate and solve one network file; returns ``(exit_code, report)``."""
    try:
        net = check_network(load_network(path, options["backend"]))
        seed = None
        if options.get("seed_state"):
            seed = state_from_json(net, load_json(options["seed_state"]))
        metric = MetricSpec.named(options.get("metric") or net.metadata.get("metric", "l1-abs"))
        solver = options["solver"]
        if solver == "least":
            section, report = clearing.kleene_least(net, options["max_iter"], options["tol"])
        elif solver == "greatest":
            section, report = clearing.kleene_greatest(
                net, options["max_iter"], options["tol"],
                assume_filtered_infima=options.get("assume_filtered_infima", False))
        elif solver == "acyclic":
            section, report = clearing.acyclic_solve(net, seed=seed)
        else:
            section, report = clearing.banach_solve(net, metric, options["tol"],
                                                    options["max_iter"], seed=seed)
    except NetworkValidationError as exc:
        return ERROR, _error_report("validation failed", exc.violations)
    except (FormatError, NetworkError, LatticeError, SectionValueError,
            clearing.SolverError, OSError, ValueError) as exc:
        return ERROR, _error_report(str(exc))
    doc = {
        "solver": solver,
        "parameters": {"backend": net.backend, "max_iter": options["max_iter"],
                       "tol": repr(options["tol"]), "metric": metric_name(metric)},
        "x": state_to_json(net, section.x),
        "p": payments_to_json(net, section.p),
        "iterations": report.iterations,
        "converged": report.converged,
        "extremality": report.extremality,
        "diverged": report.diverged,
        "residual": _fmt(report.residual),
        "violations": [],
    }
    if report.lipschitz is not None:
        doc["lipschitz"] = format_value(report.lipschitz)
    if report.saturated is not None:
        doc["saturated"] = state_to_json(net, report.saturated)
    return (OK if report.converged else NOT_CONVERGED), doc


def metric_name(metric: MetricSpec) -> str:
    return "l1-abs" if metric.interval == "abs" else "l1-discrete"


def _solve_job(item):
    path, options = item
    return path, *solve_file(path, options)


def cmd_solve(args) -> int:
    options = {"solver": args.solver, "tol": args.tol, "max_iter": args.max_iter,
               "backend": args.backend, "seed_state": args.seed_state, "metric": args.metric,
               "assume_filtered_infima": args.assume_filtered_infima}
    target = Path(args.path)
    if target.is_dir():
        files = sorted(str(p) for p in target.glob("*.json"))
        items = [(f, options) for f in files]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_solve_job, items))
        else:
            results = [_solve_job(i) for i in items]
        _emit({"reports": {Path(p).name: doc for p, _, doc in results}}, args.output)
        return max((code for _, code, _ in results), default=OK)
    code, doc = solve_file(args.path, options)
    if code == ERROR:
        log.error("%s: %s", args.path, doc["error"])
    _emit(doc, args.output)
    return code


def cmd_enumerate(args) -> int:
    try:
        net = check_network(load_network(args.path, args.backend))
        sections = clearing.enumerate_sections(net)
    except NetworkValidationError as exc:
        _emit(_error_report("validation failed", exc.violations), args.output)
        return ERROR
    except (FormatError, NetworkError, LatticeError, clearing.SolverError, OSError) as exc:
        log.error("%s: %s", args.path, exc)
        _emit(_error_report(str(exc)), args.output)
        return ERROR
    doc = {"count": len(sections),
           "sections": [{"x": state_to_json(net, s.x), "p": payments_to_json(net, s.p)}
                        for s in sections],
           "violations": []}
    _emit(doc, args.output)
    return OK


def _network_ref(ref, base: Path, backend: str):
    if isinstance(ref, str):
        return load_network(base / ref, backend)
    if is_compact_en(ref):
        return en_from_compact(ref, backend=backend)
    return network_from_json(ref, backend)


def build_case(entry: dict, base: Path, backend: str) -> ComparisonCase:
    kind = entry.get("kind")
    name = entry.get("name", kind)
    if kind == "presentation":
        ref = entry["network"]
        doc = load_json(base / ref) if isinstance(ref, str) else ref
        if not is_compact_en(doc):
            raise FormatError(f"case {name}: presentation cases need a compact EN spec")
        return presentation_case(en_instance_from_compact(doc, backend), backend, name=name)
    net = _network_ref(entry["network"], base, backend)
    if kind == "redenominate":
        target = None
        if "target" in entry:
            target = _network_ref(entry["target"], base, backend)
        return scaling_case(net, parse_value(str(entry["alpha"]), backend),
                            name=name, target=target)
    if kind == "identity":
        return identity_case(net, name=name)
    raise FormatError(f"case {name}: unknown kind {kind!r}")


def cmd_verify(args) -> int:
    base = Path(args.manifest).parent
    try:
        manifest = load_json(args.manifest)
        entries = manifest.get("cases", [])
        cases = [build_case(entry, base, args.backend) for entry in entries]
    except (FormatError, NetworkError, LatticeError, OSError, KeyError, ValueError) as exc:
        log.error("%s: %s", args.manifest, exc)
        _emit(_error_report(str(exc)), args.output)
        return ERROR
    samples = int(manifest.get("samples", 100))
    out, all_ok = [], True
    for case in cases:
        try:
            checks = verify_case(case, samples)
        except (clearing.SolverError, ValueError) as exc:
            out.append({"name": case.name, "passed": False, "error": str(exc), "checks": []})
            all_ok = False
            continue
        ok = all(c.passed for c in checks)
        all_ok = all_ok and ok
        out.append({"name": case.name, "passed": ok,
                    "checks": [{"check": c.check, "passed": c.passed, "checked": c.checked,
                                "failures": len(c.failures)} for c in checks]})
        log.info("%s: %s", case.name, "pass" if ok else "FAIL")
    _emit({"count": len(out), "passed": all_ok, "cases": out,
           "failed": [c["name"] for c in out if not c["passed"]]}, args.output)
    return OK if all_ok else NOT_CONVERGED


def _parse_liability(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected DEBTOR:CREDITOR:AMOUNT, got {text!r}")
    return parts


def cmd_en(args) -> int:
    try:
        if args.compact:
            doc = load_json(args.compact)
        else:
            if args.assets is None:
                raise FormatError("give --compact FILE or --assets")
            doc = {"assets": args.assets.split(","), "liabilities": args.liability or []}
        net = en_from_compact(doc, args.presentation, args.backend)
    except (FormatError, NetworkError, LatticeError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return ERROR
    _emit(network_to_json(net), args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clearnet", description="Clearing sections of liability networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--backend", choices=BACKENDS, default=default_backend())
        p.add_argument("-o", "--output", help="write the report here instead of stdout")

    p = sub.add_parser("solve", help="solve a network file (or a directory of them)")
    p.add_argument("path")
    p.add_argument("--solver", choices=SOLVERS, default="least")
    p.add_argument("--tol", type=float, default=clearing.DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=clearing.DEFAULT_MAX_ITER)
    p.add_argument("--seed-state", help="JSON file with a starting state")
    p.add_argument("--metric", choices=("l1-abs", "l1-discrete"))
    p.add_argument("--assume-filtered-infima", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="list every clearing section of a finite network")
    p.add_argument("path")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run the comparison cases of a manifest")
    p.add_argument("manifest")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("en", help="expand an Eisenberg-Noe spec into a network file")
    p.add_argument("--compact", help="compact JSON spec")
    p.add_argument("--assets", help="comma-separated external assets, institutions 1..n")
    p.add_argument("--liability", action="append", type=_parse_liability,
                   help="DEBTOR:CREDITOR:AMOUNT (repeatable)")
    p.add_argument("--presentation", choices=("bounded", "unbounded"), default="unbounded")
    common(p)
    p.set_defaults(func=cmd_en)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
