"""JSON formats: network files, compact Eisenberg–Noe specs, reports, manifests.

Numeric literals are strings (decimals, ``p/q`` or ``"inf"``) so the rational
backend round-trips exactly.  Finite-lattice values are element names.
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .lattice import (
    RATIONAL, DiscreteSpace, FiniteLattice, Interval, LatticeError, PaymentSpace,
    ProductSpace, format_value, parse_value,
)
from .models import EisenbergNoeInstance, eisenberg_noe, eisenberg_noe_bounded
from .network import Edge, LiabilityNetwork, NetworkError
from .specs import (
    IdentityCapped, JoinAll, LinearCapped, Proportional, Sum, SumCapped,
    TableAggregator, TableDistributor,
)

FORMAT_VERSION = "clearnet-network/1"
BACKEND_ENV = "CLEARNET_BACKEND"


class FormatError(ValueError):
    pass


def default_backend() -> str:
    return os.environ.get(BACKEND_ENV, RATIONAL)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# values and spaces
# --------------------------------------------------------------------------

def read_value(space: PaymentSpace, text, backend: str):
    if isinstance(space, ProductSpace):
        return tuple(read_value(f, t, backend) for f, t in zip(space.factors, text))
    if isinstance(space, Interval):
        return parse_value(text, backend)
    return space.index(text)


def write_value(space: PaymentSpace, value):
    if isinstance(space, ProductSpace):
        return [write_value(f, v) for f, v in zip(space.factors, value)]
    if isinstance(space, Interval):
        return format_value(value)
    return space.name(value)


def read_space(doc: dict, backend: str) -> PaymentSpace:
    if "interval" in doc:
        lo, hi = doc["interval"]
        return Interval(parse_value(lo, backend), parse_value(hi, backend))
    if "finite" in doc:
        spec = doc["finite"]
        return FiniteLattice.from_covers(spec["elements"], spec.get("covers", []))
    if "discrete" in doc:
        return DiscreteSpace(tuple(doc["discrete"]))
    raise FormatError(f"unknown space spec {doc!r}")


def write_space(space: PaymentSpace) -> dict:
    if isinstance(space, Interval):
        return {"interval": [format_value(space.lo), format_value(space.hi)]}
    if isinstance(space, FiniteLattice):
        return {"finite": {"elements": list(space.elements),
                           "covers": [list(c) for c in space.covers()]}}
    if isinstance(space, DiscreteSpace):
        return {"discrete": list(space.elements)}
    raise FormatError(f"cannot serialize space {space}")


# --------------------------------------------------------------------------
# specs
# --------------------------------------------------------------------------

def _read_distributor(doc, src, ideal, backend):
    kind = doc.get("kind")
    num = lambda k: parse_value(doc[k], backend)  # noqa: E731
    if kind == "proportional":
        return Proportional(num("total"), num("cap"))
    if kind == "linear_capped":
        return LinearCapped(num("slope"), num("cap"))
    if kind == "identity_capped":
        return IdentityCapped(read_value(src, doc["cap"], backend))
    if kind == "table":
        return TableDistributor({read_value(src, k, backend): read_value(ideal, v, backend)
                                 for k, v in doc["map"]})
    raise FormatError(f"unknown distributor kind {kind!r}")


def _write_distributor(spec, src, ideal):
    if isinstance(spec, Proportional):
        return {"kind": spec.kind, "total": format_value(spec.total), "cap": format_value(spec.cap)}
    if isinstance(spec, LinearCapped):
        return {"kind": spec.kind, "slope": format_value(spec.slope), "cap": format_value(spec.cap)}
    if isinstance(spec, IdentityCapped):
        return {"kind": spec.kind, "cap": write_value(src, spec.cap)}
    if isinstance(spec, TableDistributor):
        return {"kind": spec.kind,
                "map": [[write_value(src, k), write_value(ideal, v)]
                        for k, v in sorted(spec.mapping.items(), key=lambda kv: kv[0])]}
    raise FormatError(f"cannot serialize distributor {spec!r}")


def _read_aggregator(doc, space, in_ideals, backend):
    kind = doc.get("kind")
    if kind == "sum_capped":
        return SumCapped(parse_value(doc["cap"], backend))
    if kind == "sum":
        return Sum()
    if kind == "join_all":
        return JoinAll()
    if kind == "table":
        dom = ProductSpace(tuple(in_ideals))
        return TableAggregator({read_value(dom, k, backend): read_value(space, v, backend)
                                for k, v in doc["map"]})
    raise FormatError(f"unknown aggregator kind {kind!r}")


def _write_aggregator(spec, space, in_ideals):
    if isinstance(spec, SumCapped):
        return {"kind": spec.kind, "cap": format_value(spec.cap)}
    if isinstance(spec, (Sum, JoinAll)):
        return {"kind": spec.kind}
    if isinstance(spec, TableAggregator):
        dom = ProductSpace(tuple(in_ideals))
        return {"kind": spec.kind,
                "map": [[write_value(dom, k), write_value(space, v)]
                        for k, v in sorted(spec.mapping.items())]}
    raise FormatError(f"cannot serialize aggregator {spec!r}")


# --------------------------------------------------------------------------
# networks
# --------------------------------------------------------------------------

def network_from_json(doc: dict, backend: str | None = None) -> LiabilityNetwork:
    """Parse a network document.  Structural problems raise :class:`FormatError`."""
    backend = backend or default_backend()
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported version {doc.get('version')!r}")
    try:
        verts = doc["vertices"]
        edges_doc = doc.get("edges", [])
        spaces = {str(v["id"]): read_space(v["space"], backend) for v in verts}
        edges = [Edge(str(e["id"]), str(e["source"]), str(e["target"])) for e in edges_doc]
        liability, distributor = {}, {}
        for e, ed in zip(edges, edges_doc):
            if e.source not in spaces or e.target not in spaces:
                raise NetworkError(f"edge {e.id} references an unknown vertex")
            liability[e.id] = read_value(spaces[e.source], ed["liability"], backend)
        exogenous = {str(v["id"]): read_value(spaces[str(v["id"])], v["exogenous"], backend)
                     for v in verts}
        # ideals and incoming order are only known once the network exists
        skeleton = LiabilityNetwork(
            tuple(spaces), tuple(edges), spaces, liability, exogenous,
            {e.id: None for e in edges}, {v: None for v in spaces}, backend)
        for e, ed in zip(edges, edges_doc):
            distributor[e.id] = _read_distributor(
                ed["distributor"], spaces[e.source], _ideal(skeleton, e.id), backend)
        aggregator = {}
        for v in verts:
            vid = str(v["id"])
            in_ideals = [_ideal(skeleton, e.id) for e in skeleton.incoming[vid]]
            aggregator[vid] = _read_aggregator(v["aggregator"], spaces[vid], in_ideals, backend)
    except (KeyError, TypeError, ValueError, LatticeError, NetworkError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed network: {exc}") from exc
    return LiabilityNetwork(tuple(spaces), tuple(edges), spaces, liability, exogenous,
                            distributor, aggregator, backend,
                            metadata={"metric": doc["metric"]} if "metric" in doc else {})


def _ideal(net, eid):
    try:
        return net.ideals[eid]
    except LatticeError as exc:
        raise FormatError(f"edge {eid}: {exc}") from exc


def network_to_json(net: LiabilityNetwork) -> dict:
    doc: dict = {"version": FORMAT_VERSION, "vertices": [], "edges": []}
    for v in net.vertices:
        space = net.spaces[v]
        doc["vertices"].append({
            "id": v,
            "space": write_space(space),
            "exogenous": write_value(space, net.exogenous[v]),
            "aggregator": _write_aggregator(net.aggregator[v], space,
                                            [net.ideals[e.id] for e in net.incoming[v]]),
        })
    for e in net.edges:
        src = net.spaces[e.source]
        doc["edges"].append({
            "id": e.id, "source": e.source, "target": e.target,
            "liability": write_value(src, net.liability[e.id]),
            "distributor": _write_distributor(net.distributor[e.id], src, net.ideals[e.id]),
        })
    if "metric" in net.metadata:
        doc["metric"] = net.metadata["metric"]
    return doc


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


def load_network(path, backend: str | None = None) -> LiabilityNetwork:
    doc = load_json(path)
    if is_compact_en(doc):
        return en_from_compact(doc, backend=backend)
    return network_from_json(doc, backend)


def write_network(net: LiabilityNetwork, path) -> None:
    Path(path).write_text(dumps(network_to_json(net)), encoding="utf-8")


# --------------------------------------------------------------------------
# compact Eisenberg–Noe specs
# --------------------------------------------------------------------------

def is_compact_en(doc) -> bool:
    return isinstance(doc, dict) and "assets" in doc and "vertices" not in doc


def en_instance_from_compact(doc: dict, backend: str | None = None) -> EisenbergNoeInstance:
    """``{"assets": [...] or {id: value}, "liabilities": [[i, j, amount], ...]}``.

    A list of assets numbers institutions from 1.
    """
    backend = backend or default_backend()
    assets = doc["assets"]
    if isinstance(assets, list):
        assets = {str(i + 1): a for i, a in enumerate(assets)}
    assets = {str(k): parse_value(v, backend) for k, v in assets.items()}
    liabilities = {}
    for i, j, amount in doc.get("liabilities", []):
        key = (str(i), str(j))
        if key in liabilities:
            raise FormatError(f"duplicate liability {i}->{j}")
        liabilities[key] = parse_value(amount, backend)
    return EisenbergNoeInstance(assets, liabilities)


def en_from_compact(doc: dict, presentation: str | None = None,
                    backend: str | None = None) -> LiabilityNetwork:
    backend = backend or default_backend()
    inst = en_instance_from_compact(doc, backend)
    presentation = presentation or doc.get("presentation", "unbounded")
    if presentation == "bounded":
        return eisenberg_noe_bounded(inst, backend)
    if presentation == "unbounded":
        return eisenberg_noe(inst, backend)
    raise FormatError(f"unknown presentation {presentation!r}")


# --------------------------------------------------------------------------
# states and reports
# --------------------------------------------------------------------------

def state_to_json(net: LiabilityNetwork, x: dict) -> dict:
    return {v: write_value(net.spaces[v], x[v]) for v in net.vertices}


def payments_to_json(net: LiabilityNetwork, p: dict) -> dict:
    return {e.id: write_value(net.ideals[e.id], p[e.id]) for e in net.edges}


def state_from_json(net: LiabilityNetwork, doc: dict) -> dict:
    return {v: read_value(net.spaces[v], doc[v], net.backend) for v in net.vertices}


def payments_from_json(net: LiabilityNetwork, doc: dict) -> dict:
    return {e.id: read_value(net.ideals[e.id], doc[e.id], net.backend) for e in net.edges}
