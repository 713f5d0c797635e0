"""Clearing sections of decorated liability networks."""
from .clearing import (
    ClearingSection, CyclicNetworkError, NotAFixedPointError, SolveReport, SolverError,
    acyclic_solve, aggregate, banach_solve, distribute, enumerate_sections, extreme_section,
    kleene_greatest, kleene_least, lipschitz_bound, phi, phi_dual, transport_to_edges,
    transport_to_institutions,
)
from .lattice import (
    FLOAT, INF, RATIONAL, DiscreteSpace, FiniteLattice, Interval, LatticeError, MetricSpec,
    PrincipalIdeal, ProductSpace, distance, principal_ideal, product,
)
from .models import (
    EisenbergNoeInstance, LLNInstance, eisenberg_noe, eisenberg_noe_bounded, lln, redenominate,
)
from .network import (
    Edge, LiabilityNetwork, NetworkValidationError, Violation, check_network, check_section,
    validate_network,
)
from .sheaf import build_hypergraph, build_sheaf, incidence_arrows
from .specs import (
    IdentityCapped, JoinAll, LinearCapped, Proportional, Sum, SumCapped, TableAggregator,
    TableDistributor,
)

__version__ = "0.1.0"

__all__ = [
    "ClearingSection",
    "CyclicNetworkError",
    "DiscreteSpace",
    "Edge",
    "EisenbergNoeInstance",
    "FLOAT",
    "FiniteLattice",
    "INF",
    "IdentityCapped",
    "Interval",
    "JoinAll",
    "LLNInstance",
    "LatticeError",
    "LiabilityNetwork",
    "LinearCapped",
    "MetricSpec",
    "NetworkValidationError",
    "NotAFixedPointError",
    "PrincipalIdeal",
    "ProductSpace",
    "Proportional",
    "RATIONAL",
    "SolveReport",
    "SolverError",
    "Sum",
    "SumCapped",
    "TableAggregator",
    "TableDistributor",
    "Violation",
    "acyclic_solve",
    "aggregate",
    "banach_solve",
    "build_hypergraph",
    "build_sheaf",
    "check_network",
    "check_section",
    "distance",
    "distribute",
    "eisenberg_noe",
    "eisenberg_noe_bounded",
    "enumerate_sections",
    "extreme_section",
    "incidence_arrows",
    "kleene_greatest",
    "kleene_least",
    "lipschitz_bound",
    "lln",
    "phi",
    "phi_dual",
    "principal_ideal",
    "product",
    "redenominate",
    "transport_to_edges",
    "transport_to_institutions",
    "validate_network",
]
