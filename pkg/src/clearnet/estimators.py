"""scikit-learn style wrappers around the solvers.

``fit`` takes a :class:`~clearnet.network.LiabilityNetwork` in place of a
feature matrix.  Hyperparameters live in ``__init__`` so ``get_params``,
``set_params`` and ``sklearn.base.clone`` work, which makes parameter sweeps
over many networks straightforward.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import clearing
from .lattice import MetricSpec
from .network import check_network


class ClearingSolver(BaseEstimator):
    """Compute a clearing section.

    Parameters
    ----------
    method : {"least", "greatest", "acyclic", "banach"}
    max_iter : int
    tol : float
        Stopping tolerance; only used by float networks and by ``banach``.
    metric : {"l1-abs", "l1-discrete"}
        Distance for ``banach``.
    assume_filtered_infima : bool
        Let ``greatest`` start from an infinite top with uncapped aggregators.

    Attributes
    ----------
    x_ : dict
        Institution states of the section.
    p_ : dict
        Edge payments of the section.
    report_ : SolveReport
    """

    def __init__(self, method="least", max_iter=clearing.DEFAULT_MAX_ITER,
                 tol=clearing.DEFAULT_TOL, metric="l1-abs", assume_filtered_infima=False):
        self.method = method
        self.max_iter = max_iter
        self.tol = tol
        self.metric = metric
        self.assume_filtered_infima = assume_filtered_infima

    def fit(self, network, y=None, seed=None):
        net = check_network(network)
        if self.method == "least":
            section, report = clearing.kleene_least(net, self.max_iter, self.tol)
        elif self.method == "greatest":
            section, report = clearing.kleene_greatest(
                net, self.max_iter, self.tol,
                assume_filtered_infima=self.assume_filtered_infima)
        elif self.method == "acyclic":
            section, report = clearing.acyclic_solve(net, seed=seed)
        elif self.method == "banach":
            section, report = clearing.banach_solve(
                net, MetricSpec.named(self.metric), self.tol, self.max_iter, seed=seed)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.x_, self.p_, self.report_ = section.x, section.p, report
        self.network_ = net
        return self

    @property
    def converged_(self) -> bool:
        check_is_fitted(self, "report_")
        return self.report_.converged

    def transform(self, states):
        """Apply the clearing operator of the fitted network to each state."""
        check_is_fitted(self, "network_")
        return [clearing.phi(self.network_, x) for x in states]


class SectionEnumerator(BaseEstimator):
    """All clearing sections of a finite network, by exhaustion."""

    def fit(self, network, y=None):
        net = check_network(network)
        self.sections_ = clearing.enumerate_sections(net)
        self.least_ = clearing.extreme_section(net, self.sections_)
        self.greatest_ = clearing.extreme_section(net, self.sections_, greatest=True)
        return self
