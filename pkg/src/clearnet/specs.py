"""Closed-form distributor and aggregator specifications.

Distributors map a source state to a payment on one edge.  Aggregators
combine the exogenous resource with the tuple of incoming payments.  Being
tagged data rather than callbacks, each spec can report a Lipschitz constant,
its active affine piece, and be rescaled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .lattice import INF, LatticeError, Number, PaymentSpace, is_number, numeric_base, scale


class TableEntryError(LatticeError):
    """A table spec has no entry for the requested argument."""


def _require_numeric(space: PaymentSpace, what: str) -> None:
    if not numeric_base(space):
        raise LatticeError(f"{what} needs an interval space, got {space}")


# --------------------------------------------------------------------------
# distributors  d_e : P_s(e) -> ↓λ_e
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Proportional:
    """``min(x * cap / total, cap)``; identically zero when ``total == 0``."""

    total: Number
    cap: Number
    kind = "proportional"

    def __call__(self, x, space):
        _require_numeric(space, "proportional distributor")
        if self.total == 0:
            return space.lo * 0
        return min(scale(self.cap / self.total, x), self.cap)

    @property
    def lipschitz(self):
        return 0 if self.total == 0 else self.cap / self.total

    def affine_piece(self, x):
        if self.total == 0:
            return (0, 0)
        rate = self.cap / self.total
        return (rate, 0) if scale(rate, x) <= self.cap else (0, self.cap)

    def scaled(self, alpha):
        return Proportional(scale(alpha, self.total), scale(alpha, self.cap))


@dataclass(frozen=True)
class LinearCapped:
    """``min(slope * x, cap)`` with ``0 * inf = 0``."""

    slope: Number
    cap: Number
    kind = "linear_capped"

    def __call__(self, x, space):
        _require_numeric(space, "linear distributor")
        return min(scale(self.slope, x), self.cap)

    @property
    def lipschitz(self):
        return self.slope

    def affine_piece(self, x):
        return (self.slope, 0) if scale(self.slope, x) <= self.cap else (0, self.cap)

    def scaled(self, alpha):
        return LinearCapped(self.slope, scale(alpha, self.cap))


@dataclass(frozen=True)
class IdentityCapped:
    """``meet(x, cap)`` in the source space."""

    cap: Any
    kind = "identity_capped"

    def __call__(self, x, space):
        return space.meet(x, self.cap)

    @property
    def lipschitz(self):
        return 1

    def affine_piece(self, x):
        if not is_number(self.cap):
            return None
        return (1, 0) if x <= self.cap else (0, self.cap)

    def scaled(self, alpha):
        return IdentityCapped(scale(alpha, self.cap))


@dataclass(frozen=True)
class TableDistributor:
    """Explicit finite map from source values to payments."""

    mapping: Mapping
    kind = "table"

    def __call__(self, x, space):
        try:
            return self.mapping[x]
        except KeyError:
            raise TableEntryError(f"distributor table has no entry for {x!r}") from None

    lipschitz = None

    def affine_piece(self, x):
        return None


# --------------------------------------------------------------------------
# aggregators  â_v : P_v x prod ↓λ_e -> P_v
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SumCapped:
    """``min(cap, r + sum(p))``."""

    cap: Number
    kind = "sum_capped"

    def __call__(self, r, incoming, space):
        _require_numeric(space, "capped-sum aggregator")
        return min(self.cap, r + sum(incoming))

    lipschitz = 1
    capped = True

    def affine_piece(self, r, incoming):
        s = r + sum(incoming)
        return ("sum", r) if s <= self.cap else ("const", self.cap)

    def scaled(self, alpha):
        return SumCapped(scale(alpha, self.cap))


@dataclass(frozen=True)
class Sum:
    """``r + sum(p)`` without a cap."""

    kind = "sum"

    def __call__(self, r, incoming, space):
        _require_numeric(space, "sum aggregator")
        return r + sum(incoming)

    lipschitz = 1
    capped = False

    def affine_piece(self, r, incoming):
        return ("sum", r)

    def scaled(self, alpha):
        return self


@dataclass(frozen=True)
class JoinAll:
    """Lattice join of the exogenous value and every incoming payment."""

    kind = "join_all"

    def __call__(self, r, incoming, space):
        out = r
        for p in incoming:
            out = space.join(out, p)
        return out

    lipschitz = None
    capped = False

    def affine_piece(self, r, incoming):
        return None

    def scaled(self, alpha):
        return self


@dataclass(frozen=True)
class TableAggregator:
    """Explicit map from incoming-payment tuples to states.

    The exogenous resource is folded into the table (it is the partial
    aggregator directly), so ``r`` is ignored.
    """

    mapping: Mapping
    kind = "table"

    def __call__(self, r, incoming, space):
        try:
            return self.mapping[tuple(incoming)]
        except KeyError:
            raise TableEntryError(f"aggregator table has no entry for {tuple(incoming)!r}") from None

    lipschitz = None
    capped = True

    def affine_piece(self, r, incoming):
        return None


DISTRIBUTORS = {c.kind: c for c in (Proportional, LinearCapped, IdentityCapped, TableDistributor)}
AGGREGATORS = {c.kind: c for c in (SumCapped, Sum, JoinAll, TableAggregator)}


def is_capped(spec, space) -> bool:
    """True when the aggregator keeps an unbounded space's top out of reach."""
    if isinstance(spec, SumCapped):
        return spec.cap != INF
    return bool(spec.capped)
