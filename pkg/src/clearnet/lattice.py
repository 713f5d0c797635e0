"""Payment spaces: the ordered value sets attached to institutions.

Four kinds are supported:

``Interval``
    Extended nonnegative real interval ``[lo, hi]``; ``hi`` may be infinite.
``FiniteLattice``
    Finite lattice given by an explicit ``leq`` matrix, validated at
    construction.  Values are element indices.
``DiscreteSpace``
    Finite set with the discrete order.  Not a lattice; only usable by
    order-free solvers (acyclic propagation, enumeration).
``ProductSpace``
    Componentwise product of other spaces.  Values are tuples.

Principal ideals ``↓λ`` of an interval are intervals; of a finite lattice
they are :class:`PrincipalIdeal` views that keep the parent's indices.

ExtReal values are ``fractions.Fraction`` (rational backend) or ``float``
(float backend).  Infinity is ``math.inf`` in both.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Any, Sequence, Union

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)
FLOAT_TOL = 1e-12

INF = math.inf

Number = Union[Fraction, float, int]


class LatticeError(ValueError):
    """Raised for invalid spaces or values that do not belong to a space."""


# --------------------------------------------------------------------------
# extended-real arithmetic
# --------------------------------------------------------------------------

def is_number(v: Any) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool) and not (
        isinstance(v, float) and math.isnan(v))


def scale(c: Number, x: Number) -> Number:
    """``c * x`` with the convention ``0 * inf = 0``."""
    if c == 0 or x == 0:
        return Fraction(0) if isinstance(c, Fraction) or isinstance(x, Fraction) else 0.0
    return c * x


def coerce(value: Number, backend: str) -> Number:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if value == INF:
        return INF
    if backend == RATIONAL:
        return Fraction(value)
    return float(value)


def parse_value(text: Union[str, Number], backend: str = RATIONAL) -> Number:
    """Parse a decimal / ``p/q`` literal or ``"inf"``."""
    if isinstance(text, str):
        t = text.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return INF
        if backend == RATIONAL:
            return Fraction(t)
        return float(Fraction(t)) if "/" in t else float(t)
    return coerce(text, backend)


def format_value(value: Number) -> str:
    """Inverse of :func:`parse_value`; terminating rationals print as decimals."""
    if value == INF:
        return "inf"
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return repr(value)
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = q * 10 ** digits
    sign = "-" if scaled < 0 else ""
    n = abs(scaled.numerator)
    whole, frac = divmod(n, 10 ** digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0')}"


def _close(a: Number, b: Number, tol: float) -> bool:
    if a == b:
        return True
    if tol == 0 or a == INF or b == INF:
        return False
    return abs(a - b) <= tol


# --------------------------------------------------------------------------
# spaces
# --------------------------------------------------------------------------

class PaymentSpace:
    """Common protocol; concrete kinds below."""

    is_lattice = True
    is_finite = False
    is_numeric = False

    def contains(self, v: Any) -> bool:
        raise NotImplementedError

    def check(self, v: Any) -> None:
        if not self.contains(v):
            raise LatticeError(f"{v!r} is not an element of {self}")

    def leq(self, a: Any, b: Any) -> bool:
        raise NotImplementedError

    def join(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def meet(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def bottom(self) -> Any:
        raise NotImplementedError

    def top(self) -> Any:
        raise NotImplementedError

    def enumerate(self) -> list:
        raise LatticeError(f"{self} is infinite and cannot be enumerated")

    def equal(self, a: Any, b: Any, tol: float = 0) -> bool:
        return a == b

    def lt(self, a: Any, b: Any) -> bool:
        return self.leq(a, b) and not self.equal(a, b)


@dataclass(frozen=True)
class Interval(PaymentSpace):
    """Closed extended-real interval ``[lo, hi]`` with the usual order."""

    lo: Number = Fraction(0)
    hi: Number = INF
    is_numeric = True

    def __post_init__(self):
        if not (is_number(self.lo) and is_number(self.hi)):
            raise LatticeError(f"interval endpoints must be numbers: {self.lo!r}, {self.hi!r}")
        if self.lo == INF or self.lo > self.hi:
            raise LatticeError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def is_finite(self) -> bool:  # type: ignore[override]
        return self.lo == self.hi

    def contains(self, v):
        return is_number(v) and self.lo <= v <= self.hi

    def _typed(self, *vs):
        for v in vs:
            if not is_number(v):
                raise LatticeError(f"{v!r} is not an extended real")

    def leq(self, a, b):
        self._typed(a, b)
        return a <= b

    def join(self, a, b):
        self._typed(a, b)
        return max(a, b)

    def meet(self, a, b):
        self._typed(a, b)
        return min(a, b)

    def bottom(self):
        return self.lo

    def top(self):
        return self.hi

    def enumerate(self):
        if self.lo == self.hi:
            return [self.lo]
        return super().enumerate()

    def equal(self, a, b, tol=0):
        return _close(a, b, tol)

    def __str__(self):
        return f"[{format_value(self.lo)}, {format_value(self.hi)}]"


def _closure(n: int, pairs) -> list[list[bool]]:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        leq[a][b] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return leq


@dataclass(frozen=True)
class FiniteLattice(PaymentSpace):
    """A finite lattice given by element names and an explicit order matrix.

    ``order[i][j]`` is true iff element ``i`` is below element ``j``.  The
    matrix is checked to be a partial order in which every pair has a join
    and a meet; a nonempty finite lattice is then complete.
    """

    elements: tuple
    order: tuple
    _join: tuple = field(init=False, repr=False, compare=False)
    _meet: tuple = field(init=False, repr=False, compare=False)
    is_finite = True

    def __post_init__(self):
        elements = tuple(str(e) for e in self.elements)
        order = tuple(tuple(bool(c) for c in row) for row in self.order)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "order", order)
        n = len(elements)
        if n == 0:
            raise LatticeError("a lattice needs at least one element")
        if len(set(elements)) != n:
            raise LatticeError("duplicate element names")
        if len(order) != n or any(len(row) != n for row in order):
            raise LatticeError("order matrix must be square and match the elements")
        for i in range(n):
            if not order[i][i]:
                raise LatticeError(f"order is not reflexive at {elements[i]}")
            for j in range(n):
                if i != j and order[i][j] and order[j][i]:
                    raise LatticeError(
                        f"order is not antisymmetric: {elements[i]}, {elements[j]}")
                if order[i][j]:
                    for k in range(n):
                        if order[j][k] and not order[i][k]:
                            raise LatticeError(
                                f"order is not transitive: {elements[i]} <= {elements[j]}"
                                f" <= {elements[k]}")
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                ups = [k for k in range(n) if order[i][k] and order[j][k]]
                lub = [u for u in ups if all(order[u][w] for w in ups)]
                downs = [k for k in range(n) if order[k][i] and order[k][j]]
                glb = [d for d in downs if all(order[w][d] for w in downs)]
                if not lub:
                    raise LatticeError(f"{elements[i]} and {elements[j]} have no join")
                if not glb:
                    raise LatticeError(f"{elements[i]} and {elements[j]} have no meet")
                join[i][j] = join[j][i] = lub[0]
                meet[i][j] = meet[j][i] = glb[0]
        object.__setattr__(self, "_join", tuple(map(tuple, join)))
        object.__setattr__(self, "_meet", tuple(map(tuple, meet)))

    @classmethod
    def from_covers(cls, elements: Sequence[str], covers) -> "FiniteLattice":
        """Build from covering pairs ``(lower, upper)`` given by name."""
        elements = [str(e) for e in elements]
        index = {e: i for i, e in enumerate(elements)}
        try:
            pairs = [(index[str(a)], index[str(b)]) for a, b in covers]
        except KeyError as exc:
            raise LatticeError(f"unknown element in covers: {exc.args[0]}") from None
        return cls(tuple(elements), tuple(map(tuple, _closure(len(elements), pairs))))

    @classmethod
    def chain(cls, n: int, names: Sequence[str] | None = None) -> "FiniteLattice":
        names = list(names) if names is not None else [str(i) for i in range(n)]
        return cls(tuple(names), tuple(tuple(i <= j for j in range(n)) for i in range(n)))

    def covers(self) -> list[tuple[str, str]]:
        """Hasse diagram edges by name, in index order."""
        n = len(self.elements)
        out = []
        for i in range(n):
            for j in range(n):
                if i != j and self.order[i][j] and not any(
                        k not in (i, j) and self.order[i][k] and self.order[k][j]
                        for k in range(n)):
                    out.append((self.elements[i], self.elements[j]))
        return out

    def index(self, name: str) -> int:
        try:
            return self.elements.index(str(name))
        except ValueError:
            raise LatticeError(f"{name!r} is not an element of {self}") from None

    def name(self, v: int) -> str:
        self.check(v)
        return self.elements[v]

    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(self.elements)

    def leq(self, a, b):
        self.check(a)
        self.check(b)
        return self.order[a][b]

    def join(self, a, b):
        self.check(a)
        self.check(b)
        return self._join[a][b]

    def meet(self, a, b):
        self.check(a)
        self.check(b)
        return self._meet[a][b]

    def bottom(self):
        return next(i for i in range(len(self.elements))
                    if all(self.order[i]))

    def top(self):
        n = len(self.elements)
        return next(i for i in range(n) if all(self.order[k][i] for k in range(n)))

    def enumerate(self):
        return list(range(len(self.elements)))

    def height(self) -> int:
        """Length (in steps) of the longest chain."""
        n = len(self.elements)
        memo: dict[int, int] = {}

        def up(i):
            if i not in memo:
                memo[i] = max((1 + up(j) for j in range(n)
                               if j != i and self.order[i][j]), default=0)
            return memo[i]

        return up(self.bottom())

    def __str__(self):
        return "{" + ", ".join(self.elements) + "}"


@dataclass(frozen=True)
class DiscreteSpace(PaymentSpace):
    """Finite set ordered by equality.  Only singletons are lattices."""

    elements: tuple
    is_finite = True

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        if not self.elements or len(set(self.elements)) != len(self.elements):
            raise LatticeError("discrete space needs distinct elements")

    @property
    def is_lattice(self) -> bool:  # type: ignore[override]
        return len(self.elements) == 1

    def index(self, name):
        try:
            return self.elements.index(str(name))
        except ValueError:
            raise LatticeError(f"{name!r} is not an element of {self}") from None

    def name(self, v):
        self.check(v)
        return self.elements[v]

    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < len(self.elements)

    def leq(self, a, b):
        self.check(a)
        self.check(b)
        return a == b

    def join(self, a, b):
        if not self.leq(a, b):
            raise LatticeError("distinct elements of a discrete space have no join")
        return a

    meet = join

    def bottom(self):
        if not self.is_lattice:
            raise LatticeError("discrete space has no bottom")
        return 0

    top = bottom

    def enumerate(self):
        return list(range(len(self.elements)))

    def __str__(self):
        return "discrete{" + ", ".join(self.elements) + "}"


@dataclass(frozen=True)
class PrincipalIdeal(PaymentSpace):
    """The down-set ``↓bound`` of a finite parent space, sharing its indices."""

    parent: PaymentSpace
    bound: Any
    is_finite = True

    def __post_init__(self):
        self.parent.check(self.bound)

    @property
    def is_lattice(self):  # type: ignore[override]
        return self.parent.is_lattice

    @property
    def elements(self):
        return self.parent.elements

    def index(self, name):
        v = self.parent.index(name)
        self.check(v)
        return v

    def name(self, v):
        self.check(v)
        return self.parent.name(v)

    def contains(self, v):
        return self.parent.contains(v) and self.parent.leq(v, self.bound)

    def leq(self, a, b):
        self.check(a)
        self.check(b)
        return self.parent.leq(a, b)

    def join(self, a, b):
        self.check(a)
        self.check(b)
        return self.parent.join(a, b)

    def meet(self, a, b):
        self.check(a)
        self.check(b)
        return self.parent.meet(a, b)

    def bottom(self):
        return self.parent.bottom()

    def top(self):
        return self.bound

    def enumerate(self):
        return [v for v in self.parent.enumerate() if self.parent.leq(v, self.bound)]

    def __str__(self):
        return f"↓{self.parent.name(self.bound)} in {self.parent}"


@dataclass(frozen=True)
class ProductSpace(PaymentSpace):
    """Finite product with componentwise order; the empty product has one element ``()``."""

    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def is_lattice(self):  # type: ignore[override]
        return all(f.is_lattice for f in self.factors)

    @property
    def is_finite(self):  # type: ignore[override]
        return all(f.is_finite for f in self.factors)

    def contains(self, v):
        return (isinstance(v, tuple) and len(v) == len(self.factors)
                and all(f.contains(c) for f, c in zip(self.factors, v)))

    def _typed(self, *vs):
        for v in vs:
            if not isinstance(v, tuple) or len(v) != len(self.factors):
                raise LatticeError(f"{v!r} is not a {len(self.factors)}-tuple")

    def leq(self, a, b):
        self._typed(a, b)
        return all(f.leq(x, y) for f, x, y in zip(self.factors, a, b))

    def join(self, a, b):
        self._typed(a, b)
        return tuple(f.join(x, y) for f, x, y in zip(self.factors, a, b))

    def meet(self, a, b):
        self._typed(a, b)
        return tuple(f.meet(x, y) for f, x, y in zip(self.factors, a, b))

    def bottom(self):
        return tuple(f.bottom() for f in self.factors)

    def top(self):
        return tuple(f.top() for f in self.factors)

    def enumerate(self):
        return list(itertools.product(*(f.enumerate() for f in self.factors)))

    def equal(self, a, b, tol=0):
        return all(f.equal(x, y, tol) for f, x, y in zip(self.factors, a, b))

    def __str__(self):
        return " x ".join(str(f) for f in self.factors) or "1"


def principal_ideal(space: PaymentSpace, bound: Any) -> PaymentSpace:
    """``↓bound``: an interval ``[lo, bound]``, or an index-preserving view."""
    space.check(bound)
    if isinstance(space, Interval):
        return space if bound == space.hi else Interval(space.lo, bound)
    if isinstance(space, PrincipalIdeal):
        return principal_ideal(space.parent, bound)
    if space.is_lattice and bound == space.top():
        return space
    if isinstance(space, ProductSpace):
        return ProductSpace(tuple(principal_ideal(f, b) for f, b in zip(space.factors, bound)))
    return PrincipalIdeal(space, bound)


def product(spaces: Sequence[PaymentSpace]) -> ProductSpace:
    return ProductSpace(tuple(spaces))


def numeric_base(space: PaymentSpace) -> bool:
    """True for interval spaces (the ones closed-form arithmetic specs act on)."""
    return isinstance(space, Interval)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricSpec:
    """Per-factor distances aggregated by an l1 sum.

    ``interval`` is ``"abs"`` or ``"discrete"``; ``finite`` is ``"discrete"``.
    ``None`` leaves the kind without a registered distance.
    """

    interval: str | None = "abs"
    finite: str | None = "discrete"

    @classmethod
    def named(cls, name: str) -> "MetricSpec":
        if name == "l1-abs":
            return cls("abs", "discrete")
        if name == "l1-discrete":
            return cls("discrete", "discrete")
        raise ValueError(f"unknown metric {name!r}")


def distance(metric: MetricSpec, space: PaymentSpace, a: Any, b: Any) -> Number:
    if isinstance(space, ProductSpace):
        total: Number = 0
        for f, x, y in zip(space.factors, a, b):
            total = total + distance(metric, f, x, y)
        return total
    space.check(a)
    space.check(b)
    if isinstance(space, Interval):
        if metric.interval is None:
            raise LatticeError("no distance registered for interval spaces")
        if a == b:
            return 0
        if metric.interval == "discrete":
            return 1
        if a == INF or b == INF:
            return INF
        return abs(a - b)
    if metric.finite is None:
        raise LatticeError("no distance registered for finite spaces")
    return 0 if a == b else 1
