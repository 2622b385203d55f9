"""Phase values: angles on the circle and elements of finite abelian groups.

Spider nodes and phased gates carry a phase drawn from an abelian group.
Two carriers are supported: the circle group (angles in [0, 2pi), compared
with a small wrap tolerance) and finite abelian groups presented by
invariant factors, e.g. Z4 or Z2 x Z2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence, Union

TWO_PI = 2.0 * math.pi

# Angles closer than this to 0 (mod 2pi) are treated as zero.
ANGLE_TOL = 1e-12


def _wrap(value: float) -> float:
    v = math.fmod(value, TWO_PI)
    if v < 0.0:
        v += TWO_PI
    if v >= TWO_PI - ANGLE_TOL or v <= ANGLE_TOL:
        v = 0.0
    return v


@dataclass(frozen=True)
class Angle:
    """An element of the circle group, stored in [0, 2pi)."""

    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _wrap(self.value))

    @staticmethod
    def from_degrees(deg: float) -> "Angle":
        return Angle(math.radians(deg))

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.value + other.value)

    def __neg__(self) -> "Angle":
        return Angle(-self.value)

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.value - other.value)

    def is_zero(self) -> bool:
        return self.value == 0.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        d = _wrap(self.value - other.value)
        return d <= ANGLE_TOL or TWO_PI - d <= ANGLE_TOL

    def __hash__(self) -> int:
        # Coarser than the comparison tolerance so equal angles hash equal.
        return hash(round(self.value / ANGLE_TOL / 16.0))

    def __repr__(self) -> str:
        return f"Angle({self.value!r})"


@dataclass(frozen=True)
class Param:
    """An unwrapped real gate parameter.

    Rotation gates built from half-angles are 4pi-periodic, so their
    parameter must not be reduced mod 2pi; negation under the dagger is
    exact.  Compared with the same tolerance as angles."""

    value: float

    def __add__(self, other: "Param") -> "Param":
        return Param(self.value + other.value)

    def __neg__(self) -> "Param":
        return Param(-self.value)

    def __sub__(self, other: "Param") -> "Param":
        return Param(self.value - other.value)

    def is_zero(self) -> bool:
        return abs(self.value) <= ANGLE_TOL

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Param):
            return NotImplemented
        return abs(self.value - other.value) <= ANGLE_TOL

    def __hash__(self) -> int:
        return hash(round(self.value / ANGLE_TOL / 16.0))

    def __repr__(self) -> str:
        return f"Param({self.value!r})"


class FiniteAbelianGroup:
    """Finite abelian group given by invariant factors, Z_{d1} x ... x Z_{dk}."""

    def __init__(self, factors: Sequence[int]):
        if not factors or any(d < 1 for d in factors):
            raise ValueError("factors must be positive integers")
        self.factors = tuple(int(d) for d in factors)

    @property
    def order(self) -> int:
        n = 1
        for d in self.factors:
            n *= d
        return n

    @property
    def exponent(self) -> int:
        e = 1
        for d in self.factors:
            e = math.lcm(e, d)
        return e

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * len(self.factors))

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    def elements(self) -> Iterator["GroupElement"]:
        for coords in product(*(range(d) for d in self.factors)):
            yield GroupElement(self, coords)

    def element_orders(self) -> list[int]:
        return sorted(e.order() for e in self.elements())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return "Z" + "xZ".join(str(d) for d in self.factors)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != len(self.group.factors):
            raise ValueError("coordinate count does not match group rank")
        object.__setattr__(
            self,
            "coords",
            tuple(c % d for c, d in zip(self.coords, self.group.factors)),
        )

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if other.group != self.group:
            raise ValueError("elements of different groups")
        return GroupElement(
            self.group, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-c for c in self.coords))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def order(self) -> int:
        k = 1
        acc = self
        while not acc.is_zero():
            acc = acc + self
            k += 1
        return k

    def index(self) -> int:
        """Mixed-radix position of this element in the group's enumeration."""
        idx = 0
        for c, d in zip(self.coords, self.group.factors):
            idx = idx * d + c
        return idx

    def __repr__(self) -> str:
        return f"({','.join(str(c) for c in self.coords)})@{self.group!r}"


Phase = Union[Angle, GroupElement, Param]


def phase_add(a: Optional[Phase], b: Optional[Phase]) -> Optional[Phase]:
    if a is None:
        return b
    if b is None:
        return a
    if type(a) is not type(b):
        raise TypeError(f"cannot add phases {a!r} and {b!r}")
    return a + b  # type: ignore[operator]


def phase_neg(a: Optional[Phase]) -> Optional[Phase]:
    return None if a is None else -a  # type: ignore[operator]


def phase_is_zero(a: Optional[Phase]) -> bool:
    return a is None or a.is_zero()


def phases_equal(a: Optional[Phase], b: Optional[Phase]) -> bool:
    if phase_is_zero(a) and phase_is_zero(b):
        return True
    if a is None or b is None:
        return False
    if type(a) is not type(b):
        return False
    return a == b


def _order_multiset(factors: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(FiniteAbelianGroup(factors).element_orders())


def _abelian_groups_of_order(n: int) -> Iterator[tuple[int, ...]]:
    """All invariant-factor presentations d1 | d2 | ... with product n."""

    def rec(remaining: int, max_factor: int) -> Iterator[tuple[int, ...]]:
        if remaining == 1:
            yield ()
            return
        d = 2
        while d <= min(remaining, max_factor):
            if remaining % d == 0:
                for rest in rec(remaining // d, d):
                    # invariant factors listed largest-last: append d first
                    yield rest + (d,)
            d += 1

    seen = set()
    for factors in rec(n, n):
        # keep only chains where each factor divides the next
        ok = all(factors[i + 1] % factors[i] == 0 for i in range(len(factors) - 1))
        if ok and factors not in seen:
            seen.add(factors)
            yield factors


def classify_by_orders(orders: Sequence[int]) -> Optional[FiniteAbelianGroup]:
    """Identify a finite abelian group from the multiset of element orders.

    Sufficient for the small groups used here (order <= 16): the order
    multiset separates all abelian groups of equal order in that range.
    """
    orders = tuple(sorted(orders))
    n = len(orders)
    if n == 1:
        return FiniteAbelianGroup((1,)) if orders == (1,) else None
    for factors in _abelian_groups_of_order(n):
        if _order_multiset(factors) == orders:
            return FiniteAbelianGroup(factors)
    return None
