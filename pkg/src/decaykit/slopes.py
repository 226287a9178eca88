"""Exact arithmetic of peripheral slopes and of left-orders on Z + Z.

A slope ``mu^m lambda^n`` is stored by its primitive direction ``(m, n)``
together with a positive weight, so unreduced classes such as
``mu^10 lambda^4 = (mu^5 lambda^2)^2`` keep their multiplicity.

Left-orders on the peripheral lattice are modelled by :class:`ZZOrder`: a
pair of independent integer functionals compared lexicographically.  Only
orders whose boundary line has rational (or infinite) slope are
representable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

__all__ = [
    "INFINITY",
    "Infinity",
    "Slope",
    "ZZOrder",
    "WindowVerdict",
    "ExtendedRational",
    "reduce_slope",
    "cramer_decompose",
    "slope_sign",
    "reverse_order",
    "boundary_slope",
    "decayed_window_check",
    "implies_on_family",
    "slope_from_value",
    "close_under_reversal",
]


class Infinity:
    """The slope value 1/0 (meridian direction). Compares above every rational."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "1/0"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("decaykit.infinity")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True


INFINITY = Infinity()
ExtendedRational = Union[Fraction, Infinity]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Slope:
    """The peripheral element ``mu^(m*weight) lambda^(n*weight)``."""

    m: int
    n: int
    weight: int = 1

    def __post_init__(self) -> None:
        if (self.m, self.n) == (0, 0):
            raise ValueError("the zero class is not a slope")
        if self.n < 0:
            raise ValueError("slopes are normalised to n >= 0")
        if gcd(abs(self.m), self.n) != 1:
            raise ValueError(f"({self.m}, {self.n}) is not primitive; use reduce_slope")
        if self.weight < 1:
            raise ValueError("weight must be positive")

    @property
    def vector(self) -> tuple[int, int]:
        return (self.m * self.weight, self.n * self.weight)

    def value(self) -> ExtendedRational:
        if self.n == 0:
            return INFINITY
        return Fraction(self.m, self.n)

    def primitive(self) -> "Slope":
        return Slope(self.m, self.n, 1)

    def with_weight(self, weight: int) -> "Slope":
        return Slope(self.m, self.n, weight)

    def __str__(self) -> str:
        base = f"mu^{self.m} lambda^{self.n}"
        return base if self.weight == 1 else f"({base})^{self.weight}"


def reduce_slope(m: int, n: int) -> Slope:
    """Split ``mu^m lambda^n`` into primitive direction and weight.

    >>> reduce_slope(10, 4)
    Slope(m=5, n=2, weight=2)
    """
    if (m, n) == (0, 0):
        raise ValueError("the zero class is not a slope")
    if n < 0:
        m, n = -m, -n
    w = gcd(abs(m), n)
    return Slope(m // w, n // w, w)


def slope_from_value(r: Fraction | int) -> Slope:
    r = Fraction(r)
    return Slope(r.numerator, r.denominator)


def cramer_decompose(r1: Slope, r2: Slope, target: Slope) -> tuple[int, int, int]:
    """Positive ``(a, b, c)`` with ``a*r1 + b*r2 = c*target`` in Z^2.

    ``r1`` and ``r2`` must bracket ``target`` strictly.  The determinants
    are taken on primitive directions, so
    ``(mu^p1 lambda^q1)^a (mu^p2 lambda^q2)^b = (mu^m lambda^n)^c``.
    """
    for s in (r1, r2, target):
        if s.n < 1:
            raise ValueError("Cramer decomposition needs finite slopes (n >= 1)")
    if not (r1.value() < target.value() < r2.value()):
        raise ValueError(
            f"need value(r1) < value(target) < value(r2), got "
            f"{r1.value()}, {target.value()}, {r2.value()}"
        )
    p1, q1 = r1.m, r1.n
    p2, q2 = r2.m, r2.n
    m, n = target.m, target.n
    a = n * p2 - q2 * m
    b = q1 * m - n * p1
    c = q1 * p2 - q2 * p1
    assert a > 0 and b > 0 and c > 0
    assert (a * p1 + b * p2, a * q1 + b * q2) == (c * m, c * n)
    return a, b, c


@dataclass(frozen=True)
class ZZOrder:
    """Lexicographic left-order on Z^2: compare by ``f1`` then by ``f2``."""

    f1: tuple[int, int]
    f2: tuple[int, int]

    def __post_init__(self) -> None:
        (a1, b1), (a2, b2) = self.f1, self.f2
        if a1 * b2 - b1 * a2 == 0:
            raise ValueError("functionals of a ZZOrder must be independent")

    def sign_of(self, m: int, n: int) -> int:
        if (m, n) == (0, 0):
            raise ValueError("the identity has no sign")
        s = _sign(self.f1[0] * m + self.f1[1] * n)
        if s:
            return s
        return _sign(self.f2[0] * m + self.f2[1] * n)

    def less(self, x: tuple[int, int], y: tuple[int, int]) -> bool:
        d = (y[0] - x[0], y[1] - x[1])
        return d != (0, 0) and self.sign_of(*d) > 0


def slope_sign(order: ZZOrder, s: Slope) -> int:
    """+1 or -1; does not depend on the weight."""
    return order.sign_of(s.m, s.n)


def reverse_order(order: ZZOrder) -> ZZOrder:
    """The order with positive cone inverted."""
    (a1, b1), (a2, b2) = order.f1, order.f2
    return ZZOrder((-a1, -b1), (-a2, -b2))


def boundary_slope(order: ZZOrder) -> ExtendedRational:
    """Slope of the kernel line of the leading functional."""
    a1, b1 = order.f1
    if a1 == 0:
        return INFINITY
    # a1*m + b1*n = 0  ->  m/n = -b1/a1
    return Fraction(-b1, a1)


class WindowVerdict(enum.Enum):
    ALL_POSITIVE = "ALL_POSITIVE"
    ALL_NEGATIVE = "ALL_NEGATIVE"
    MIXED = "MIXED"


def decayed_window_check(order: ZZOrder, r: Fraction | int) -> WindowVerdict:
    """Decide the sign pattern of ``order`` on every slope of value >= r.

    The slopes of value in ``[r, oo)`` fill the half-open cone spanned by the
    ray through ``(r.numerator, r.denominator)`` (included) and the meridian
    ray ``(1, 0)`` (excluded).  The leading functional is linear on that
    cone, so its endpoint values settle the interior; the tie-break
    functional only matters on the starting ray.
    """
    r = Fraction(r)
    start = (r.numerator, r.denominator)
    a1, b1 = order.f1
    at_start = _sign(a1 * start[0] + b1 * start[1])
    at_end = _sign(a1)
    # not both zero: f1 would then vanish on two independent vectors
    if at_start * at_end < 0:
        return WindowVerdict.MIXED
    interior = at_start or at_end
    if order.sign_of(*start) != interior:
        return WindowVerdict.MIXED
    return WindowVerdict.ALL_POSITIVE if interior > 0 else WindowVerdict.ALL_NEGATIVE


def implies_on_family(family: Iterable[ZZOrder], g: Slope, h: Slope) -> bool:
    """True when ``g`` positive forces ``h`` positive in every order listed."""
    return all(slope_sign(o, h) > 0 for o in family if slope_sign(o, g) > 0)


def close_under_reversal(family: Sequence[ZZOrder]) -> list[ZZOrder]:
    out = list(family)
    seen = set(out)
    for o in family:
        rev = reverse_order(o)
        if rev not in seen:
            seen.add(rev)
            out.append(rev)
    return out
