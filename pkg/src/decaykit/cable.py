"""Cable-knot group data.

Generators of the cable peripheral group are written ``m`` (companion
meridian), ``l`` (companion longitude) and ``t`` (the core of the pattern
solid torus), with ``t^p = m^q l^p``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .backends import CentralAmalgam, gpq_backend, normal_form_Gpq, torus_amalgam
from .presentations import Presentation, commutator
from .words import Word

__all__ = [
    "CableParams",
    "LOVerdict",
    "abelian_image",
    "cable_abelianization",
    "check_crucial_identity",
    "cable_group",
    "cable_peripherals",
    "crucial_identity",
    "euclid_uv",
    "lo_window",
    "satellite_quotient",
    "satellite_target",
    "satellite_target_backend",
    "torus_genus",
    "torus_knot_presentation",
    "torus_meridian_exponents",
]

M, L, T = Word.gen("m"), Word.gen("l"), Word.gen("t")


def euclid_uv(p: int, q: int) -> tuple[int, int]:
    """Positive ``(u, v)`` with ``p*u - q*v = 1`` and ``v`` minimal."""
    if p < 2 or q < 1:
        raise ValueError(f"need p >= 2 and q >= 1, got ({p}, {q})")
    if gcd(p, q) != 1:
        raise ValueError(f"p, q not coprime: ({p}, {q})")
    v = (-pow(q, -1, p)) % p
    u = (1 + q * v) // p
    return u, v


@dataclass(frozen=True)
class CableParams:
    p: int
    q: int
    u: int
    v: int

    def __post_init__(self) -> None:
        if self.p < 2 or self.q < 1:
            raise ValueError(f"need p >= 2 and q >= 1, got ({self.p}, {self.q})")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"p, q not coprime: ({self.p}, {self.q})")
        if self.u < 1 or self.v < 1 or self.p * self.u - self.q * self.v != 1:
            raise ValueError(f"(u, v) = ({self.u}, {self.v}) does not satisfy p*u - q*v = 1")

    @classmethod
    def of(cls, p: int, q: int) -> "CableParams":
        return cls(p, q, *euclid_uv(p, q))

    @property
    def slope(self) -> Fraction:
        return Fraction(self.q, self.p)


def cable_peripherals(params: CableParams) -> tuple[Word, Word]:
    """``(mu_C, lambda_C) = (m^u l^v t^-v, mu_C^(-pq) t^p)``."""
    p, q, u, v = params.p, params.q, params.u, params.v
    mu = M ** u * L ** v * T ** (-v)
    return mu, mu ** (-p * q) * T ** p


def crucial_identity(params: CableParams, commuted: bool = False) -> tuple[Word, Word]:
    """``(t^-v)^p (m^u l^v)^p`` (or the commuted order) paired with ``m``."""
    p, u, v = params.p, params.u, params.v
    a, b = T ** (-v * p), (M ** u * L ** v) ** p
    return (b * a if commuted else a * b), M


def cable_abelianization(params: CableParams) -> dict[str, int]:
    """Images in ``H_1`` of the cable knot exterior, restricted to m, l, t.

    The companion longitude dies, and ``t^p = m^q`` forces ``m -> p`` and
    ``t -> q``; then ``mu_C -> p*u - q*v = 1``.
    """
    return {"m": params.p, "l": 0, "t": params.q}


def abelian_image(w: Word, images: dict[str, int]) -> int:
    return sum(images[g] * e for g, e in w)


# ---------------------------------------------------------------------------
# Torus knots
# ---------------------------------------------------------------------------


def torus_meridian_exponents(p: int, q: int) -> tuple[int, int]:
    """``(a, b)`` with ``a*q + b*p = 1`` and ``1 <= a < p``."""
    if p < 2 or q < 2 or gcd(p, q) != 1:
        raise ValueError(f"torus knot needs coprime p, q >= 2, got ({p}, {q})")
    a = pow(q, -1, p)
    b = (1 - a * q) // p
    return a, b


def torus_knot_presentation(p: int, q: int) -> Presentation:
    """``< x, y | x^p y^-q >`` with a certified meridian-longitude pair."""
    a, b = torus_meridian_exponents(p, q)
    x, y = Word.gen("x"), Word.gen("y")
    mu = x ** a * y ** b
    lam = x ** p * mu ** (-p * q)
    pres = Presentation(("x", "y"), (x ** p * y ** (-q),), (mu, lam), name=f"T({p},{q})")
    _certify_torus_peripherals(pres, p, q)
    return pres


def _certify_torus_peripherals(pres: Presentation, p: int, q: int) -> None:
    ab = pres.abelianization()
    mu, lam = pres.peripheral
    if ab.rank != 1 or ab.torsion or ab.image(mu) != (1,) or ab.image(lam) != (0,):
        raise AssertionError(f"peripheral words of T({p},{q}) fail the homology check")
    backend = torus_amalgam("x", p, "y", q)
    if not backend.is_identity(commutator(mu, lam)):
        raise AssertionError(f"meridian and longitude of T({p},{q}) do not commute")


def torus_genus(p: int, q: int) -> Fraction:
    return Fraction((abs(p) - 1) * (abs(q) - 1), 2)


# ---------------------------------------------------------------------------
# Cable groups and the satellite quotient
# ---------------------------------------------------------------------------


def _substitute(w: Word, images: dict[str, Word]) -> Word:
    out = Word()
    for g, e in w:
        out = out * images.get(g, Word.gen(g)) ** e
    return out


def cable_group(companion: Presentation, params: CableParams, core: str = "t") -> Presentation:
    """The cable knot group: the companion amalgamated with ``<t>`` along ``m^q l^p = t^p``."""
    if companion.peripheral is None:
        raise ValueError("companion presentation has no meridian/longitude pair")
    if core in companion.generators:
        raise ValueError(f"generator name {core!r} already used by the companion")
    mu, lam = companion.peripheral
    images = {"m": mu, "l": lam, "t": Word.gen(core)}
    p, q = params.p, params.q
    relator = Word.gen(core, -p) * mu ** q * lam ** p
    mu_c, lam_c = cable_peripherals(params)
    return Presentation(
        companion.generators + (core,),
        companion.relators + (relator,),
        (_substitute(mu_c, images), _substitute(lam_c, images)),
        name=f"C({p},{q})[{companion.name or 'K'}]",
    )


def satellite_target(params: CableParams) -> Presentation:
    """``< m, t | t^p = m^q >``, the group of the pattern torus knot."""
    p, q = params.p, params.q
    return Presentation(("m", "t"), (T ** (-p) * M ** q,), name=f"T({p},{q})")


def satellite_target_backend(params: CableParams) -> CentralAmalgam:
    return torus_amalgam("m", params.q, "t", params.p)


def satellite_quotient(
    w: Word,
    params: CableParams,
    companion: Presentation | None = None,
) -> Word:
    """Image of ``w`` under the map killing the companion longitude.

    Words over ``m, l, t`` map by ``l -> 1``.  When ``companion`` is given,
    its generators are also accepted: each one collapses onto the power of
    ``m`` given by its homology class (meridian = 1).
    """
    images: dict[str, Word] = {"m": M, "l": Word(), "t": T}
    if companion is not None:
        if companion.peripheral is None:
            raise ValueError("companion presentation has no meridian/longitude pair")
        ab = companion.abelianization()
        if ab.rank != 1 or ab.torsion:
            raise ValueError("companion must have homology Z")
        unit = ab.image(companion.peripheral[0])[0]
        if unit not in (1, -1):
            raise ValueError("companion meridian does not generate homology")
        for i, g in enumerate(companion.generators):
            if g in images:
                raise ValueError(f"companion generator {g!r} clashes with m, l, t")
            images[g] = M ** (ab.images[i][0] * unit)
    extra = w.generators - set(images)
    if extra:
        raise ValueError(f"word uses generators {sorted(extra)} outside the supported subgroup")
    return _substitute(w, images)


# ---------------------------------------------------------------------------
# Surgery window
# ---------------------------------------------------------------------------


class LOVerdict(enum.Enum):
    LEFT_ORDERABLE = "LEFT_ORDERABLE"
    NOT_LEFT_ORDERABLE = "NOT_LEFT_ORDERABLE"
    UNKNOWN = "UNKNOWN"


def lo_window(p: int, q: int, companion_decay: Fraction | int | None, r: Fraction | int) -> LOVerdict:
    """Classify r-surgery on the (p, q)-cable of a companion.

    Below ``pq - p - q`` the surgery group is left-orderable for every
    companion; from ``pq`` upwards it is not, provided the companion is
    decayed at some bound below ``q/p``.
    """
    euclid_uv(p, q)
    r = Fraction(r)
    if r < p * q - p - q:
        return LOVerdict.LEFT_ORDERABLE
    if companion_decay is not None and Fraction(q, p) > Fraction(companion_decay) and r >= p * q:
        return LOVerdict.NOT_LEFT_ORDERABLE
    return LOVerdict.UNKNOWN


def check_crucial_identity(params: CableParams) -> bool:
    lhs, rhs = crucial_identity(params)
    lhs2, _ = crucial_identity(params, commuted=True)
    nf = normal_form_Gpq(rhs, params.p, params.q)
    return normal_form_Gpq(lhs, params.p, params.q) == nf == normal_form_Gpq(lhs2, params.p, params.q)


def gpq_for(params: CableParams) -> CentralAmalgam:
    return gpq_backend(params.p, params.q)
