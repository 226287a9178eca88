"""Registry of knots with known decay bounds.

Identifiers::

    torus:P,Q                 torus knot, P, Q >= 2 coprime       decay P*Q - 1
    pretzel:-2,3,Q            (-2, 3, Q)-pretzel, odd Q >= 5      decay 10 + Q
    twisted-torus:3,Q         (3, Q)-torus knot plus a full twist
                              on two strands, Q = 2 mod 3         decay 3*Q + 2
    cable:P,Q:<companion id>  (P, Q)-cable of the companion       decay P*Q when Q/P > decay(companion)

Decay bounds are always computed from these formulas; a registry file only
lists which knots to show and is rejected if a stored bound disagrees.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd
from typing import Any, Iterable

from .cable import CableParams, cable_group, torus_knot_presentation
from .presentations import Presentation

__all__ = [
    "KnotId",
    "KnotRecord",
    "Registry",
    "RegistryError",
    "decayed_registry_lookup",
    "default_registry_path",
    "parse_knot_id",
    "knot_presentation",
]

ENV_VAR = "DECAYKIT_REGISTRY"


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class KnotId:
    kind: str
    params: tuple[int, ...]
    companion: "KnotId | None" = None

    def __str__(self) -> str:
        body = f"{self.kind}:{','.join(str(x) for x in self.params)}"
        return f"{body}:{self.companion}" if self.companion is not None else body


def parse_knot_id(text: str) -> KnotId:
    text = text.strip().replace(" ", "")
    kind, sep, rest = text.partition(":")
    if not sep:
        raise RegistryError(f"malformed knot id {text!r} (expected kind:params)")
    companion = None
    if kind == "cable":
        head, sep, tail = rest.partition(":")
        if not sep:
            raise RegistryError(f"cable id needs a companion: {text!r}")
        rest, companion = head, parse_knot_id(tail)
    if kind not in ("torus", "pretzel", "twisted-torus", "cable"):
        raise RegistryError(f"unknown knot kind {kind!r}")
    try:
        params = tuple(int(x) for x in rest.split(","))
    except ValueError:
        raise RegistryError(f"bad parameters in knot id {text!r}") from None
    expected = {"torus": 2, "pretzel": 3, "twisted-torus": 2, "cable": 2}[kind]
    if len(params) != expected:
        raise RegistryError(f"{kind} takes {expected} parameters, got {len(params)}")
    problem = _not_a_knot(kind, params)
    if problem:
        raise RegistryError(f"{text!r} is not a knot: {problem}")
    return KnotId(kind, params, companion)


def _not_a_knot(kind: str, params: tuple[int, ...]) -> str | None:
    if kind == "torus":
        p, q = params
        if min(abs(p), abs(q)) < 2 or gcd(p, q) != 1:
            return "torus parameters must be coprime with |p|, |q| >= 2"
    elif kind == "pretzel":
        if 0 in params or sum(x % 2 == 0 for x in params) > 1:
            return "pretzel parameters must be nonzero with at most one even"
    elif kind == "twisted-torus":
        three, q = params
        if three != 3 or gcd(3, q) != 1:
            return "only twisted torus knots T(3, q) with q prime to 3 are supported"
    elif kind == "cable":
        p, q = params
        if p < 2 or q == 0 or gcd(p, q) != 1:
            return "cable parameters need p >= 2 and q coprime to p"
    return None


def _decay(knot: KnotId) -> Fraction | None:
    ps = knot.params
    if knot.kind == "torus":
        p, q = ps
        if p >= 2 and q >= 2 and gcd(p, q) == 1:
            return Fraction(p * q - 1)
        return None
    if knot.kind == "pretzel":
        a, b, q = ps
        if (a, b) == (-2, 3) and q >= 5 and q % 2 == 1:
            return Fraction(10 + q)
        return None
    if knot.kind == "twisted-torus":
        three, q = ps
        if three == 3 and q > 0 and q % 3 == 2:
            return Fraction(3 * q + 2)
        return None
    if knot.kind == "cable":
        p, q = ps
        if p < 2 or q < 1 or gcd(p, q) != 1:
            return None
        inner = _decay(knot.companion)
        if inner is not None and Fraction(q, p) > inner:
            return Fraction(p * q)
        return None
    return None


def decayed_registry_lookup(knot: str | KnotId) -> Fraction | None:
    """The decay bound for ``knot``, or ``None`` when none is known."""
    if isinstance(knot, str):
        knot = parse_knot_id(knot)
    return _decay(knot)


def knot_presentation(knot: KnotId) -> Presentation | None:
    if knot.kind == "torus":
        p, q = knot.params
        if p >= 2 and q >= 2 and gcd(p, q) == 1:
            return torus_knot_presentation(p, q)
        return None
    if knot.kind == "cable":
        inner = knot_presentation(knot.companion)
        if inner is None:
            return None
        core, i = "t", 1
        while core in inner.generators:
            core, i = f"t{i}", i + 1
        return cable_group(inner, CableParams.of(*knot.params), core)
    return None


@dataclass(frozen=True)
class KnotRecord:
    id: str
    kind: str
    params: tuple[int, ...]
    decay: Fraction | None
    companion: str | None = None

    @classmethod
    def of(cls, knot: str | KnotId) -> "KnotRecord":
        if isinstance(knot, str):
            knot = parse_knot_id(knot)
        return cls(
            str(knot),
            knot.kind,
            knot.params,
            _decay(knot),
            str(knot.companion) if knot.companion is not None else None,
        )

    def presentation(self) -> Presentation | None:
        return knot_presentation(parse_knot_id(self.id))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "kind": self.kind,
            "params": list(self.params),
            "decay": _fraction_text(self.decay),
        }
        if self.companion is not None:
            out["companion"] = self.companion
        return out


def _fraction_text(x: Fraction | None) -> str | None:
    if x is None:
        return None
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def default_registry_path() -> str:
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    return str(resources.files("decaykit").joinpath("data", "registry.json"))


@dataclass
class Registry:
    records: list[KnotRecord] = field(default_factory=list)
    path: str | None = None

    @classmethod
    def load(cls, path: str | None = None) -> "Registry":
        path = path or default_registry_path()
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise RegistryError(f"registry file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise RegistryError(f"{path}: {exc}") from None
        if not isinstance(data, list):
            raise RegistryError(f"{path}: expected a JSON array of records")
        records = []
        for entry in data:
            if not isinstance(entry, dict) or "id" not in entry:
                raise RegistryError(f"{path}: record without an id: {entry!r}")
            rec = KnotRecord.of(entry["id"])
            stored = entry.get("decay")
            if stored is not None and Fraction(str(stored)) != rec.decay:
                raise RegistryError(
                    f"{path}: stored decay {stored} for {rec.id} disagrees with computed {rec.decay}"
                )
            if "kind" in entry and entry["kind"] != rec.kind:
                raise RegistryError(f"{path}: kind of {rec.id} should be {rec.kind}")
            records.append(rec)
        return cls(records, path)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def lookup(self, knot: str) -> KnotRecord:
        return KnotRecord.of(knot)

    def add(self, knot: str) -> KnotRecord:
        rec = KnotRecord.of(knot)
        if rec.id not in self.ids():
            self.records.append(rec)
        return rec

    def extend(self, knots: Iterable[str]) -> None:
        for k in knots:
            self.add(k)

    def to_json(self) -> list[dict[str, Any]]:
        return [r.to_json() for r in self.records]

    def save(self, path: str | None = None) -> None:
        path = path or self.path
        if path is None:
            raise RegistryError("no path to save the registry to")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")
