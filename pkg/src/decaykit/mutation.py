"""Single-token mutations of certificate JSON, for soundness testing."""

from __future__ import annotations

import copy
import random
from typing import Any

from .certificate import ALPHABET, RULES
from .words import AffineExpr, Block, ParametricWord, Syllable, affine, parse_parametric

__all__ = ["MUTATION_KINDS", "mutate_certificate"]

MUTATION_KINDS = ("exponent", "rule", "premise")


def _exponent_sites(w: ParametricWord, prefix: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    sites = []
    for i, item in enumerate(w.items):
        sites.append(prefix + (i,))
        if isinstance(item, Block):
            sites.extend(_exponent_sites(item.body, prefix + (i,)))
    return sites


def _bump(w: ParametricWord, site: tuple[int, ...], delta: int) -> ParametricWord:
    items = list(w.items)
    head, rest = site[0], site[1:]
    item = items[head]
    if rest:
        items[head] = Block(_bump(item.body, rest, delta), item.exponent)
    elif isinstance(item, Block):
        items[head] = Block(item.body, item.exponent + delta)
    else:
        items[head] = Syllable(item.gen, item.exponent + delta)
    return ParametricWord(tuple(items))


def _bump_power(premise: Any, delta: int) -> Any:
    if isinstance(premise, str):
        return {"ref": premise, "power": 1 + delta}
    out = dict(premise)
    power = affine(out.get("power", 1)) + delta
    out["power"] = power.constant if power.is_constant() else str(power)
    return out


def _is_plain_copy(j: dict[str, Any]) -> bool:
    if j["rule"] not in ("PROD", "EQ") or len(j["premises"]) != 1:
        return False
    prem = j["premises"][0]
    if isinstance(prem, str):
        return True
    return "index" not in prem and "subst" not in prem and str(prem.get("power", 1)) == "1"


def mutate_certificate(data: dict[str, Any], rng: random.Random) -> tuple[dict[str, Any], str]:
    """Return a mutated deep copy of ``data`` and a description of the change."""
    out = copy.deepcopy(data)
    judgments = out["judgments"]
    while True:
        j = rng.choice(judgments)
        kind = rng.choice(MUTATION_KINDS)
        delta = rng.choice((-1, 1))
        if kind == "exponent":
            targets: list[tuple[str, Any]] = [("word", s) for s in _exponent_sites(parse_parametric(j["word"], ALPHABET))]
            targets += [("power", i) for i in range(len(j["premises"])) if j["rule"] == "PROD"]
            if j["rule"] == "POWER_ROOT":
                targets.append(("side", None))
            if not targets:
                continue
            where, site = rng.choice(targets)
            if where == "word":
                w = parse_parametric(j["word"], ALPHABET)
                j["word"] = str(_bump(w, site, delta))
                return out, f"{j['id']}: exponent {delta:+d} in word at {list(site)}"
            if where == "power":
                j["premises"][site] = _bump_power(j["premises"][site], delta)
                return out, f"{j['id']}: power of premise {site} {delta:+d}"
            j["side"]["power"] = j["side"]["power"] + delta
            return out, f"{j['id']}: root power {delta:+d}"
        if kind == "rule":
            choices = [r for r in RULES if r != j["rule"]]
            if _is_plain_copy(j):
                # a one-factor product to the first power is an equality already
                choices = [r for r in choices if r not in ("PROD", "EQ")]
            new = rng.choice(choices)
            old, j["rule"] = j["rule"], new
            return out, f"{j['id']}: rule {old} -> {new}"
        if kind == "premise" and j["premises"]:
            i = rng.randrange(len(j["premises"]))
            del j["premises"][i]
            return out, f"{j['id']}: dropped premise {i}"
