"""Finite positive-cone search.

A left-ordering restricts to a sign assignment on any finite symmetric set
of group elements such that inverses get opposite signs and a product of
two elements of the same sign, when it lies in the set, gets that sign too.
If no such assignment exists on a ball of the Cayley graph, the group is not
left-orderable.  Finding one proves nothing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Hashable

from .backends import UNKNOWN, Backend
from .presentations import Presentation
from .words import Word

__all__ = [
    "ConeSearchInstance",
    "SearchOutcome",
    "SearchResult",
    "TraceError",
    "check_assignment",
    "cone_search",
    "enumerate_ball",
    "replay_trace",
    "torsion_scan",
]

DEFAULT_NODE_BUDGET = 200_000


@dataclass
class ConeSearchInstance:
    elements: list[Word]
    inverse: list[int]
    products: dict[tuple[int, int], int]
    identity_pairs: set[tuple[int, int]] = field(default_factory=set)
    exact: bool = True

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, w: Word) -> int:
        return self.elements.index(w)

    def to_json(self) -> dict[str, Any]:
        return {
            "elements": [str(w) for w in self.elements],
            "inverse": list(self.inverse),
            "products": sorted([i, j, k] for (i, j), k in self.products.items()),
        }


def _letters(pres: Presentation) -> list[Word]:
    out = []
    for g in pres.generators:
        out += [Word.gen(g), Word.gen(g, -1)]
    return out


def _shortlex(pres: Presentation):
    rank = {g: i for i, g in enumerate(pres.generators)}

    def key(w: Word) -> tuple:
        return (len(w), tuple(2 * rank[g] + (e < 0) for g, e in w.letters()))

    return key


def enumerate_ball(pres: Presentation, radius: int, backend: Backend) -> ConeSearchInstance:
    """Nontrivial elements of word length <= radius, with inverses and products.

    Each element is represented by the first word reaching it in shortlex
    order (generators in declared order, each before its inverse).
    """
    if radius < 1:
        raise ValueError("radius must be positive")
    identity = backend.canonical(Word())
    seen: dict[Hashable, Word] = {identity: Word()}
    layer = [Word()]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for a in _letters(pres):
                x = w * a
                key = backend.canonical(x)
                if key not in seen:
                    seen[key] = x
                    nxt.append(x)
        layer = nxt
    del seen[identity]
    reps = sorted(seen.values(), key=_shortlex(pres))
    keys = {backend.canonical(w): i for i, w in enumerate(reps)}
    # close under inverses (only needed when the backend is not confluent)
    i = 0
    while i < len(reps):
        k = backend.canonical(~reps[i])
        if k not in keys:
            keys[k] = len(reps)
            reps.append(~reps[i])
        i += 1
    inverse = [keys[backend.canonical(~w)] for w in reps]
    products: dict[tuple[int, int], int] = {}
    identity_pairs: set[tuple[int, int]] = set()
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            key = backend.canonical(a * b)
            if key == identity:
                identity_pairs.add((i, j))
            elif key in keys:
                products[(i, j)] = keys[key]
    return ConeSearchInstance(reps, inverse, products, identity_pairs, backend.exact)


def torsion_scan(inst: ConeSearchInstance, backend: Backend, max_power: int) -> tuple[Word, int] | None:
    """First element (in instance order) with ``g^d = 1`` for some ``2 <= d <= max_power``."""
    for w in inst.elements:
        for d in range(2, max_power + 1):
            eq = backend.equal(w ** d, Word())
            if eq is UNKNOWN:
                continue
            if eq:
                return w, d
    return None


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


class SearchOutcome(enum.Enum):
    ASSIGNMENT = "ASSIGNMENT"
    CONTRADICTION = "CONTRADICTION"
    NO_OBSTRUCTION = "NO_OBSTRUCTION"


@dataclass
class SearchResult:
    outcome: SearchOutcome
    signs: list[int] | None = None
    trace: dict[str, Any] | None = None
    nodes: int = 0
    note: str = ""

    def to_json(self, inst: ConeSearchInstance) -> dict[str, Any]:
        out: dict[str, Any] = {"outcome": self.outcome.value, "elements": len(inst), "search_nodes": self.nodes}
        if self.signs is not None:
            out["witness"] = {str(w): s for w, s in zip(inst.elements, self.signs)}
        if self.trace is not None:
            out["trace"] = self.trace
        if self.note:
            out["note"] = self.note
        return out


class _Conflict(Exception):
    def __init__(self, step: dict[str, Any]):
        self.step = step


class _Budget(Exception):
    pass


class _Solver:
    def __init__(self, inst: ConeSearchInstance, budget: int):
        self.inst = inst
        self.n = len(inst)
        self.budget = budget
        self.nodes = 0
        # constraints touching each variable
        self.partners: list[list[int]] = [[] for _ in range(self.n)]
        for i, k in enumerate(inst.inverse):
            self.partners[i].append(k)
        for i, j in sorted(inst.identity_pairs):
            self.partners[i].append(j)
            self.partners[j].append(i)
        self.by_factor: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n)]
        for (i, j), k in sorted(inst.products.items()):
            self.by_factor[i].append((i, j, k))
            if j != i:
                self.by_factor[j].append((i, j, k))

    def propagate(self, signs: list[int], start: int, steps: list[dict[str, Any]]) -> None:
        queue = [start]
        while queue:
            x = queue.pop(0)
            for y in self.partners[x]:
                self.assign(signs, y, -signs[x], {"type": "inverse", "pair": [x, y]}, steps, queue)
            for i, j, k in self.by_factor[x]:
                if signs[i] and signs[i] == signs[j]:
                    self.assign(signs, k, signs[i], {"type": "product", "triple": [i, j, k]}, steps, queue)

    @staticmethod
    def assign(signs, var, value, reason, steps, queue) -> None:
        step = {"set": var, "value": value, "reason": reason}
        if signs[var] == value:
            return
        if signs[var] == -value:
            raise _Conflict(step)
        signs[var] = value
        steps.append(step)
        queue.append(var)

    def solve(self, signs: list[int]) -> tuple[list[int] | None, dict[str, Any] | None]:
        """Either a full assignment or a refutation tree for ``signs``."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise _Budget()
        try:
            var = signs.index(0)
        except ValueError:
            return signs, None
        cases = []
        for value in (1, -1):
            trial = list(signs)
            steps: list[dict[str, Any]] = []
            trial[var] = value
            try:
                self.propagate(trial, var, steps)
            except _Conflict as c:
                cases.append({"value": value, "steps": steps, "conflict": c.step})
                continue
            found, sub = self.solve(trial)
            if found is not None:
                return found, None
            cases.append({"value": value, "steps": steps, "then": sub})
        return None, {"decide": var, "cases": cases}


def cone_search(inst: ConeSearchInstance, budget: int = DEFAULT_NODE_BUDGET) -> SearchResult:
    """Backtracking search with unit propagation, deterministic variable order."""
    solver = _Solver(inst, budget)
    try:
        signs, trace = solver.solve([0] * len(inst))
    except _Budget:
        return SearchResult(SearchOutcome.NO_OBSTRUCTION, nodes=solver.nodes, note="search budget exhausted")
    if signs is not None:
        outcome = SearchOutcome.ASSIGNMENT
        note = ""
        if not inst.exact:
            outcome = SearchOutcome.NO_OBSTRUCTION
            note = "assignment found with a heuristic word-problem backend"
        return SearchResult(outcome, signs=signs, nodes=solver.nodes, note=note)
    return SearchResult(SearchOutcome.CONTRADICTION, trace=trace, nodes=solver.nodes)


def check_assignment(inst: ConeSearchInstance, signs: list[int]) -> bool:
    if len(signs) != len(inst) or any(s not in (1, -1) for s in signs):
        return False
    for i, k in enumerate(inst.inverse):
        if signs[i] != -signs[k]:
            return False
    for i, j in inst.identity_pairs:
        if signs[i] != -signs[j]:
            return False
    for (i, j), k in inst.products.items():
        if signs[i] == signs[j] and signs[k] != signs[i]:
            return False
    return True


# ---------------------------------------------------------------------------
# Independent replay of refutations
# ---------------------------------------------------------------------------


class TraceError(ValueError):
    pass


def replay_trace(
    inst: ConeSearchInstance,
    trace: dict[str, Any],
    backend: Backend | None = None,
) -> bool:
    """Re-check a refutation tree step by step; raises :class:`TraceError`.

    With ``backend`` given, every cited inverse pair and product triple is
    also re-verified as a group identity.
    """

    def justify(signs: list[int], step: dict[str, Any]) -> tuple[int, int]:
        reason = step["reason"]
        var, value = step["set"], step["value"]
        if value not in (1, -1) or not 0 <= var < len(inst):
            raise TraceError(f"bad step {step}")
        if reason["type"] == "inverse":
            x, y = reason["pair"]
            if y != var:
                raise TraceError(f"step {step} sets a variable its reason does not name")
            if inst.inverse[x] != y and not {(x, y), (y, x)} & inst.identity_pairs:
                raise TraceError(f"{x}, {y} are not recorded as inverse")
            if backend is not None and backend.equal(inst.elements[x] * inst.elements[y], Word()) is not True:
                raise TraceError(f"{inst.elements[x]} * {inst.elements[y]} is not the identity")
            if signs[x] == 0 or value != -signs[x]:
                raise TraceError(f"inverse step {step} not forced")
        elif reason["type"] == "product":
            i, j, k = reason["triple"]
            if k != var or inst.products.get((i, j)) != k:
                raise TraceError(f"product triple {reason['triple']} not recorded")
            if backend is not None and backend.equal(inst.elements[i] * inst.elements[j], inst.elements[k]) is not True:
                raise TraceError(f"product triple {reason['triple']} fails in the group")
            if signs[i] == 0 or signs[i] != signs[j] or value != signs[i]:
                raise TraceError(f"product step {step} not forced")
        else:
            raise TraceError(f"unknown reason {reason!r}")
        return var, value

    def walk(signs: list[int], node: dict[str, Any]) -> None:
        var = node["decide"]
        if signs[var] != 0:
            raise TraceError(f"decision on assigned variable {var}")
        if sorted(c["value"] for c in node["cases"]) != [-1, 1]:
            raise TraceError("a decision must cover both signs")
        for case in node["cases"]:
            trial = list(signs)
            trial[var] = case["value"]
            for step in case["steps"]:
                v, val = justify(trial, step)
                if trial[v] != 0:
                    raise TraceError(f"step {step} reassigns variable {v}")
                trial[v] = val
            if "conflict" in case:
                v, val = justify(trial, case["conflict"])
                if trial[v] != -val:
                    raise TraceError(f"claimed conflict at {v} is not a conflict")
            elif "then" in case and case["then"] is not None:
                walk(trial, case["then"])
            else:
                raise TraceError("case ends without a conflict")

    walk([0] * len(inst), trace)
    return True
