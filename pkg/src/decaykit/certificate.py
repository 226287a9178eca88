"""Decay certificates and their checking kernel.

A certificate argues that the (p, q)-cable of an r-decayed knot is
pq-decayed.  It fixes a left-ordering in which the cable slope of value pq
is positive (the *root hypothesis*, stated as ``t^p > 1``), splits into cases
along a branch tree of sign hypotheses, and in every leaf derives that
``mu_C^(A*N + B) lambda_C^D > 1`` for all ``N >= 1`` with ``B = pq*D`` and
``A, D > 0``.  Those slopes increase strictly to infinity from ``pq``, which
is exactly what is needed to conclude decay.

Judgments ``word > 1`` / ``word < 1`` are derived with six rules:

HYP         a hypothesis of the leaf's branch path (or the root hypothesis)
DECAY       ``m^a l^b > 1`` when ``a/b >= r`` and ``b >= 1``, citing one
            positive slope of the companion in the same range (the anchor)
PROD        product of powers of judgments of the same sign; premises may be
            re-instantiated (``subst``) and repeated over an index range
POWER_ROOT  ``g^c`` has the sign of ``g`` (c >= 1)
INV         ``g^-1`` has the opposite sign
EQ          same sign for words equal in ``G_{p,q}``

Parametric judgments are checked by instantiation over a finite grid.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Iterator, Mapping, Sequence

from .backends import normal_form_Gpq
from .cable import CableParams, cable_peripherals
from .words import (
    AffineExpr,
    ParameterError,
    ParametricWord,
    Word,
    WordSyntaxError,
    parse_affine,
    parse_parametric,
)

__all__ = [
    "RULES",
    "Sign",
    "Premise",
    "IndexRange",
    "Judgment",
    "Branch",
    "BranchNode",
    "Choice",
    "SequenceFormula",
    "Leaf",
    "Identity",
    "DecayCertificate",
    "CertificateFormatError",
    "ConclusionRefused",
    "GridError",
    "VerificationReport",
    "DecayConclusion",
    "verify_derivation",
    "conclude_decay",
    "fraction_text",
]

RULES = ("HYP", "DECAY", "PROD", "POWER_ROOT", "INV", "EQ")
ALPHABET = ("m", "l", "t")
ROOT_HYP = "root"
CHOICE_SEARCH_LIMIT = 10_000
MAX_FAILURES = 200


class CertificateFormatError(ValueError):
    """The certificate file does not parse."""


class GridError(ValueError):
    """A requested grid leaves a parameter's domain."""


class ConclusionRefused(ValueError):
    pass


class Sign(enum.Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"

    def flip(self) -> "Sign":
        return Sign.NEGATIVE if self is Sign.POSITIVE else Sign.POSITIVE


def fraction_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _affine_text(e: AffineExpr) -> str | int:
    return e.constant if e.is_constant() else str(e)


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexRange:
    """Inclusive range ``start .. stop`` (descending when start > stop)."""

    var: str
    start: AffineExpr
    stop: AffineExpr

    def values(self, env: Mapping[str, int]) -> list[int]:
        a, b = self.start.evaluate(env), self.stop.evaluate(env)
        step = 1 if b >= a else -1
        return list(range(a, b + step, step))


@dataclass(frozen=True)
class Premise:
    ref: str
    power: AffineExpr = AffineExpr(1)
    subst: tuple[tuple[str, AffineExpr], ...] = ()
    index: IndexRange | None = None

    @property
    def plain(self) -> bool:
        return self.power == AffineExpr(1) and not self.subst and self.index is None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ref": self.ref}
        if self.power != AffineExpr(1):
            out["power"] = _affine_text(self.power)
        if self.subst:
            out["subst"] = {k: _affine_text(v) for k, v in self.subst}
        if self.index is not None:
            out["index"] = {
                "var": self.index.var,
                "from": _affine_text(self.index.start),
                "to": _affine_text(self.index.stop),
            }
        return out


@dataclass(frozen=True, eq=False)
class Judgment:
    id: str
    word: ParametricWord
    sign: Sign
    rule: str
    premises: tuple[Premise, ...] = ()
    side: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "word": str(self.word),
            "sign": self.sign.value,
            "rule": self.rule,
            "premises": [p.to_json() for p in self.premises],
            "side": dict(self.side),
        }


@dataclass(frozen=True)
class Branch:
    hyp: str
    next: str


@dataclass(frozen=True)
class BranchNode:
    """Case split on the sign of ``pivot``.

    With ``var`` set the pivot is a family: the positive branch assumes it
    is positive for some value of ``var`` (which then stays fixed), the
    negative branch assumes it is negative for every value.
    """

    id: str
    pivot: ParametricWord
    var: str | None
    positive: Branch | None
    negative: Branch | None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "pivot": str(self.pivot), "var": self.var}
        for name in ("positive", "negative"):
            b = getattr(self, name)
            if b is not None:
                out[name] = {"hyp": b.hyp, "next": b.next}
        return out


@dataclass(frozen=True)
class Choice:
    """Least integer ``name >= min`` with ``den > 0`` and ``num/den >= r``."""

    name: str
    min: int
    num: AffineExpr
    den: AffineExpr

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "min": self.min, "num": str(self.num), "den": str(self.den)}


@dataclass(frozen=True)
class SequenceFormula:
    """``r_N = (A*N + B) / D``."""

    A: AffineExpr
    B: AffineExpr
    D: AffineExpr
    index: str = "N"

    def to_json(self) -> dict[str, Any]:
        return {
            "A": _affine_text(self.A),
            "B": _affine_text(self.B),
            "D": _affine_text(self.D),
            "index": self.index,
        }


@dataclass(frozen=True)
class Leaf:
    id: str
    conclusion: str | None = None
    sequence: SequenceFormula | None = None
    choices: tuple[Choice, ...] = ()
    contradiction: tuple[str, str] | None = None
    info: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id}
        if self.contradiction is not None:
            out["contradiction"] = list(self.contradiction)
        else:
            out["conclusion"] = self.conclusion
            out["sequence"] = self.sequence.to_json() if self.sequence else None
            out["choices"] = [c.to_json() for c in self.choices]
        if self.info:
            out["info"] = dict(self.info)
        return out


@dataclass(frozen=True)
class Identity:
    label: str
    lhs: ParametricWord
    rhs: ParametricWord
    domain: Mapping[str, int] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"label": self.label, "lhs": str(self.lhs), "rhs": str(self.rhs)}
        if self.domain:
            out["domain"] = dict(self.domain)
        return out


@dataclass(frozen=True, eq=False)
class DecayCertificate:
    p: int
    q: int
    r: Fraction
    parameters: tuple[tuple[str, int], ...]
    root: ParametricWord
    nodes: tuple[BranchNode, ...]
    leaves: tuple[Leaf, ...]
    judgments: tuple[Judgment, ...]
    identities: tuple[Identity, ...] = ()

    # -- serialisation ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "r": fraction_text(self.r),
            "parameters": [{"name": n, "min": lo} for n, lo in self.parameters],
            "root": {"hyp": ROOT_HYP, "word": str(self.root), "sign": Sign.POSITIVE.value},
            "branches": [n.to_json() for n in self.nodes] + [leaf.to_json() for leaf in self.leaves],
            "judgments": [j.to_json() for j in self.judgments],
            "identities": [i.to_json() for i in self.identities],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "DecayCertificate":
        try:
            return _certificate_from_json(data)
        except CertificateFormatError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc!r}") from exc

    @classmethod
    def load(cls, path: str) -> "DecayCertificate":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"{path}: {exc}") from exc
        return cls.from_json(data)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
            fh.write("\n")


def _word(text: Any) -> ParametricWord:
    if not isinstance(text, str):
        raise CertificateFormatError(f"expected a word string, got {text!r}")
    try:
        return parse_parametric(text, ALPHABET)
    except WordSyntaxError as exc:
        raise CertificateFormatError(str(exc)) from exc


def _expr(value: Any) -> AffineExpr:
    if isinstance(value, bool):
        raise CertificateFormatError(f"bad expression {value!r}")
    if isinstance(value, int):
        return AffineExpr(value)
    if isinstance(value, str):
        try:
            return parse_affine(value)
        except WordSyntaxError as exc:
            raise CertificateFormatError(str(exc)) from exc
    raise CertificateFormatError(f"bad expression {value!r}")


def _premise(data: Any) -> Premise:
    if isinstance(data, str):
        return Premise(data)
    subst = tuple(sorted((str(k), _expr(v)) for k, v in (data.get("subst") or {}).items()))
    index = None
    if data.get("index") is not None:
        ix = data["index"]
        index = IndexRange(str(ix["var"]), _expr(ix["from"]), _expr(ix["to"]))
    return Premise(str(data["ref"]), _expr(data.get("power", 1)), subst, index)


def _certificate_from_json(data: Mapping[str, Any]) -> DecayCertificate:
    p, q = int(data["p"]), int(data["q"])
    r = Fraction(str(data["r"]))
    params = tuple((str(x["name"]), int(x.get("min", 0))) for x in data.get("parameters", []))
    root = data["root"]
    root_word = _word(root["word"] if isinstance(root, Mapping) else root)
    nodes, leaves = [], []
    for entry in data["branches"]:
        if "pivot" in entry:
            branches = {}
            for name in ("positive", "negative"):
                b = entry.get(name)
                branches[name] = None if b is None else Branch(str(b["hyp"]), str(b["next"]))
            var = entry.get("var")
            nodes.append(
                BranchNode(
                    str(entry["id"]),
                    _word(entry["pivot"]),
                    None if var is None else str(var),
                    branches["positive"],
                    branches["negative"],
                )
            )
        elif "contradiction" in entry:
            a, b = entry["contradiction"]
            leaves.append(Leaf(str(entry["id"]), contradiction=(str(a), str(b)), info=entry.get("info", {})))
        elif "conclusion" in entry:
            seq = entry.get("sequence")
            formula = None
            if seq is not None:
                formula = SequenceFormula(
                    _expr(seq["A"]), _expr(seq["B"]), _expr(seq["D"]), str(seq.get("index", "N"))
                )
            choices = tuple(
                Choice(str(c["name"]), int(c.get("min", 1)), _expr(c["num"]), _expr(c["den"]))
                for c in entry.get("choices", [])
            )
            leaves.append(
                Leaf(str(entry["id"]), str(entry["conclusion"]), formula, choices, info=entry.get("info", {}))
            )
        else:
            raise CertificateFormatError(f"branch entry {entry.get('id')!r} is neither node nor leaf")
    judgments = []
    for j in data["judgments"]:
        try:
            sign = Sign(j["sign"])
        except ValueError:
            raise CertificateFormatError(f"bad sign {j['sign']!r} in judgment {j.get('id')!r}") from None
        judgments.append(
            Judgment(
                str(j["id"]),
                _word(j["word"]),
                sign,
                str(j["rule"]),
                tuple(_premise(x) for x in j.get("premises", [])),
                dict(j.get("side") or {}),
            )
        )
    identities = tuple(
        Identity(str(i["label"]), _word(i["lhs"]), _word(i["rhs"]), dict(i.get("domain") or {}))
        for i in data.get("identities", [])
    )
    return DecayCertificate(p, q, r, params, root_word, tuple(nodes), tuple(leaves), tuple(judgments), identities)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    p: int
    q: int
    r: Fraction
    grid: dict[str, tuple[int, int]]
    exhaustive: bool
    leaves: list[dict[str, Any]]
    identities: list[dict[str, Any]]
    failures: list[dict[str, Any]]
    truncated: int = 0

    @property
    def accepted(self) -> bool:
        return not self.failures and self.exhaustive

    @property
    def verdict(self) -> str:
        return "ACCEPT" if self.accepted else "REJECT"

    @property
    def grid_bound(self) -> int:
        return max((hi for _, hi in self.grid.values()), default=0)

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "p": self.p,
            "q": self.q,
            "r": fraction_text(self.r),
            "grid": {k: list(v) for k, v in sorted(self.grid.items())},
            "grid_limited": True,
            "exhaustive": self.exhaustive,
            "leaves": self.leaves,
            "identities": self.identities,
            "failures": self.failures,
            "failures_truncated": self.truncated,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


class _Fail(Exception):
    def __init__(self, judgment: str, env: Mapping[str, int], reason: str):
        super().__init__(reason)
        self.judgment = judgment
        self.env = dict(env)
        self.reason = reason


@dataclass(frozen=True)
class _Hyp:
    id: str
    word: ParametricWord
    sign: Sign
    schema_var: str | None
    fixed: frozenset[str]


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


class _Checker:
    def __init__(self, cert: DecayCertificate, grid: Mapping[str, tuple[int, int]]):
        self.cert = cert
        self.grid = grid
        self.p, self.q, self.r = cert.p, cert.q, cert.r
        self.J = {j.id: j for j in cert.judgments}
        self.failures: list[dict[str, Any]] = []
        self.declared = dict(cert.parameters)

    # -- bookkeeping -------------------------------------------------------

    def fail(self, leaf: str | None, judgment: str | None, env: Mapping[str, int] | None, reason: str) -> None:
        self.failures.append(
            {
                "leaf": leaf,
                "judgment": judgment,
                "grid_point": dict(sorted((env or {}).items())),
                "reason": reason,
            }
        )

    def nf(self, w: Word):
        return normal_form_Gpq(w, self.p, self.q)

    # -- static checks -----------------------------------------------------

    def check_header(self) -> bool:
        ok = True
        p, q, r = self.p, self.q, self.r
        if p < 2 or q < 1 or gcd(p, q) != 1:
            self.fail(None, None, None, f"cabling parameters ({p}, {q}) are not coprime with p >= 2")
            return False
        if r <= 0:
            self.fail(None, None, None, "companion decay bound must be positive")
            ok = False
        if Fraction(q, p) <= r:
            self.fail(None, None, None, f"cabling slope {q}/{p} does not exceed r = {fraction_text(r)}")
            ok = False
        self.params = CableParams.of(p, q)
        self.mu_c, self.lambda_c = cable_peripherals(self.params)
        if not self.root_is_cable_slope():
            self.fail(None, ROOT_HYP, None, "root hypothesis is not the cable slope of value pq")
            ok = False
        for name, lo in self.cert.parameters:
            if name in ("m", "l", "t"):
                self.fail(None, None, None, f"parameter name {name!r} clashes with a generator")
                ok = False
        return ok

    def root_is_cable_slope(self) -> bool:
        if not self.cert.root.is_concrete():
            return False
        target = self.mu_c ** (self.p * self.q) * self.lambda_c
        return self.nf(self.cert.root.instantiate({})) == self.nf(target)

    def check_structure(self) -> bool:
        ok = True
        seen: set[str] = set()
        for j in self.cert.judgments:
            def bad(reason: str) -> None:
                nonlocal ok
                ok = False
                self.fail(None, j.id, None, reason)

            if j.id in seen or j.id == ROOT_HYP:
                bad(f"duplicate judgment id {j.id!r}")
            if j.rule not in RULES:
                bad(f"unknown rule {j.rule!r}")
            for prem in j.premises:
                if prem.ref not in seen:
                    bad(f"premise {prem.ref!r} does not precede this judgment")
            seen.add(j.id)
            n = len(j.premises)
            if j.rule == "HYP":
                if n:
                    bad("HYP takes no premises")
                if "hyp" not in j.side:
                    bad("HYP needs side data naming its hypothesis")
            elif j.rule == "PROD":
                if n < 1:
                    bad("PROD needs at least one premise")
            elif j.rule in RULES:
                if n != 1:
                    bad(f"{j.rule} takes exactly one premise, got {n}")
                if any(not prem.plain for prem in j.premises):
                    bad(f"{j.rule} premises cannot carry powers, substitutions or index ranges")
            if j.rule == "POWER_ROOT":
                c = j.side.get("power")
                if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                    bad("POWER_ROOT needs an integer side power >= 1")
            if j.rule == "DECAY" and j.sign is not Sign.POSITIVE:
                bad("DECAY concludes positivity only")
            if not j.word.generators <= set(ALPHABET):
                bad("word uses generators outside m, l, t")
        return ok

    def build_tree(self) -> bool:
        """Walk the branch tree from its root; record hypotheses and paths."""
        cert = self.cert
        self.hyps: dict[str, _Hyp] = {
            ROOT_HYP: _Hyp(ROOT_HYP, cert.root, Sign.POSITIVE, None, frozenset())
        }
        self.paths: dict[str, tuple[str, ...]] = {}
        self.exhaustive = True
        self.pivot_checks: list[tuple[BranchNode, frozenset[str]]] = []
        nodes = {n.id: n for n in cert.nodes}
        leaves = {leaf.id: leaf for leaf in cert.leaves}
        ok = True
        if len(nodes) != len(cert.nodes) or len(leaves) != len(cert.leaves) or set(nodes) & set(leaves):
            self.fail(None, None, None, "duplicate branch ids")
            return False
        if not cert.nodes:
            if len(cert.leaves) != 1:
                self.fail(None, None, None, "a certificate without case splits has exactly one leaf")
                return False
            self.paths[cert.leaves[0].id] = (ROOT_HYP,)
            return True

        visited: set[str] = set()
        stack = [(cert.nodes[0].id, (ROOT_HYP,), frozenset())]
        while stack:
            nid, path, fixed = stack.pop()
            if nid in visited:
                self.fail(None, None, None, f"branch entry {nid!r} is reached twice")
                ok = False
                continue
            visited.add(nid)
            if nid in leaves:
                self.paths[nid] = path
                continue
            node = nodes.get(nid)
            if node is None:
                self.fail(None, None, None, f"branch target {nid!r} does not exist")
                self.exhaustive = False
                continue
            free = node.pivot.params - ({node.var} if node.var else set())
            if not free <= fixed:
                self.fail(None, None, None, f"pivot of {nid!r} uses unbound parameter(s) {sorted(free - fixed)}")
                ok = False
            if node.var is not None and node.var not in self.declared:
                self.fail(None, None, None, f"family variable {node.var!r} of {nid!r} is not a declared parameter")
                ok = False
            self.pivot_checks.append((node, fixed))
            for sign, branch in ((Sign.POSITIVE, node.positive), (Sign.NEGATIVE, node.negative)):
                if branch is None:
                    self.fail(None, None, None, f"non-exhaustive: node {nid!r} has no {sign.value.lower()} branch")
                    self.exhaustive = False
                    continue
                if branch.hyp in self.hyps:
                    self.fail(None, None, None, f"hypothesis id {branch.hyp!r} used twice")
                    ok = False
                    continue
                if node.var is None:
                    hyp = _Hyp(branch.hyp, node.pivot, sign, None, fixed)
                    child_fixed = fixed
                elif sign is Sign.POSITIVE:
                    hyp = _Hyp(branch.hyp, node.pivot, sign, None, fixed | {node.var})
                    child_fixed = fixed | {node.var}
                else:
                    hyp = _Hyp(branch.hyp, node.pivot, sign, node.var, fixed)
                    child_fixed = fixed
                self.hyps[branch.hyp] = hyp
                stack.append((branch.next, path + (branch.hyp,), child_fixed))
        for entry in list(nodes) + list(leaves):
            if entry not in visited:
                self.fail(None, None, None, f"branch entry {entry!r} is unreachable from the root")
                ok = False
        return ok

    # -- parameter analysis --------------------------------------------------

    def analyse(self) -> bool:
        """Free and fixed parameters of every judgment."""
        ok = True
        self.free: dict[str, frozenset[str]] = {}
        self.fixed: dict[str, frozenset[str]] = {}
        for j in self.cert.judgments:
            free = set(j.word.params)
            fixed: set[str] = set()
            if j.rule == "HYP":
                hyp = self.hyps.get(str(j.side.get("hyp")))
                subst = {str(k): _expr(v) for k, v in (j.side.get("subst") or {}).items()}
                if hyp is None:
                    self.fail(None, j.id, None, f"unknown hypothesis {j.side.get('hyp')!r}")
                    ok = False
                else:
                    allowed = {hyp.schema_var} if hyp.schema_var else set()
                    if not set(subst) <= allowed:
                        self.fail(
                            None, j.id, None,
                            f"hypothesis {hyp.id!r} cannot be re-instantiated at {sorted(set(subst) - allowed)}",
                        )
                        ok = False
                    free |= hyp.word.params - set(subst)
                    fixed |= hyp.fixed
                for e in subst.values():
                    free |= e.params
            for prem in j.premises:
                pfree = set(self.free.get(prem.ref, frozenset()))
                keys = {k for k, _ in prem.subst}
                clash = keys & self.fixed.get(prem.ref, frozenset())
                if clash:
                    self.fail(None, j.id, None, f"premise {prem.ref!r} is fixed in {sorted(clash)}; it cannot be re-instantiated")
                    ok = False
                pfree -= keys
                for _, e in prem.subst:
                    pfree |= e.params
                pfree |= prem.power.params
                if prem.index is not None:
                    pfree |= prem.index.start.params | prem.index.stop.params
                    pfree.discard(prem.index.var)
                free |= pfree
                fixed |= self.fixed.get(prem.ref, frozenset())
            self.free[j.id] = frozenset(free)
            self.fixed[j.id] = frozenset(fixed)
        return ok

    def closure(self, roots: Sequence[str]) -> set[str]:
        out: set[str] = set()
        stack = [r for r in roots if r in self.J]
        while stack:
            jid = stack.pop()
            if jid in out:
                continue
            out.add(jid)
            stack.extend(p.ref for p in self.J[jid].premises)
        return out

    # -- instance checks -----------------------------------------------------

    def instance(self, jid: str, env: Mapping[str, int], path: set[str], memo: set) -> Word:
        j = self.J[jid]
        key = (jid, tuple(sorted((n, env[n]) for n in self.free[jid] if n in env)))
        try:
            word = j.word.instantiate(env)
        except ParameterError as exc:
            raise _Fail(jid, env, str(exc)) from None
        if key in memo:
            return word
        getattr(self, "_rule_" + j.rule)(j, word, env, path, memo)
        memo.add(key)
        return word

    def _premise_env(self, prem: Premise, env: Mapping[str, int]) -> dict[str, int]:
        penv = dict(env)
        for name, e in prem.subst:
            penv[name] = e.evaluate(env)
        return penv

    def _rule_HYP(self, j, word, env, path, memo):
        hyp_id = str(j.side["hyp"])
        if hyp_id not in path:
            raise _Fail(j.id, env, f"hypothesis {hyp_id!r} is not available on this branch")
        hyp = self.hyps[hyp_id]
        if hyp.sign is not j.sign:
            raise _Fail(j.id, env, f"sign differs from hypothesis {hyp_id!r}")
        henv = dict(env)
        for k, v in (j.side.get("subst") or {}).items():
            henv[str(k)] = _expr(v).evaluate(env)
        if hyp.schema_var is not None and hyp.schema_var in henv:
            lo = self.declared.get(hyp.schema_var)
            if lo is not None and henv[hyp.schema_var] < lo:
                raise _Fail(j.id, env, f"schema instantiated outside its domain {hyp.schema_var} >= {lo}")
        if hyp.word.instantiate(henv) != word:
            raise _Fail(j.id, env, f"word does not match hypothesis {hyp_id!r}")

    def _peripheral(self, w: Word) -> tuple[int, int] | None:
        if not w.generators <= {"m", "l"}:
            return None
        a = sum(e for g, e in w if g == "m")
        b = sum(e for g, e in w if g == "l")
        return a, b

    def _in_range(self, w: Word) -> bool:
        ab = self._peripheral(w)
        return ab is not None and ab[1] >= 1 and Fraction(ab[0], ab[1]) >= self.r

    def _rule_DECAY(self, j, word, env, path, memo):
        (prem,) = j.premises
        anchor = self.J[prem.ref]
        aw = self.instance(anchor.id, env, path, memo)
        if anchor.sign is not Sign.POSITIVE or not self._in_range(aw):
            raise _Fail(j.id, env, "anchor premise is not a positive companion slope of value >= r")
        ab = self._peripheral(word)
        if ab is None:
            raise _Fail(j.id, env, "DECAY word is not a companion peripheral element")
        if ab[1] < 1:
            raise _Fail(j.id, env, f"m^{ab[0]} l^{ab[1]} is not a slope with positive longitude count")
        if Fraction(ab[0], ab[1]) < self.r:
            raise _Fail(j.id, env, f"slope {ab[0]}/{ab[1]} is below r = {fraction_text(self.r)}")

    def _rule_PROD(self, j, word, env, path, memo):
        parts: list[tuple[str, int]] = []
        nonempty = False
        for prem in j.premises:
            pj = self.J[prem.ref]
            if pj.sign is not j.sign:
                raise _Fail(j.id, env, f"factor {prem.ref!r} has the wrong sign")
            indices: list[int | None] = [None]
            if prem.index is not None:
                indices = prem.index.values(env)
            for idx in indices:
                env2 = dict(env)
                if idx is not None:
                    env2[prem.index.var] = idx
                power = prem.power.evaluate(env2)
                if power < 0:
                    raise _Fail(j.id, env, f"factor {prem.ref!r} raised to negative power {power}")
                if power == 0:
                    continue
                nonempty = True
                pw = self.instance(pj.id, self._premise_env(prem, env2), path, memo)
                parts.extend((pw ** power).syllables)
        if not nonempty:
            raise _Fail(j.id, env, "empty product")
        if Word(parts) != word:
            raise _Fail(j.id, env, "word is not the product of its factors")

    def _rule_POWER_ROOT(self, j, word, env, path, memo):
        (prem,) = j.premises
        pj = self.J[prem.ref]
        if pj.sign is not j.sign:
            raise _Fail(j.id, env, "POWER_ROOT keeps the sign")
        pw = self.instance(pj.id, env, path, memo)
        if word ** int(j.side["power"]) != pw:
            raise _Fail(j.id, env, f"premise is not the {j.side['power']}-th power of the word")

    def _rule_INV(self, j, word, env, path, memo):
        (prem,) = j.premises
        pj = self.J[prem.ref]
        if pj.sign is not j.sign.flip():
            raise _Fail(j.id, env, "INV flips the sign")
        if ~self.instance(pj.id, env, path, memo) != word:
            raise _Fail(j.id, env, "word is not the inverse of the premise")

    def _rule_EQ(self, j, word, env, path, memo):
        (prem,) = j.premises
        pj = self.J[prem.ref]
        if pj.sign is not j.sign:
            raise _Fail(j.id, env, "EQ keeps the sign")
        if self.nf(self.instance(pj.id, env, path, memo)) != self.nf(word):
            raise _Fail(j.id, env, "words differ in G_(p,q)")

    # -- grid ----------------------------------------------------------------

    def points(self, names: Sequence[str]) -> Iterator[dict[str, int]]:
        names = sorted(names)
        ranges = [range(self.grid[n][0], self.grid[n][1] + 1) for n in names]
        for values in itertools.product(*ranges):
            yield dict(zip(names, values))

    def choose(self, choices: Sequence[Choice], env: dict[str, int]) -> str | None:
        for c in choices:
            for s in range(c.min, c.min + CHOICE_SEARCH_LIMIT):
                env[c.name] = s
                den = c.den.evaluate(env)
                if den > 0 and Fraction(c.num.evaluate(env), den) >= self.r:
                    break
            else:
                del env[c.name]
                return f"unsatisfiable side condition for {c.name}: ({c.num})/({c.den}) >= {fraction_text(self.r)}"
        return None

    def check_pivots(self) -> None:
        for node, fixed in self.pivot_checks:
            names = [n for n in node.pivot.params if n in self.grid]
            for env in self.points(names):
                if self.nf(node.pivot.instantiate(env)).is_identity():
                    self.fail(None, None, env, f"pivot of {node.id!r} is trivial, so its sign is undefined")
                    break

    def check_identities(self, bound: int) -> list[dict[str, Any]]:
        out = []
        for ident in self.cert.identities:
            names = sorted(ident.lhs.params | ident.rhs.params)
            ranges = []
            problem = None
            for n in names:
                lo = ident.domain.get(n, self.declared.get(n))
                if lo is None:
                    problem = f"identity {ident.label!r} uses undeclared parameter {n!r}"
                    break
                ranges.append(range(lo, max(lo, bound) + 1))
            checked = 0
            if problem is None:
                for values in itertools.product(*ranges):
                    env = dict(zip(names, values))
                    if self.nf(ident.lhs.instantiate(env)) != self.nf(ident.rhs.instantiate(env)):
                        problem = f"identity {ident.label!r} fails"
                        self.fail(None, None, env, problem)
                        break
                    checked += 1
            else:
                self.fail(None, None, None, problem)
            out.append({"label": ident.label, "ok": problem is None, "instances": checked})
        return out

    def check_leaf(self, leaf: Leaf) -> dict[str, Any]:
        path = set(self.paths.get(leaf.id, ()))
        result: dict[str, Any] = {"leaf": leaf.id, "path": list(self.paths.get(leaf.id, ()))}
        if leaf.info:
            result["info"] = dict(leaf.info)
        roots = list(leaf.contradiction) if leaf.contradiction else [leaf.conclusion]
        for jid in roots:
            if jid not in self.J:
                self.fail(leaf.id, jid, None, f"leaf cites unknown judgment {jid!r}")
                return result
        choice_names = {c.name for c in leaf.choices}
        free = set().union(*(self.free[j] for j in roots))
        if leaf.sequence is not None:
            seq = leaf.sequence
            free |= seq.A.params | seq.B.params | seq.D.params | {seq.index}
            if seq.index in (seq.A.params | seq.B.params | seq.D.params):
                self.fail(leaf.id, None, None, f"sequence coefficients depend on the index {seq.index!r}")
                return result
        for c in leaf.choices:
            free |= (c.num.params | c.den.params) - {c.name}
        free -= choice_names
        undeclared = free - set(self.grid)
        if undeclared:
            self.fail(leaf.id, None, None, f"undeclared parameter(s) {sorted(undeclared)}")
            return result
        if leaf.contradiction is None:
            if leaf.sequence is None:
                self.fail(leaf.id, leaf.conclusion, None, "leaf has no sequence formula")
                return result
            if self.J[leaf.conclusion].sign is not Sign.POSITIVE:
                self.fail(leaf.id, leaf.conclusion, None, "leaf conclusion must be positive")
                return result
        else:
            a, b = (self.J[x] for x in leaf.contradiction)
            if a.sign is b.sign:
                self.fail(leaf.id, a.id, None, "contradiction needs judgments of opposite sign")
                return result

        memo: set = set()
        instances = []
        pq = self.p * self.q
        for env in self.points(sorted(free)):
            point = dict(env)
            problem = self.choose(leaf.choices, env)
            if problem:
                self.fail(leaf.id, None, point, problem)
                continue
            try:
                words = [self.instance(j, env, path, memo) for j in roots]
            except _Fail as f:
                self.fail(leaf.id, f.judgment, f.env, f.reason)
                continue
            except ParameterError as exc:
                self.fail(leaf.id, None, point, str(exc))
                continue
            if leaf.contradiction is not None:
                if self.nf(words[0]) != self.nf(words[1]):
                    self.fail(leaf.id, roots[0], point, "contradiction judgments name different elements")
                continue
            seq = leaf.sequence
            A, B, D = (x.evaluate(env) for x in (seq.A, seq.B, seq.D))
            n = env[seq.index]
            if A <= 0 or D <= 0:
                self.fail(leaf.id, leaf.conclusion, point, f"sequence must increase: need A > 0 and D > 0, got A={A}, D={D}")
                continue
            if B != pq * D:
                self.fail(leaf.id, leaf.conclusion, point, f"sequence must start at pq: B/D = {fraction_text(Fraction(B, D))} != {pq}")
                continue
            target = self.mu_c ** (A * n + B) * self.lambda_c ** D
            if self.nf(target) != self.nf(words[0]):
                self.fail(leaf.id, leaf.conclusion, point, "conclusion is not the slope mu_C^(A*N+B) lambda_C^D")
                continue
            value = Fraction(A * n + B, D)
            weight = gcd(A * n + B, D)
            instances.append(
                {
                    "point": point,
                    "choices": {c.name: env[c.name] for c in leaf.choices},
                    "exponents": [A * n + B, D],
                    "slope": fraction_text(value),
                    "weight": weight,
                }
            )
        if leaf.sequence is not None:
            s = leaf.sequence
            result["sequence"] = f"r_{s.index} = (({s.A})*{s.index} + {s.B})/({s.D})"
            result["instances"] = instances
        return result


def _resolve_grid(cert: DecayCertificate, grid: int | Mapping[str, tuple[int, int]]) -> dict[str, tuple[int, int]]:
    declared = dict(cert.parameters)
    if isinstance(grid, int):
        if grid < 0:
            raise GridError("grid bound must be non-negative")
        return {n: (lo, max(lo, grid)) for n, lo in declared.items()}
    out = {}
    for n, lo in declared.items():
        if n not in grid:
            raise GridError(f"no grid range for parameter {n!r}")
        a, b = grid[n]
        if a < lo:
            raise GridError(f"grid range {a}..{b} for {n!r} leaves its domain {n} >= {lo}")
        if b < a:
            raise GridError(f"empty grid range for {n!r}")
        out[n] = (a, b)
    return out


def verify_derivation(cert: DecayCertificate, grid: int | Mapping[str, tuple[int, int]] = 5) -> VerificationReport:
    """Check every judgment of ``cert`` at every grid point it is used at."""
    ranges = _resolve_grid(cert, grid)
    bound = max((hi for _, hi in ranges.values()), default=0)
    ck = _Checker(cert, ranges)
    leaves: list[dict[str, Any]] = []
    identities: list[dict[str, Any]] = []
    ck.exhaustive = False
    if ck.check_header() and ck.check_structure() and ck.build_tree() and ck.analyse():
        used: set[str] = set()
        for leaf in cert.leaves:
            roots = list(leaf.contradiction) if leaf.contradiction else [leaf.conclusion]
            closure = ck.closure(roots)
            used |= closure
            for jid in sorted(closure):
                j = ck.J[jid]
                if j.rule == "HYP" and str(j.side.get("hyp")) not in ck.paths.get(leaf.id, ()):
                    ck.fail(leaf.id, jid, None, f"hypothesis {j.side.get('hyp')!r} is not on this leaf's branch")
        for j in cert.judgments:
            if j.id not in used:
                ck.fail(None, j.id, None, "judgment is not used by any leaf")
        if not ck.failures:
            ck.check_pivots()
            for leaf in cert.leaves:
                leaves.append(ck.check_leaf(leaf))
            identities = ck.check_identities(bound)
    failures = sorted(ck.failures, key=lambda f: json.dumps(f, sort_keys=True))
    truncated = max(0, len(failures) - MAX_FAILURES)
    return VerificationReport(
        cert.p,
        cert.q,
        cert.r,
        ranges,
        ck.exhaustive,
        sorted(leaves, key=lambda x: x["leaf"]),
        identities,
        failures[:MAX_FAILURES],
        truncated,
    )


# ---------------------------------------------------------------------------
# Conclusion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayConclusion:
    p: int
    q: int
    r: Fraction
    decay: int
    statement: str
    notes: tuple[str, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "companion_decay": fraction_text(self.r),
            "decay": self.decay,
            "statement": self.statement,
            "notes": list(self.notes),
        }


def conclude_decay(report: VerificationReport) -> DecayConclusion:
    if not report.exhaustive:
        raise ConclusionRefused("branch tree is not exhaustive")
    if not report.accepted:
        raise ConclusionRefused(f"certificate rejected ({len(report.failures)} failure(s))")
    p, q, pq = report.p, report.q, report.p * report.q
    statement = f"cable({p},{q}) of a {fraction_text(report.r)}-decayed companion is {pq}-decayed"
    notes = (
        f"{pq}-decayed",
        "only the branch with the slope of value pq positive is derived; "
        "the opposite sign follows by reversing the ordering",
        "unreduced slopes mu_C^(A*N+B) lambda_C^D are positive exactly when their reduced slopes are",
        f"grid-limited: parameters checked on {', '.join(f'{k} in [{a},{b}]' for k, (a, b) in sorted(report.grid.items()))}",
    )
    return DecayConclusion(p, q, report.r, pq, statement, notes)
