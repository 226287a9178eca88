"""Word-problem backends.

Every backend maps a concrete :class:`~decaykit.words.Word` to a hashable
canonical key.  For the exact backends, two words are equal in the group
iff their keys coincide.  The bounded rewriting backend is exact only when
its rule set is confluent; otherwise equality may come back ``UNKNOWN``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Hashable, Iterable, Sequence

from .presentations import Presentation, commutator
from .words import Word

__all__ = [
    "UNKNOWN",
    "BudgetExceeded",
    "Backend",
    "FreeAbelian",
    "CyclicFreeProduct",
    "AbelianFactor",
    "CentralAmalgam",
    "RewritingBackend",
    "GpqNormalForm",
    "backend_for",
    "gpq_backend",
    "gpq_presentation",
    "normal_form_Gpq",
    "torus_amalgam",
    "words_equal",
]


class _Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        raise TypeError("UNKNOWN has no truth value; compare with `is UNKNOWN`")


UNKNOWN = _Unknown()


class BudgetExceeded(RuntimeError):
    pass


class Backend:
    generators: tuple[str, ...] = ()
    exact: bool = True
    name: str = "backend"

    def canonical(self, w: Word) -> Hashable:
        raise NotImplementedError

    def normal_word(self, w: Word) -> Word:
        raise NotImplementedError

    def check_alphabet(self, w: Word) -> None:
        extra = w.generators - set(self.generators)
        if extra:
            raise ValueError(f"generator(s) {sorted(extra)} not in backend alphabet {self.generators}")

    def is_identity(self, w: Word) -> bool:
        return self.canonical(w) == self.canonical(Word())

    def equal(self, w1: Word, w2: Word):
        return self.canonical(w1) == self.canonical(w2)


def words_equal(w1: Word, w2: Word, backend: Backend):
    """``True``/``False``, or ``UNKNOWN`` from the bounded rewriting backend."""
    backend.check_alphabet(w1)
    backend.check_alphabet(w2)
    return backend.equal(w1, w2)


# ---------------------------------------------------------------------------
# Free abelian groups and free products of cyclic groups
# ---------------------------------------------------------------------------


class FreeAbelian(Backend):
    name = "free_abelian"

    def __init__(self, generators: Sequence[str]):
        self.generators = tuple(generators)
        self._index = {g: i for i, g in enumerate(self.generators)}

    def canonical(self, w: Word) -> tuple[int, ...]:
        vec = [0] * len(self.generators)
        for g, e in w:
            vec[self._index[g]] += e
        return tuple(vec)

    def normal_word(self, w: Word) -> Word:
        return Word(zip(self.generators, self.canonical(w)))


class CyclicFreeProduct(Backend):
    """Free product of cyclic groups; order 0 means infinite cyclic."""

    name = "cyclic_free_product"

    def __init__(self, orders: dict[str, int]):
        self.generators = tuple(orders)
        self.orders = dict(orders)

    def _reduce(self, e: int, g: str) -> int:
        n = self.orders[g]
        return e % n if n else e

    def canonical(self, w: Word) -> tuple[tuple[str, int], ...]:
        stack: list[tuple[str, int]] = []
        for g, e in w:
            if stack and stack[-1][0] == g:
                e += stack.pop()[1]
            e = self._reduce(e, g)
            if e:
                stack.append((g, e))
        return tuple(stack)

    def normal_word(self, w: Word) -> Word:
        return Word(self.canonical(w))


# ---------------------------------------------------------------------------
# Amalgams of abelian groups over a central cyclic subgroup
# ---------------------------------------------------------------------------


def _unimodular_complement(v: tuple[int, int]) -> tuple[int, int]:
    """(u, w) with v[0]*w - v[1]*u = -1 for primitive v (extended Euclid)."""
    a, b = v

    def egcd(x: int, y: int) -> tuple[int, int, int]:
        if y == 0:
            return (abs(x), 1 if x >= 0 else -1, 0)
        g, s, t = egcd(y, x % y)
        return g, t, s - (x // y) * t

    g, s, t = egcd(a, b)
    if g != 1:
        raise ValueError(f"{v} is not primitive")
    # s*a + t*b = 1  ->  a*(-t) - b*(-s)... pick (u, w) = (s, -t): a*w - b*u = -a*t - b*s = -1
    return (s, -t)


@dataclass(frozen=True)
class AbelianFactor:
    """A free abelian factor ``Z^k`` (k = 1 or 2) with an amalgamated element.

    ``edge`` is the amalgamated element in generator coordinates.  Together
    with ``complement`` (rank 2 only), ``edge / gcd(edge)`` forms a
    unimodular basis; transversal representatives are
    ``residue * (edge / d) + y * complement`` with ``0 <= residue < d``.
    """

    gens: tuple[str, ...]
    edge: tuple[int, ...]
    complement: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.gens) not in (1, 2) or len(self.edge) != len(self.gens):
            raise ValueError("abelian factors of rank 1 or 2 only")
        if not any(self.edge):
            raise ValueError("the amalgamated element must be nontrivial")
        if len(self.gens) == 2:
            d = gcd(*self.edge)
            base = (self.edge[0] // d, self.edge[1] // d)
            comp = self.complement or _unimodular_complement(base)
            det = base[0] * comp[1] - base[1] * comp[0]
            if det not in (1, -1):
                raise ValueError("edge and complement do not form a basis")
            object.__setattr__(self, "complement", tuple(comp))

    @property
    def d(self) -> int:
        return gcd(*self.edge) if len(self.edge) == 2 else abs(self.edge[0])

    def coords(self, vec: tuple[int, ...]) -> tuple[int, ...]:
        """Coordinates of ``vec`` in the basis (edge/d, complement)."""
        if len(self.gens) == 1:
            sign = 1 if self.edge[0] > 0 else -1
            return (sign * vec[0],)
        d = self.d
        b0, b1 = self.edge[0] // d, self.edge[1] // d
        c0, c1 = self.complement
        det = b0 * c1 - b1 * c0
        x = (vec[0] * c1 - vec[1] * c0) * det
        y = (b0 * vec[1] - b1 * vec[0]) * det
        return (x, y)

    def vector(self, coords: tuple[int, ...]) -> tuple[int, ...]:
        if len(self.gens) == 1:
            sign = 1 if self.edge[0] > 0 else -1
            return (sign * coords[0],)
        d = self.d
        b0, b1 = self.edge[0] // d, self.edge[1] // d
        c0, c1 = self.complement
        return (coords[0] * b0 + coords[1] * c0, coords[0] * b1 + coords[1] * c1)

    def split(self, coords: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        """(number of edge elements, transversal representative)."""
        q, r = divmod(coords[0], self.d)
        return q, (r,) + tuple(coords[1:])

    def rep_word(self, rep: tuple[int, ...]) -> Word:
        return Word(zip(self.gens, self.vector(rep)))


class CentralAmalgam(Backend):
    """``A *_C B`` for abelian ``A``, ``B`` glued along infinite cyclic ``C``.

    ``C`` is central in both factors and hence in the amalgam, so every
    element has a unique form ``c^e r_1 ... r_j`` with alternating nontrivial
    transversal representatives ``r_i``.
    """

    name = "amalgam"

    def __init__(self, a: AbelianFactor, b: AbelianFactor, central: int = 1):
        self.factors = (a, b)
        self.generators = a.gens + b.gens
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("factors must use disjoint generators")
        self.central = central
        self._where = {}
        for fi, f in enumerate(self.factors):
            for pos, g in enumerate(f.gens):
                unit = tuple(1 if i == pos else 0 for i in range(len(f.gens)))
                self._where[g] = (fi, f.coords(unit))

    def canonical(self, w: Word) -> tuple[int, tuple[tuple[int, tuple[int, ...]], ...]]:
        central = 0
        stack: list[tuple[int, tuple[int, ...]]] = []
        for g, e in w:
            try:
                fi, unit = self._where[g]
            except KeyError:
                raise ValueError(f"generator {g!r} not in {self.generators}") from None
            coords = tuple(e * c for c in unit)
            if stack and stack[-1][0] == fi:
                prev = stack.pop()[1]
                coords = tuple(x + y for x, y in zip(prev, coords))
            q, rep = self.factors[fi].split(coords)
            central += q
            if any(rep):
                stack.append((fi, rep))
        return central, tuple(stack)

    def normal_word(self, w: Word) -> Word:
        central, reps = self.canonical(w)
        f = self.factors[self.central]
        out = f.rep_word((self.central_power(central),) + (0,) * (len(f.gens) - 1))
        for fi, rep in reps:
            out = out * self.factors[fi].rep_word(rep)
        return out

    def central_power(self, e: int) -> int:
        return e * self.factors[self.central].d


def torus_amalgam(x: str, p: int, y: str, q: int, central: int = 1) -> CentralAmalgam:
    """``< x, y | x^p = y^q >``."""
    return CentralAmalgam(AbelianFactor((x,), (p,)), AbelianFactor((y,), (q,)), central)


# ---------------------------------------------------------------------------
# The cable peripheral group G_{p,q} = < m, l, t | [m, l], t^p = m^q l^p >
# ---------------------------------------------------------------------------


def _check_pq(p: int, q: int) -> None:
    if p < 2 or q < 1:
        raise ValueError(f"need p >= 2 and q >= 1, got ({p}, {q})")
    if gcd(p, q) != 1:
        raise ValueError(f"p, q not coprime: ({p}, {q})")


@lru_cache(maxsize=None)
def gpq_backend(p: int, q: int) -> CentralAmalgam:
    _check_pq(p, q)
    v = (-pow(q, -1, p)) % p
    u = (1 + q * v) // p
    a = AbelianFactor(("m", "l"), (q, p), (u, v))
    b = AbelianFactor(("t",), (p,))
    return CentralAmalgam(a, b, central=1)


def gpq_presentation(p: int, q: int) -> Presentation:
    _check_pq(p, q)
    m, l, t = Word.gen("m"), Word.gen("l"), Word.gen("t")
    return Presentation(
        ("m", "l", "t"),
        (commutator(m, l), t ** (-p) * m ** q * l ** p),
        name=f"G_({p},{q})",
    )


@dataclass(frozen=True)
class GpqNormalForm:
    """``t^(p*central) r_1 ... r_j`` in ``G_{p,q}``."""

    p: int
    q: int
    central: int
    reps: tuple[tuple[int, tuple[int, ...]], ...]

    def word(self) -> Word:
        backend = gpq_backend(self.p, self.q)
        out = Word.gen("t", self.p * self.central)
        for fi, rep in self.reps:
            out = out * backend.factors[fi].rep_word(rep)
        return out

    def is_identity(self) -> bool:
        return self.central == 0 and not self.reps

    def __str__(self) -> str:
        return str(self.word())


def normal_form_Gpq(w: Word, p: int, q: int) -> GpqNormalForm:
    """Canonical form of ``w`` in ``< m, l, t | [m,l], t^p = m^q l^p >``."""
    if not isinstance(w, Word):
        raise TypeError("normal_form_Gpq needs a concrete Word (instantiate parameters first)")
    backend = gpq_backend(p, q)
    central, reps = backend.canonical(w)
    return GpqNormalForm(p, q, central, reps)


# ---------------------------------------------------------------------------
# Bounded rewriting for arbitrary finite presentations
# ---------------------------------------------------------------------------


class RewritingBackend(Backend):
    """Shortlex rewriting with rules read off the relators.

    Each relator ``r`` and each cyclic conjugate of ``r`` or ``r^-1`` split
    as ``u v`` yields the rule ``max(u, v^-1) -> min(u, v^-1)``.  No rules
    are ever added.  When every critical pair resolves, the system is
    confluent and irreducible words are exact normal forms.  Otherwise
    equality falls back to a bounded search over cyclic rewrites and may
    report ``UNKNOWN``.
    """

    name = "rewriting"

    def __init__(self, pres: Presentation, budget: int = 100_000):
        self.presentation = pres
        self.generators = pres.generators
        self.budget = budget
        self._code = {g: i + 1 for i, g in enumerate(pres.generators)}
        self.rules: dict[tuple[int, ...], tuple[int, ...]] = {}
        for r in pres.relators:
            self._add_relator(self._encode(r))
        self._lengths = sorted({len(k) for k in self.rules}, reverse=True)
        self.exact = self._confluent()

    # encoding: generator i -> i+1, inverse -> -(i+1)
    def _encode(self, w: Word) -> tuple[int, ...]:
        return tuple(self._code[g] * s for g, s in w.letters())

    def _decode(self, letters: Iterable[int]) -> Word:
        return Word((self.generators[abs(x) - 1], 1 if x > 0 else -1) for x in letters)

    @staticmethod
    def _key(letters: Sequence[int]) -> tuple:
        return (len(letters), tuple(2 * (abs(x) - 1) + (x < 0) for x in letters))

    @staticmethod
    def _inv(letters: Sequence[int]) -> tuple[int, ...]:
        return tuple(-x for x in reversed(letters))

    @staticmethod
    def _cancel(letters: Iterable[int]) -> list[int]:
        out: list[int] = []
        for x in letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return out

    def _cyclic_reduce(self, letters: Sequence[int]) -> tuple[int, ...]:
        w = self._cancel(letters)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return tuple(w)

    def _add_relator(self, rel: tuple[int, ...]) -> None:
        rel = self._cyclic_reduce(rel)
        if not rel:
            return
        for cand in (rel, self._inv(rel)):
            for k in range(len(cand)):
                rot = cand[k:] + cand[:k]
                for i in range(len(rot) + 1):
                    u, v = rot[:i], self._inv(rot[i:])
                    lhs, rhs = (u, v) if self._key(u) > self._key(v) else (v, u)
                    if not lhs or lhs == rhs:
                        continue
                    old = self.rules.get(lhs)
                    if old is None or self._key(rhs) < self._key(old):
                        self.rules[lhs] = rhs

    def _rewrite(self, letters: Sequence[int], budget: list[int]) -> tuple[int, ...]:
        w = self._cancel(letters)
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                for n in self._lengths:
                    if i + n <= len(w):
                        rhs = self.rules.get(tuple(w[i : i + n]))
                        if rhs is not None:
                            budget[0] -= 1
                            if budget[0] < 0:
                                raise BudgetExceeded("rewriting budget exhausted")
                            w = self._cancel(w[:i] + list(rhs) + w[i + n :])
                            changed = True
                            break
                if changed:
                    break
        return tuple(w)

    def _confluent(self) -> bool:
        lhss = list(self.rules)
        # free cancellation participates as the rules x X -> 1
        cancels = [(x, -x) for g in range(1, len(self.generators) + 1) for x in (g, -g)]
        full = {**self.rules, **{c: () for c in cancels}}
        budget = [self.budget]

        def nf(w):
            return self._rewrite(w, budget)

        try:
            for l1 in full:
                r1 = full[l1]
                for l2 in full:
                    r2 = full[l2]
                    # proper overlaps: suffix of l1 equals prefix of l2
                    for k in range(1, min(len(l1), len(l2))):
                        if l1[-k:] == l2[:k]:
                            a = list(r1) + list(l2[k:])
                            b = list(l1[:-k]) + list(r2)
                            if nf(a) != nf(b):
                                return False
                    # inclusion of l2 inside l1
                    if len(l2) < len(l1):
                        for i in range(len(l1) - len(l2) + 1):
                            if l1[i : i + len(l2)] == l2:
                                b = list(l1[:i]) + list(r2) + list(l1[i + len(l2) :])
                                if nf(list(r1)) != nf(b):
                                    return False
        except BudgetExceeded:
            return False
        del lhss
        return True

    def canonical(self, w: Word) -> tuple[int, ...]:
        return self._rewrite(self._encode(w), [self.budget])

    def normal_word(self, w: Word) -> Word:
        return self._decode(self.canonical(w))

    def equal(self, w1: Word, w2: Word):
        try:
            if self.canonical(w1) == self.canonical(w2):
                return True
        except BudgetExceeded:
            return UNKNOWN
        if self.exact:
            return False
        ab = self.presentation.abelianization()
        if ab.image(w1) != ab.image(w2):
            return False
        return self._search_trivial(self._encode(w1 * ~w2))

    def _search_trivial(self, letters: tuple[int, ...]):
        """Breadth-first search over shortening rewrites of a cyclic word."""
        start = self._cyclic_reduce(letters)
        seen = {start}
        queue = deque([start])
        steps = 0
        while queue:
            w = queue.popleft()
            if not w:
                return True
            for k in range(len(w)):
                rot = w[k:] + w[:k]
                for i in range(len(rot)):
                    for n in self._lengths:
                        if i + n > len(rot):
                            continue
                        rhs = self.rules.get(rot[i : i + n])
                        if rhs is None:
                            continue
                        steps += 1
                        if steps > self.budget:
                            return UNKNOWN
                        nxt = self._cyclic_reduce(rot[:i] + rhs + rot[i + n :])
                        if nxt not in seen:
                            seen.add(nxt)
                            queue.append(nxt)
        return UNKNOWN


# ---------------------------------------------------------------------------
# Backend selection
# ---------------------------------------------------------------------------


def _is_commutator(r: Word) -> tuple[str, str] | None:
    s = r.syllables
    if len(s) == 4 and all(abs(e) == 1 for _, e in s):
        (a, e1), (b, e2), (c, e3), (d, e4) = s
        if a == c and b == d and a != b and e1 == -e3 and e2 == -e4:
            return tuple(sorted((a, b)))
    return None


def backend_for(pres: Presentation, hint: str = "auto", budget: int = 100_000) -> Backend:
    """Pick a word-problem backend for ``pres``.

    Hints: ``free_abelian``, ``cyclic_free_product``, ``amalgam``,
    ``gpq:P,Q``, ``rewriting`` or ``auto``.
    """
    gens = pres.generators
    rels = [r for r in pres.relators if r]
    if hint.startswith("gpq:"):
        p, q = (int(x) for x in hint[4:].split(","))
        if set(gens) != {"m", "l", "t"}:
            raise ValueError("gpq backend needs generators m, l, t")
        return gpq_backend(p, q)

    pairs = {_is_commutator(r) for r in rels}
    all_pairs = {tuple(sorted((a, b))) for i, a in enumerate(gens) for b in gens[i + 1 :]}
    if hint in ("auto", "free_abelian") and None not in pairs and pairs == all_pairs:
        return FreeAbelian(gens)
    if hint == "free_abelian":
        raise ValueError("presentation is not in free abelian form")

    if hint in ("auto", "cyclic_free_product") and all(len(r.syllables) == 1 for r in rels):
        orders = {g: 0 for g in gens}
        for r in rels:
            g, e = r.syllables[0]
            orders[g] = gcd(orders[g], abs(e))
        return CyclicFreeProduct(orders)
    if hint == "cyclic_free_product":
        raise ValueError("presentation is not a free product of cyclic groups")

    if hint in ("auto", "amalgam") and len(gens) == 2 and len(rels) == 1:
        s = list(rels[0].syllables)
        while len(s) > 2 and s[0][0] == s[-1][0]:
            g, e = s.pop()
            s[0] = (g, s[0][1] + e)
        if len(s) == 2 and s[0][0] != s[1][0]:
            (x, a), (y, b) = s
            return torus_amalgam(x, a, y, -b)
    if hint == "amalgam":
        raise ValueError("presentation is not of the form < x, y | x^a = y^b >")

    if hint not in ("auto", "rewriting"):
        raise ValueError(f"unknown backend hint {hint!r}")
    return RewritingBackend(pres, budget)
