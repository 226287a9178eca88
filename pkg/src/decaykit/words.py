"""Words over generator alphabets.

Two flavours live here:

* :class:`Word` -- a concrete, freely reduced word, stored as syllables
  ``(generator, exponent)``.
* :class:`ParametricWord` -- a word whose exponents are affine integer
  expressions in named parameters (``m^{-k} t^{-1} m^{k}``), optionally with
  parenthesised blocks raised to a parametric power (``(m^2 l t^-1)^{N}``).

Text syntax (used in certificate and presentation files)::

    word     := item*
    item     := atom ['^' exponent]
    atom     := GENERATOR | '(' word ')'
    exponent := ['-'] INT | ['-'] IDENT | '{' affine '}'
    affine   := ['+'|'-'] term (('+'|'-') term)*
    term     := INT | IDENT | INT ['*'] IDENT

Generators are identifiers separated by whitespace; a run such as ``abab``
is split into single letters when every letter is a declared generator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "AffineExpr",
    "Word",
    "Syllable",
    "Block",
    "ParametricWord",
    "WordSyntaxError",
    "ParameterError",
    "affine",
    "free_reduce",
    "instantiate",
    "parse_affine",
    "parse_parametric",
    "parse_word",
]


class WordSyntaxError(ValueError):
    pass


class ParameterError(ValueError):
    """Missing parameter or a value below its declared lower bound."""


# ---------------------------------------------------------------------------
# Affine expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineExpr:
    constant: int = 0
    terms: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def make(constant: int, coeffs: Mapping[str, int]) -> "AffineExpr":
        terms = tuple(sorted((k, v) for k, v in coeffs.items() if v != 0))
        return AffineExpr(int(constant), terms)

    @property
    def params(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return self.constant == 0 and not self.terms

    def coeff(self, name: str) -> int:
        return dict(self.terms).get(name, 0)

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = self.constant
        for name, c in self.terms:
            if name not in env:
                raise ParameterError(f"missing value for parameter {name!r}")
            total += c * env[name]
        return total

    def substitute(self, sub: Mapping[str, "AffineExpr"]) -> "AffineExpr":
        out = AffineExpr(self.constant)
        for name, c in self.terms:
            out = out + (sub[name] * c if name in sub else AffineExpr.make(0, {name: c}))
        return out

    def __add__(self, other: "AffineLike") -> "AffineExpr":
        other = affine(other)
        coeffs = dict(self.terms)
        for name, c in other.terms:
            coeffs[name] = coeffs.get(name, 0) + c
        return AffineExpr.make(self.constant + other.constant, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "AffineExpr":
        return AffineExpr(-self.constant, tuple((n, -c) for n, c in self.terms))

    def __sub__(self, other: "AffineLike") -> "AffineExpr":
        return self + (-affine(other))

    def __rsub__(self, other: "AffineLike") -> "AffineExpr":
        return affine(other) - self

    def __mul__(self, k: int) -> "AffineExpr":
        if not isinstance(k, int):
            return NotImplemented
        return AffineExpr.make(self.constant * k, {n: c * k for n, c in self.terms})

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts: list[str] = []
        for name, c in self.terms:
            if c == 1:
                body = name
            elif c == -1:
                body = "-" + name
            else:
                body = f"{c}*{name}"
            parts.append(body)
        if self.constant or not parts:
            parts.append(str(self.constant))
        text = parts[0]
        for piece in parts[1:]:
            text += piece if piece.startswith("-") else "+" + piece
        return text


AffineLike = Union[AffineExpr, int, str]


def affine(value: AffineLike) -> AffineExpr:
    if isinstance(value, AffineExpr):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(value, int):
        return AffineExpr(value)
    if isinstance(value, str):
        return parse_affine(value)
    raise TypeError(f"cannot build an affine expression from {value!r}")


# ---------------------------------------------------------------------------
# Concrete words
# ---------------------------------------------------------------------------


def _reduce(syllables: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    stack: list[tuple[str, int]] = []
    for gen, e in syllables:
        if e == 0:
            continue
        if stack and stack[-1][0] == gen:
            total = stack[-1][1] + e
            stack.pop()
            if total:
                stack.append((gen, total))
        else:
            stack.append((gen, e))
    return tuple(stack)


class Word:
    """A freely reduced concrete word, immutable."""

    __slots__ = ("syllables", "_hash")

    def __init__(self, syllables: Iterable[tuple[str, int]] = ()):
        self.syllables: tuple[tuple[str, int], ...] = _reduce(syllables)
        self._hash = hash(self.syllables)

    @classmethod
    def gen(cls, name: str, exponent: int = 1) -> "Word":
        return cls(((name, exponent),))

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[str, int]]) -> "Word":
        return cls(letters)

    def letters(self) -> Iterator[tuple[str, int]]:
        for gen, e in self.syllables:
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield gen, step

    @property
    def generators(self) -> frozenset[str]:
        return frozenset(g for g, _ in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def __invert__(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.syllables))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        if n == 0 or not self.syllables:
            return Word()
        out: list[tuple[str, int]] = []
        for _ in range(n):
            out.extend(self.syllables)
        return Word(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.syllables == other.syllables

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (len(self), self.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


# ---------------------------------------------------------------------------
# Parametric words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Syllable:
    gen: str
    exponent: AffineExpr


@dataclass(frozen=True)
class Block:
    body: "ParametricWord"
    exponent: AffineExpr


Item = Union[Syllable, Block]


@dataclass(frozen=True)
class ParametricWord:
    items: tuple[Item, ...] = ()

    @classmethod
    def gen(cls, name: str, exponent: AffineLike = 1) -> "ParametricWord":
        return cls((Syllable(name, affine(exponent)),))

    @classmethod
    def from_word(cls, word: Word) -> "ParametricWord":
        return cls(tuple(Syllable(g, AffineExpr(e)) for g, e in word.syllables))

    @classmethod
    def of(cls, *pieces: Union["ParametricWord", tuple[str, AffineLike]]) -> "ParametricWord":
        out = cls()
        for piece in pieces:
            out = out * (piece if isinstance(piece, ParametricWord) else cls.gen(*piece))
        return out

    @property
    def params(self) -> frozenset[str]:
        found: set[str] = set()
        for item in self.items:
            found |= item.exponent.params
            if isinstance(item, Block):
                found |= item.body.params
        return frozenset(found)

    @property
    def generators(self) -> frozenset[str]:
        found: set[str] = set()
        for item in self.items:
            if isinstance(item, Block):
                found |= item.body.generators
            else:
                found.add(item.gen)
        return frozenset(found)

    def is_concrete(self) -> bool:
        return not self.params

    def __mul__(self, other: "ParametricWord") -> "ParametricWord":
        return ParametricWord(self.items + other.items)

    def __invert__(self) -> "ParametricWord":
        out: list[Item] = []
        for item in reversed(self.items):
            if isinstance(item, Block):
                out.append(Block(item.body, -item.exponent))
            else:
                out.append(Syllable(item.gen, -item.exponent))
        return ParametricWord(tuple(out))

    def power(self, exponent: AffineLike) -> "ParametricWord":
        exponent = affine(exponent)
        if exponent.is_constant() and exponent.constant == 1:
            return self
        return ParametricWord((Block(self, exponent),))

    def substitute(self, sub: Mapping[str, AffineLike]) -> "ParametricWord":
        sub = {k: affine(v) for k, v in sub.items()}
        out: list[Item] = []
        for item in self.items:
            if isinstance(item, Block):
                out.append(Block(item.body.substitute(sub), item.exponent.substitute(sub)))
            else:
                out.append(Syllable(item.gen, item.exponent.substitute(sub)))
        return ParametricWord(tuple(out))

    def instantiate(self, env: Mapping[str, int]) -> Word:
        return Word(self._expand(env))

    def _expand(self, env: Mapping[str, int]) -> list[tuple[str, int]]:
        out: list[tuple[str, int]] = []
        for item in self.items:
            n = item.exponent.evaluate(env)
            if isinstance(item, Block):
                body = item.body.instantiate(env)
                out.extend((body ** n).syllables)
            else:
                out.append((item.gen, n))
        return out

    def __str__(self) -> str:
        if not self.items:
            return "1"
        return " ".join(_format_item(item) for item in self.items)


def _format_exponent(e: AffineExpr) -> str:
    if e.is_constant():
        return str(e.constant)
    return "{" + str(e) + "}"


def _format_item(item: Item) -> str:
    if isinstance(item, Block):
        return f"({item.body})^{_format_exponent(item.exponent)}"
    if item.exponent.is_constant() and item.exponent.constant == 1:
        return item.gen
    return f"{item.gen}^{_format_exponent(item.exponent)}"


def free_reduce(w: ParametricWord) -> ParametricWord:
    """Merge adjacent equal syllables and drop identically-zero ones.

    Works symbolically: ``m^{k} m^{-k}`` vanishes for every ``k``.  Adjacent
    blocks with identical bodies merge their exponents.  Idempotent.
    """
    stack: list[Item] = []
    for item in w.items:
        if isinstance(item, Block):
            body = free_reduce(item.body)
            if not body.items or item.exponent.is_zero():
                continue
            if item.exponent.is_constant() and item.exponent.constant == 1:
                pending: list[Item] = list(body.items)
            else:
                pending = [Block(body, item.exponent)]
        else:
            if item.exponent.is_zero():
                continue
            pending = [item]
        for piece in pending:
            top = stack[-1] if stack else None
            if (
                isinstance(piece, Syllable)
                and isinstance(top, Syllable)
                and top.gen == piece.gen
            ):
                merged = top.exponent + piece.exponent
                stack.pop()
                if not merged.is_zero():
                    stack.append(Syllable(piece.gen, merged))
            elif isinstance(piece, Block) and isinstance(top, Block) and top.body == piece.body:
                merged = top.exponent + piece.exponent
                stack.pop()
                if not merged.is_zero():
                    stack.append(Block(piece.body, merged))
            else:
                stack.append(piece)
    return ParametricWord(tuple(stack))


def instantiate(
    w: ParametricWord,
    assignment: Mapping[str, int],
    lower_bounds: Mapping[str, int] | None = None,
) -> Word:
    """Substitute integers for every parameter, then freely reduce."""
    missing = sorted(w.params - set(assignment))
    if missing:
        raise ParameterError(f"no value for parameter(s) {', '.join(missing)}")
    for name, lo in (lower_bounds or {}).items():
        if name in assignment and assignment[name] < lo:
            raise ParameterError(f"{name}={assignment[name]} violates {name} >= {lo}")
    return w.instantiate(assignment)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.replace("−", "-")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("int", m.group(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2)))
        elif m.group(3) is not None:
            tokens.append(("op", m.group(3)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: Sequence[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.alphabet = set(alphabet) if alphabet is not None else None

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise WordSyntaxError(f"unexpected end of input in {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, op: str) -> None:
        tok = self.take()
        if tok != ("op", op):
            raise WordSyntaxError(f"expected {op!r} in {self.text!r}, got {tok[1]!r}")

    # affine := ['+'|'-'] term (('+'|'-') term)*
    def affine(self) -> AffineExpr:
        total = AffineExpr()
        sign = 1
        tok = self.peek()
        if tok in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        total = total + self.term() * sign
        while self.peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
            total = total + self.term() * sign
        return total

    def term(self) -> AffineExpr:
        kind, value = self.take()
        if kind == "int":
            coeff = int(value)
            nxt = self.peek()
            if nxt == ("op", "*"):
                self.take()
                nxt = self.peek()
                if nxt is None or nxt[0] != "ident":
                    raise WordSyntaxError(f"expected a parameter after '*' in {self.text!r}")
            if nxt is not None and nxt[0] == "ident":
                self.take()
                return AffineExpr.make(0, {nxt[1]: coeff})
            return AffineExpr(coeff)
        if kind == "ident":
            if self.peek() == ("op", "*"):
                self.take()
                k, v = self.take()
                if k != "int":
                    raise WordSyntaxError(f"expected an integer after '*' in {self.text!r}")
                return AffineExpr.make(0, {value: int(v)})
            return AffineExpr.make(0, {value: 1})
        raise WordSyntaxError(f"unexpected {value!r} in exponent of {self.text!r}")

    def exponent(self) -> AffineExpr:
        tok = self.peek()
        if tok == ("op", "{"):
            self.take()
            e = self.affine()
            self.expect("}")
            return e
        sign = 1
        if tok in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        kind, value = self.take()
        if kind == "int":
            return AffineExpr(sign * int(value))
        if kind == "ident":
            return AffineExpr.make(0, {value: sign})
        raise WordSyntaxError(f"bad exponent {value!r} in {self.text!r}")

    def generators(self, ident: str) -> list[str]:
        if self.alphabet is None or ident in self.alphabet:
            return [ident]
        if all(ch in self.alphabet for ch in ident):
            return list(ident)
        raise WordSyntaxError(f"undeclared generator {ident!r} in {self.text!r}")

    def word(self, closing: str | None = None) -> ParametricWord:
        items: list[Item] = []
        while True:
            tok = self.peek()
            if tok is None:
                if closing is not None:
                    raise WordSyntaxError(f"unbalanced parenthesis in {self.text!r}")
                break
            if tok == ("op", ")"):
                if closing != ")":
                    raise WordSyntaxError(f"unbalanced parenthesis in {self.text!r}")
                self.take()
                break
            if tok == ("op", "("):
                self.take()
                body = self.word(closing=")")
                exp = self._maybe_exponent()
                items.append(Block(body, exp))
                continue
            if tok == ("int", "1"):
                self.take()  # "1" denotes the empty word
                self._maybe_exponent()
                continue
            kind, value = self.take()
            if kind != "ident":
                raise WordSyntaxError(f"unexpected {value!r} in {self.text!r}")
            gens = self.generators(value)
            for g in gens[:-1]:
                items.append(Syllable(g, AffineExpr(1)))
            items.append(Syllable(gens[-1], self._maybe_exponent()))
        return ParametricWord(tuple(items))

    def _maybe_exponent(self) -> AffineExpr:
        if self.peek() == ("op", "^"):
            self.take()
            return self.exponent()
        return AffineExpr(1)


def parse_affine(text: str) -> AffineExpr:
    p = _Parser(text, None)
    e = p.affine()
    if p.peek() is not None:
        raise WordSyntaxError(f"trailing input in affine expression {text!r}")
    return e


def parse_parametric(text: str, alphabet: Sequence[str] | None = None) -> ParametricWord:
    return _Parser(text, alphabet).word()


def parse_word(text: str, alphabet: Sequence[str] | None = None) -> Word:
    w = parse_parametric(text, alphabet)
    if not w.is_concrete():
        raise WordSyntaxError(f"unexpected parameters {sorted(w.params)} in concrete word {text!r}")
    return w.instantiate({})
