"""Finite group presentations and their abelianizations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Mapping, Sequence

from .words import Word, WordSyntaxError, parse_word

__all__ = ["Presentation", "Abelianization", "abelianize", "commutator", "load_presentation"]


def commutator(a: Word, b: Word) -> Word:
    return a * b * ~a * ~b


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    peripheral: tuple[Word, Word] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")
        gens = set(self.generators)
        words = list(self.relators) + list(self.peripheral or ())
        for w in words:
            extra = w.generators - gens
            if extra:
                raise ValueError(f"undeclared generator(s) {sorted(extra)} in {w}")

    @classmethod
    def from_strings(
        cls,
        generators: Sequence[str],
        relators: Sequence[str],
        peripheral: tuple[str, str] | None = None,
        name: str = "",
    ) -> "Presentation":
        gens = tuple(generators)
        rels = tuple(parse_word(r, gens) for r in relators)
        per = None
        if peripheral is not None:
            per = (parse_word(peripheral[0], gens), parse_word(peripheral[1], gens))
        return cls(gens, rels, per, name)

    def parse(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def abelianization(self) -> "Abelianization":
        return _abelianization(self.generators, self.relators)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "generators": list(self.generators),
            "relators": [str(r) for r in self.relators],
        }
        if self.peripheral is not None:
            out["peripheral"] = {"meridian": str(self.peripheral[0]), "longitude": str(self.peripheral[1])}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Presentation":
        try:
            gens = [str(g) for g in data["generators"]]
            rels = [str(r) for r in data.get("relators", [])]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed presentation: {exc}") from exc
        per = data.get("peripheral")
        pair = None
        if per is not None:
            pair = (str(per["meridian"]), str(per["longitude"]))
        return cls.from_strings(gens, rels, pair, str(data.get("name", "")))

    def __str__(self) -> str:
        rels = ", ".join(str(r) for r in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"


@dataclass(frozen=True)
class Abelianization:
    """``Z^n / (relator lattice)`` written as ``Z^rank + Z/d_1 + ... + Z/d_k``.

    ``images[g]`` holds the coordinates of generator ``g``: ``rank`` free
    coordinates followed by one residue per torsion invariant.  Each free
    coordinate is oriented so the first generator with nonzero image maps
    positively.
    """

    generators: tuple[str, ...]
    rank: int
    torsion: tuple[int, ...]
    images: tuple[tuple[int, ...], ...]

    def image(self, w: Word) -> tuple[int, ...]:
        index = {g: i for i, g in enumerate(self.generators)}
        total = [0] * (self.rank + len(self.torsion))
        for g, e in w:
            if g not in index:
                raise ValueError(f"undeclared generator {g!r}")
            for j, c in enumerate(self.images[index[g]]):
                total[j] += e * c
        for j, d in enumerate(self.torsion):
            total[self.rank + j] %= d
        return tuple(total)

    def is_zero(self, w: Word) -> bool:
        return not any(self.image(w))


@lru_cache(maxsize=256)
def _abelianization(generators: tuple[str, ...], relators: tuple[Word, ...]) -> Abelianization:
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    n = len(generators)
    index = {g: i for i, g in enumerate(generators)}
    rows = []
    for r in relators:
        row = [0] * n
        for g, e in r:
            row[index[g]] += e
        if any(row):
            rows.append(row)
    if not rows:
        cols = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return Abelianization(generators, n, (), tuple(tuple(c) for c in cols))

    D, _, V = smith_normal_decomp(Matrix(rows), domain=ZZ)
    diag = [abs(int(D[i, i])) if i < min(D.shape) else 0 for i in range(n)]
    V = [[int(V[i, j]) for j in range(n)] for i in range(n)]
    free_cols = [j for j in range(n) if diag[j] == 0]
    tors_cols = [j for j in range(n) if diag[j] > 1]
    images = []
    for i in range(n):
        images.append([V[i][j] for j in free_cols] + [V[i][j] % diag[j] for j in tors_cols])
    # orient each free coordinate
    for c in range(len(free_cols)):
        for i in range(n):
            if images[i][c]:
                if images[i][c] < 0:
                    for row in images:
                        row[c] = -row[c]
                break
    return Abelianization(
        generators,
        len(free_cols),
        tuple(diag[j] for j in tors_cols),
        tuple(tuple(row) for row in images),
    )


def abelianize(w: Word, pres: Presentation) -> tuple[int, ...]:
    """Exponent-sum image of ``w`` in ``H_1`` of ``pres``."""
    return pres.abelianization().image(w)


def load_presentation(path: str) -> tuple[Presentation, str]:
    """Read a presentation JSON file; returns the presentation and backend hint."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from exc
    try:
        pres = Presentation.from_json(data)
    except WordSyntaxError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    return pres, str(data.get("backend", "auto"))
