"""The symbolic surface layer: filling families, supports, and blocks.

Filling is specified extensionally: a model carries an antichain of minimal
filling generator subsets and a subset fills exactly when it contains one of
them.  All filling checks in scope reduce to the generator-support set of a
cyclic reduction, so no curve combinatorics is needed.  The model's graph is
the coincidence graph of the subsurface collection: an edge means disjoint
supports, i.e. commuting generators.

Admissibility of the underlying embedding is a declared flag, never
computed; certification downstream is conditional on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ContractError, InputError
from .graphs import DefiningGraph
from .words import (
    NormalWord,
    Word,
    concat,
    cyclically_reduce,
    invert,
    is_normal,
    normalize,
    word_from_pairs,
)


@dataclass(frozen=True)
class SurfaceModel:
    """Coincidence graph plus a monotone filling family over generator subsets."""

    graph: DefiningGraph
    minimal_filling_sets: frozenset[frozenset[str]]
    admissible: bool = True

    @classmethod
    def build(cls, graph: DefiningGraph, minimal_filling_sets: Iterable[Iterable[str]],
              admissible: bool = True) -> "SurfaceModel":
        sets = frozenset(frozenset(str(x) for x in s) for s in minimal_filling_sets)
        for s in sets:
            for label in s:
                graph.require_vertex(label)
            if len(s) < 2:
                raise InputError(
                    "singleton filling sets are invalid: supports are proper subsurfaces")
        for s in sets:
            for t in sets:
                if s != t and s <= t:
                    raise InputError("minimal filling sets must form an antichain")
        return cls(graph=graph, minimal_filling_sets=sets, admissible=bool(admissible))

    def fills_subset(self, labels: Iterable[str]) -> bool:
        label_set = frozenset(labels)
        return any(f <= label_set for f in self.minimal_filling_sets)

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "minimal_filling_sets": sorted(sorted(s) for s in self.minimal_filling_sets),
            "admissible": self.admissible,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SurfaceModel":
        if not isinstance(data, dict) or "graph" not in data or "minimal_filling_sets" not in data:
            raise InputError(
                "model JSON must be an object with 'graph', 'minimal_filling_sets', 'admissible'")
        graph = DefiningGraph.from_json_dict(data["graph"])
        return cls.build(graph, data["minimal_filling_sets"], data.get("admissible", True))

    @classmethod
    def from_json(cls, text: str) -> "SurfaceModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid model JSON: {exc}") from exc
        return cls.from_json_dict(data)


def supports(w: NormalWord) -> frozenset[str]:
    """The set of generator labels appearing among the syllables."""
    return frozenset(s.generator for s in w.syllables)


def fills(w: Word | NormalWord, model: SurfaceModel) -> bool:
    """Whether the element fills: the support of its cyclic reduction hits a
    minimal filling set."""
    _, core = cyclically_reduce(w, model.graph)
    return model.fills_subset(supports(core))


@dataclass(frozen=True)
class SymbolicSubsurface:
    """The image of a base support under the prefix preceding a syllable."""

    prefix: NormalWord
    base: str


def subs(w: NormalWord, graph: DefiningGraph) -> tuple[SymbolicSubsurface, ...]:
    """The per-syllable subsurface family: entry i pairs the canonical form of
    the prefix before syllable i with that syllable's support."""
    if not is_normal(w, graph):
        raise ContractError(f"subs requires a normal word, got {w.to_text()!r}")
    family: list[SymbolicSubsurface] = []
    prefix: list[tuple[str, int]] = []
    for s in w.syllables:
        prefix_word = normalize(word_from_pairs(prefix), graph)
        family.append(SymbolicSubsurface(prefix=prefix_word, base=s.generator))
        prefix.append((s.generator, s.exponent))
    return tuple(family)


def subsurfaces_equal(a: SymbolicSubsurface, b: SymbolicSubsurface,
                      graph: DefiningGraph) -> bool:
    """Prefix-translates of one base support coincide exactly when the prefixes
    differ by an element of the base's star subgroup."""
    if a.base != b.base:
        return False
    diff = normalize(concat(invert(b.prefix.as_word()), a.prefix.as_word()), graph)
    star = graph.star(a.base)
    return all(s.generator in star for s in diff.syllables)


def subs_family_equal(f1: Sequence[SymbolicSubsurface], f2: Sequence[SymbolicSubsurface],
                      graph: DefiningGraph) -> bool:
    """Set equality of subsurface families under the star-coset rule."""
    def contained(fa, fb):
        return all(any(subsurfaces_equal(x, y, graph) for y in fb) for x in fa)
    return contained(f1, f2) and contained(f2, f1)


@dataclass(frozen=True)
class FillingBlock:
    """A consecutive syllable range whose supports form a filling subset."""

    word: NormalWord
    start: int  # first syllable index, inclusive
    end: int    # last syllable index, inclusive

    @property
    def support(self) -> frozenset[str]:
        return frozenset(s.generator for s in self.word.syllables[self.start:self.end + 1])

    def letter_span(self) -> tuple[int, int]:
        """Half-open letter interval covered by the block."""
        offsets = [0]
        for s in self.word.syllables:
            offsets.append(offsets[-1] + abs(s.exponent))
        return offsets[self.start], offsets[self.end + 1]


def find_filling_blocks(w: NormalWord, model: SurfaceModel) -> tuple[FillingBlock, ...]:
    """All inclusion-minimal consecutive syllable ranges whose supports fill."""
    if not is_normal(w, model.graph):
        raise ContractError(f"find_filling_blocks requires a normal word, got {w.to_text()!r}")
    n = len(w.syllables)
    gens = [s.generator for s in w.syllables]
    candidates: list[tuple[int, int]] = []
    for i in range(n):
        seen: set[str] = set()
        for j in range(i, n):
            seen.add(gens[j])
            if model.fills_subset(seen):
                candidates.append((i, j))
                break
    minimal: list[tuple[int, int]] = []
    best_end = None
    for i, j in sorted(candidates, reverse=True):
        if best_end is None or j < best_end:
            minimal.append((i, j))
            best_end = j
    minimal.reverse()
    return tuple(FillingBlock(word=w, start=i, end=j) for i, j in minimal)


def check_window_property(w: NormalWord, window: int, model: SurfaceModel) -> bool:
    """Every contiguous letter window of the given length contains a complete
    filling block.  Vacuously true when the word is shorter than the window."""
    if window < 1:
        raise InputError(f"window length must be >= 1, got {window}")
    total = w.letter_length
    if total < window:
        return True
    spans = [b.letter_span() for b in find_filling_blocks(w, model)]
    for p in range(0, total - window + 1):
        hi = p + window
        if not any(p <= a and b <= hi for a, b in spans):
            return False
    return True


def max_exponent(w: NormalWord) -> int:
    """Largest absolute syllable exponent; 0 for the empty word."""
    return max((abs(s.exponent) for s in w.syllables), default=0)
