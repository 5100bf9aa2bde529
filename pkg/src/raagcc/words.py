"""Words, normal forms, and the syllable partial order in a RAAG.

A word is a sequence of signed letters in the standard generators.  Three
moves transform a word without changing the group element it represents:

  (1) delete a syllable with exponent zero,
  (2) merge adjacent syllables with the same generator,
  (3) swap adjacent syllables whose generators commute.

A word is *normal* when no sequence of these moves can lower its syllable
count; equivalently, no zero exponents occur and every pair of syllables
with the same generator is separated by a syllable whose generator fails to
commute with it.  All normal representatives of one element differ by move
(3) alone, have equal letter length (which is the group-theoretic length),
and carry a canonical bijection between their syllable sets.

``normalize`` returns the lexicographically least normal representative
under the defining graph's declared vertex order, computed greedily: scan
the remaining syllables and emit an available one with the least label.
That choice is an artifact convention; the math only pins down the class.

The syllable partial order puts p before q when p appears to the left of q
in every normal representative.  It is computed as the transitive closure
of direct dependence (earlier occurrence with equal or non-commuting
generator), which coincides with the representative-quantified order.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import BudgetExceededError, ContractError, InputError
from .graphs import DefiningGraph


class Letter(NamedTuple):
    generator: str
    sign: int  # +1 or -1


class Syllable(NamedTuple):
    generator: str
    exponent: int  # nonzero
    position: int  # index within the carrying word; distinguishes duplicates


@dataclass(frozen=True)
class Word:
    """A free word in the standard generators; may be unreduced."""

    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def to_text(self) -> str:
        return _pairs_to_text(_group_letters(self.letters))

    def __repr__(self) -> str:
        return f"Word({self.to_text()!r})"


@dataclass(frozen=True)
class NormalWord:
    """A word in normal form, stored as its syllable sequence."""

    syllables: tuple[Syllable, ...] = ()

    @cached_property
    def letter_length(self) -> int:
        return sum(abs(s.exponent) for s in self.syllables)

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)

    def pairs(self) -> tuple[tuple[str, int], ...]:
        return tuple((s.generator, s.exponent) for s in self.syllables)

    def letters(self) -> tuple[Letter, ...]:
        out: list[Letter] = []
        for s in self.syllables:
            sign = 1 if s.exponent > 0 else -1
            out.extend([Letter(s.generator, sign)] * abs(s.exponent))
        return tuple(out)

    def as_word(self) -> Word:
        return Word(self.letters())

    def to_text(self) -> str:
        return _pairs_to_text(self.pairs())

    def __repr__(self) -> str:
        return f"NormalWord({self.to_text()!r})"

    def __len__(self) -> int:
        return self.letter_length


EPSILON = NormalWord()

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*?)(?:\^(-?\d+))?$")


def parse_word(text: str, graph: DefiningGraph) -> Word:
    """Parse whitespace-separated tokens ``label`` or ``label^k`` (k nonzero)."""
    letters: list[Letter] = []
    for token in text.split():
        m = _TOKEN.match(token)
        if m is None:
            raise InputError(f"malformed token {token!r}")
        label, exp_text = m.group(1), m.group(2)
        if not graph.has_vertex(label):
            raise InputError(f"unknown generator {label!r} in token {token!r}")
        exp = 1 if exp_text is None else int(exp_text)
        if exp == 0:
            raise InputError(f"zero exponent in token {token!r}")
        sign = 1 if exp > 0 else -1
        letters.extend([Letter(label, sign)] * abs(exp))
    return Word(tuple(letters))


def word_from_pairs(pairs: Iterable[tuple[str, int]], graph: DefiningGraph | None = None) -> Word:
    letters: list[Letter] = []
    for gen, exp in pairs:
        if graph is not None:
            graph.require_vertex(gen)
        if exp == 0:
            continue
        sign = 1 if exp > 0 else -1
        letters.extend([Letter(gen, sign)] * abs(exp))
    return Word(tuple(letters))


def normal_word_from_pairs(pairs: Iterable[tuple[str, int]]) -> NormalWord:
    """Build a NormalWord from (generator, exponent) pairs without checking."""
    return NormalWord(tuple(
        Syllable(gen, exp, i) for i, (gen, exp) in enumerate(pairs)
    ))


def concat(w1: Word, w2: Word) -> Word:
    """Free-monoid concatenation; no normalization is performed."""
    return Word(w1.letters + w2.letters)


def invert(w: Word) -> Word:
    """Letterwise inversion-reversal; no normalization is performed."""
    return Word(tuple(Letter(g, -s) for g, s in reversed(w.letters)))


def _group_letters(letters: Sequence[Letter]) -> list[tuple[str, int]]:
    pairs: list[tuple[str, int]] = []
    for gen, sign in letters:
        if pairs and pairs[-1][0] == gen and (pairs[-1][1] > 0) == (sign > 0):
            pairs[-1] = (gen, pairs[-1][1] + sign)
        else:
            pairs.append((gen, sign))
    return pairs


def _pairs_to_text(pairs: Sequence[tuple[str, int]]) -> str:
    tokens = []
    for gen, exp in pairs:
        tokens.append(gen if exp == 1 else f"{gen}^{exp}")
    return " ".join(tokens)


def _as_pairs(w: Word | NormalWord) -> list[tuple[str, int]]:
    if isinstance(w, NormalWord):
        return list(w.pairs())
    if isinstance(w, Word):
        return [(g, s) for g, s in w.letters]
    raise TypeError(f"expected Word or NormalWord, got {type(w).__name__}")


# ---------------------------------------------------------------------------
# Rewriting kernel.  Internally a word in progress is a list of [gen, exp]
# pairs; the prefix is kept normal throughout.


def _insert(syls: list[list], gen: str, exp: int, graph: DefiningGraph) -> None:
    """Insert one syllable into a normal prefix, keeping it normal.

    Scans right-to-left: the first same-generator syllable reachable across
    commuting generators absorbs the exponent (moves (3) then (2)); a
    non-commuting generator blocks, so a new syllable is appended.  When an
    absorption cancels to zero the tail is re-inserted, since the deleted
    syllable may have been the only separator for an outer pair.
    """
    commutes = graph.commutes
    j = len(syls) - 1
    while j >= 0:
        g = syls[j][0]
        if g == gen:
            syls[j][1] += exp
            if syls[j][1] == 0:
                tail = syls[j + 1:]
                del syls[j:]
                for g2, e2 in tail:
                    _insert(syls, g2, e2, graph)
            return
        if not commutes(g, gen):
            break
        j -= 1
    syls.append([gen, exp])


def _reduce(pairs: Iterable[tuple[str, int]], graph: DefiningGraph) -> list[list]:
    syls: list[list] = []
    for gen, exp in pairs:
        if exp != 0:
            _insert(syls, gen, exp, graph)
    return syls


def _direct_dependence(gens: Sequence[str], graph: DefiningGraph) -> list[list[int]]:
    """succs[i] lists j > i with equal or non-commuting generator."""
    commutes = graph.commutes
    n = len(gens)
    succs: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        gi = gens[i]
        for j in range(i + 1, n):
            gj = gens[j]
            if gi == gj or not commutes(gi, gj):
                succs[i].append(j)
    return succs


def _canonical(syls: list[list], graph: DefiningGraph) -> list[tuple[str, int]]:
    """Greedy least-label linear extension of the dependence order."""
    import heapq

    n = len(syls)
    gens = [s[0] for s in syls]
    succs = _direct_dependence(gens, graph)
    pred_count = [0] * n
    for i in range(n):
        for j in succs[i]:
            pred_count[j] += 1
    heap = [(graph.index(gens[i]), i) for i in range(n) if pred_count[i] == 0]
    heapq.heapify(heap)
    out: list[tuple[str, int]] = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append((syls[i][0], syls[i][1]))
        for j in succs[i]:
            pred_count[j] -= 1
            if pred_count[j] == 0:
                heapq.heappush(heap, (graph.index(gens[j]), j))
    return out


def normalize(w: Word | NormalWord, graph: DefiningGraph) -> NormalWord:
    """The canonical normal representative of the element ``w`` spells."""
    pairs = _as_pairs(w)
    for gen, _ in pairs:
        graph.require_vertex(gen)
    reduced = _reduce(pairs, graph)
    return normal_word_from_pairs(_canonical(reduced, graph))


def is_normal(w: Word | NormalWord, graph: DefiningGraph) -> bool:
    """No zero exponents, and no same-generator pair separated only by
    commuting generators (which would let moves reach a merge)."""
    pairs = _group_letters(w.letters) if isinstance(w, Word) else list(w.pairs())
    commutes = graph.commutes
    for i, (g, e) in enumerate(pairs):
        graph.require_vertex(g)
        if e == 0:
            return False
        for j in range(i + 1, len(pairs)):
            h = pairs[j][0]
            if h == g:
                return False
            if not commutes(h, g):
                break
    return True


def _require_normal(w: NormalWord, graph: DefiningGraph) -> None:
    if not isinstance(w, NormalWord):
        raise ContractError(f"expected a NormalWord, got {type(w).__name__}")
    if not is_normal(w, graph):
        raise ContractError(f"word {w.to_text()!r} is not in normal form")


def _lex_key(pairs: Sequence[tuple[str, int]], graph: DefiningGraph) -> tuple:
    key: list[tuple[int, int]] = []
    for gen, exp in pairs:
        sign = 0 if exp > 0 else 1  # positive letters sort first
        key.extend([(graph.index(gen), sign)] * abs(exp))
    return tuple(key)


def min_class(w: Word | NormalWord, graph: DefiningGraph,
              max_size: int = 200_000) -> tuple[NormalWord, ...]:
    """All normal representatives of the element of ``w`` (its move-(3) class).

    Breadth-first over adjacent commuting swaps.  Classes can be factorially
    large, so the search carries a size budget.
    """
    start = tuple(normalize(w, graph).pairs())
    seen = {start}
    queue = deque([start])
    commutes = graph.commutes
    while queue:
        current = queue.popleft()
        for i in range(len(current) - 1):
            (g1, e1), (g2, e2) = current[i], current[i + 1]
            if g1 != g2 and commutes(g1, g2):
                swapped = current[:i] + ((g2, e2), (g1, e1)) + current[i + 2:]
                if swapped not in seen:
                    if len(seen) >= max_size:
                        raise BudgetExceededError(
                            f"move-(3) class exceeds budget {max_size}",
                            partial_count=len(seen))
                    seen.add(swapped)
                    queue.append(swapped)
    ordered = sorted(seen, key=lambda p: _lex_key(p, graph))
    return tuple(normal_word_from_pairs(p) for p in ordered)


@dataclass(frozen=True)
class SyllableOrder:
    """The strict partial order on the syllables of a normal word.

    ``pairs`` holds position pairs (i, j) meaning syllable i precedes
    syllable j in every normal representative.
    """

    word: NormalWord
    pairs: frozenset[tuple[int, int]]

    def _pos(self, s: Syllable | int) -> int:
        return s.position if isinstance(s, Syllable) else int(s)

    def precedes(self, p: Syllable | int, q: Syllable | int) -> bool:
        return (self._pos(p), self._pos(q)) in self.pairs

    def comparable(self, p: Syllable | int, q: Syllable | int) -> bool:
        return self.precedes(p, q) or self.precedes(q, p)

    def generator_pairs(self) -> frozenset[tuple[str, str]]:
        syls = self.word.syllables
        return frozenset((syls[i].generator, syls[j].generator) for i, j in self.pairs)


def syllable_order(w: NormalWord, graph: DefiningGraph) -> SyllableOrder:
    """Transitive closure of direct occurrence dependence on a normal word."""
    _require_normal(w, graph)
    gens = [s.generator for s in w.syllables]
    succs = _direct_dependence(gens, graph)
    n = len(gens)
    reach: list[set[int]] = [set() for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in succs[i]:
            reach[i].add(j)
            reach[i] |= reach[j]
    pairs = frozenset((i, j) for i in range(n) for j in reach[i])
    return SyllableOrder(word=w, pairs=pairs)


def _minimal_positions(gens: Sequence[str], graph: DefiningGraph) -> list[int]:
    commutes = graph.commutes
    out = []
    for i, g in enumerate(gens):
        if all(gens[k] != g and commutes(gens[k], g) for k in range(i)):
            out.append(i)
    return out


def _maximal_positions(gens: Sequence[str], graph: DefiningGraph) -> list[int]:
    commutes = graph.commutes
    n = len(gens)
    out = []
    for i, g in enumerate(gens):
        if all(gens[k] != g and commutes(gens[k], g) for k in range(i + 1, n)):
            out.append(i)
    return out


def cyclically_reduce(w: Word | NormalWord, graph: DefiningGraph) -> tuple[NormalWord, NormalWord]:
    """Split ``w`` as conjugator * core * conjugator^-1 with the core of
    minimal syllable count among conjugates.

    A normal word fails to be cyclically reduced exactly when some generator
    owns both a minimal and a distinct maximal syllable: rotating the minimal
    one to the other end merges the pair and drops the syllable count.
    """
    current = list(normalize(w, graph).pairs())
    conjugator: list[tuple[str, int]] = []
    while True:
        gens = [g for g, _ in current]
        mins = _minimal_positions(gens, graph)
        maxs = _maximal_positions(gens, graph)
        max_by_gen = {gens[q]: q for q in maxs}
        candidate: tuple[int, int, int] | None = None
        for p in mins:
            q = max_by_gen.get(gens[p])
            if q is not None and q != p:
                rank = graph.index(gens[p])
                if candidate is None or rank < candidate[0]:
                    candidate = (rank, p, q)
        if candidate is None:
            break
        _, p, _ = candidate
        gen, exp = current[p]
        conjugator.append((gen, exp))
        conjugated = [(gen, -exp)] + current + [(gen, exp)]
        current = _canonical(_reduce(conjugated, graph), graph)
    conj_word = normalize(word_from_pairs(conjugator), graph)
    return conj_word, normal_word_from_pairs(current)


def _ordered_from_left(lead_gen: str, mid_gens: Sequence[str], graph: DefiningGraph) -> list[bool]:
    """For each syllable of ``mid``, whether the leading syllable precedes it.

    Dependence chains from the leading syllable stay inside the window, so
    reachability over direct dependence within ``lead . mid`` is exact.
    """
    commutes = graph.commutes
    n = len(mid_gens)
    ordered = [False] * n
    for t in range(n):
        g = mid_gens[t]
        if lead_gen == g or not commutes(lead_gen, g):
            ordered[t] = True
            continue
        for u in range(t):
            if ordered[u] and (mid_gens[u] == g or not commutes(mid_gens[u], g)):
                ordered[t] = True
                break
    return ordered


def _decompose(p_gen: str, mid: list[tuple[str, int]], q_gen: str,
               graph: DefiningGraph) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
    """Constructive induction splitting the word between two unordered
    syllables into a part commuting with the left one followed by a part
    commuting with the right one."""
    if not mid:
        return [], []
    ordered = _ordered_from_left(p_gen, [g for g, _ in mid], graph)
    try:
        t = ordered.index(True)
    except ValueError:
        return list(mid), []
    s = mid[t]
    left_prefix = mid[:t]
    rest = mid[t + 1:]
    l2, r2 = _decompose(s[0], rest, q_gen, graph)
    l3, r3 = _decompose(p_gen, l2, q_gen, graph)
    return left_prefix + l3, r3 + [s] + r2


def subword_decompose(w: NormalWord, p: Syllable | int, q: Syllable | int,
                      graph: DefiningGraph) -> tuple[NormalWord, NormalWord]:
    """Split the subword strictly between two unordered syllables p, q of a
    normal word as L*R with L commuting with p's generator and R with q's."""
    _require_normal(w, graph)
    order = syllable_order(w, graph)
    i = order._pos(p)
    j = order._pos(q)
    if i == j:
        raise ContractError("p and q must be distinct syllables")
    if not (0 <= i < len(w.syllables) and 0 <= j < len(w.syllables)):
        raise ContractError("p and q must be syllables of w")
    if i > j:
        i, j = j, i
    if order.comparable(i, j):
        raise ContractError("p and q must be unordered syllables")
    p_gen = w.syllables[i].generator
    q_gen = w.syllables[j].generator
    mid = [(s.generator, s.exponent) for s in w.syllables[i + 1:j]]
    left, right = _decompose(p_gen, mid, q_gen, graph)
    return normal_word_from_pairs(left), normal_word_from_pairs(right)
