"""An explicit family of certified subgroups over a ring of subsurfaces.

The configuration: ``2n`` subsurfaces around a genus ``n+1`` surface, one
once-punctured torus ``X_i`` and one four-punctured sphere ``Y_i`` per ring
position, indices mod ``n``.  The supports overlap only locally, so the
generators ``f_i`` (on ``X_i``) and ``g_i`` (on ``Y_i``) commute except for
``f_i`` with ``g_{i-1}`` and ``g_i``; the commutation graph's complement is
a ``2n``-cycle alternating f and g labels.  No proper subset of the
supports fills, so the surface model's only minimal filling set is the full
label set.

The subgroup generators are ring words
``w_i = (g_1^i .. g_{n-1}^i)(f_1^i g_n^i)(f_2^i .. f_n^i) = B_i M_i E_i``.
Products of the ``w_i`` rewrite into a B/M/E normal form by merging the
all-commuting B- and E-blocks across generator boundaries; the result is in
normal form with respect to the standard generators.

Displacement tracking: a curve state records a set of supports whose span
contains the curve, plus supports the curve is known to miss.  Applying a
generator letter (rightmost letter acts first) grows the span only when the
letter's support meets it; while the span set stays proper, the curve moves
at most distance 2 in the curve complex.  This reproduces the family's
upper bounds: d(alpha, h alpha) <= |h| * 4/(g-1) + 2 and stable translation
length at most 4/(g-1) for each generator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import ContractError, InputError, InternalError
from .graphs import DefiningGraph
from .surfaces import SurfaceModel, check_window_property
from .words import NormalWord, Letter, is_normal, normal_word_from_pairs, syllable_order

# An h-word over the subgroup generators: ((i, +1) | (i, -1), ...), 1 <= i <= N.
HWord = tuple[tuple[int, int], ...]

# A support label: ("X", i) or ("Y", i) with i mod n.
Support = tuple[str, int]


@dataclass(frozen=True)
class Section8Family:
    """Ring family data: graph, full-set filling model, and generators."""

    n: int
    N: int
    graph: DefiningGraph
    model: SurfaceModel
    generators: tuple[NormalWord, ...]

    def generator(self, i: int) -> NormalWord:
        if not 1 <= i <= self.N:
            raise InputError(f"generator index {i} out of range 1..{self.N}")
        return self.generators[i - 1]


@dataclass(frozen=True)
class FamilyConstants:
    """The certified window constants of the family."""

    b: int          # letter window guaranteeing a filling block in B/M/E forms
    d: int          # diameter of the complement graph (the 2n-cycle)
    L: int = 0      # syllable separation forcing order: d * b
    ell_prime: int = 0  # b + 4*L*N + 1
    ell: int = 0    # ell_prime + 2*N


def _f(t: int, n: int) -> str:
    return f"f{((t - 1) % n) + 1}"


def _g(t: int, n: int) -> str:
    return f"g{((t - 1) % n) + 1}"


def family(n: int, N: int) -> Section8Family:
    """Construct the ring family for a genus n+1 surface and N generators."""
    if n < 2:
        raise InputError(f"ring size n must be >= 2, got {n}")
    if N < 1:
        raise InputError(f"generator count N must be >= 1, got {N}")
    labels = [_g(t, n) for t in range(1, n + 1)] + [_f(t, n) for t in range(1, n + 1)]
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            edges.append((_f(i, n), _f(j, n)))
            edges.append((_g(i, n), _g(j, n)))
    for i in range(1, n + 1):
        blocked = {((i - 1 - 1) % n) + 1, i}
        for j in range(1, n + 1):
            if j not in blocked:
                edges.append((_f(i, n), _g(j, n)))
    graph = DefiningGraph.build(labels, edges)
    model = SurfaceModel.build(graph, [labels], admissible=True)
    gens = tuple(
        normal_word_from_pairs(_bme_symbol_pairs(_generator_symbols(i, n), n))
        for i in range(1, N + 1)
    )
    for w in gens:
        if not is_normal(w, graph):
            raise InternalError(f"family generator {w.to_text()!r} is not normal")
    return Section8Family(n=n, N=N, graph=graph, model=model, generators=gens)


# -- B/M/E symbols -----------------------------------------------------------
# A symbol is ("B", k), ("E", k) with k any nonzero integer, ("M", i) or
# ("Minv", i) with i >= 1.  B and E invert by negating k; M does not.


def _generator_symbols(i: int, n: int) -> list[tuple[str, int]]:
    return [("B", i), ("M", i), ("E", i)]


def _inverse_symbols(i: int, n: int) -> list[tuple[str, int]]:
    return [("E", -i), ("Minv", i), ("B", -i)]


def _symbol_pairs(symbol: tuple[str, int], n: int) -> list[tuple[str, int]]:
    kind, k = symbol
    if kind == "B":
        return [(_g(t, n), k) for t in range(1, n)]
    if kind == "E":
        return [(_f(t, n), k) for t in range(2, n + 1)]
    if kind == "M":
        return [(_f(1, n), k), (_g(n, n), k)]
    if kind == "Minv":
        return [(_g(n, n), -k), (_f(1, n), -k)]
    raise InternalError(f"unknown symbol {symbol!r}")


def _bme_symbol_pairs(symbols: Sequence[tuple[str, int]], n: int) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for sym in symbols:
        out.extend(_symbol_pairs(sym, n))
    return out


def h_word_symbols(h: HWord, n: int) -> list[tuple[str, int]]:
    """The merged B/M/E symbol sequence of a freely reduced h-word.

    At a ``w_i w_j^-1`` boundary the two all-commuting E-blocks merge into
    ``E_{i-j}``; at ``w_i^-1 w_j`` the B-blocks merge into ``B_{j-i}``.
    Free reduction guarantees the merged subscripts are nonzero.
    """
    _require_reduced(h)
    symbols: list[tuple[str, int]] = []
    for idx, sign in h:
        block = _generator_symbols(idx, n) if sign > 0 else _inverse_symbols(idx, n)
        for sym in block:
            if symbols and symbols[-1][0] == sym[0] and sym[0] in ("B", "E"):
                merged = symbols[-1][1] + sym[1]
                if merged == 0:
                    raise InternalError("zero B/E subscript from a reduced h-word")
                symbols[-1] = (sym[0], merged)
            else:
                symbols.append(sym)
    return symbols


def _require_reduced(h: HWord) -> None:
    for a, b in zip(h, h[1:]):
        if a[0] == b[0] and a[1] == -b[1]:
            raise ContractError(f"h-word is not freely reduced at {a} {b}")


def free_reduce(h: Iterable[tuple[int, int]]) -> HWord:
    out: list[tuple[int, int]] = []
    for idx, sign in h:
        if out and out[-1][0] == idx and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((idx, sign))
    return tuple(out)


_H_TOKEN = re.compile(r"^w(\d+)(?:\^(-?\d+))?$")


def parse_h_word(text: str, N: int) -> HWord:
    """Parse ``"w1 w2^-1 w1^3"`` into an h-word (freely reduced)."""
    out: list[tuple[int, int]] = []
    for token in text.split():
        m = _H_TOKEN.match(token)
        if m is None:
            raise InputError(f"malformed generator token {token!r} (expected wI or wI^k)")
        idx = int(m.group(1))
        exp = 1 if m.group(2) is None else int(m.group(2))
        if not 1 <= idx <= N:
            raise InputError(f"generator index {idx} out of range 1..{N}")
        if exp == 0:
            raise InputError(f"zero exponent in {token!r}")
        sign = 1 if exp > 0 else -1
        out.extend([(idx, sign)] * abs(exp))
    return free_reduce(out)


def h_word_text(h: HWord) -> str:
    if not h:
        return ""
    tokens = []
    for idx, sign in h:
        if tokens and tokens[-1][0] == idx and (tokens[-1][1] > 0) == (sign > 0):
            tokens[-1] = (idx, tokens[-1][1] + sign)
        else:
            tokens.append((idx, sign))
    return " ".join(f"w{i}" if e == 1 else f"w{i}^{e}" for i, e in tokens)


def bme_normal_form(h: HWord | str, fam: Section8Family) -> NormalWord:
    """Expand a freely reduced h-word into its B/M/E normal form."""
    if isinstance(h, str):
        h = parse_h_word(h, fam.N)
    symbols = h_word_symbols(tuple(h), fam.n)
    return normal_word_from_pairs(_bme_symbol_pairs(symbols, fam.n))


def naive_expansion(h: HWord, fam: Section8Family) -> list[tuple[str, int]]:
    """Concatenate generator spellings without any boundary merging."""
    out: list[tuple[str, int]] = []
    for idx, sign in h:
        pairs = list(fam.generator(idx).pairs())
        if sign < 0:
            pairs = [(g, -e) for g, e in reversed(pairs)]
        out.extend(pairs)
    return out


def constants(fam: Section8Family) -> FamilyConstants:
    """Exact window constants; the complement diameter comes from BFS."""
    b = 3 * fam.N * fam.n + 4 * fam.N
    d = fam.graph.complement_diameter()
    L = d * b
    ell_prime = b + 4 * L * fam.N + 1
    return FamilyConstants(b=b, d=d, L=L, ell_prime=ell_prime, ell=ell_prime + 2 * fam.N)


# -- span tracking -----------------------------------------------------------


@dataclass(frozen=True)
class SpanState:
    """A span container for a curve: supports whose span contains it, plus
    supports it is known to miss."""

    contained_in: frozenset[Support]
    misses: frozenset[Support]

    def is_proper(self, n: int) -> bool:
        return len(self.contained_in) < 2 * n


def support_of(label: str, n: int) -> Support:
    m = re.match(r"^([fg])(\d+)$", label)
    if m is None:
        raise InputError(f"label {label!r} is not a ring generator")
    kind = "X" if m.group(1) == "f" else "Y"
    return (kind, int(m.group(2)) % n)


def supports_disjoint(a: Support, b: Support, n: int) -> bool:
    """Ring disjointness: like kinds are disjoint when distinct; an X_i meets
    exactly Y_{i-1} and Y_i."""
    if a == b:
        return False
    if a[0] == b[0]:
        return True
    (_, i), (_, j) = (a, b) if a[0] == "X" else (b, a)
    return j % n not in ((i - 1) % n, i % n)


def alpha_state(fam: Section8Family) -> SpanState:
    """The tracked curve: the separating curve inside Y_0 missing X_0 and X_1."""
    return SpanState(
        contained_in=frozenset({("Y", 0)}),
        misses=frozenset({("X", 0), ("X", 1 % fam.n)}),
    )


def span_apply(state: SpanState, generator: str | Letter, fam: Section8Family) -> SpanState:
    """Apply one generator letter to a span state (the sign is irrelevant:
    only the letter's support matters).

    A letter whose support the curve misses, or whose support is disjoint
    from everything in the container, cannot move the curve out of the
    container.  Otherwise the support joins the container and the miss set
    is cleared: only containment is known afterward.
    """
    label = generator.generator if isinstance(generator, Letter) else str(generator)
    z = support_of(label, fam.n)
    if z in state.misses:
        return state
    if all(supports_disjoint(z, w, fam.n) for w in state.contained_in):
        return state
    return SpanState(contained_in=state.contained_in | {z}, misses=frozenset())


def span_apply_pairs(state: SpanState, pairs: Sequence[tuple[str, int]],
                     fam: Section8Family) -> SpanState:
    """Apply a standard-generator word to a state, rightmost letter first."""
    for label, _ in reversed(pairs):
        state = span_apply(state, label, fam)
    return state


def span_apply_h(state: SpanState, h: HWord, fam: Section8Family) -> SpanState:
    """Apply an h-word generator by generator, rightmost generator first.

    Each generator acts through its own B/M/E spelling (no merging across
    generator boundaries), matching the inductive displacement argument.
    """
    for idx, sign in reversed(h):
        state = span_apply_pairs(state, naive_expansion(((idx, sign),), fam), fam)
    return state


def xbar_labels(k: int, n: int) -> frozenset[Support]:
    """Span container reached from the X-side after k steps."""
    xs = {("X", i % n) for i in range(-k + 1, k)}
    ys = {("Y", j % n) for j in range(-k + 1, k - 1)}
    return frozenset(xs | ys)


def ybar_labels(k: int, n: int) -> frozenset[Support]:
    ys = {("Y", i % n) for i in range(-k + 1, k + 1)}
    xs = {("X", j % n) for j in range(-k + 2, k + 1)}
    return frozenset(ys | xs)


def _h_words_upto(N: int, max_len: int) -> Iterator[HWord]:
    """All freely reduced h-words of length at most max_len, shortest first."""
    level: list[HWord] = [()]
    yield ()
    for _ in range(max_len):
        nxt: list[HWord] = []
        for h in level:
            for idx in range(1, N + 1):
                for sign in (1, -1):
                    if h and h[-1][0] == idx and h[-1][1] == -sign:
                        continue
                    grown = h + ((idx, sign),)
                    nxt.append(grown)
                    yield grown
        level = nxt


@dataclass(frozen=True)
class StarReport:
    """Result of the exhaustive span-containment sweep."""

    tested: int
    violations: tuple[tuple[str, str], ...]  # (h-word text, failure description)
    all_proper: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.all_proper


def verify_star(fam: Section8Family, k_max: int) -> StarReport:
    """Check that every h-word of length at most k_max lands alpha inside one
    of the step-k containers, every tested span staying proper."""
    if k_max > fam.n / 2:
        raise ContractError(
            f"k_max={k_max} exceeds n/2={fam.n / 2}; containers stop being proper")
    if k_max < 0:
        raise InputError("k_max must be >= 0")
    alpha = alpha_state(fam)
    tested = 0
    violations: list[tuple[str, str]] = []
    all_proper = True
    for h in _h_words_upto(fam.N, k_max):
        state = span_apply_h(alpha, h, fam)
        k = max(2, len(h))
        tested += 1
        contained = (state.contained_in <= xbar_labels(k, fam.n)
                     or state.contained_in <= ybar_labels(k, fam.n))
        if not contained:
            violations.append((h_word_text(h), f"span escapes both step-{k} containers"))
        if not state.is_proper(fam.n):
            all_proper = False
            violations.append((h_word_text(h), "span is the whole surface"))
    return StarReport(tested=tested, violations=tuple(violations), all_proper=all_proper)


def displacement_upper(h: HWord | str, fam: Section8Family) -> tuple[int, Fraction]:
    """Certified curve-complex displacement upper bound for an h-word.

    Splits h into m blocks of generator length at most n/2 (m is the largest
    integer below |h|*2/n + 1), verifies each block keeps the tracked curve
    in a proper span (so each block moves it at most 2), and returns
    (m, 2m); 2m never exceeds |h| * 4/(g-1) + 2 with g = n + 1.
    """
    if isinstance(h, str):
        h = parse_h_word(h, fam.N)
    h = tuple(h)
    _require_reduced(h)
    n = fam.n
    length = len(h)
    m = (2 * length + n - 1) // n  # largest integer < |h|*2/n + 1
    if m > 0:
        base_size, extra = divmod(length, m)
        blocks = []
        pos = 0
        for t in range(m):
            size = base_size + (1 if t < extra else 0)
            blocks.append(h[pos:pos + size])
            pos += size
        alpha = alpha_state(fam)
        for block in blocks:
            state = span_apply_h(alpha, block, fam)
            if not state.is_proper(n):
                raise InternalError(
                    f"block {h_word_text(block)!r} produced an improper span")
    bound = Fraction(2 * m)
    formula_cap = Fraction(4 * length, n) + 2
    if bound > formula_cap:
        raise InternalError("block bound exceeded the displacement formula")
    return m, bound


def translation_length_bound(fam: Section8Family, i: int = 1) -> Fraction:
    """Stable translation length bound 4/(g-1) for one generator, certified by
    span properness of its powers up to n/2."""
    for p in range(1, fam.n // 2 + 1):
        state = span_apply_h(alpha_state(fam), ((i, 1),) * p, fam)
        if not state.is_proper(fam.n):
            raise InternalError(f"span of w{i}^{p} alpha is improper")
    return Fraction(4, fam.n)


@dataclass(frozen=True)
class OrderWindowReport:
    tested: int
    violations: tuple[tuple[str, int, int], ...]  # (h text, syllable i, syllable j)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_order_window(fam: Section8Family, hs: Iterable[HWord | str]) -> OrderWindowReport:
    """Check that in B/M/E normal forms, syllables separated by at least L
    syllables are always order-comparable."""
    L = constants(fam).L
    tested = 0
    violations: list[tuple[str, int, int]] = []
    for h in hs:
        if isinstance(h, str):
            h = parse_h_word(h, fam.N)
        word = bme_normal_form(h, fam)
        tested += 1
        order = syllable_order(word, fam.graph)
        k = len(word.syllables)
        for i in range(k):
            for j in range(i + L + 1, k):
                if not order.comparable(i, j):
                    violations.append((h_word_text(h), i, j))
    return OrderWindowReport(tested=tested, violations=tuple(violations))


def window_constant_check(fam: Section8Family, hs: Iterable[HWord | str],
                          window: int | None = None) -> bool:
    """Every B/M/E normal form among ``hs`` passes the letter-window filling
    check at the given window (default: the b constant)."""
    if window is None:
        window = constants(fam).b
    for h in hs:
        if isinstance(h, str):
            h = parse_h_word(h, fam.N)
        if not check_window_property(bme_normal_form(h, fam), window, fam.model):
            return False
    return True
