"""Labeled square complexes over a defining graph, and subgroup cores.

A complex stores vertices, oriented generator-labeled edges, and squares.
Each square is recorded as its set of four corners; a corner is a vertex
together with the two edge-ends meeting there.  Higher cubes are implicit:
the complex is read as its flag cube completion, so all conditions are
checked at the corner level.

The target of every complex here is the one-vertex complex with a loop per
generator and a square per commuting pair (plus implicit cubes on cliques).
A complex maps locally isometrically to it exactly when every vertex link
is injective (no two incident edge-ends share a label and orientation) and
full (every corner with distinct commuting labels bounds a square).

``build_core`` wedges subdivided generator loops at a basepoint and
alternates two moves until stable: fold edge pairs violating link
injectivity, and attach a square at every unfilled commuting corner (with a
fresh opposite vertex and two fresh edges unless the completing edges are
already present).  Termination is budget-bounded, not proven: running out
of budget yields an inconclusive status, never a negative claim.

On a verified core, tracing a normal word from the basepoint is
deterministic, and a word lies in the core's subgroup exactly when its
trace closes up at the basepoint.  Element enumeration walks canonical
normal words letter by letter through the complex, so each subgroup
element is produced exactly once, in order of word length.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from random import Random
from typing import Iterator, Sequence

from .errors import BudgetExceededError, ContractError, InputError, InternalError
from .graphs import DefiningGraph
from .words import (
    Letter,
    NormalWord,
    Word,
    normal_word_from_pairs,
    normalize,
)

VERIFIED = "verified-local-isometry"
BUDGET_EXCEEDED = "budget-exceeded"

# An edge-end is (edge_id, endpoint) with endpoint 0 at the source, 1 at the
# target.  A corner is (vertex, (end, end)) with the ends sorted.
End = tuple[int, int]
Corner = tuple[int, tuple[End, End]]
Square = frozenset


def _corner(v: int, a: End, b: End) -> Corner:
    lo, hi = sorted((a, b))
    return (v, (lo, hi))


@dataclass(frozen=True)
class LabeledCubeComplex:
    """An immutable 2-skeletal labeled cube complex with a basepoint."""

    graph: DefiningGraph
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int, str], ...]  # (edge_id, source, target, label)
    squares: frozenset[Square]
    basepoint: int

    @cached_property
    def edge_map(self) -> dict[int, tuple[int, int, str]]:
        return {eid: (src, dst, label) for eid, src, dst, label in self.edges}

    @cached_property
    def ends_at(self) -> dict[int, tuple[End, ...]]:
        ends: dict[int, list[End]] = {v: [] for v in self.vertices}
        for eid, src, dst, _ in self.edges:
            ends[src].append((eid, 0))
            ends[dst].append((eid, 1))
        return {v: tuple(sorted(es)) for v, es in ends.items()}

    def end_vertex(self, end: End) -> int:
        src, dst, _ = self.edge_map[end[0]]
        return src if end[1] == 0 else dst

    def far_vertex(self, end: End) -> int:
        src, dst, _ = self.edge_map[end[0]]
        return dst if end[1] == 0 else src

    def end_label(self, end: End) -> str:
        return self.edge_map[end[0]][2]

    @cached_property
    def corner_index(self) -> frozenset[Corner]:
        return frozenset(c for sq in self.squares for c in sq)

    @cached_property
    def trace_maps(self) -> tuple[dict[tuple[int, str], int], dict[tuple[int, str], int]]:
        """(out, in) maps (vertex, label) -> far vertex; requires link injectivity."""
        out: dict[tuple[int, str], int] = {}
        into: dict[tuple[int, str], int] = {}
        for eid, src, dst, label in self.edges:
            if (src, label) in out or (dst, label) in into:
                raise ContractError("complex is not link-injective; tracing is ambiguous")
            out[(src, label)] = dst
            into[(dst, label)] = src
        return out, into

    @property
    def cell_count(self) -> int:
        return len(self.vertices) + len(self.edges) + len(self.squares)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.basepoint}
        frontier = [self.basepoint]
        while frontier:
            nxt = []
            for v in frontier:
                for end in self.ends_at[v]:
                    far = self.far_vertex(end)
                    if far not in seen:
                        seen.add(far)
                        nxt.append(far)
            frontier = nxt
        return len(seen) == len(self.vertices)

    def canonical_form(self) -> "LabeledCubeComplex":
        """Renumber cells by a deterministic traversal from the basepoint.

        Well-defined (independent of the incoming numbering) when the complex
        is link-injective; otherwise the result is merely a stable relabeling.
        """
        order: dict[int, int] = {self.basepoint: 0}
        queue = deque([self.basepoint])
        label_idx = self.graph.index
        while queue:
            v = queue.popleft()
            incident = sorted(
                self.ends_at[v],
                key=lambda end: (label_idx(self.end_label(end)), end[1], end[0]),
            )
            for end in incident:
                far = self.far_vertex(end)
                if far not in order:
                    order[far] = len(order)
                    queue.append(far)
        if len(order) != len(self.vertices):
            raise InternalError("complex is disconnected")
        new_edges = sorted(
            (order[src], order[dst], label, eid)
            for eid, src, dst, label in self.edges
        )
        eid_map = {old: new for new, (_, _, _, old) in enumerate(new_edges)}
        edges = tuple(
            (new, src, dst, label) for new, (src, dst, label, _) in enumerate(new_edges)
        )
        squares = frozenset(
            frozenset(
                _corner(order[v], (eid_map[a[0]], a[1]), (eid_map[b[0]], b[1]))
                for v, (a, b) in sq
            )
            for sq in self.squares
        )
        return LabeledCubeComplex(
            graph=self.graph,
            vertices=tuple(range(len(order))),
            edges=edges,
            squares=squares,
            basepoint=0,
        )

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": "raagcc-core-v1",
            "graph": self.graph.to_json_dict(),
            "basepoint": self.basepoint,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "squares": sorted(
                sorted([v, list(a), list(b)] for v, (a, b) in sq) for sq in self.squares
            ),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LabeledCubeComplex":
        try:
            graph = DefiningGraph.from_json_dict(data["graph"])
            vertices = tuple(int(v) for v in data["vertices"])
            edges = tuple(
                (int(eid), int(src), int(dst), str(label))
                for eid, src, dst, label in data["edges"]
            )
            squares = frozenset(
                frozenset(
                    _corner(int(v), (int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
                    for v, a, b in sq
                )
                for sq in data["squares"]
            )
            basepoint = int(data["basepoint"])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"invalid core JSON: {exc}") from exc
        vertex_set = set(vertices)
        edge_ids = {e[0] for e in edges}
        if len(edge_ids) != len(edges):
            raise InputError("invalid core JSON: duplicate edge ids")
        for eid, src, dst, label in edges:
            graph.require_vertex(label)
            if src not in vertex_set or dst not in vertex_set:
                raise InputError(f"invalid core JSON: edge {eid} has undeclared endpoints")
        if basepoint not in vertex_set:
            raise InputError("invalid core JSON: basepoint is not a vertex")
        for sq in squares:
            for v, (a, b) in sq:
                if v not in vertex_set or a[0] not in edge_ids or b[0] not in edge_ids \
                        or a[1] not in (0, 1) or b[1] not in (0, 1):
                    raise InputError("invalid core JSON: square corner references unknown cells")
        return cls(graph=graph, vertices=vertices, edges=edges,
                   squares=squares, basepoint=basepoint)

    def to_dot(self) -> str:
        lines = ["digraph core {"]
        lines.append(f"  // schema: raagcc-dot-v1")
        lines.append(f"  // graph: {json.dumps(self.graph.to_json_dict(), sort_keys=True)}")
        lines.append(f"  // basepoint: {self.basepoint}")
        for sq in sorted(self.to_json_dict()["squares"]):
            lines.append(f"  // square: {json.dumps(sq)}")
        for v in self.vertices:
            shape = "doublecircle" if v == self.basepoint else "circle"
            lines.append(f"  {v} [shape={shape}];")
        for eid, src, dst, label in self.edges:
            lines.append(f'  {src} -> {dst} [label="{label}" eid={eid}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dot(cls, text: str) -> "LabeledCubeComplex":
        graph = None
        basepoint = None
        squares_raw = []
        vertices: set[int] = set()
        edges = []
        edge_re = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*\[label=\"([^\"]+)\"\s+eid=(\d+)\];")
        node_re = re.compile(r"^\s*(\d+)\s*\[")
        for line in text.splitlines():
            stripped = line.strip()
            if stripped.startswith("// graph:"):
                graph = DefiningGraph.from_json(stripped[len("// graph:"):].strip())
            elif stripped.startswith("// basepoint:"):
                basepoint = int(stripped.split(":", 1)[1])
            elif stripped.startswith("// square:"):
                squares_raw.append(json.loads(stripped.split(":", 1)[1]))
            else:
                m = edge_re.match(line)
                if m:
                    src, dst, label, eid = m.groups()
                    edges.append((int(eid), int(src), int(dst), label))
                    continue
                m = node_re.match(line)
                if m:
                    vertices.add(int(m.group(1)))
        if graph is None or basepoint is None:
            raise InputError("DOT input is missing // graph or // basepoint metadata")
        return cls.from_json_dict({
            "graph": graph.to_json_dict(),
            "basepoint": basepoint,
            "vertices": sorted(vertices),
            "edges": [list(e) for e in sorted(edges)],
            "squares": squares_raw,
        })


def salvetti(graph: DefiningGraph) -> LabeledCubeComplex:
    """One vertex, a loop per generator, a square per commuting pair."""
    edges = tuple((i, 0, 0, label) for i, label in enumerate(graph.vertices))
    squares = set()
    for e in graph.edges:
        u, w = sorted(e, key=graph.index)
        eu, ew = graph.index(u), graph.index(w)
        corners = frozenset(
            _corner(0, (eu, pu), (ew, pw)) for pu in (0, 1) for pw in (0, 1)
        )
        squares.add(corners)
    return LabeledCubeComplex(
        graph=graph,
        vertices=(0,),
        edges=edges,
        squares=frozenset(squares),
        basepoint=0,
    )


@dataclass(frozen=True)
class LinkReport:
    """Every link-injectivity violation and every unfilled commuting corner."""

    foldable: tuple[tuple[int, str, int, tuple[int, ...]], ...]  # (vertex, label, orientation, edge ids)
    unfilled: tuple[Corner, ...]

    @property
    def ok(self) -> bool:
        return not self.foldable and not self.unfilled


def check_local_isometry(complex_: LabeledCubeComplex,
                         graph: DefiningGraph | None = None) -> LinkReport:
    graph = graph or complex_.graph
    foldable = []
    unfilled = []
    corner_index = complex_.corner_index
    for v in complex_.vertices:
        ends = complex_.ends_at[v]
        by_slot: dict[tuple[str, int], list[int]] = {}
        for end in ends:
            by_slot.setdefault((complex_.end_label(end), end[1]), []).append(end[0])
        for (label, orientation), eids in sorted(by_slot.items()):
            if len(eids) > 1:
                foldable.append((v, label, orientation, tuple(sorted(eids))))
        for i in range(len(ends)):
            for j in range(i + 1, len(ends)):
                u = complex_.end_label(ends[i])
                w = complex_.end_label(ends[j])
                if u != w and graph.commutes(u, w):
                    corner = _corner(v, ends[i], ends[j])
                    if corner not in corner_index:
                        unfilled.append(corner)
    return LinkReport(foldable=tuple(foldable), unfilled=tuple(sorted(unfilled)))


@dataclass(frozen=True)
class SubgroupCore:
    """A core complex for a finitely generated subgroup, with its status."""

    complex: LabeledCubeComplex
    status: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def graph(self) -> DefiningGraph:
        return self.complex.graph

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED


class _Builder:
    """Mutable fold/fill state with union-find over vertices and edges."""

    def __init__(self, graph: DefiningGraph, budget: int, rng: Random | None):
        self.graph = graph
        self.budget = budget
        self.rng = rng
        self.vparent: dict[int, int] = {}
        self.eparent: dict[int, int] = {}
        self.edges: dict[int, tuple[int, int, str]] = {}
        self.incident: dict[int, set[int]] = {}
        self.squares: list[Square] = []
        self.filled: set[Corner] = set()
        self.next_vertex = 0
        self.next_edge = 0
        self.n_vertices = 0
        self.n_edges = 0
        self.folds = 0
        self.squares_added = 0
        self.dirty: deque[int] = deque()
        self.corner_dirty: set[int] = set()

    # -- union-find ---------------------------------------------------------

    def vfind(self, v: int) -> int:
        root = v
        while self.vparent[root] != root:
            root = self.vparent[root]
        while self.vparent[v] != root:
            self.vparent[v], v = root, self.vparent[v]
        return root

    def efind(self, e: int) -> int:
        root = e
        while self.eparent[root] != root:
            root = self.eparent[root]
        while self.eparent[e] != root:
            self.eparent[e], e = root, self.eparent[e]
        return root

    def new_vertex(self) -> int:
        v = self.next_vertex
        self.next_vertex += 1
        self.vparent[v] = v
        self.incident[v] = set()
        self.n_vertices += 1
        self.corner_dirty.add(v)
        return v

    def new_edge(self, src: int, dst: int, label: str) -> int:
        e = self.next_edge
        self.next_edge += 1
        self.eparent[e] = e
        self.edges[e] = (src, dst, label)
        self.incident[self.vfind(src)].add(e)
        self.incident[self.vfind(dst)].add(e)
        self.n_edges += 1
        self.corner_dirty.add(self.vfind(src))
        self.corner_dirty.add(self.vfind(dst))
        return e

    def union_vertices(self, a: int, b: int) -> int:
        a, b = self.vfind(a), self.vfind(b)
        if a == b:
            return a
        if len(self.incident[a]) < len(self.incident[b]):
            a, b = b, a
        self.vparent[b] = a
        self.incident[a] |= self.incident.pop(b)
        self.n_vertices -= 1
        self.dirty.append(a)
        self.corner_dirty.add(a)
        return a

    def union_edges(self, keep: int, drop: int) -> None:
        keep, drop = self.efind(keep), self.efind(drop)
        if keep == drop:
            return
        self.eparent[drop] = keep
        self.n_edges -= 1

    def live_ends(self, v: int) -> list[End]:
        """Canonical edge-ends currently incident to a canonical vertex."""
        v = self.vfind(v)
        seen: set[int] = set()
        out: list[End] = []
        stale: list[int] = []
        for raw in self.incident[v]:
            ce = self.efind(raw)
            if ce in seen:
                continue
            seen.add(ce)
            src, dst, _ = self.edges[ce]
            here = False
            if self.vfind(src) == v:
                out.append((ce, 0))
                here = True
            if self.vfind(dst) == v:
                out.append((ce, 1))
                here = True
            if not here:
                stale.append(raw)
        for raw in stale:
            self.incident[v].discard(raw)
        return sorted(out)

    def end_far(self, end: End) -> int:
        src, dst, _ = self.edges[self.efind(end[0])]
        return self.vfind(dst if end[1] == 0 else src)

    def end_label(self, end: End) -> str:
        return self.edges[self.efind(end[0])][2]

    # -- folding ------------------------------------------------------------

    def fold_all(self) -> None:
        folded = False
        while self.dirty:
            if self.rng is not None and len(self.dirty) > 1:
                idx = self.rng.randrange(len(self.dirty))
                self.dirty[0], self.dirty[idx] = self.dirty[idx], self.dirty[0]
            v = self.vfind(self.dirty.popleft())
            slots: dict[tuple[str, int], End] = {}
            refold = False
            for end in self.live_ends(v):
                key = (self.end_label(end), end[1])
                if key in slots:
                    self._fold_pair(slots[key], end)
                    refold = folded = True
                    break
                slots[key] = end
            if refold:
                self.dirty.append(v)
        if folded:
            # Folding changes canonical ids, so refresh the filled-corner set.
            self.filled = {self.canonical_corner(c) for c in self.filled}

    def _fold_pair(self, e1: End, e2: End) -> None:
        keep, drop = self.efind(e1[0]), self.efind(e2[0])
        if keep == drop:
            return
        far1 = self.end_far(e1)
        far2 = self.end_far(e2)
        self.union_edges(keep, drop)
        self.folds += 1
        self.corner_dirty.add(self.vfind(far1))
        self.corner_dirty.add(self.vfind(far2))
        if far1 != far2:
            root = self.union_vertices(far1, far2)
            self.dirty.append(root)
        else:
            self.dirty.append(far1)

    # -- square filling -----------------------------------------------------

    def canonical_corner(self, corner: Corner) -> Corner:
        v, (a, b) = corner
        return _corner(self.vfind(v), (self.efind(a[0]), a[1]), (self.efind(b[0]), b[1]))

    def fill_pass(self) -> bool:
        """Attach a square at every unfilled commuting corner of a dirty vertex."""
        commutes = self.graph.commutes
        targets: list[tuple[int, End, End]] = []
        vertex_list = sorted({self.vfind(v) for v in self.corner_dirty if self.vfind(v) in self.incident})
        self.corner_dirty.clear()
        if self.rng is not None:
            self.rng.shuffle(vertex_list)
        for v in vertex_list:
            ends = self.live_ends(v)
            for i in range(len(ends)):
                for j in range(i + 1, len(ends)):
                    u = self.end_label(ends[i])
                    w = self.end_label(ends[j])
                    if u != w and commutes(u, w):
                        corner = _corner(v, ends[i], ends[j])
                        if corner not in self.filled:
                            targets.append((v, ends[i], ends[j]))
                            self.filled.add(corner)
        for v, a, b in targets:
            self._attach_square(v, a, b)
        return bool(targets)

    def _attach_square(self, v: int, a: End, b: End) -> None:
        """Close the corner (v, a, b) with a square.

        The completing edges carry the other label with the same orientation
        relative to their vertex as the corner's edge-ends have at v.  A fresh
        opposite vertex (and both completing edges) is created unless both
        already exist and agree on the opposite vertex; any duplicates this
        creates are removed by the next fold pass.
        """
        a = (self.efind(a[0]), a[1])
        b = (self.efind(b[0]), b[1])
        label_a = self.end_label(a)
        label_b = self.end_label(b)
        far_a = self.end_far(a)  # corner of the square across edge a
        far_b = self.end_far(b)
        gamma = self._find_end(far_a, label_b, b[1])
        delta = self._find_end(far_b, label_a, a[1])
        if gamma is not None and delta is not None and self.end_far(gamma) == self.end_far(delta):
            opposite = self.end_far(gamma)
        else:
            opposite = self.new_vertex()
            eg = self.new_edge(far_a if b[1] == 0 else opposite,
                               opposite if b[1] == 0 else far_a, label_b)
            ed = self.new_edge(far_b if a[1] == 0 else opposite,
                               opposite if a[1] == 0 else far_b, label_a)
            gamma = (eg, b[1])
            delta = (ed, a[1])
            self.dirty.append(far_a)
            self.dirty.append(far_b)
        corners = frozenset({
            _corner(v, a, b),
            _corner(far_a, (a[0], 1 - a[1]), gamma),
            _corner(far_b, (b[0], 1 - b[1]), delta),
            _corner(opposite, (gamma[0], 1 - gamma[1]), (delta[0], 1 - delta[1])),
        })
        self.squares.append(corners)
        self.squares_added += 1
        for corner in corners:
            self.filled.add(self.canonical_corner(corner))
            self.corner_dirty.add(self.vfind(corner[0]))

    def _find_end(self, v: int, label: str, orientation: int) -> End | None:
        for end in self.live_ends(v):
            if end[1] == orientation and self.end_label(end) == label:
                return end
        return None

    # -- assembly -----------------------------------------------------------

    @property
    def cell_count(self) -> int:
        return self.n_vertices + self.n_edges + len(self.squares)

    def freeze(self, basepoint: int, status: str) -> LabeledCubeComplex:
        vmap = {}
        for raw in list(self.vparent):
            root = self.vfind(raw)
            if root not in vmap:
                vmap[root] = len(vmap)
        emap = {}
        edges = []
        for raw in list(self.eparent):
            root = self.efind(raw)
            if root in emap:
                continue
            emap[root] = len(emap)
            src, dst, label = self.edges[root]
            edges.append((emap[root], vmap[self.vfind(src)], vmap[self.vfind(dst)], label))
        squares = frozenset(
            frozenset(
                _corner(vmap[self.vfind(cv)],
                        (emap[self.efind(ca[0])], ca[1]),
                        (emap[self.efind(cb[0])], cb[1]))
                for cv, (ca, cb) in sq
            )
            for sq in self.squares
        )
        complex_ = LabeledCubeComplex(
            graph=self.graph,
            vertices=tuple(range(len(vmap))),
            edges=tuple(sorted(edges)),
            squares=squares,
            basepoint=vmap[self.vfind(basepoint)],
        )
        if status == VERIFIED:
            complex_ = complex_.canonical_form()
        return complex_


def build_core(graph: DefiningGraph, generators: Sequence[Word], budget: int = 100_000,
               extend: LabeledCubeComplex | None = None,
               rng: Random | None = None) -> SubgroupCore:
    """Fold-and-fill construction of a core for the subgroup the generators span.

    Stabilization within budget yields a verified local isometry; exhausting
    the budget yields an inconclusive core carrying partial diagnostics.
    ``extend`` seeds the construction with an existing complex instead of a
    bare basepoint.  ``rng`` randomizes processing order (the result is
    independent of it; used by confluence tests).
    """
    if not generators:
        raise InputError("build_core requires at least one generator word")
    if budget <= 0:
        raise InputError("budget must be positive")
    builder = _Builder(graph, budget, rng)
    if extend is not None:
        vmap = {v: builder.new_vertex() for v in extend.vertices}
        emap = {}
        for eid, src, dst, label in extend.edges:
            emap[eid] = builder.new_edge(vmap[src], vmap[dst], label)
        for sq in extend.squares:
            imported = frozenset(
                _corner(vmap[cv], (emap[ca[0]], ca[1]), (emap[cb[0]], cb[1]))
                for cv, (ca, cb) in sq
            )
            builder.squares.append(imported)
            builder.filled.update(imported)
        basepoint = vmap[extend.basepoint]
    else:
        basepoint = builder.new_vertex()
    for word in generators:
        letters = word.letters if isinstance(word, Word) else tuple(word)
        for gen, _ in letters:
            graph.require_vertex(gen)
        if not letters:
            continue
        current = basepoint
        for i, (gen, sign) in enumerate(letters):
            nxt = basepoint if i == len(letters) - 1 else builder.new_vertex()
            if sign > 0:
                builder.new_edge(current, nxt, gen)
            else:
                builder.new_edge(nxt, current, gen)
            current = nxt
    builder.dirty.extend(list(builder.incident.keys()))
    builder.fold_all()
    status = VERIFIED
    while True:
        if builder.cell_count > budget:
            status = BUDGET_EXCEEDED
            break
        if not builder.fill_pass():
            break
        builder.fold_all()
    complex_ = builder.freeze(basepoint, status)
    diagnostics = {
        "folds": builder.folds,
        "squares_added": builder.squares_added,
        "cells": complex_.cell_count,
        "vertex_count": len(complex_.vertices),
        "edge_count": len(complex_.edges),
        "square_count": len(complex_.squares),
        "budget": budget,
    }
    if status == VERIFIED:
        report = check_local_isometry(complex_)
        if not report.ok:
            raise InternalError(f"stabilized complex failed the link check: {report}")
    return SubgroupCore(complex=complex_, status=status, diagnostics=diagnostics)


def _require_verified(core: SubgroupCore) -> None:
    if not isinstance(core, SubgroupCore):
        raise ContractError(f"expected a SubgroupCore, got {type(core).__name__}")
    if not core.verified:
        raise ContractError(f"core status is {core.status!r}; a verified core is required")


def membership(core: SubgroupCore, w: Word | NormalWord) -> bool:
    """Trace the normal form from the basepoint; member iff the trace closes up.

    Sound on a verified core: geodesic words of subgroup elements stay inside
    the core's convex universal-cover image, so a failed or non-closing trace
    certifies non-membership.
    """
    _require_verified(core)
    complex_ = core.complex
    out, into = complex_.trace_maps
    v = complex_.basepoint
    for gen, sign in normalize(w, core.graph).letters():
        nxt = out.get((v, gen)) if sign > 0 else into.get((v, gen))
        if nxt is None:
            return False
        v = nxt
    return v == complex_.basepoint


def _letter_options(complex_: LabeledCubeComplex) -> tuple[list[list[tuple[int, int, int]]], list[int], int]:
    """Per-vertex extension letters as (generator index, sign, next vertex)."""
    graph = complex_.graph
    out, into = complex_.trace_maps
    index = {v: i for i, v in enumerate(complex_.vertices)}
    options: list[list[tuple[int, int, int]]] = [[] for _ in complex_.vertices]
    for (v, label), far in out.items():
        options[index[v]].append((graph.index(label), 1, index[far]))
    for (v, label), far in into.items():
        options[index[v]].append((graph.index(label), -1, index[far]))
    # Letter order: declaration index, positive sign first (the canonical
    # letter order used for lexicographic comparisons).
    for opts in options:
        opts.sort(key=lambda t: (t[0], -t[1]))
    comm_sets: list[int] = []
    for g in graph.vertices:
        mask = 0
        for j, h in enumerate(graph.vertices):
            if g != h and graph.commutes(g, h):
                mask |= 1 << j
        comm_sets.append(mask)
    return options, comm_sets, index[complex_.basepoint]


def iter_loops_by_length(complex_: LabeledCubeComplex, max_len: int,
                         node_budget: int | None = None
                         ) -> Iterator[tuple[int, list[tuple[tuple[int, int], ...]]]]:
    """Yield, per letter length, the basepoint loops spelled by canonical
    normal words, as syllable tuples over generator indices.

    The walk extends canonical spellings letter by letter: an extension is
    kept only when the grown word is still normal as written and still the
    least spelling in its commutation class, so each element is produced at
    most once.  On a complex verified as a local isometry this produces
    exactly the subgroup elements up to the length cap; on an unverified
    (but link-injective) complex the loops are still genuine subgroup
    members, merely not exhaustive.
    """
    options, comm, base = _letter_options(complex_)
    states: list[tuple[tuple[tuple[int, int], ...], int]] = [((), base)]
    yield 0, [()]
    nodes = 1
    emitted = 1
    for length in range(1, max_len + 1):
        next_states: list[tuple[tuple[tuple[int, int], ...], int]] = []
        loops: list[tuple[tuple[int, int], ...]] = []
        for syls, v in states:
            k = len(syls)
            last = syls[-1] if k else None
            for g, sign, far in options[v]:
                if last is not None and last[0] == g:
                    if (last[1] > 0) != (sign > 0):
                        continue
                    new_syls = syls[:-1] + ((g, last[1] + sign),)
                else:
                    ok = True
                    mask = comm[g]
                    for j in range(k - 1, -1, -1):
                        h = syls[j][0]
                        if h == g:
                            ok = False
                            break
                        if not (mask >> h) & 1:
                            break
                        if h > g:
                            ok = False
                            break
                    if not ok:
                        continue
                    new_syls = syls + ((g, sign),)
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    raise BudgetExceededError(
                        f"enumeration exceeded budget {node_budget}",
                        partial_count=emitted)
                next_states.append((new_syls, far))
                if far == base:
                    loops.append(new_syls)
                    emitted += 1
        yield length, loops
        states = next_states
        if not states:
            break


def iter_elements_by_length(core: SubgroupCore, max_len: int,
                            node_budget: int | None = None
                            ) -> Iterator[tuple[int, list[tuple[tuple[int, int], ...]]]]:
    """Per-length subgroup elements of a verified core, as syllable tuples
    over generator indices."""
    _require_verified(core)
    return iter_loops_by_length(core.complex, max_len, node_budget=node_budget)


def enumerate_elements(core: SubgroupCore, max_len: int,
                       budget: int | None = None) -> tuple[NormalWord, ...]:
    """All subgroup elements of letter length at most ``max_len``, each as its
    canonical normal word, sorted by length then spelling."""
    if max_len < 0:
        raise InputError("max_len must be >= 0")
    labels = core.graph.vertices
    out: list[tuple[tuple, NormalWord]] = []
    for length, loops in iter_elements_by_length(core, max_len, node_budget=budget):
        for syls in loops:
            word = normal_word_from_pairs((labels[g], e) for g, e in syls)
            key = tuple(item for g, e in syls
                        for item in [(g, 0 if e > 0 else 1)] * abs(e))
            out.append(((length, key), word))
    out.sort(key=lambda t: t[0])
    return tuple(word for _, word in out)
