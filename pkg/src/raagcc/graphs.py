"""Defining graphs for right-angled Artin groups.

A group is presented by a finite simplicial graph: one generator per vertex,
with two generators commuting exactly when their vertices are joined by an
edge.  The declaration order of the vertices doubles as the total order on
generator labels used everywhere a canonical choice is needed (lexicographic
tie-breaking of normal forms, deterministic traversals, reports).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import InputError


@dataclass(frozen=True)
class DefiningGraph:
    """A finite simplicial graph with ordered vertex labels."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "DefiningGraph":
        """Validate and construct a graph from raw vertex/edge data."""
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise InputError(f"duplicate vertex labels in {verts!r}")
        vert_set = set(verts)
        edge_set: set[frozenset[str]] = set()
        for e in edges:
            pair = tuple(e)
            if len(pair) != 2:
                raise InputError(f"edge {e!r} is not a pair")
            u, w = str(pair[0]), str(pair[1])
            if u == w:
                raise InputError(f"self-loop at {u!r} is not simplicial")
            if u not in vert_set or w not in vert_set:
                raise InputError(f"edge ({u!r}, {w!r}) uses undeclared vertices")
            edge_set.add(frozenset((u, w)))
        return cls(vertices=verts, edges=frozenset(edge_set))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _adjacency(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = tuple(e)
            adj[u].add(w)
            adj[w].add(u)
        return {v: frozenset(nbrs) for v, nbrs in adj.items()}

    def has_vertex(self, label: str) -> bool:
        return label in self._index

    def require_vertex(self, label: str) -> None:
        if label not in self._index:
            raise InputError(f"unknown generator {label!r} (vertices: {', '.join(self.vertices)})")

    def index(self, label: str) -> int:
        """Position of a label in the declared vertex order."""
        self.require_vertex(label)
        return self._index[label]

    def commutes(self, u: str, w: str) -> bool:
        """True when the generators commute; a generator commutes with itself."""
        if u == w:
            return True
        return w in self._adjacency[u]

    def neighbors(self, label: str) -> frozenset[str]:
        self.require_vertex(label)
        return self._adjacency[label]

    def star(self, label: str) -> frozenset[str]:
        """The label together with its neighbors."""
        return self.neighbors(label) | {label}

    def complement_edges(self) -> frozenset[frozenset[str]]:
        """Edges of the complement graph on the same vertices."""
        comp = set()
        for i, u in enumerate(self.vertices):
            for w in self.vertices[i + 1:]:
                if not self.commutes(u, w):
                    comp.add(frozenset((u, w)))
        return frozenset(comp)

    def complement_diameter(self) -> int:
        """Diameter of the complement graph (BFS); raises if disconnected."""
        comp_adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.complement_edges():
            u, w = tuple(e)
            comp_adj[u].add(w)
            comp_adj[w].add(u)
        diameter = 0
        for source in self.vertices:
            dist = {source: 0}
            frontier = [source]
            while frontier:
                nxt = []
                for v in frontier:
                    for w in comp_adj[v]:
                        if w not in dist:
                            dist[w] = dist[v] + 1
                            nxt.append(w)
                frontier = nxt
            if len(dist) != len(self.vertices):
                raise InputError("complement graph is disconnected; diameter undefined")
            diameter = max(diameter, max(dist.values()))
        return diameter

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": sorted(sorted(e) for e in self.edges),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DefiningGraph":
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise InputError("graph JSON must be an object with 'vertices' and 'edges'")
        return cls.build(data["vertices"], [tuple(e) for e in data["edges"]])

    @classmethod
    def from_json(cls, text: str) -> "DefiningGraph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid graph JSON: {exc}") from exc
        return cls.from_json_dict(data)
