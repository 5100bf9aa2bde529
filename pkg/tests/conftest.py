from __future__ import annotations

import pytest

from raagcc.graphs import DefiningGraph
from raagcc.surfaces import SurfaceModel


@pytest.fixture(scope="session")
def abc_graph() -> DefiningGraph:
    """Three generators, single commuting pair b-c (the running example)."""
    return DefiningGraph.build("abc", [("b", "c")])


@pytest.fixture(scope="session")
def abc_model(abc_graph) -> SurfaceModel:
    """Full-set-only filling over the running example graph."""
    return SurfaceModel.build(abc_graph, [["a", "b", "c"]], admissible=True)


@pytest.fixture(scope="session")
def path_graph() -> DefiningGraph:
    """Four generators in a path: a-b, b-c, c-d."""
    return DefiningGraph.build("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


GRAPH_ZOO = [
    DefiningGraph.build("ab", []),
    DefiningGraph.build("abc", [("b", "c")]),
    DefiningGraph.build("abc", [("a", "b"), ("b", "c"), ("a", "c")]),
    DefiningGraph.build("abcd", [("a", "b"), ("b", "c"), ("c", "d")]),
    DefiningGraph.build("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]),
    DefiningGraph.build("abcd", [("a", "c")]),
]
