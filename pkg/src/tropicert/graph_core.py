"""Finite weighted graphs with unbounded (leaf) edges.

One-valent vertices are never materialized: a leaf edge simply has a single
graph endpoint.  Vertex and edge ids are dense integers and every iteration
runs in ascending id order so that downstream output is reproducible.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import TropicertError


class GraphError(TropicertError, ValueError):
    pass


class Disconnected(GraphError):
    pass


class UnknownVertex(GraphError, KeyError):
    pass


class NotATree(GraphError):
    pass


class NotBounded(GraphError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    ends: tuple[int, ...]  # (u, v) for bounded edges, (v,) for leaves
    weight: int = 1

    @property
    def is_leaf(self) -> bool:
        return len(self.ends) == 1

    def other(self, v: int) -> int:
        a, b = self.ends
        return b if v == a else a


@dataclass(frozen=True)
class Flag:
    vertex: int
    edge: int


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise GraphError(f"edge ids must be dense and ordered, got {e.id} at {i}")
            if len(e.ends) not in (1, 2):
                raise GraphError(f"edge {i} must have one or two endpoints")
            for v in e.ends:
                if not 0 <= v < self.n_vertices:
                    raise UnknownVertex(v)
            if not isinstance(e.weight, int) or e.weight < 1:
                raise GraphError(f"edge {i} has non-positive weight {e.weight}")

    @classmethod
    def build(cls, n_vertices: int, bounded=(), leaves=(), weights=None) -> "Graph":
        """Bounded edges first (given as vertex pairs), then leaves (vertex ids)."""
        ends = [tuple(p) for p in bounded] + [(v,) for v in leaves]
        weights = list(weights) if weights is not None else [1] * len(ends)
        return cls(n_vertices, tuple(Edge(i, e, w) for i, (e, w) in enumerate(zip(ends, weights))))

    @property
    def vertices(self) -> range:
        return range(self.n_vertices)

    @cached_property
    def _incidence(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            for v in e.ends:
                inc[v].append(e.id)
        return tuple(tuple(x) for x in inc)

    def bounded_edges(self) -> list[Edge]:
        return [e for e in self.edges if not e.is_leaf]

    def leaf_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.is_leaf]

    def incident(self, v: int) -> tuple[int, ...]:
        """Edge ids incident to ``v``; a loop appears twice."""
        self._check_vertex(v)
        return self._incidence[v]

    def leaves_at(self, v: int) -> list[Edge]:
        return [self.edges[i] for i in self.incident(v) if self.edges[i].is_leaf]

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """``(edge id, neighbor)`` across each bounded edge at ``v``."""
        return [(i, self.edges[i].other(v)) for i in self.incident(v)
                if not self.edges[i].is_leaf]

    def flags(self) -> list[Flag]:
        return [Flag(v, e.id) for e in self.edges for v in e.ends]

    def valence(self, v: int) -> int:
        return len(self.incident(v))

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n_vertices):
            raise UnknownVertex(v)

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return False
        seen = {0}
        todo = [0]
        while todo:
            v = todo.pop()
            for _, w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n_vertices

    def first_betti(self) -> int:
        if not self.is_connected():
            raise Disconnected("first Betti number requested on a disconnected graph")
        return len(self.bounded_edges()) - self.n_vertices + 1

    def is_tree(self) -> bool:
        return self.is_connected() and self.first_betti() == 0

    def split_by_edge(self, edge_id: int) -> tuple[frozenset[int], frozenset[int]]:
        """Leaf edges on the ``ends[0]`` side and on the ``ends[1]`` side of a bounded edge."""
        if not self.is_tree():
            raise NotATree("split_by_edge needs a tree")
        e = self.edges[edge_id]
        if e.is_leaf:
            raise NotBounded(f"edge {edge_id} is a leaf")
        side = self.component_without(edge_id, e.ends[0])
        a = frozenset(x.id for x in self.leaf_edges() if x.ends[0] in side)
        b = frozenset(x.id for x in self.leaf_edges()) - a
        return a, b

    def component_without(self, edge_id: int, start: int) -> set[int]:
        """Vertices reachable from ``start`` without crossing ``edge_id``."""
        seen = {start}
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for i, w in self.neighbors(v):
                if i != edge_id and w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    def bfs_tree(self, root: int = 0) -> list[tuple[int, int | None, int | None]]:
        """``(vertex, parent edge, parent)`` in BFS order from ``root``."""
        out = [(root, None, None)]
        seen = {root}
        todo = deque([root])
        while todo:
            v = todo.popleft()
            for i, w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    out.append((w, i, v))
                    todo.append(w)
        return out

    def with_weights(self, weights: dict[int, int]) -> "Graph":
        return Graph(self.n_vertices, tuple(
            Edge(e.id, e.ends, weights.get(e.id, e.weight)) for e in self.edges))
