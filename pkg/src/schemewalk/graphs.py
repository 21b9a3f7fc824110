from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import networkx as nx
import numpy as np

from .config import SchemeWalkConfig, resolve_config
from .exceptions import InputError, VertexCapExceeded
from .types import Arc, IntMatrix
from .utils import as_binary_matrix, frozen

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    `truncation_depth` is set for finite truncations of infinite graphs (the
    regular tree), measured from vertex 0.
    """

    vertex_count: int
    adjacency: IntMatrix
    name: str = ""
    truncation_depth: Optional[int] = None

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.adjacency.sum(axis=1))

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        us, vs = np.nonzero(np.triu(self.adjacency, k=1))
        return tuple((int(u), int(v)) for u, v in zip(us, vs))

    @cached_property
    def arcs(self) -> tuple[Arc, ...]:
        """Directed arcs (u, v), lexicographic by (source, target)."""
        us, vs = np.nonzero(self.adjacency)
        return tuple((int(u), int(v)) for u, v in zip(us, vs))

    @cached_property
    def arc_index(self) -> dict[Arc, int]:
        return {arc: i for i, arc in enumerate(self.arcs)}

    def neighbors(self, vertex: int) -> list[int]:
        return [int(w) for w in np.nonzero(self.adjacency[vertex])[0]]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges)
        return g


def graph_from_adjacency(matrix, *, name: str = "", truncation_depth: Optional[int] = None) -> Graph:
    adjacency = as_binary_matrix(matrix, "adjacency")
    if adjacency.shape[0] == 0:
        raise InputError("Graph must have at least one vertex")
    if not np.array_equal(adjacency, adjacency.T):
        x, y = (int(v) for v in np.argwhere(adjacency != adjacency.T)[0])
        raise InputError(f"Adjacency is not symmetric at ({x}, {y})")
    if np.any(np.diag(adjacency)):
        x = int(np.nonzero(np.diag(adjacency))[0][0])
        raise InputError(f"Adjacency has a loop at vertex {x}")
    return Graph(
        vertex_count=adjacency.shape[0],
        adjacency=frozen(adjacency),
        name=name,
        truncation_depth=truncation_depth,
    )


def graph_from_edges(vertex_count: int, edges: Iterable[tuple[int, int]], *, name: str = "") -> Graph:
    if vertex_count < 1:
        raise InputError(f"Graph must have at least one vertex, got vertex_count={vertex_count}")
    adjacency = np.zeros((vertex_count, vertex_count), dtype=np.int64)
    for edge in edges:
        try:
            u, v = (int(x) for x in edge)
        except (TypeError, ValueError):
            raise InputError(f"Edge {edge!r} is not a pair of vertex indices")
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise InputError(f"Edge ({u}, {v}) out of range for {vertex_count} vertices")
        if u == v:
            raise InputError(f"Loop at vertex {u} is not allowed")
        adjacency[u, v] = adjacency[v, u] = 1
    return graph_from_adjacency(adjacency, name=name)


def graph_from_networkx(g: nx.Graph, *, name: str = "", truncation_depth: Optional[int] = None) -> Graph:
    nodes = sorted(g.nodes())
    if nodes != list(range(len(nodes))):
        g = nx.convert_node_labels_to_integers(g, ordering="sorted")
        nodes = list(range(g.number_of_nodes()))
    adjacency = nx.to_numpy_array(g, nodelist=nodes, dtype=np.int64)
    return graph_from_adjacency(adjacency, name=name, truncation_depth=truncation_depth)


def path_graph(n: int) -> Graph:
    if n < 1:
        raise InputError(f"Path needs at least one vertex, got {n}")
    return graph_from_networkx(nx.path_graph(n), name=f"path{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError(f"Cycle needs at least 3 vertices, got {n}")
    return graph_from_networkx(nx.cycle_graph(n), name=f"cycle{n}")


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InputError(f"Complete graph needs at least one vertex, got {n}")
    return graph_from_networkx(nx.complete_graph(n), name=f"complete{n}")


def regular_tree_size(degree: int, depth: int) -> int:
    if depth == 0:
        return 1
    return 1 + degree * sum((degree - 1) ** level for level in range(depth))


def regular_tree(degree: int, depth: int, *, config: Optional[SchemeWalkConfig] = None) -> Graph:
    """Ball of radius `depth` around the root 0 of the homogeneous tree of given degree.

    Vertices are numbered breadth first, so stratum n from the root is a
    contiguous block and the first child of the root is vertex 1.
    """
    config = resolve_config(config)
    if degree < 1:
        raise InputError(f"Tree degree must be at least 1, got {degree}")
    if depth < 0:
        raise InputError(f"Tree depth must be non-negative, got {depth}")
    size = regular_tree_size(degree, depth)
    if size > config.vertex_cap:
        raise VertexCapExceeded(
            f"Tree of degree {degree} and depth {depth} has {size} vertices, above the cap {config.vertex_cap}"
        )

    g = nx.Graph()
    g.add_node(0)
    frontier = [0]
    next_vertex = 1
    for level in range(depth):
        new_frontier = []
        for parent in frontier:
            n_children = degree if level == 0 else degree - 1
            for _ in range(n_children):
                g.add_edge(parent, next_vertex)
                new_frontier.append(next_vertex)
                next_vertex += 1
        frontier = new_frontier

    logger.debug(f"Built regular tree degree={degree} depth={depth} vertices={size}")
    return graph_from_networkx(g, name=f"tree{degree}d{depth}", truncation_depth=depth)
