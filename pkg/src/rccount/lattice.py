"""Discrete tori, simple graphs, edge configurations and connected-set enumeration."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class SimpleGraph:
    """Undirected simple graph on vertices 0..num_vertices-1."""

    def __init__(self, num_vertices: int, edges: Iterable[tuple[int, int]], name: str = ""):
        self.num_vertices = int(num_vertices)
        seen = set()
        clean = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("loops are not allowed in a simple graph")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"parallel edge {key}")
            seen.add(key)
            clean.append(key)
        self.edges: tuple[tuple[int, int], ...] = tuple(clean)
        self.name = name or f"graph:{self.num_vertices}:{len(self.edges)}"
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append(v)
            adj[v].append(u)
            inc[u].append(i)
            inc[v].append(i)
        self.adjacency = tuple(tuple(a) for a in adj)
        self.incident = tuple(tuple(a) for a in inc)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def graph_id(self) -> str:
        return self.name

    def edge_endpoints(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def edge_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Edges sharing an endpoint with each edge."""
        out = []
        for i, (u, v) in enumerate(self.edges):
            nb = set(self.incident[u]) | set(self.incident[v])
            nb.discard(i)
            out.append(tuple(sorted(nb)))
        return tuple(out)

    def __repr__(self):
        return f"SimpleGraph({self.name})"


def cycle_graph(k: int) -> SimpleGraph:
    return SimpleGraph(k, [(i, (i + 1) % k) for i in range(k)], name=f"cycle:{k}")


def path_graph(k: int) -> SimpleGraph:
    return SimpleGraph(k, [(i, i + 1) for i in range(k - 1)], name=f"path:{k}")


def complete_graph(k: int) -> SimpleGraph:
    return SimpleGraph(k, [(i, j) for i in range(k) for j in range(i + 1, k)], name=f"complete:{k}")


def grid_graph(rows: int, cols: int) -> SimpleGraph:
    """Free-boundary rows x cols grid; vertex (r, c) has index r*cols + c."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return SimpleGraph(rows * cols, edges, name=f"grid:{rows}x{cols}")


class TorusGraph(SimpleGraph):
    """The torus Z_n^d.

    Vertices are indexed row-major in their coordinates, edge (v, k) joins v
    and v + e_k and has index v*d + k.
    """

    def __init__(self, d: int, n: int):
        if d < 2:
            raise ValueError("torus dimension must be at least 2")
        if n < 3:
            raise ValueError("torus side length must be at least 3")
        self.d = int(d)
        self.n = int(n)
        nv = n ** d
        coords = np.array(np.unravel_index(np.arange(nv), (n,) * d)).T.astype(np.int64)
        self.coords = coords
        self.strides = np.array([n ** (d - 1 - k) for k in range(d)], dtype=np.int64)
        ends = np.empty((nv * d, 2), dtype=np.int64)
        for k in range(d):
            step = coords.copy()
            step[:, k] = (step[:, k] + 1) % n
            ends[k::d, 0] = np.arange(nv)
            ends[k::d, 1] = step @ self.strides
        self._ends = ends
        super().__init__(nv, [tuple(e) for e in ends.tolist()], name=f"torus:{d}:{n}")

    def vertex_index(self, x: Sequence[int]) -> int:
        return int(sum((int(c) % self.n) * int(s) for c, s in zip(x, self.strides)))

    def vertex_coords(self, v: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[v])

    def edge_index(self, v: int, axis: int) -> int:
        return int(v) * self.d + int(axis)

    def neighbor(self, v: int, axis: int, sign: int = 1) -> int:
        x = self.coords[v].copy()
        x[axis] = (x[axis] + sign) % self.n
        return int(x @ self.strides)

    def edge_endpoints(self) -> np.ndarray:
        return self._ends

    @cached_property
    def one_adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Edges at l-infinity distance at most 1 from each edge (itself excluded)."""
        d, n = self.d, self.n
        ne = self.num_edges
        lo = np.repeat(self.coords, d, axis=0)
        axis = np.tile(np.arange(d), self.num_vertices)
        # per coordinate the segment is {lo} or {lo, lo+1}
        hi = lo.copy()
        hi[np.arange(ne), axis] += 1
        out = []
        for e in range(ne):
            dist = np.zeros(ne, dtype=np.int64)
            for j in range(d):
                best = None
                for a in (lo[e, j], hi[e, j]):
                    for b_arr in (lo[:, j], hi[:, j]):
                        diff = np.abs(a - b_arr) % n
                        cd = np.minimum(diff, n - diff)
                        best = cd if best is None else np.minimum(best, cd)
                dist = np.maximum(dist, best)
            nb = np.nonzero(dist <= 1)[0]
            out.append(tuple(int(f) for f in nb if f != e))
        return tuple(out)

    @cached_property
    def cube_adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Edges sharing an endpoint or lying in a common unit d-cube."""
        adj = [set(s) for s in self.edge_neighbors]
        for v in range(self.num_vertices):
            x = self.coords[v]
            es = []
            for sub in product((0, 1), repeat=self.d):
                w = self.vertex_index((x + np.array(sub)) % self.n)
                es.extend(self.edge_index(w, k) for k in range(self.d) if sub[k] == 0)
            for e in es:
                adj[e].update(es)
        return tuple(tuple(sorted(a - {e})) for e, a in enumerate(adj))

    def __repr__(self):
        return f"TorusGraph(d={self.d}, n={self.n})"


_TORUS_CACHE: dict[tuple[int, int], TorusGraph] = {}


def build_torus(d: int, n: int) -> TorusGraph:
    key = (int(d), int(n))
    if key not in _TORUS_CACHE:
        _TORUS_CACHE[key] = TorusGraph(d, n)
    return _TORUS_CACHE[key]


@dataclass(frozen=True)
class EdgeConfig:
    """A set of edges of a graph stored as an integer bitmask."""

    graph_id: str
    num_edges: int
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.num_edges:
            raise ValueError("bitset longer than the owner's edge count")

    @classmethod
    def from_edges(cls, G: SimpleGraph, edges: Iterable[int]) -> "EdgeConfig":
        b = 0
        for e in edges:
            if not 0 <= e < G.num_edges:
                raise ValueError(f"edge {e} out of range")
            b |= 1 << int(e)
        return cls(G.graph_id, G.num_edges, b)

    @classmethod
    def empty(cls, G: SimpleGraph) -> "EdgeConfig":
        return cls(G.graph_id, G.num_edges, 0)

    @classmethod
    def full(cls, G: SimpleGraph) -> "EdgeConfig":
        return cls(G.graph_id, G.num_edges, (1 << G.num_edges) - 1)

    def edges(self) -> list[int]:
        b, out, i = self.bits, [], 0
        while b:
            if b & 1:
                out.append(i)
            b >>= 1
            i += 1
        return out

    def __contains__(self, e: int) -> bool:
        return bool((self.bits >> e) & 1)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.num_edges, dtype=np.uint8)
        arr[self.edges()] = 1
        return arr

    @classmethod
    def from_array(cls, G: SimpleGraph, arr) -> "EdgeConfig":
        return cls.from_edges(G, np.nonzero(np.asarray(arr))[0].tolist())

    def hex(self) -> str:
        return format(self.bits, "x")

    @classmethod
    def from_hex(cls, G: SimpleGraph, text: str) -> "EdgeConfig":
        return cls(G.graph_id, G.num_edges, int(text, 16))


def _as_bits(G: SimpleGraph, A) -> list[int]:
    if isinstance(A, EdgeConfig):
        if A.num_edges != G.num_edges:
            raise ValueError("edge configuration belongs to another graph")
        return A.edges()
    return sorted(int(e) for e in A)


def connected_components(G: SimpleGraph, A) -> tuple[list[int], int]:
    """Component label per vertex of (V, A) and the number of components c(V, A)."""
    parent = list(range(G.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in _as_bits(G, A):
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    labels, remap = [], {}
    for v in range(G.num_vertices):
        r = find(v)
        if r not in remap:
            remap[r] = len(remap)
        labels.append(remap[r])
    return labels, len(remap)


def connected_sets(adj: Sequence[Sequence[int]], root: int, max_size: int,
                   allowed: Optional[set] = None) -> Iterator[tuple[int, ...]]:
    """All connected vertex sets of the graph ``adj`` that contain ``root``.

    Uses the exclusive-neighbourhood extension rule, so every set is produced
    exactly once without a dedup table.  ``allowed`` restricts the vertices
    that may be added.
    """
    if max_size < 1:
        return

    def ok(u):
        return allowed is None or u in allowed

    start_ext = [u for u in adj[root] if ok(u)]
    closed = {root, *adj[root]}
    stack = [((root,), start_ext, closed)]
    # explicit DFS; each frame holds the current set, its extension list and
    # the closed neighbourhood that new vertices must avoid
    while stack:
        sub, ext, closed = stack.pop()
        yield tuple(sorted(sub))
        if len(sub) >= max_size:
            continue
        ext = list(ext)
        frames = []
        while ext:
            w = ext.pop()
            new = [u for u in adj[w] if u not in closed and ok(u)]
            frames.append((sub + (w,), ext + new, closed | set(adj[w])))
        stack.extend(reversed(frames))


def enumerate_connected_edge_sets(G: SimpleGraph, seed: int, max_edges: int,
                                  adjacency: str = "edge",
                                  allowed: Optional[set] = None) -> Iterator[tuple[int, ...]]:
    """Connected edge sets containing ``seed`` with at most ``max_edges`` edges.

    ``adjacency`` is "edge" (sharing an endpoint), "cube" (sharing an
    endpoint or a unit d-cube, tori only) or "one" (l-infinity distance at
    most 1, tori only).
    """
    if not 0 <= seed < G.num_edges:
        raise ValueError("seed edge out of range")
    if adjacency == "edge":
        adj = G.edge_neighbors
    elif adjacency in ("one", "cube"):
        if not isinstance(G, TorusGraph):
            raise ValueError(f"{adjacency} adjacency needs a torus embedding")
        adj = G.one_adjacency if adjacency == "one" else G.cube_adjacency
    else:
        raise ValueError(f"unknown adjacency {adjacency!r}")
    yield from connected_sets(adj, seed, max_edges, allowed)


def vertices_of(G: SimpleGraph, A) -> set[int]:
    out = set()
    for e in _as_bits(G, A):
        out.update(G.edges[e])
    return out


def edge_boundary_counts(G: SimpleGraph, A) -> tuple[int, int]:
    """(|delta_1 A|, |delta_2 A|): absent edges with one or two endpoints in V(A)."""
    inA = set(_as_bits(G, A))
    VA = vertices_of(G, inA)
    one = two = 0
    for i, (u, v) in enumerate(G.edges):
        if i in inA:
            continue
        k = (u in VA) + (v in VA)
        if k == 1:
            one += 1
        elif k == 2:
            two += 1
    return one, two
