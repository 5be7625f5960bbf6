"""High-temperature polymer representation of the random cluster model."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import KPViolation
from .lattice import EdgeConfig, SimpleGraph, connected_sets
from .polymer import (PartitionEstimate, Polymer, PolymerModel, kp_verify,
                      sample_compatible_collection, truncated_expansion, truncation_error_bound,
                      truncation_size)

PEIERLS_B = 0.5


@dataclass(frozen=True)
class HTParams:
    q: float
    beta: float
    d: int

    @property
    def p(self) -> float:
        return -math.expm1(-self.beta)

    @property
    def beta_h(self) -> float:
        return 3 * math.log(self.q) / (4 * self.d)

    @property
    def log_edge_factor(self) -> float:
        """log(e^beta - 1), or -inf at beta = 0."""
        if self.beta <= 0:
            return -math.inf
        return self.beta + math.log(-math.expm1(-self.beta))


@dataclass(frozen=True)
class HTPolymer:
    edges: tuple
    vertices: frozenset

    @property
    def size(self) -> int:
        return len(self.edges)


def ht_weight(gamma: HTPolymer, params: HTParams) -> float:
    """log w = |E| log(e^beta - 1) + (1 - |V|) log q."""
    le = params.log_edge_factor
    if le == -math.inf:
        return -math.inf
    return gamma.size * le + (1 - len(gamma.vertices)) * math.log(params.q)


def ht_polymers(G: SimpleGraph, max_edges: int) -> list[HTPolymer]:
    """Connected edge sets with at most max_edges edges, each once."""
    out = []
    if max_edges < 1:
        return out
    adj = G.edge_neighbors
    for s in range(G.num_edges):
        allowed = set(range(s, G.num_edges))
        for X in connected_sets(adj, s, max_edges, allowed):
            V = set()
            for e in X:
                V.update(G.edges[e])
            out.append(HTPolymer(tuple(X), frozenset(V)))
    return out


def ht_model(G: SimpleGraph, params: HTParams, max_edges: int) -> PolymerModel:
    pol = [Polymer(g.edges, ht_weight(g, params), g.size, len(g.vertices), g.vertices)
           for g in ht_polymers(G, max_edges)]
    return PolymerModel(pol, G.num_vertices)


def analytic_certificate(params: HTParams, max_degree: Optional[int] = None) -> tuple[bool, Optional[int]]:
    """Per-size weight bounds from vertex counts, against the convergence envelope.

    A polymer with k edges on a graph of max degree 2d has at least
    max(2, k/d, 1/2 + sqrt(2k)) vertices.  Returns (ok, first failing k);
    sizes above 5d are covered by a linear bound checked at k = 5d+1 and
    through its slope.
    """
    d = params.d
    delta = max_degree or 2 * d
    a = (3 + math.log(delta)) / PEIERLS_B + 3
    le = params.log_edge_factor
    if le == -math.inf:
        return True, None
    lq = math.log(params.q)

    def vmin(k):
        return max(2.0, k / d, 0.5 + math.sqrt(2 * k))

    for k in range(1, 5 * d + 1):
        if k * le + (1 - vmin(k)) * lq > -a * k:
            return False, k
    k0 = 5 * d + 1
    if k0 * le + (1 - k0 / d) * lq > -a * k0:
        return False, k0
    if le - lq / d > -a:
        return False, k0 + 1
    return True, None


def _check_degree(G: SimpleGraph, d: int):
    if G.max_degree > 2 * d:
        raise ValueError(f"maximum degree {G.max_degree} exceeds 2d = {2 * d}")


def ht_log_partition(G: SimpleGraph, params: HTParams, eps: float) -> PartitionEstimate:
    """log Z^RC = |E| log(1-p) + |V| log q + log Xi(G), Xi by truncated expansion."""
    _check_degree(G, params.d)
    N = G.num_vertices
    base = G.num_edges * (-params.beta) + N * math.log(params.q)
    if params.beta <= 0 or G.num_edges == 0 or N == 0:
        return PartitionEstimate(base, 0.0, "ht-exact", 0, {})
    m = truncation_size(N, eps)
    model = ht_model(G, params, m - 1)
    kp = kp_verify(model, PEIERLS_B, 2 * params.d, m - 1)
    if not kp.ok:
        raise KPViolation(f"convergence check failed: {kp.reason}", kp.witness)
    cert, _ = analytic_certificate(params)
    T = truncated_expansion(model, m)
    return PartitionEstimate(base + T, truncation_error_bound(N, m), "ht-cluster-expansion", m,
                             {"kp_verified_up_to": m - 1, "analytic_certificate": cert})


def ht_sample(G: SimpleGraph, params: HTParams, eps: float, seed=None) -> EdgeConfig:
    """Random-cluster sample: a polymer collection mapped to the union of its edges."""
    _check_degree(G, params.d)
    if params.beta <= 0 or G.num_edges == 0:
        return EdgeConfig.empty(G)
    N = max(1, G.num_vertices)
    m = truncation_size(N, eps, factor=8 * N)
    model = ht_model(G, params, m - 1)
    kp = kp_verify(model, PEIERLS_B, 2 * params.d, m - 1)
    if not kp.ok:
        raise KPViolation(f"convergence check failed: {kp.reason}", kp.witness)
    chosen = sample_compatible_collection(model, eps, seed, m=m)
    edges = set()
    for g in chosen:
        edges.update(g.key)
    return EdgeConfig.from_edges(G, sorted(edges))


def polymers_of(G: SimpleGraph, A) -> list[HTPolymer]:
    """Split an edge set into its connected components with at least one edge."""
    from .lattice import _as_bits
    edges = _as_bits(G, A)
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        for v in G.edges[e]:
            parent.setdefault(v, v)
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict = {}
    for e in edges:
        groups.setdefault(find(G.edges[e][0]), []).append(e)
    out = []
    for es in groups.values():
        V = set()
        for e in es:
            V.update(G.edges[e])
        out.append(HTPolymer(tuple(sorted(es)), frozenset(V)))
    return sorted(out, key=lambda g: g.edges)
