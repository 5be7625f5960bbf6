"""Exact partition functions and distributions by exhaustive enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np
from numba import njit

from . import _geometry as geo
from .errors import BudgetExceeded
from .lattice import SimpleGraph, TorusGraph

MAX_EDGES = 26
MAX_COLORINGS = 10 ** 8

mpmath.mp.dps = 50


@dataclass(frozen=True)
class ExactValue:
    value: object  # Fraction or mpmath.mpf
    provenance: str

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self):
        return float(self.value)

    def log(self) -> float:
        return float(mpmath.log(mpmath.mpf(self.value.numerator) / self.value.denominator)
                     if self.is_rational else mpmath.log(self.value))


def _num(x):
    """Exact Fraction for rational input, else a high-precision float."""
    if isinstance(x, (Fraction, int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            return mpmath.mpf(x)
    return mpmath.mpf(x)


def _mix(*xs):
    if all(isinstance(x, Fraction) for x in xs):
        return xs
    return tuple(mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
                 for x in xs)


@njit(cache=True)
def _count_table(nv, ends):
    """counts[k, c]: number of edge subsets with k edges and c components."""
    E = ends.shape[0]
    counts = np.zeros((E + 1, nv + 1), dtype=np.int64)
    parent = np.arange(nv)
    rank = np.zeros(nv, dtype=np.int64)
    # rollback log: merged root (or -1) per depth
    merged = np.full(E, -1, dtype=np.int64)
    raised = np.zeros(E, dtype=np.int64)
    choice = np.zeros(E + 1, dtype=np.int64)
    depth = 0
    k = 0
    c = nv
    choice[0] = -1
    while True:
        if depth == E:
            counts[k, c] += 1
            depth -= 1
            # fall through to backtrack
            while depth >= 0:
                if choice[depth] == 0:
                    # switch from "excluded" to "included"
                    choice[depth] = 1
                    u = ends[depth, 0]
                    v = ends[depth, 1]
                    while parent[u] != u:
                        u = parent[u]
                    while parent[v] != v:
                        v = parent[v]
                    merged[depth] = -1
                    raised[depth] = 0
                    if u != v:
                        if rank[u] < rank[v]:
                            u, v = v, u
                        parent[v] = u
                        merged[depth] = v
                        if rank[u] == rank[v]:
                            rank[u] += 1
                            raised[depth] = 1
                        c -= 1
                    k += 1
                    depth += 1
                    break
                else:
                    # undo the inclusion and go up
                    v = merged[depth]
                    if v >= 0:
                        u = parent[v]
                        parent[v] = v
                        if raised[depth]:
                            rank[u] -= 1
                        c += 1
                    k -= 1
                    choice[depth] = -1
                    depth -= 1
            if depth < 0:
                break
            continue
        choice[depth] = 0
        depth += 1
    return counts


def count_table(nv: int, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    if len(edges) > MAX_EDGES:
        raise BudgetExceeded(f"{len(edges)} edges exceeds the enumeration budget of {MAX_EDGES}")
    ends = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
    if nv == 0:
        return np.zeros((len(edges) + 1, 1), dtype=np.int64)
    return _count_table(nv, ends)


def _rc_sum(counts, p, q):
    p, q = _mix(_num(p), _num(q))
    E = counts.shape[0] - 1
    one = p ** 0
    total = 0 * one
    for k in range(E + 1):
        row = counts[k]
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        wk = p ** k * (one - p) ** (E - k)
        total += wk * sum(int(row[c]) * q ** int(c) for c in nz)
    return total


def exact_Z_rc(G: SimpleGraph, p, q) -> ExactValue:
    counts = count_table(G.num_vertices, G.edges)
    return ExactValue(_rc_sum(counts, p, q), f"enumeration:{G.graph_id}")


@njit(cache=True)
def _potts_counts(nv, ends, q):
    E = ends.shape[0]
    counts = np.zeros(E + 1, dtype=np.int64)
    col = np.zeros(nv, dtype=np.int64)
    total = q ** nv
    for x in range(total):
        y = x
        for v in range(nv):
            col[v] = y % q
            y //= q
        b = 0
        for e in range(E):
            if col[ends[e, 0]] != col[ends[e, 1]]:
                b += 1
        counts[b] += 1
    return counts


def potts_bichromatic_counts(G: SimpleGraph, q: int) -> np.ndarray:
    if q ** G.num_vertices > MAX_COLORINGS:
        raise BudgetExceeded("too many colourings to enumerate")
    ends = np.array(G.edges, dtype=np.int64).reshape(-1, 2)
    return _potts_counts(G.num_vertices, ends, int(q))


def exact_Z_potts(G: SimpleGraph, beta, q: int, hamiltonian: str = "bichromatic") -> ExactValue:
    """Potts partition function.

    "bichromatic": sum of exp(-beta * #bichromatic edges).
    "monochromatic": sum of exp(+beta * #monochromatic edges).
    """
    counts = potts_bichromatic_counts(G, q)
    b = mpmath.mpf(beta)
    E = G.num_edges
    if hamiltonian == "bichromatic":
        val = mpmath.fsum(int(c) * mpmath.exp(-b * k) for k, c in enumerate(counts) if c)
    elif hamiltonian == "monochromatic":
        val = mpmath.fsum(int(c) * mpmath.exp(b * (E - k)) for k, c in enumerate(counts) if c)
    else:
        raise ValueError(f"unknown hamiltonian {hamiltonian!r}")
    return ExactValue(val, f"potts-enumeration:{G.graph_id}:{hamiltonian}")


# ---------------------------------------------------------------- Z^d regions

def region_graph(points: Iterable[Sequence[int]], bc: str):
    """(vertex count, edge list) of the free graph on Λ or of its wired multigraph.

    Wired: the boundary vertices of Λ (those with a Z^d neighbour outside
    Λ) are merged into one vertex; edges between them become loops.
    """
    pts = sorted(set(tuple(int(c) for c in p) for p in points))
    if not pts:
        return 0, []
    d = len(pts[0])
    idx = {p: i for i, p in enumerate(pts)}
    edges = []
    boundary = set()
    for p in pts:
        for k in range(d):
            for s in (-1, 1):
                y = list(p)
                y[k] += s
                y = tuple(y)
                if y not in idx:
                    boundary.add(p)
                elif s == 1:
                    edges.append((idx[p], idx[y]))
    if bc == "free":
        return len(pts), edges
    if bc != "wired":
        raise ValueError(f"unknown boundary condition {bc!r}")
    remap = {}
    root = None
    nxt = 0
    for p in pts:
        if p in boundary:
            if root is None:
                root = nxt
                nxt += 1
            remap[idx[p]] = root
        else:
            remap[idx[p]] = nxt
            nxt += 1
    return nxt, [(remap[u], remap[v]) for u, v in edges]


def exact_Z_boundary(points, bc: str, p, q) -> ExactValue:
    nv, edges = region_graph(points, bc)
    counts = count_table(nv, edges)
    return ExactValue(_rc_sum(counts, p, q), f"enumeration:region:{bc}")


def exact_Z_potts_boundary(points, beta, q: int, r: int = 0) -> ExactValue:
    """Potts sum with every boundary vertex of Λ coloured r (bichromatic penalty)."""
    pts = sorted(set(tuple(int(c) for c in p) for p in points))
    nv, edges = region_graph(pts, "free")
    d = len(pts[0])
    pset = set(pts)
    fixed = []
    for i, p in enumerate(pts):
        for k in range(d):
            for s in (-1, 1):
                y = list(p)
                y[k] += s
                if tuple(y) not in pset:
                    fixed.append(i)
    fixed = sorted(set(fixed))
    free = [i for i in range(nv) if i not in fixed]
    if q ** len(free) > MAX_COLORINGS:
        raise BudgetExceeded("too many colourings to enumerate")
    b = mpmath.mpf(beta)
    total = mpmath.mpf(0)
    col = [r] * nv
    for x in range(q ** len(free)):
        y = x
        for v in free:
            col[v] = y % q
            y //= q
        bich = sum(1 for u, v in edges if col[u] != col[v])
        total += mpmath.exp(-b * bich)
    return ExactValue(total, "potts-enumeration:region:monochromatic-boundary")


# ---------------------------------------------------------------- contour split

@dataclass
class ContourSplit:
    Z_tunnel: object
    qZ_ord: object
    Z_dis: object
    Z_rc: object
    classes: np.ndarray  # per configuration: 0 tunnel, 1 ordered, 2 disordered
    stats: np.ndarray

    @property
    def Z_ord(self):
        return self.qZ_ord / self._q

    _q: object = 1


def classify_configurations(G: TorusGraph) -> np.ndarray:
    """Per-configuration statistics of every edge set of a small torus.

    Columns as in the compiled classifier: class, |A|, c(V, A), ordered
    components, ordered vertices, total boundary size, #contours, #interfaces.
    """
    E = G.num_edges
    if E > MAX_EDGES:
        raise BudgetExceeded(f"{E} edges exceeds the enumeration budget of {MAX_EDGES}")
    H = geo.half_lattice(G.d, G.n)
    return geo.classify_all(E, 0, 1 << E, G.edge_endpoints(), G.num_vertices, H.req, H.is_vertex,
                            H.face_cells, H.face_adj, H.face_loop, H.face_cross, H.cell_faces,
                            H.cell_nbrs, G.d)


_STATS_CACHE: dict = {}


def _stats(G: TorusGraph) -> np.ndarray:
    key = (G.d, G.n)
    if key not in _STATS_CACHE:
        _STATS_CACHE[key] = classify_configurations(G)
    return _STATS_CACHE[key]


def rc_weight(nA, c, E, p, q):
    return p ** nA * (1 - p) ** (E - nA) * q ** c


def exact_contour_split(G: TorusGraph, p, q) -> ContourSplit:
    """(Z_tunnel, q Z_ord, Z_dis) by classifying every edge set."""
    st = _stats(G)
    p, q = _mix(_num(p), _num(q))
    E = G.num_edges
    keys, cnt = np.unique(st[:, :3], axis=0, return_counts=True)
    Z = [0 * p, 0 * p, 0 * p]
    for (cls, nA, c), k in zip(keys.tolist(), cnt.tolist()):
        Z[cls] += k * rc_weight(nA, c, E, p, q)
    split = ContourSplit(Z[0], Z[1], Z[2], Z[0] + Z[1] + Z[2], st[:, 0].copy(), st)
    split._q = q
    return split


def contour_weight(stats_row, nv, d, p, q):
    """Weight of one configuration from its contour data, in rational form."""
    cls, nA, c, cord, nord, tot = [int(x) for x in stats_row[:6]]
    e_ord = p ** d
    e_dis = q * (1 - p) ** d
    if tot % 2:
        raise ValueError("odd total boundary size")
    return q ** cord * e_dis ** (nv - nord) * e_ord ** nord * ((1 - p) / p) ** (tot // 2)


def rc_distribution(G: SimpleGraph, p: float, q: float, subset: Optional[np.ndarray] = None) -> np.ndarray:
    """Exact μ^RC over all 2^|E| edge sets (index = bitmask), optionally
    conditioned on a boolean mask of configurations."""
    E = G.num_edges
    if E > 22:
        raise BudgetExceeded("distribution too large to tabulate")
    ends = np.array(G.edges, dtype=np.int64).reshape(-1, 2)
    nA, comps = _config_stats(G.num_vertices, ends)
    logw = nA * math.log(p) + (E - nA) * math.log1p(-p) + comps * math.log(q)
    if subset is not None:
        logw = np.where(subset, logw, -np.inf)
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


@njit(cache=True)
def _config_stats(nv, ends):
    E = ends.shape[0]
    N = 1 << E
    nA = np.zeros(N, dtype=np.int64)
    comps = np.zeros(N, dtype=np.int64)
    parent = np.empty(nv, dtype=np.int64)
    for x in range(N):
        for v in range(nv):
            parent[v] = v
        c = nv
        k = 0
        for e in range(E):
            if (x >> e) & 1:
                k += 1
                u = ends[e, 0]
                while parent[u] != u:
                    u = parent[u]
                w = ends[e, 1]
                while parent[w] != w:
                    w = parent[w]
                if u != w:
                    parent[max(u, w)] = min(u, w)
                    c -= 1
        nA[x] = k
        comps[x] = c
    return nA, comps


def potts_distribution(G: SimpleGraph, beta: float, q: int) -> np.ndarray:
    """Exact Potts law over colourings indexed by sum col[v] q^v."""
    nv = G.num_vertices
    if q ** nv > 10 ** 7:
        raise BudgetExceeded("too many colourings to tabulate")
    cols = np.array(np.unravel_index(np.arange(q ** nv), (q,) * nv)[::-1]).T
    bich = np.zeros(len(cols), dtype=np.int64)
    for u, v in G.edges:
        bich += cols[:, u] != cols[:, v]
    w = np.exp(-beta * (bich - bich.min()))
    return w / w.sum()


def coloring_index(col: Sequence[int], q: int) -> int:
    return int(sum(int(c) * q ** v for v, c in enumerate(col)))


def tv_distance(p, q) -> float:
    """Total variation distance between two distributions given as aligned
    arrays or as dicts."""
    if isinstance(p, dict) or isinstance(q, dict):
        keys = set(p) | set(q)
        return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return 0.5 * float(np.abs(p - q).sum())


def empirical(samples: Iterable, size: Optional[int] = None):
    """Empirical distribution from hashable samples (or integer indices when
    ``size`` is given)."""
    samples = list(samples)
    if size is not None:
        h = np.bincount(np.asarray(samples, dtype=np.int64), minlength=size).astype(float)
        return h / h.sum()
    out: dict = {}
    for s in samples:
        out[s] = out.get(s, 0) + 1
    n = len(samples)
    return {k: v / n for k, v in out.items()}
