"""Abstract polymer models and their truncated cluster expansion."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np

URSELL_CAP = 12


@dataclass(frozen=True)
class Polymer:
    key: Hashable
    log_weight: float  # -inf for weight zero
    size: float
    vertex_count: int
    sites: frozenset = frozenset()

    @property
    def weight(self) -> float:
        return math.exp(self.log_weight) if self.log_weight > -math.inf else 0.0


@dataclass(frozen=True)
class PartitionEstimate:
    log_value: float
    rel_error_bound: float
    method: str
    m: Optional[int] = None
    info: dict = field(default_factory=dict, compare=False)

    def as_record(self) -> dict:
        out = {"method": self.method, "log_Z": self.log_value,
               "error_bound": self.rel_error_bound, "m": self.m}
        out.update(self.info)
        return out


class PolymerModel:
    """A finite polymer universe.

    Compatibility defaults to disjointness of ``sites``; a custom symmetric
    predicate may be passed instead.  ``host_size`` is the N of the error
    bounds (number of host vertices).
    """

    def __init__(self, polymers: Iterable[Polymer], host_size: int,
                 compatible: Optional[Callable[[Polymer, Polymer], bool]] = None):
        self.polymers = list(polymers)
        self.host_size = int(host_size)
        self._compatible = compatible

    def compatible(self, a: Polymer, b: Polymer) -> bool:
        if a is b or a.key == b.key:
            return False
        if self._compatible is not None:
            return bool(self._compatible(a, b))
        return a.sites.isdisjoint(b.sites)

    def universe(self, max_size: float) -> list[Polymer]:
        return [g for g in self.polymers if g.size <= max_size]

    def restricted(self, keep: Callable[[Polymer], bool]) -> "PolymerModel":
        return PolymerModel([g for g in self.polymers if keep(g)], self.host_size, self._compatible)

    def with_log_weights(self, logw: Sequence[float]) -> "PolymerModel":
        pol = [Polymer(g.key, float(w), g.size, g.vertex_count, g.sites)
               for g, w in zip(self.polymers, logw)]
        return PolymerModel(pol, self.host_size, self._compatible)

    def incompatibility_lists(self, polymers: Sequence[Polymer]) -> list[list[int]]:
        k = len(polymers)
        adj: list[list[int]] = [[] for _ in range(k)]
        if self._compatible is None:
            by_site: dict = {}
            for i, g in enumerate(polymers):
                for s in g.sites:
                    by_site.setdefault(s, []).append(i)
            nb = [set() for _ in range(k)]
            for lst in by_site.values():
                for i in lst:
                    nb[i].update(lst)
            for i in range(k):
                nb[i].discard(i)
                adj[i] = sorted(nb[i])
            return adj
        for i in range(k):
            for j in range(i + 1, k):
                if not self.compatible(polymers[i], polymers[j]):
                    adj[i].append(j)
                    adj[j].append(i)
        return adj


# ---------------------------------------------------------------- Ursell function

_ursell_lock = threading.Lock()
_ursell_labelled: dict = {}
_ursell_buckets: dict = {}


def _connected_signed_sum(k: int, nbr: Sequence[int]) -> int:
    """Sum over connected spanning edge subsets A of (-1)^|A|."""
    full = (1 << k) - 1
    memo: dict = {}

    def indep_subsets(mask):
        # all independent subsets of the vertex set ``mask`` (as bitmasks)
        out = [0]
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            out += [s | low for s in out if not (s & nbr[v])]
        return out

    def C(U):
        if U in memo:
            return memo[U]
        if U & (U - 1) == 0:
            memo[U] = 1
            return 1
        r = U & -U
        rest = U ^ r
        # S(U): 1 iff U spans no edge
        s_u = 1
        m = U
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if nbr[v] & U:
                s_u = 0
                break
            m ^= low
        total = s_u
        for X in indep_subsets(rest):
            if X:
                total -= C(U ^ X)
        memo[U] = total
        return total

    return C(full)


def ursell(H, cap: int = URSELL_CAP) -> Fraction:
    """Ursell function of a graph given as a networkx graph or (k, edges)."""
    if isinstance(H, nx.Graph):
        nodes = sorted(H.nodes())
        idx = {v: i for i, v in enumerate(nodes)}
        k = len(nodes)
        edges = [(idx[u], idx[v]) for u, v in H.edges() if u != v]
    else:
        k, edges = H
        edges = [(int(u), int(v)) for u, v in edges if u != v]
    if k > cap:
        raise ValueError(f"Ursell function requested for {k} > {cap} vertices")
    if k == 0:
        return Fraction(1)
    nbr = [0] * k
    for u, v in edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    lkey = (k, tuple(nbr))
    with _ursell_lock:
        if lkey in _ursell_labelled:
            return _ursell_labelled[lkey]
    G = nx.Graph()
    G.add_nodes_from(range(k))
    G.add_edges_from(edges)
    h = nx.weisfeiler_lehman_graph_hash(G, iterations=3)
    val = None
    with _ursell_lock:
        for G2, v2 in _ursell_buckets.get((k, h), []):
            if nx.is_isomorphic(G, G2):
                val = v2
                break
    if val is None:
        val = Fraction(_connected_signed_sum(k, nbr), math.factorial(k))
        with _ursell_lock:
            _ursell_buckets.setdefault((k, h), []).append((G, val))
    with _ursell_lock:
        _ursell_labelled[lkey] = val
    return val


# ---------------------------------------------------------------- clusters

@dataclass(frozen=True)
class Cluster:
    """A multiset of polymers with connected incompatibility graph."""

    polymers: tuple  # indices into the universe, sorted
    multiplicities: tuple
    size: float
    coefficient: Fraction  # symmetry factor times the Ursell function

    @property
    def length(self) -> int:
        return sum(self.multiplicities)

    def incompatibility_graph(self, adj_sets) -> tuple[int, list]:
        slots = []
        for i, n in zip(self.polymers, self.multiplicities):
            slots += [i] * n
        edges = []
        for a in range(len(slots)):
            for b in range(a + 1, len(slots)):
                if slots[a] == slots[b] or slots[b] in adj_sets[slots[a]]:
                    edges.append((a, b))
        return len(slots), edges


def _connected_supports(adj: Sequence[Sequence[int]], sizes: Sequence[float], m: float):
    """Connected vertex sets (root = minimum) with total size < m."""
    k = len(adj)
    for root in range(k):
        if sizes[root] >= m:
            continue
        stack = [((root,), [u for u in adj[root] if u > root], {root, *adj[root]}, sizes[root])]
        while stack:
            sub, ext, closed, tot = stack.pop()
            yield sub, tot
            ext = list(ext)
            frames = []
            while ext:
                w = ext.pop()
                if tot + sizes[w] >= m:
                    continue
                new = [u for u in adj[w] if u > root and u not in closed]
                frames.append((sub + (w,), ext + new, closed | set(adj[w]), tot + sizes[w]))
            stack.extend(reversed(frames))


def _multiplicities(sizes, budget):
    """All vectors n >= 1 with sum n_i * sizes_i < budget."""
    base = sum(sizes)
    if base >= budget:
        return
    k = len(sizes)

    def rec(i, cur, tot):
        if i == k:
            yield tuple(cur)
            return
        n = 1
        t = tot
        while True:
            yield from rec(i + 1, cur + [n], t)
            n += 1
            t += sizes[i]
            if t >= budget:
                break

    yield from rec(0, [], base)


def enumerate_clusters(model: PolymerModel, m: float, polymers: Optional[Sequence[Polymer]] = None):
    """Clusters of total size < m, as multisets (see Cluster)."""
    pol = list(polymers) if polymers is not None else [g for g in model.polymers if g.size < m]
    for g in pol:
        if g.size <= 0:
            raise ValueError("polymer sizes must be positive")
    adj = model.incompatibility_lists(pol)
    adj_sets = [set(a) for a in adj]
    sizes = [g.size for g in pol]
    out = []
    for sub, tot in _connected_supports(adj, sizes, m):
        sub = tuple(sorted(sub))
        for mult in _multiplicities([sizes[i] for i in sub], m):
            k = sum(mult)
            if k > URSELL_CAP:
                continue
            c = Cluster(sub, mult, sum(n * sizes[i] for i, n in zip(sub, mult)), Fraction(0))
            kk, edges = c.incompatibility_graph(adj_sets)
            sym = Fraction(math.factorial(k))
            for n in mult:
                sym /= math.factorial(n)
            coef = ursell((kk, edges)) * sym
            out.append(Cluster(sub, mult, c.size, coef))
    out.sort(key=lambda c: (c.size, c.polymers, c.multiplicities))
    return out, pol


def cluster_terms(clusters, pol) -> tuple[np.ndarray, np.ndarray]:
    """(float coefficient, log weight product) per cluster."""
    coef = np.array([float(c.coefficient) for c in clusters], dtype=float)
    lw = np.array([sum(n * pol[i].log_weight for i, n in zip(c.polymers, c.multiplicities))
                   for c in clusters], dtype=float)
    return coef, lw


def _sum_terms(coef, lw) -> float:
    ok = lw > -np.inf
    return math.fsum((coef[ok] * np.exp(lw[ok])).tolist())


def truncated_expansion(model: PolymerModel, m: float) -> float:
    """T_m: sum over clusters of size < m of phi(H) * prod w."""
    clusters, pol = enumerate_clusters(model, m)
    if not clusters:
        return 0.0
    return _sum_terms(*cluster_terms(clusters, pol))


def exhaustive_log_partition(model: PolymerModel) -> float:
    """log Z by summing over all compatible collections (small universes)."""
    pol = model.polymers
    adj = [set(a) for a in model.incompatibility_lists(pol)]
    terms = []

    def rec(i, chosen, lw):
        if i == len(pol):
            terms.append(lw)
            return
        rec(i + 1, chosen, lw)
        if pol[i].log_weight > -math.inf and not (adj[i] & chosen):
            rec(i + 1, chosen | {i}, lw + pol[i].log_weight)

    rec(0, frozenset(), 0.0)
    mx = max(terms)
    return mx + math.log(math.fsum(math.exp(t - mx) for t in terms))


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class KPResult:
    ok: bool
    witness: Optional[Polymer] = None
    reason: str = ""
    checked_up_to: float = 0

    def __bool__(self):
        return self.ok


def kp_bound_exponent(b: float, delta: float) -> float:
    return (3 + math.log(delta)) / b + 3


def kp_verify(model: PolymerModel, b: float, delta: float, m: float) -> KPResult:
    """Check size >= b*|gamma| and w <= exp(-((3+log Delta)/b+3)*size) for all
    polymers of size <= m.  A finite check, not a proof for larger sizes."""
    a = kp_bound_exponent(b, delta)
    for g in model.polymers:
        if g.size > m:
            continue
        if g.size < b * g.vertex_count:
            return KPResult(False, g, "size below b times vertex count", m)
        if g.log_weight > -a * g.size + 1e-12 * max(1.0, abs(a * g.size)):
            return KPResult(False, g, "weight above the convergence bound", m)
    return KPResult(True, None, "", m)


def truncation_error_bound(N: float, m: float) -> float:
    return N * math.exp(-3 * m)


def truncation_size(N: float, eps: float, factor: float = 1.0) -> int:
    """Smallest integer m with N e^{-3m} <= eps/factor, i.e. ceil(log(factor*N/eps)/3)."""
    return max(0, math.ceil(math.log(factor * N / eps) / 3))


# ---------------------------------------------------------------- sampling

class ClusterTable:
    """Precomputed clusters of a universe, summable over sub-universes.

    A sub-universe is a boolean mask over the polymers; a cluster counts
    when all of its polymers are alive.
    """

    def __init__(self, model: PolymerModel, m: float, polymers: Optional[Sequence[Polymer]] = None):
        self.clusters, self.pol = enumerate_clusters(model, m, polymers)
        coef, lw = cluster_terms(self.clusters, self.pol)
        ok = lw > -np.inf
        self.terms = np.where(ok, coef * np.exp(np.where(ok, lw, 0.0)), 0.0)
        self.support = np.zeros((len(self.clusters), len(self.pol)), dtype=bool)
        for j, c in enumerate(self.clusters):
            self.support[j, list(c.polymers)] = True

    def log_Z(self, alive: np.ndarray) -> float:
        if not len(self.clusters):
            return 0.0
        dead = ~np.asarray(alive, dtype=bool)
        ok = ~(self.support[:, dead].any(axis=1))
        return math.fsum(self.terms[ok].tolist())


def draw_log(rng: np.random.Generator, logs) -> int:
    """Index drawn with probability proportional to exp(logs)."""
    logs = np.asarray(logs, dtype=float)
    cum = np.cumsum(np.exp(logs - logs.max()))
    return min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), len(cum) - 1)


def sample_compatible_collection(model: PolymerModel, eps: float, seed=None,
                                 m: Optional[int] = None) -> list[Polymer]:
    """Approximate Gibbs sample of a compatible collection, site by site.

    Each site's conditional law (uncovered, or covered by a given polymer)
    is computed from ratios of truncated expansions on shrinking
    sub-universes.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pol = [g for g in model.polymers if g.log_weight > -math.inf]
    if not pol:
        return []
    N = max(1, model.host_size)
    if m is None:
        m = truncation_size(N, eps, factor=8 * N)
    pol = [g for g in pol if g.size < m]
    if not pol:
        return []
    table = ClusterTable(model, m, pol)
    P = len(pol)
    adj = model.incompatibility_lists(pol)
    kill = np.zeros((P, P), dtype=bool)
    for i in range(P):
        kill[i, i] = True
        kill[i, adj[i]] = True
    sites = sorted({s for g in pol for s in g.sites}, key=repr)
    alive = np.ones(P, dtype=bool)
    chosen = []
    for v in sites:
        covers = np.array([v in g.sites for g in pol])
        cand = np.nonzero(alive & covers)[0]
        if cand.size == 0:
            continue
        base = table.log_Z(alive)
        rest = alive & ~covers
        logs = [table.log_Z(rest) - base]
        for i in cand:
            logs.append(pol[i].log_weight + table.log_Z(rest & ~kill[i]) - base)
        logs = np.array(logs)
        r = draw_log(rng, logs)
        if r == 0:
            alive = rest
        else:
            i = cand[r - 1]
            chosen.append(pol[i])
            alive = rest & ~kill[i]
    return chosen
