"""Approximate samplers: contour-based random cluster sampling, Glauber
dynamics for the Potts model, annealing estimates and the Edwards-Sokal map."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from . import _geometry as geo
from .contour import DIS, ORD, Contour, Region, _corner_set, flip
from .errors import BudgetExceeded, RegimeMismatch
from .lattice import EdgeConfig, SimpleGraph, TorusGraph, build_torus, connected_components
from .polymer import ClusterTable, PartitionEstimate, Polymer, PolymerModel, draw_log
from .ps_count import (ConstantEstimates, PhaseParams, WeightTable, build_table,
                       dynamics_threshold, flip_enumerate, phase_constants, region_contours)

SAMPLE_BUDGET = 20_000_000


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 63 - 1))


@dataclass
class SampleRecord:
    kind: str  # rc or potts
    value: object  # EdgeConfig or colour tuple
    seed: object
    eps: float
    method: str

    def as_record(self) -> dict:
        enc = self.value.hex() if isinstance(self.value, EdgeConfig) else list(map(int, self.value))
        return {"type": self.kind, "encoding": enc, "seed": self.seed, "eps": self.eps,
                "method": self.method}


# ---------------------------------------------------------------- external contours

class ExternalMeasure:
    """Truncated law of the external label-contours of a region.

    Cells of the region are scanned in a fixed order; at each cell the
    sampler decides whether an external contour enclosing it is added, with
    probabilities from truncated expansions of the remaining polymer model.
    """

    def __init__(self, region: Region, label: str, table: WeightTable):
        self.region, self.label, self.table = region, label, table
        m = table.m
        pool = [g for g in table.contours(label) if g.size < m and region.contains_contour(g)]
        self.pool = pool
        P = len(pool)
        pol = [Polymer(g, table.logK[g], g.size, g.interior_vertex_count(),
                       _corner_set(g.d, g.n, g.faces)) for g in pool]
        self.logK = np.array([table.logK[g] for g in pool], dtype=float)
        self.ct = ClusterTable(PolymerModel(pol, region.dual_size()), m, pol) if P else None
        H = region.H
        self.covers = np.zeros((P, H.ncell), dtype=bool)
        for i, g in enumerate(pool):
            self.covers[i] = g.interior_cells().astype(bool)
        self.kill = np.zeros((P, P), dtype=bool)
        self.inner = np.zeros((P, P), dtype=bool)
        corners = [pol[i].sites for i in range(P)]
        for i in range(P):
            self.kill[i, i] = True
            R = Region.interior_of(pool[i])
            for j in range(P):
                if i != j and not corners[i].isdisjoint(corners[j]):
                    self.kill[i, j] = True
                if i != j and R.contains_contour(pool[j]):
                    self.inner[i, j] = True
        self.log_inner = np.array([self.ct.log_Z(self.inner[i]) if P else 0.0 for i in range(P)])
        self.cells = [int(c) for c in np.nonzero(region.cells)[0]]
        self._steps: dict = {}

    def _T(self, alive):
        return self.ct.log_Z(alive) if self.ct is not None else 0.0

    def _step(self, c, alive):
        key = (c, alive.tobytes())
        hit = self._steps.get(key)
        if hit is not None:
            return hit
        cov = self.covers[:, c]
        cand = np.nonzero(alive & cov)[0]
        if cand.size == 0:
            hit = (None, None, None)
        else:
            rest = alive & ~cov
            logs = [self._T(rest)]
            nxt = [rest]
            for i in cand:
                a = rest & ~self.kill[i] & ~self.inner[i]
                logs.append(self.logK[i] + self.log_inner[i] + self._T(a))
                nxt.append(a)
            hit = (np.array(logs), [None] + [int(i) for i in cand], nxt)
        self._steps[key] = hit
        return hit

    def probabilities(self) -> dict:
        """Exact law of the sampler over external collections (small pools)."""
        out: dict = {}

        def rec(k, alive, chosen, lp):
            if k == len(self.cells):
                key = tuple(sorted(chosen))
                out[key] = out.get(key, 0.0) + math.exp(lp)
                return
            logs, idx, nxt = self._step(self.cells[k], alive)
            if logs is None:
                rec(k + 1, alive, chosen, lp)
                return
            norm = np.logaddexp.reduce(logs)
            for l, i, a in zip(logs, idx, nxt):
                rec(k + 1, a, chosen + ([] if i is None else [i]), lp + l - norm)

        rec(0, np.ones(len(self.pool), dtype=bool), [], 0.0)
        return {tuple(self.pool[i] for i in key): v for key, v in out.items()}

    def sample(self, rng: np.random.Generator) -> list[Contour]:
        alive = np.ones(len(self.pool), dtype=bool)
        out = []
        if not self.pool:
            return out
        for c in self.cells:
            logs, idx, nxt = self._step(c, alive)
            if logs is None:
                continue
            r = draw_log(rng, logs)
            alive = nxt[r]
            if idx[r] is not None:
                out.append(self.pool[idx[r]])
        return out


class FlipMeasure:
    """Law of the unstable-label external collections with small exterior."""

    def __init__(self, region: Region, label: str, table: WeightTable, M: int):
        P = table.params
        stable = flip(label)
        self.family = flip_enumerate(region, M, label)
        logs = []
        for members, ext in zip(self.family.members, self.family.exterior):
            t = -P.e(label) * ext
            for h in members:
                Rh = Region.interior_of(h)
                t += ((math.log(P.q) if label == DIS else 0.0) - P.kappa * h.size
                      - P.e(stable) * Rh.num_vertices + table.T_m(Rh, stable))
            logs.append(t)
        self.logs = np.array(logs)

    def probabilities(self) -> np.ndarray:
        w = np.exp(self.logs - self.logs.max())
        return w / w.sum()

    def sample(self, rng: np.random.Generator) -> list[Contour]:
        return list(self.family.members[draw_log(rng, self.logs)])


class ContourSampler:
    """Inductive contour sampler for one torus and one parameter point."""

    def __init__(self, T: TorusGraph, params: PhaseParams, eps: float,
                 consts: Optional[ConstantEstimates] = None, m_mult: float = 1.0,
                 strict: bool = False):
        self.T = T
        self.params = params
        self.eps = eps
        self.consts = consts or ConstantEstimates()
        region = Region.whole(T)
        N = max(1, region.dual_size())
        self.eps_call = eps * eps / (9 * N * N)
        m = max(1, math.ceil(m_mult * math.log(N / self.eps_call) / 3))
        self.table = _table_with_m(region, eps, params, self.consts, strict, m)
        self.m = self.table.m
        self.stable = params.stable_labels()
        self._ext: dict = {}
        self._flip: dict = {}
        H = geo.half_lattice(T.d, T.n)
        self.H = H

    def external(self, region: Region, label: str) -> ExternalMeasure:
        key = (region.key, label)
        if key not in self._ext:
            self._ext[key] = ExternalMeasure(region, label, self.table)
        return self._ext[key]

    def flip_measure(self, region: Region, label: str) -> FlipMeasure:
        key = (region.key, label)
        if key not in self._flip:
            M = self.table.M if self.table.M is not None else region.num_vertices
            self._flip[key] = FlipMeasure(region, label, self.table, M)
        return self._flip[key]

    def contours(self, region: Region, label: str, rng, depth: int = 0) -> list[Contour]:
        """All contours of one inductive draw, outermost first."""
        if depth > self.H.ncell:
            raise RuntimeError("contour recursion deeper than the number of cells")
        if label in self.stable:
            gam = self.external(region, label).sample(rng)
        else:
            gam = self.flip_measure(region, label).sample(rng)
        out = list(gam)
        for g in gam:
            out += self.contours(Region.interior_of(g), flip(label), rng, depth + 1)
        return out

    def configuration(self, contours: Sequence[Contour], top: str, verify: bool = False) -> np.ndarray:
        H = self.H
        lab = np.full(H.ncell, 1 if top == ORD else 0, dtype=np.uint8)
        for g in sorted(contours, key=lambda g: -int(g.interior_cells().sum())):
            lab[g.interior_cells().astype(bool)] = 1 if g.interior_label == ORD else 0
        a = H.edges_from_cells(lab).astype(np.uint8)
        if verify and not np.array_equal(geo.thicken(a, H.req, H.is_vertex), lab):
            raise RuntimeError("sampled contours do not come from an edge set")
        return a

    def sample_label(self, label: str, rng, verify: bool = False) -> np.ndarray:
        gam = self.contours(Region.whole(self.T), label, rng)
        return self.configuration(gam, label, verify)

    def branch_probability(self) -> float:
        """Probability of the ordered branch at the transition point."""
        lq = math.log(self.params.q)
        lo = lq + self.table.log_Z(ORD)
        ld = self.table.log_Z(DIS)
        return 1.0 / (1.0 + math.exp(ld - lo))

    def sample(self, rng, verify: bool = False) -> np.ndarray:
        reg = self.params.regime
        if reg == "critical":
            label = ORD if rng.random() < self.branch_probability() else DIS
        elif reg == "supercritical":
            label = ORD
        elif reg == "HT-mid":
            label = DIS
        else:
            raise RegimeMismatch("contour sampling needs beta above the high-temperature point")
        return self.sample_label(label, rng, verify)


def _table_with_m(region, eps, params, consts, strict, m):
    from .ps_count import (estimate_a_dis, estimate_a_ord, inductive_weights_crit,
                           inductive_weights_mid, inductive_weights_super)
    if params.regime == "critical":
        return inductive_weights_crit(region, eps, params, consts, strict, m)
    if params.regime == "supercritical":
        if consts.a_dis is None:
            estimate_a_dis(params.q, params.beta, params.d, consts)
        return inductive_weights_super(region, eps, params, consts, strict, m)
    if params.regime == "HT-mid":
        if consts.a_ord is None:
            estimate_a_ord(params.q, params.beta, params.d, consts)
        return inductive_weights_mid(region, eps, params, consts, strict, m)
    raise RegimeMismatch("contour sampling needs beta above the high-temperature point")


def sample_external(region: Region, label: str, eps: float, params: PhaseParams, seed=None,
                    table: Optional[WeightTable] = None,
                    consts: Optional[ConstantEstimates] = None) -> list[Contour]:
    if label not in params.stable_labels():
        raise RegimeMismatch(f"label {label} is not stable in regime {params.regime}")
    table = table or build_table(region, eps, params, consts, strict=False)
    return ExternalMeasure(region, label, table).sample(make_rng(seed))


def sample_flip(region: Region, label: str, eps: float, params: PhaseParams, seed=None,
                table: Optional[WeightTable] = None, M: Optional[int] = None,
                consts: Optional[ConstantEstimates] = None) -> list[Contour]:
    if label in params.stable_labels():
        raise RegimeMismatch(f"label {label} is stable in regime {params.regime}")
    table = table or build_table(region, eps, params, consts, strict=False)
    M = table.M if M is None else M
    return FlipMeasure(region, label, table, M).sample(make_rng(seed))


def sample_contours_inductive(T: TorusGraph, label: str, eps: float, params: PhaseParams,
                              seed=None, consts: Optional[ConstantEstimates] = None) -> EdgeConfig:
    cs = ContourSampler(T, params, eps, consts)
    return EdgeConfig.from_array(T, cs.sample_label(label, make_rng(seed)))


_SAMPLERS: dict = {}


def contour_sampler(q, beta, d, n, eps, beta_c=None, consts=None) -> ContourSampler:
    key = (float(q), float(beta), d, n, float(eps), beta_c)
    if consts is not None or key not in _SAMPLERS:
        s = ContourSampler(build_torus(d, n), phase_constants(q, beta, d, beta_c), eps, consts)
        if consts is not None:
            return s
        _SAMPLERS[key] = s
    return _SAMPLERS[key]


def sample_rc_torus(q, beta, d, n, eps, seed=None, branch: str = "auto",
                    consts: Optional[ConstantEstimates] = None, beta_c=None,
                    glauber_C: float = 10.0, glauber_c: float = 1.0) -> SampleRecord:
    T = build_torus(d, n)
    rng = make_rng(seed)
    consts = consts or ConstantEstimates()
    lq = math.log(q)
    if beta <= 3 * lq / (4 * d):
        from .ht_model import HTParams, ht_sample
        A = ht_sample(T, HTParams(q, beta, d), eps, rng)
        return SampleRecord("rc", A, seed, eps, "high-temperature")
    auto = "dynamics" if eps < dynamics_threshold(beta, n, d, consts) else "contour"
    chosen = auto if branch == "auto" else branch
    if chosen == "dynamics":
        if float(q) != int(q):
            raise RegimeMismatch("Glauber dynamics need an integer number of colours")
        sweeps = math.ceil(glauber_C * math.exp(glauber_c * n ** (d - 1)))
        col = glauber_potts(T, int(q), beta, sweeps * T.num_vertices, child_seed(rng))
        A = potts_to_rc(T, col, beta, rng)
        return SampleRecord("rc", A, seed, eps, "glauber")
    cs = contour_sampler(q, beta, d, n, eps, beta_c, consts if consts.a_dis or consts.a_ord else None)
    A = EdgeConfig.from_array(T, cs.sample(rng))
    return SampleRecord("rc", A, seed, eps, f"contour:{cs.params.regime}")


# ---------------------------------------------------------------- Potts dynamics

def _csr(G: SimpleGraph):
    ptr = np.zeros(G.num_vertices + 1, dtype=np.int64)
    for v in range(G.num_vertices):
        ptr[v + 1] = ptr[v] + len(G.adjacency[v])
    idx = np.array([u for v in range(G.num_vertices) for u in G.adjacency[v]], dtype=np.int64)
    return ptr, idx


@njit(cache=True)
def _heat_bath_site(col, v, ptr, idx, q, beta, nbc, nbn):
    # distinct neighbour colours and their multiplicities
    k = 0
    for j in range(ptr[v], ptr[v + 1]):
        c = col[idx[j]]
        found = False
        for t in range(k):
            if nbc[t] == c:
                nbn[t] += 1
                found = True
                break
        if not found:
            nbc[k] = c
            nbn[k] = 1
            k += 1
    total = q - k + 0.0
    for t in range(k):
        total += np.exp(beta * nbn[t])
    u = np.random.random() * total
    acc = 0.0
    for t in range(k):
        acc += np.exp(beta * nbn[t])
        if u < acc:
            return nbc[t]
    # a colour absent from the neighbourhood, uniformly
    while True:
        c = np.random.randint(0, q)
        ok = True
        for t in range(k):
            if nbc[t] == c:
                ok = False
                break
        if ok:
            return c


@njit(cache=True)
def _glauber(col, ptr, idx, q, beta, steps, seed):
    np.random.seed(seed)
    nv = col.shape[0]
    maxdeg = 1
    for v in range(nv):
        maxdeg = max(maxdeg, ptr[v + 1] - ptr[v])
    nbc = np.zeros(maxdeg, dtype=np.int64)
    nbn = np.zeros(maxdeg, dtype=np.int64)
    for _ in range(steps):
        v = np.random.randint(0, nv)
        col[v] = _heat_bath_site(col, v, ptr, idx, q, beta, nbc, nbn)
    return col


@njit(cache=True)
def _glauber_record(col, ptr, idx, q, beta, sweeps, burn, seed, out):
    # one index per sweep after burn-in, colourings encoded base q
    np.random.seed(seed)
    nv = col.shape[0]
    maxdeg = 1
    for v in range(nv):
        maxdeg = max(maxdeg, ptr[v + 1] - ptr[v])
    nbc = np.zeros(maxdeg, dtype=np.int64)
    nbn = np.zeros(maxdeg, dtype=np.int64)
    for s in range(burn + sweeps):
        for _ in range(nv):
            v = np.random.randint(0, nv)
            col[v] = _heat_bath_site(col, v, ptr, idx, q, beta, nbc, nbn)
        if s >= burn:
            code = 0
            for v in range(nv - 1, -1, -1):
                code = code * q + col[v]
            out[s - burn] = code
    return out


def glauber_potts(G: SimpleGraph, q: int, beta: float, steps: int, seed=None,
                  init: Optional[np.ndarray] = None) -> np.ndarray:
    """Single-site heat-bath dynamics; returns the final colouring."""
    if q < 2:
        raise ValueError("need at least two colours")
    rng = make_rng(seed)
    col = (np.zeros(G.num_vertices, dtype=np.int64) if init is None
           else np.array(init, dtype=np.int64))
    ptr, idx = _csr(G)
    return _glauber(col, ptr, idx, int(q), float(beta), int(steps), child_seed(rng) % (2 ** 32))


def glauber_trace(G: SimpleGraph, q: int, beta: float, sweeps: int, burn: int = 100,
                  seed=None) -> np.ndarray:
    """Colouring index (base q, vertex 0 least significant) after each sweep."""
    rng = make_rng(seed)
    col = rng.integers(0, q, G.num_vertices).astype(np.int64)
    ptr, idx = _csr(G)
    out = np.zeros(sweeps, dtype=np.int64)
    return _glauber_record(col, ptr, idx, int(q), float(beta), int(sweeps), int(burn),
                           child_seed(rng) % (2 ** 32), out)


def heat_bath_law(G: SimpleGraph, q: int, beta: float, col: Sequence[int], v: int) -> np.ndarray:
    """Conditional law of the colour at v given the others."""
    nb = [col[u] for u in G.adjacency[v]]
    w = np.array([math.exp(beta * sum(1 for c in nb if c == a)) for a in range(q)])
    return w / w.sum()


def transition_matrix(G: SimpleGraph, q: int, beta: float) -> np.ndarray:
    """Dense one-step kernel of the random-site heat-bath chain (tiny graphs)."""
    nv = G.num_vertices
    S = q ** nv
    P = np.zeros((S, S))
    for s in range(S):
        col = [(s // q ** v) % q for v in range(nv)]
        for v in range(nv):
            law = heat_bath_law(G, q, beta, col, v)
            for a in range(q):
                t = s + (a - col[v]) * q ** v
                P[s, t] += law[a] / nv
    return P


def bichromatic(G: SimpleGraph, col) -> int:
    return sum(1 for u, v in G.edges if col[u] != col[v])


def potts_to_rc(G: SimpleGraph, col, beta: float, seed=None) -> EdgeConfig:
    """Keep each monochromatic edge with probability p = 1 - e^{-beta}."""
    rng = make_rng(seed)
    p = -math.expm1(-beta)
    keep = [e for e, (u, v) in enumerate(G.edges) if col[u] == col[v] and rng.random() < p]
    return EdgeConfig.from_edges(G, keep)


def edwards_sokal(G: SimpleGraph, A, q: int, seed=None, bc: str = "free",
                  boundary: Sequence[int] = (), r: int = 0) -> np.ndarray:
    """Colour each component of (V, A) uniformly; with bc="wired", components
    meeting ``boundary`` get colour r."""
    rng = make_rng(seed)
    labels, k = connected_components(G, A)
    colors = rng.integers(0, q, k)
    if bc == "wired":
        for v in boundary:
            colors[labels[v]] = r
    elif bc != "free":
        raise ValueError(f"unknown boundary condition {bc!r}")
    return np.array([colors[labels[v]] for v in range(G.num_vertices)], dtype=np.int64)


@njit(cache=True)
def _anneal_level(col, ptr, idx, eu, ev, q, beta, dbeta, burn, samples, seed):
    np.random.seed(seed)
    nv = col.shape[0]
    maxdeg = 1
    for v in range(nv):
        maxdeg = max(maxdeg, ptr[v + 1] - ptr[v])
    nbc = np.zeros(maxdeg, dtype=np.int64)
    nbn = np.zeros(maxdeg, dtype=np.int64)
    acc = 0.0
    for s in range(burn + samples):
        for _ in range(nv):
            v = np.random.randint(0, nv)
            col[v] = _heat_bath_site(col, v, ptr, idx, q, beta, nbc, nbn)
        if s >= burn:
            h = 0
            for e in range(eu.shape[0]):
                if col[eu[e]] != col[ev[e]]:
                    h += 1
            acc += np.exp(-dbeta * h)
    return acc / samples


def annealing_count(G: SimpleGraph, q, beta: float, eps: float, seed=None, reps: int = 3,
                    burn: int = 200, sample_budget: int = SAMPLE_BUDGET) -> PartitionEstimate:
    """log Z^RC(1 - e^{-beta}, q) = log of the bichromatic Potts sum, by a
    telescoping product of Glauber-estimated ratios on a uniform beta grid."""
    if float(q) != int(q):
        raise RegimeMismatch("annealing runs the Potts chain and needs an integer q")
    q = int(q)
    nv, ne = G.num_vertices, G.num_edges
    base = nv * math.log(q)
    if beta <= 0 or ne == 0:
        return PartitionEstimate(base, 0.0, "annealing-exact", None, {"levels": 0})
    levels = max(1, math.ceil(beta * ne))
    dbeta = beta / levels
    samples = max(100, math.ceil(4 * levels / (eps * eps)))
    total = levels * reps * (samples + burn) * nv
    if total > sample_budget:
        raise BudgetExceeded(f"annealing would need {total} single-site updates")
    rng = make_rng(seed)
    ptr, idx = _csr(G)
    ends = G.edge_endpoints()
    eu, ev = ends[:, 0].copy(), ends[:, 1].copy()
    runs = []
    for _ in range(reps):
        col = rng.integers(0, q, nv).astype(np.int64)
        lz = base
        for i in range(levels):
            r = _anneal_level(col, ptr, idx, eu, ev, q, i * dbeta, dbeta, burn, samples,
                              child_seed(rng) % (2 ** 32))
            lz += math.log(r)
        runs.append(lz)
    val = float(np.median(runs))
    return PartitionEstimate(val, eps, "annealing", None,
                             {"levels": levels, "samples_per_level": samples, "reps": reps,
                              "confidence": 0.95, "spread": float(np.ptp(runs))})
