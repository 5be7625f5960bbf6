"""Contour partition functions, inductive contour weights and the counting
algorithms built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .contour import (DIS, LABELS, ORD, Contour, Region, _corner_set, compatible, decompose,
                      embed_simply_connected, enumerate_contours, flip, inside, mutually_external)
from .errors import (BudgetExceeded, DecayViolation, MissingConstant, RegimeMismatch, Timeout)
from .lattice import TorusGraph, build_torus
from .oracle import _mix, _num, exact_contour_split, rc_weight
from .polymer import PartitionEstimate, Polymer, PolymerModel, truncated_expansion

REGION_BUDGET = 400_000


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class PhaseParams:
    q: float
    beta: float
    d: int
    p: float
    e_ord: float
    e_dis: float
    kappa: float
    beta_c: float
    beta_h: float
    regime: str

    def e(self, label: str) -> float:
        return self.e_ord if label == ORD else self.e_dis

    def stable_labels(self) -> tuple:
        return {"critical": (ORD, DIS), "supercritical": (ORD,), "HT-mid": (DIS,)}.get(self.regime, ())


def regime_of(beta: float, beta_c: float, beta_h: float) -> str:
    if beta <= beta_h:
        return "HT"
    if math.isclose(beta, beta_c, rel_tol=1e-12, abs_tol=1e-12):
        return "critical"
    return "supercritical" if beta > beta_c else "HT-mid"


def phase_constants(q: float, beta: float, d: int, beta_c: Optional[float] = None) -> PhaseParams:
    q = float(q)
    beta = float(beta)
    if q <= 1:
        raise ValueError("q must exceed 1")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if beta <= 0:
        raise ValueError("contour quantities need beta > 0")
    lq = math.log(q)
    bc = lq / d if beta_c is None else float(beta_c)
    bh = 3 * lq / (4 * d)
    p = -math.expm1(-beta)
    # log(e^b - 1) without overflow
    le = beta + math.log(-math.expm1(-beta))
    return PhaseParams(q, beta, d, p, -d * math.log(p), d * beta - lq, 0.5 * le, bc, bh,
                       regime_of(beta, bc, bh))


@dataclass
class ConstantEstimates:
    """Regime constants; each value carries a provenance tag."""

    c: float = 1 / 16
    c_decay: float = 0.5
    a_dis: Optional[float] = None
    a_ord: Optional[float] = None
    b_dis: Optional[float] = None
    f: Optional[float] = None
    n_cap: int = 6
    provenance: dict = field(default_factory=lambda: {"c": "configured", "c_decay": "configured"})

    def eps_n(self, beta: float, n: int) -> float:
        return 2 * math.exp(-self.c * beta * n)

    def set(self, key: str, value: float, tag: str = "configured"):
        setattr(self, key, float(value))
        self.provenance[key] = tag

    def used(self) -> dict:
        out = {}
        for k in ("c", "c_decay", "a_dis", "a_ord", "b_dis", "f"):
            v = getattr(self, k)
            if v is not None:
                out[k] = {"value": v, "provenance": self.provenance.get(k, "configured")}
        return out


def truncation_depth(N: int, eps: float) -> int:
    return max(1, math.ceil(math.log(8 * N * N / eps) / 3))


def flip_bound(a: float, q: float, eps: float, kappa: float, m: float, extra: float = 3) -> int:
    """M = (2/a)(log(32q/eps) + (kappa + extra) m), rounded up."""
    if a is None or a <= 0:
        raise MissingConstant("flip bound needs a positive free-energy gap")
    return math.ceil((2 / a) * (math.log(32 * q / eps) + (kappa + extra) * m))


# ---------------------------------------------------------------- exact values

class ContourAlgebra:
    """Exact per-object factors: e^{-e_l} per vertex and e^{-kappa} powers per
    contour, written with p and q so that rational input stays rational."""

    def __init__(self, d: int, p, q):
        p, q = _mix(_num(p), _num(q))
        self.d, self.p, self.q = d, p, q
        self.vol_factor = {ORD: p ** d, DIS: q * (1 - p) ** d}
        self.y = (1 - p) / p

    def volume(self, label: str, k: int):
        return self.vol_factor[label] ** k

    def boundary(self, gamma: Contour, label: str):
        if gamma.size % 2:
            raise ValueError("contour of odd size")
        v = self.y ** (gamma.size // 2)
        return v * self.q if label == DIS else v

    @property
    def zero(self):
        return self.p * 0

    @property
    def one(self):
        return self.p * 0 + 1


def _algebra(d, p, q) -> ContourAlgebra:
    return ContourAlgebra(d, p, q)


_REGION_LISTINGS: dict = {}


def region_contours(region: Region, budget: int = REGION_BUDGET):
    """All contours of every size in a region (cached)."""
    if region.is_whole:
        raise BudgetExceeded("the whole torus is handled by classification, not enumeration")
    key = region.key
    if key not in _REGION_LISTINGS:
        big = 4 * int(region.cells.sum()) + 4
        _REGION_LISTINGS[key] = enumerate_contours(region, big, budget=budget)
    return _REGION_LISTINGS[key]


def external_families(contours: Sequence[Contour], total: Optional[int] = None,
                      max_ext: Optional[int] = None):
    """Sets of pairwise mutually external contours, with |Ext| <= max_ext when
    ``total`` (the region vertex count) and ``max_ext`` are given."""
    k = len(contours)
    ok = [[False] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            ok[i][j] = ok[j][i] = mutually_external(contours[i], contours[j])
    ints = [g.interior_vertex_count() for g in contours]

    def rec(start, chosen, covered):
        if max_ext is None or total - covered <= max_ext:
            yield tuple(contours[i] for i in chosen)
        for i in range(start, k):
            if all(ok[i][j] for j in chosen):
                yield from rec(i + 1, chosen + [i], covered + ints[i])

    yield from rec(0, [], 0)


def compatible_families(contours: Sequence[Contour]):
    """Sets of pairwise compatible contours (nesting allowed)."""
    k = len(contours)
    ok = [[False] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            ok[i][j] = ok[j][i] = compatible(contours[i], contours[j])

    def rec(start, chosen):
        yield tuple(contours[i] for i in chosen)
        for i in range(start, k):
            if all(ok[i][j] for j in chosen):
                yield from rec(i + 1, chosen + [i])

    yield from rec(0, [])


_EXACT_MEMO: dict = {}


def _key(p, q):
    return (str(p), str(q))


def Z_contour_exact(region, label: str, p, q, method: str = "recursion"):
    """Exact Z_label(region).

    method "recursion": sum over mutually external label-contours with exact
    interior values; "configurations": for an interior region with the label
    of its contour's inside, sum RC weights of the edge sets that keep the
    contour and only change the inside; the whole torus always uses
    exhaustive classification.
    """
    if isinstance(region, TorusGraph):
        region = Region.whole(region)
    if label not in LABELS:
        raise ValueError(f"unknown label {label!r}")
    T = region.torus
    if region.is_whole:
        split = exact_contour_split(T, p, q)
        return split.Z_ord if label == ORD else split.Z_dis
    if method == "configurations":
        return _Z_by_configurations(region, label, p, q)
    if method != "recursion":
        raise ValueError(f"unknown method {method!r}")
    memo_key = (region.key, label, _key(p, q))
    if memo_key in _EXACT_MEMO:
        return _EXACT_MEMO[memo_key]
    alg = _algebra(T.d, p, q)
    listing = region_contours(region)
    pool = listing.ord if label == ORD else listing.dis
    total = region.num_vertices
    Z = alg.zero
    for fam in external_families(pool):
        term = alg.volume(label, total - sum(g.interior_vertex_count() for g in fam))
        for g in fam:
            term *= alg.boundary(g, label) * Z_contour_exact(Region.interior_of(g), flip(label), p, q)
        Z += term
    _EXACT_MEMO[memo_key] = Z
    return Z


def _Z_by_configurations(region: Region, label: str, p, q, max_free: int = 20):
    gamma = getattr(region, "contour", None)
    if gamma is None or gamma.interior_label != label:
        raise ValueError("configuration route needs an interior region and its inside label")
    T = region.torus
    H = region.H
    d = T.d
    alg = _algebra(d, p, q)
    a0 = np.zeros(T.num_edges, dtype=np.uint8)
    if gamma.label == ORD:
        a0[:] = 1
        a0[region.edges_meeting()] = 0
    else:
        a0[region.edges_inside()] = 1
    free = [e for e in range(T.num_edges) if region.cells[H.edge_cell[e]]]
    if len(free) > max_free:
        raise BudgetExceeded(f"{len(free)} free edges in the configuration route")
    pp, qq = alg.p, alg.q
    E = T.num_edges

    def weight(a):
        from .lattice import connected_components
        _, c = connected_components(T, np.nonzero(a)[0].tolist())
        return rc_weight(int(a.sum()), c, E, pp, qq)

    w0 = weight(a0)
    total = alg.zero
    for mask in range(1 << len(free)):
        a = a0.copy()
        for i, e in enumerate(free):
            a[e] = (mask >> i) & 1
        mc = decompose(T, a)
        if mc.interfaces:
            continue
        if gamma.with_label(gamma.label) not in mc.contours:
            continue
        if any(g.faces != gamma.faces and not inside(g, gamma) for g in mc.contours):
            continue
        total += weight(a)
    return alg.volume(label, region.num_vertices) * total / w0


def exact_K(gamma: Contour, p, q):
    """K_label(gamma) from exact interior partition functions."""
    T = build_torus(gamma.d, gamma.n)
    alg = _algebra(T.d, p, q)
    R = Region.interior_of(gamma)
    zo = Z_contour_exact(R, ORD, p, q)
    zd = Z_contour_exact(R, DIS, p, q)
    if gamma.label == ORD:
        return alg.boundary(gamma, ORD) * zd / zo
    return alg.boundary(gamma, DIS) * zo / zd


def Z_polymer_form(region: Region, label: str, p, q):
    """e^{-e_l |region|} times the sum over compatible label-contour families of prod K."""
    T = region.torus
    alg = _algebra(T.d, p, q)
    pool = region_contours(region).ord if label == ORD else region_contours(region).dis
    K = {g: exact_K(g, p, q) for g in pool}
    tot = alg.zero
    for fam in compatible_families(pool):
        term = alg.one
        for g in fam:
            term *= K[g]
        tot += term
    return alg.volume(label, region.num_vertices) * tot


def Z_flip_exact(region: Region, M: int, p, q, label: str = DIS):
    """Exact flip partition function: the part of Z_label(region) whose
    external collections leave at most M exterior vertices."""
    T = region.torus
    alg = _algebra(T.d, p, q)
    listing = region_contours(region)
    pool = listing.dis if label == DIS else listing.ord
    total = region.num_vertices
    Z = alg.zero
    for fam in external_families(pool, total, M):
        term = alg.volume(label, total - sum(g.interior_vertex_count() for g in fam))
        for g in fam:
            term *= alg.boundary(g, label) * Z_contour_exact(Region.interior_of(g), flip(label), p, q)
        Z += term
    return Z


def exact_log(x) -> float:
    if isinstance(x, Fraction):
        return float(mpmath.log(mpmath.mpf(x.numerator) / x.denominator))
    return float(mpmath.log(x))


# ---------------------------------------------------------------- weight tables

@dataclass
class FlipFamily:
    region: Region
    label: str
    M: int
    members: list
    exterior: list

    def __len__(self):
        return len(self.members)


def flip_enumerate(region: Region, M: int, label: str = DIS) -> FlipFamily:
    """Mutually external label-collections in ``region`` with at most M exterior vertices."""
    listing = region_contours(region)
    pool = listing.dis if label == DIS else listing.ord
    total = region.num_vertices
    members, ext = [], []
    for fam in external_families(pool, total, M):
        e = total - sum(g.interior_vertex_count() for g in fam)
        assert e <= M
        members.append(fam)
        ext.append(e)
    return FlipFamily(region, label, int(M), members, ext)


@dataclass
class WeightTable:
    region: Region
    params: PhaseParams
    m: int
    eps: float
    labels: tuple
    logK: dict = field(default_factory=dict)
    level: dict = field(default_factory=dict)
    inner: dict = field(default_factory=dict)
    thin: set = field(default_factory=set)
    violations: list = field(default_factory=list)
    reads: list = field(default_factory=list)
    M: Optional[int] = None
    _T: dict = field(default_factory=dict)

    @property
    def heuristic(self) -> bool:
        return bool(self.violations)

    def contours(self, label: Optional[str] = None) -> list:
        return [g for g in self.logK if label is None or g.label == label]

    def read(self, g: Contour, for_level: Optional[int]):
        if for_level is not None:
            self.reads.append((for_level, self.level[g]))
        return self.logK[g]

    def T_m(self, region: Region, label: str, for_level: Optional[int] = None) -> float:
        """Truncated expansion of the label-polymer model in ``region``."""
        key = (region.key, label)
        if key in self._T and for_level is None:
            return self._T[key]
        pool = [g for g in self.logK if g.label == label and g.size < self.m
                and region.contains_contour(g)]
        pol = [Polymer(g, self.read(g, for_level), g.size, g.interior_vertex_count(),
                       _corner_set(g.d, g.n, g.faces)) for g in pool]
        val = truncated_expansion(PolymerModel(pol, region.dual_size()), self.m) if pol else 0.0
        self._T[key] = val
        return val

    def log_Z(self, label: str, region: Optional[Region] = None) -> float:
        region = self.region if region is None else region
        return -self.params.e(label) * region.num_vertices + self.T_m(region, label)


def _contained(region_of: Region, pool):
    return [h for h in pool if region_of.contains_contour(h)]


def _prepare(region: Region, eps: float, params: PhaseParams, labels, m: Optional[int] = None):
    N = max(1, region.dual_size())
    m = truncation_depth(N, eps) if m is None else m
    listing = enumerate_contours(region, m)
    pool = [g for g in listing.all() if g.label in labels]
    table = WeightTable(region, params, m, eps, tuple(labels))
    lev = listing.level
    for g in pool:
        table.level[g] = lev[g]
        R = Region.interior_of(g)
        table.inner[g] = [h for h in pool if h is not g and h != g and R.contains_contour(h)]
        if not table.inner[g]:
            table.thin.add(g)
    order = sorted(pool, key=lambda g: (lev[g], g.size, g.label, g.faces))
    return table, order


def _gate(table: WeightTable, g: Contour, logk: float, consts: ConstantEstimates, strict: bool):
    env = -consts.c_decay * table.params.beta * g.size
    if logk > env + 1e-12:
        table.violations.append({"label": g.label, "size": g.size, "logK": logk, "envelope": env})
        if strict:
            raise DecayViolation(f"K weight e^{logk:.4g} above envelope e^{env:.4g}", g)


def _log_prefactor(P: PhaseParams, label: str) -> float:
    return math.log(P.q) if label == DIS else 0.0


def inductive_weights_crit(region: Region, eps: float, params: PhaseParams,
                           consts: Optional[ConstantEstimates] = None, strict: bool = True,
                           m: Optional[int] = None) -> WeightTable:
    """Approximate K weights for both labels, level by level."""
    consts = consts or ConstantEstimates()
    table, order = _prepare(region, eps, params, LABELS, m)
    P = params
    for g in order:
        ell = g.label
        other = flip(ell)
        R = Region.interior_of(g)
        k = R.num_vertices
        logk = _log_prefactor(P, ell) - P.kappa * g.size - (P.e(other) - P.e(ell)) * k
        if g not in table.thin:
            logk += (table.T_m(R, other, table.level[g]) - table.T_m(R, ell, table.level[g]))
        table.logK[g] = logk
        _gate(table, g, logk, consts, strict)
    return table


def _flip_log(region: Region, M: int, unstable: str, table: WeightTable, for_level=None) -> float:
    """log of the flip sum over unstable-label external collections."""
    P = table.params
    stable = flip(unstable)
    fam = flip_enumerate(region, M, unstable)
    terms = []
    for members, ext in zip(fam.members, fam.exterior):
        t = -P.e(unstable) * ext
        for h in members:
            Rh = Region.interior_of(h)
            t += (_log_prefactor(P, unstable) - P.kappa * h.size - P.e(stable) * Rh.num_vertices
                  + table.T_m(Rh, stable, for_level))
        terms.append(t)
    mx = max(terms)
    return mx + math.log(math.fsum(math.exp(t - mx) for t in terms))


def flip_partition(region: Region, M: int, table: WeightTable, label: str = DIS) -> float:
    """log of the flip partition function with approximate interior values."""
    return _flip_log(region, M, label, table)


def _inductive_unstable(region, eps, params, consts, strict, stable, gap, extra, m):
    consts = consts or ConstantEstimates()
    if gap is None:
        raise MissingConstant(f"a_{flip(stable)} is required")
    table, order = _prepare(region, eps, params, (stable,), m)
    P = params
    N = max(1, region.dual_size())
    eps1 = eps / N
    M = flip_bound(gap, P.q, eps1, P.kappa, table.m, extra)
    table.M = M
    unstable = flip(stable)
    for g in order:
        R = Region.interior_of(g)
        k = R.num_vertices
        logk = _log_prefactor(P, stable) - P.kappa * g.size
        if g in table.thin and not _has_unstable_contours(R, unstable):
            logk -= (P.e(unstable) - P.e(stable)) * k
        else:
            lev = table.level[g]
            logk += _flip_log(R, M, unstable, table, lev) - (-P.e(stable) * k + table.T_m(R, stable, lev))
        table.logK[g] = logk
        _gate(table, g, logk, consts, strict)
    return table


def _has_unstable_contours(R: Region, label: str) -> bool:
    listing = region_contours(R)
    return bool(listing.dis if label == DIS else listing.ord)


def inductive_weights_super(region: Region, eps: float, params: PhaseParams,
                            consts: Optional[ConstantEstimates] = None, strict: bool = True,
                            m: Optional[int] = None) -> WeightTable:
    """Ordered weights above the transition; unstable interiors use the flip sum."""
    consts = consts or ConstantEstimates()
    return _inductive_unstable(region, eps, params, consts, strict, ORD, consts.a_dis, 3, m)


def inductive_weights_mid(region: Region, eps: float, params: PhaseParams,
                          consts: Optional[ConstantEstimates] = None, strict: bool = True,
                          m: Optional[int] = None) -> WeightTable:
    """Disordered weights between the high-temperature and transition points."""
    consts = consts or ConstantEstimates()
    return _inductive_unstable(region, eps, params, consts, strict, DIS, consts.a_ord, 4, m)


def build_table(region: Region, eps: float, params: PhaseParams,
                consts: Optional[ConstantEstimates] = None, strict: bool = True) -> WeightTable:
    consts = consts or ConstantEstimates()
    if params.regime == "critical":
        return inductive_weights_crit(region, eps, params, consts, strict)
    if params.regime == "supercritical":
        if consts.a_dis is None:
            estimate_a_dis(params.q, params.beta, params.d, consts)
        return inductive_weights_super(region, eps, params, consts, strict)
    if params.regime == "HT-mid":
        if consts.a_ord is None:
            estimate_a_ord(params.q, params.beta, params.d, consts)
        return inductive_weights_mid(region, eps, params, consts, strict)
    raise RegimeMismatch("no contour expansion at high temperature; use the high-temperature model")


def log_Z_label_estimate(region, label: str, eps: float, params: PhaseParams,
                         consts: Optional[ConstantEstimates] = None, strict: bool = True,
                         table: Optional[WeightTable] = None) -> PartitionEstimate:
    if isinstance(region, TorusGraph):
        region = Region.whole(region)
    if label not in params.stable_labels():
        raise RegimeMismatch(f"label {label} is not stable in regime {params.regime}")
    consts = consts or ConstantEstimates()
    if table is None:
        table = build_table(region, eps, params, consts, strict)
    val = table.log_Z(label, region)
    return PartitionEstimate(val, eps, f"contour-expansion:{label}", table.m,
                             {"regime": params.regime, "M": table.M, "heuristic": table.heuristic,
                              "constants_used": consts.used()})


# ---------------------------------------------------------------- constants

def _finite_volume_free_energies(q, beta, d, n, consts):
    """(f_ord, f_dis, provenance) on T^d_n."""
    T = build_torus(d, n)
    if T.num_edges <= 18:
        p = mpmath.mpf(1) - mpmath.exp(-mpmath.mpf(beta))
        split = exact_contour_split(T, p, mpmath.mpf(q))
        fo = -exact_log(split.Z_ord) / T.num_vertices
        fd = -exact_log(split.Z_dis) / T.num_vertices
        return fo, fd, "exact"
    # thin-contour expansion of both labels (no stability requirement)
    P = phase_constants(q, beta, d)
    R = Region.whole(T)
    eps = 0.1
    table, order = _prepare(R, eps, P, LABELS)
    for g in order:
        table.logK[g] = (_log_prefactor(P, g.label) - P.kappa * g.size
                         - (P.e(flip(g.label)) - P.e(g.label)) * g.interior_vertex_count())
    f = [-table.log_Z(l) / T.num_vertices for l in (ORD, DIS)]
    return f[0], f[1], "estimated"


def _estimate_gap(q, beta, d, consts: ConstantEstimates, key: str):
    for n in range(3, consts.n_cap + 1):
        fo, fd, how = _finite_volume_free_energies(q, beta, d, n, consts)
        en = consts.eps_n(beta, n)
        if abs(fo - fd) >= 3 * en:
            consts.set(key, en, f"estimated(n={n},{how})")
            if consts.f is None:
                consts.set("f", min(fo, fd), f"estimated(n={n},{how})")
            if key == "a_dis" and consts.b_dis is None:
                consts.set("b_dis", min(en, consts.c * beta), f"estimated(n={n})")
            return en
    raise Timeout(f"no free-energy separation up to n={consts.n_cap}; beta may be too close to the transition")


def estimate_a_dis(q, beta, d, consts: Optional[ConstantEstimates] = None) -> float:
    """Lower estimate of the disordered free-energy gap above the transition."""
    consts = consts or ConstantEstimates()
    return _estimate_gap(q, beta, d, consts, "a_dis")


def estimate_a_ord(q, beta, d, consts: Optional[ConstantEstimates] = None) -> float:
    """Mirror of estimate_a_dis below the transition."""
    consts = consts or ConstantEstimates()
    return _estimate_gap(q, beta, d, consts, "a_ord")


# ---------------------------------------------------------------- assembly

def dynamics_threshold(beta: float, n: int, d: int, consts: ConstantEstimates) -> float:
    return 4 * math.exp(-consts.c * beta * n ** (d - 1))


def _lse(xs):
    mx = max(xs)
    return mx + math.log(sum(math.exp(x - mx) for x in xs))


def log_Z_torus(q, beta, d, n, eps, seed=None, branch: str = "auto",
                consts: Optional[ConstantEstimates] = None, beta_c: Optional[float] = None,
                strict: bool = False) -> PartitionEstimate:
    """Estimate log Z^RC on T^d_n with p = 1 - e^{-beta}."""
    consts = consts or ConstantEstimates()
    T = build_torus(d, n)
    base = {"q": q, "beta": beta, "d": d, "n": n, "eps": eps, "seed": seed}
    lq = math.log(q)
    bh = 3 * lq / (4 * d)
    if beta <= bh:
        from .ht_model import HTParams, ht_log_partition
        est = ht_log_partition(T, HTParams(q, beta, d), eps)
        est.info.update(base, regime="HT", branch="high-temperature")
        return est
    P = phase_constants(q, beta, d, beta_c)
    auto = "dynamics" if eps < dynamics_threshold(beta, n, d, consts) else "contour"
    chosen = auto if branch == "auto" else branch
    if chosen not in ("contour", "dynamics"):
        raise ValueError(f"unknown branch {branch!r}")
    info = dict(base, regime=P.regime, branch=chosen, auto_branch=auto, beta_c=P.beta_c)
    if chosen == "dynamics":
        from .sampler import annealing_count
        est = annealing_count(T, q, beta, eps, seed)
        est.info.update(info)
        return est
    R = Region.whole(T)
    table = build_table(R, eps, P, consts, strict)
    if P.regime == "critical":
        val = _lse([lq + table.log_Z(ORD), table.log_Z(DIS)])
    elif P.regime == "supercritical":
        val = lq + table.log_Z(ORD)
    else:
        val = table.log_Z(DIS)
    info.update(M=table.M, heuristic=table.heuristic, decay_violations=len(table.violations),
                constants_used=consts.used())
    return PartitionEstimate(val, eps, f"contour:{P.regime}", table.m, info)


def log_Z_boundary(points, bc: str, q, beta, eps, consts: Optional[ConstantEstimates] = None,
                   beta_c: Optional[float] = None, strict: bool = False) -> PartitionEstimate:
    """Estimate log Z^bc on a simply connected region of Z^d."""
    consts = consts or ConstantEstimates()
    pts = [tuple(int(c) for c in x) for x in points]
    emb = embed_simply_connected(pts, bc)
    d = emb.torus.d
    lq = math.log(q)
    bh = 3 * lq / (4 * d)
    info = {"bc": bc, "q": q, "beta": beta, "eps": eps, "region_size": len(set(pts))}
    if bc == "free" and beta <= bh:
        from .ht_model import HTParams, ht_log_partition
        from .lattice import SimpleGraph
        from .oracle import region_graph
        nv, edges = region_graph(pts, "free")
        est = ht_log_partition(SimpleGraph(nv, edges), HTParams(q, beta, d), eps)
        est.info.update(info, regime="HT")
        return est
    P = phase_constants(q, beta, d, beta_c)
    if bc == "wired" and P.regime not in ("critical", "supercritical"):
        raise RegimeMismatch("wired boundary needs beta at or above the transition")
    if bc == "free" and P.regime not in ("critical", "HT-mid"):
        raise RegimeMismatch("free boundary needs beta at or below the transition")
    R = Region.interior_of(emb.contour)
    table = build_table(R, eps, P, consts, strict)
    label = emb.contour.interior_label
    val = table.log_Z(label, R) - emb.log_normalization(P.p, q)
    info.update(regime=P.regime, M=table.M, heuristic=table.heuristic, constants_used=consts.used())
    return PartitionEstimate(val, eps, f"contour-boundary:{bc}", table.m, info)
