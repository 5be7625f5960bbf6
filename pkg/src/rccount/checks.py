"""Self-checks run by ``rccount verify`` and the acceptance tests.

Each suite returns a CheckResult; none of them raise on a failed check.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .contour import (Region, compatible, decompose, enumerate_contours, inside, reconstruct)
from .lattice import EdgeConfig, build_torus, complete_graph, cycle_graph, grid_graph, path_graph
from .oracle import (classify_configurations, contour_weight, exact_contour_split, exact_Z_potts,
                     exact_Z_rc, rc_weight)


@dataclass
class CheckResult:
    suite: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_record(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "seconds": round(self.seconds, 3),
                **self.detail}


def _edge_set(T, mask: int) -> EdgeConfig:
    return EdgeConfig.from_edges(T, [e for e in range(T.num_edges) if mask >> e & 1])


def roundtrip_ok(T, A) -> bool:
    return reconstruct(decompose(T, A)) == A


def bijection(d: int = 2, n: int = 3, samples: Optional[int] = None, seed: int = 0) -> CheckResult:
    """reconstruct(decompose(A)) == A, exhaustively or on random edge sets.

    Random edge sets use a fresh edge density per sample so that both sparse
    and dense configurations are covered.
    """
    T = build_torus(d, n)
    bad = []
    if samples is None:
        if T.num_edges > 26:
            raise ValueError("exhaustive roundtrip needs at most 26 edges")
        count = 1 << T.num_edges
        for mask in range(count):
            if not roundtrip_ok(T, _edge_set(T, mask)):
                bad.append(mask)
                if len(bad) >= 10:
                    break
    else:
        rng = np.random.default_rng(seed)
        count = samples
        for _ in range(samples):
            a = (rng.random(T.num_edges) < rng.random()).astype(np.uint8)
            A = EdgeConfig.from_array(T, a)
            if not roundtrip_ok(T, A):
                bad.append(A.hex())
                if len(bad) >= 10:
                    break
    return CheckResult("bijection", not bad, {"torus": [d, n], "checked": count, "failures": bad})


def decomposition_split(p=Fraction(1, 2), q=Fraction(2), d: int = 2, n: int = 3) -> CheckResult:
    """Z_tunnel + q Z_ord + Z_dis == Z^RC with no rounding when p, q are rational."""
    T = build_torus(d, n)
    split = exact_contour_split(T, p, q)
    Z = exact_Z_rc(T, p, q).value
    ok = split.Z_tunnel + split.qZ_ord + split.Z_dis == Z
    return CheckResult("decomposition", bool(ok), {
        "p": str(p), "q": str(q), "Z_rc": str(Z), "Z_tunnel": str(split.Z_tunnel),
        "qZ_ord": str(split.qZ_ord), "Z_dis": str(split.Z_dis)})


def weight_identity(p=Fraction(1, 3), q=Fraction(5), d: int = 2, n: int = 3,
                    rel_tol: float = 1e-9) -> CheckResult:
    """Contour-side weight of each edge set equals its random-cluster weight.

    Both weights depend on A only through the classifier statistics, so each
    distinct statistics row is checked once, exactly and in floating point.
    """
    T = build_torus(d, n)
    st = classify_configurations(T)
    rows = np.unique(st[:, :6], axis=0)
    E, nv = T.num_edges, T.num_vertices
    exact_bad = float_bad = 0
    pf, qf = float(p), float(q)
    for r in rows:
        nA, c = int(r[1]), int(r[2])
        if contour_weight(r, nv, d, p, q) != rc_weight(nA, c, E, p, q):
            exact_bad += 1
        lhs = contour_weight(r, nv, d, pf, qf)
        rhs = rc_weight(nA, c, E, pf, qf)
        if abs(lhs - rhs) > rel_tol * abs(rhs):
            float_bad += 1
    return CheckResult("weight-identity", exact_bad == 0 and float_bad == 0, {
        "configurations": int(st.shape[0]), "distinct_rows": int(rows.shape[0]),
        "exact_failures": exact_bad, "float_failures": float_bad})


def boundary_parity(d: int = 2, n: int = 3) -> CheckResult:
    """Total boundary size equals 2d|V(A)| - 2|A| for every A."""
    T = build_torus(d, n)
    st = classify_configurations(T)
    E = T.num_edges
    ends = T.edge_endpoints()
    masks = np.arange(1 << E, dtype=np.int64)
    touched = np.zeros(masks.shape[0], dtype=np.int64)
    for v in range(T.num_vertices):
        inc = np.zeros_like(masks)
        for e in np.nonzero((ends[:, 0] == v) | (ends[:, 1] == v))[0]:
            inc |= (masks >> int(e)) & 1
        touched += inc
    expect = 2 * d * touched - 2 * st[:, 1]
    bad = int((st[:, 5] != expect).sum())
    odd = int((st[:, 5] % 2).sum())
    return CheckResult("parity", bad == 0 and odd == 0, {"mismatches": bad, "odd_totals": odd})


def harvest_contours(d: int = 2, n: int = 3, max_size: int = 6) -> set:
    """Every labelled contour of size <= max_size produced by decompose on T^d_n."""
    T = build_torus(d, n)
    out = set()
    for mask in range(1 << T.num_edges):
        for g in decompose(T, _edge_set(T, mask)).contours:
            if g.size <= max_size:
                out.add(g)
    return out


def recursive_levels(contours) -> dict:
    """Levels from pairwise containment tests, memoised recursion."""
    contours = list(contours)
    inner = {g: [h for h in contours if h is not g and compatible(g, h) and inside(h, g)]
             for g in contours}
    memo: dict = {}

    def level(g):
        if g not in memo:
            memo[g] = 0 if not inner[g] else 1 + max(level(h) for h in inner[g])
        return memo[g]

    return {g: level(g) for g in contours}


def enumeration(d: int = 2, n: int = 3, m: int = 6) -> CheckResult:
    T = build_torus(d, n)
    listing = enumerate_contours(Region.whole(T), m)
    listed = set(listing.all())
    harvested = harvest_contours(d, n, m)
    levels = recursive_levels(listed)
    level_bad = sum(1 for g in listed if levels[g] != listing.level[g])
    ok = listed == harvested and level_bad == 0
    return CheckResult("enumeration", ok, {
        "listed": len(listed), "harvested": len(harvested),
        "missing": len(harvested - listed), "extra": len(listed - harvested),
        "level_mismatches": level_bad,
        "max_level": max(listing.level.values(), default=0)})


def oracle_graphs():
    return [path_graph(2), cycle_graph(3), complete_graph(4), grid_graph(2, 2),
            grid_graph(2, 3), cycle_graph(5)]


def fk_identity(q: int = 3, betas=(0.1, 0.5, 1.0, 2.0), rel_tol: float = 1e-12) -> CheckResult:
    """Potts against random-cluster partition functions under both Hamiltonian conventions.

    Rewarding monochromatic edges gives e^{beta|E|} Z^RC; penalising
    bichromatic edges gives Z^RC itself, with p = 1 - e^{-beta}.
    """
    worst = 0.0
    for G in oracle_graphs():
        for beta in betas:
            zr = float(exact_Z_rc(G, -math.expm1(-beta), q).value)
            reward = float(exact_Z_potts(G, beta, q, hamiltonian="monochromatic").value)
            penalty = float(exact_Z_potts(G, beta, q, hamiltonian="bichromatic").value)
            worst = max(worst, abs(reward - math.exp(beta * G.num_edges) * zr) / reward,
                        abs(penalty - zr) / zr)
    return CheckResult("fk-identity", worst <= rel_tol, {"q": q, "max_rel_error": worst})


SUITES: dict[str, Callable[[], CheckResult]] = {
    "bijection": bijection,
    "decomposition": decomposition_split,
    "weight-identity": weight_identity,
    "parity": boundary_parity,
    "enumeration": enumeration,
    "fk-identity": fk_identity,
}


def run_suite(name: str, **kwargs) -> CheckResult:
    if name not in SUITES:
        raise KeyError(name)
    t0 = time.perf_counter()
    res = SUITES[name](**kwargs)
    res.seconds = time.perf_counter() - t0
    return res
