"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""
import math
import time
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from helpers import A_KP, B, HOST_DEGREE, interval_universe, perturbed, report
from rccount import checks
from rccount.contour import DIS, ORD, Region, construct_from_interior, embed_simply_connected
from rccount.ht_model import HTParams, ht_log_partition
from rccount.lattice import build_torus, complete_graph, cycle_graph, grid_graph
from rccount.oracle import (classify_configurations, coloring_index, exact_contour_split, exact_Z_boundary,
                            exact_Z_rc, potts_distribution, rc_distribution, tv_distance)
from rccount.polymer import exhaustive_log_partition, kp_verify, truncated_expansion
from rccount.ps_count import (ConstantEstimates, Z_contour_exact, Z_flip_exact, estimate_a_dis,
                              log_Z_torus, phase_constants)
from rccount.sampler import contour_sampler, edwards_sokal, glauber_trace, make_rng, transition_matrix


def mp_log_Z(G, q, beta):
    p = 1 - mpmath.exp(-mpmath.mpf(beta))
    return exact_Z_rc(G, p, mpmath.mpf(q)).log()


def test_criterion_01_exact_decomposition():
    t0 = time.perf_counter()
    res = [checks.decomposition_split(F(1, 2), F(2)), checks.decomposition_split(F(1, 3), F(5))]
    ok = all(r.passed for r in res)
    detail = "Z_tunnel+qZ_ord+Z_dis == Z_rc exactly; Z_rc(1/2,2)=" + res[0].detail["Z_rc"]
    assert report(1, ok, detail, time.perf_counter() - t0, 60)


def test_criterion_02_weight_identity():
    t0 = time.perf_counter()
    T = build_torus(2, 3)
    exact = checks.weight_identity(F(1, 3), F(5))
    # float form evaluated per configuration, all 2^18 of them
    st = classify_configurations(T).astype(float)
    p, q, d = 1 / 3, 5.0, 2
    P = phase_constants(q, -math.log1p(-p), d)
    nA, c, c_ord, v_ord, total = st[:, 1], st[:, 2], st[:, 3], st[:, 4], st[:, 5]
    lhs = (c_ord * math.log(q) - P.e_dis * (T.num_vertices - v_ord) - P.e_ord * v_ord - P.kappa * total)
    rhs = nA * math.log(p) + (T.num_edges - nA) * math.log1p(-p) + c * math.log(q)
    worst = float(np.max(np.abs(np.expm1(lhs - rhs))))
    ok = exact.passed and worst <= 1e-9
    detail = (f"exact rows {exact.detail['distinct_rows']} failures {exact.detail['exact_failures']}; "
              f"float max rel {worst:.1e} over {st.shape[0]} sets")
    assert report(2, ok, detail, time.perf_counter() - t0, 60)


def test_criterion_03_bijection():
    t0 = time.perf_counter()
    res = [checks.bijection(2, 3), checks.bijection(2, 4, samples=10_000, seed=1),
           checks.bijection(3, 3, samples=10_000, seed=2)]
    ok = all(r.passed for r in res)
    detail = "roundtrip " + ", ".join(f"T^{r.detail['torus'][0]}_{r.detail['torus'][1]}:"
                                      f"{r.detail['checked']}" for r in res)
    assert report(3, ok, detail, time.perf_counter() - t0, 120)


def test_criterion_04_high_temperature_count():
    t0 = time.perf_counter()
    q, beta = 1e4, 0.05
    P = HTParams(q, beta, 2)
    worst, ok = 0.0, beta <= P.beta_h
    for G in (cycle_graph(3), grid_graph(2, 3), build_torus(2, 3)):
        exact = mp_log_Z(G, q, beta)
        for eps in (0.1, 0.01):
            est = ht_log_partition(G, P, eps)
            err = abs(est.log_value - exact)
            worst = max(worst, err)
            ok = ok and err <= eps and err <= est.rel_error_bound and est.info["kp_verified_up_to"] >= 0
    assert report(4, ok, f"max |log Z_est - log Z| = {worst:.2e}", time.perf_counter() - t0, 60)


def finite_universes(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        host = int(rng.integers(3, 9))
        k = int(rng.integers(1, 7))
        specs = [(int(rng.integers(0, host)), int(rng.integers(1, 4)), float(rng.uniform(0, 3)))
                 for _ in range(k)]
        yield interval_universe(host, specs)


def test_criterion_05_truncation_bound():
    t0 = time.perf_counter()
    ok, worst, n = True, 0.0, 0
    for model in finite_universes(150, 5):
        ok = ok and kp_verify(model, B, HOST_DEGREE, 10).ok
        exact = exhaustive_log_partition(model)
        for m in range(1, 9):
            ratio = abs(truncated_expansion(model, m) - exact) / (model.host_size * math.exp(-3 * m))
            worst = max(worst, ratio)
            ok = ok and ratio <= 1
        n += 1
    assert report(5, ok, f"{n} universes, m=1..8, worst error/bound {worst:.3f}", time.perf_counter() - t0, 10)


def test_criterion_06_weight_stability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ok, worst, n = True, 0.0, 0
    for model in finite_universes(150, 5):
        N = model.host_size
        eps = 1 / (2 * N)
        m = math.ceil(math.log(8 / eps) / 3)
        base = truncated_expansion(model, m)
        for signs in (np.ones(len(model.polymers)), -np.ones(len(model.polymers)),
                      rng.uniform(-1, 1, len(model.polymers))):
            diff = abs(truncated_expansion(perturbed(model, eps, signs), m) - base)
            worst = max(worst, diff / (N * eps / 4))
            ok = ok and diff <= N * eps / 4
        n += 1
    assert report(6, ok, f"{n} universes, worst change/(N eps/4) {worst:.2e}", time.perf_counter() - t0, 10)


def test_criterion_07_enumeration():
    t0 = time.perf_counter()
    r = checks.enumeration(2, 3, 6)
    d = r.detail
    detail = (f"listed {d['listed']} harvested {d['harvested']} missing {d['missing']} extra {d['extra']} "
              f"level mismatches {d['level_mismatches']}")
    assert report(7, r.passed, detail, time.perf_counter() - t0, 120)


def test_criterion_08_contour_count():
    t0 = time.perf_counter()
    q, eps = 1e6, 0.05
    T = build_torus(2, 3)
    bc = math.log(q) / 2
    cases = {"deep": 2 * math.log(q), "mid": 5.5, "critical": bc}
    ok, parts = True, []
    for name, beta in cases.items():
        est = log_Z_torus(q, beta, 2, 3, eps, branch="contour", beta_c=bc)
        err = abs(est.log_value - mp_log_Z(T, q, beta))
        gate = "heuristic" if est.info["heuristic"] else "gates ok"
        ok = ok and err <= eps
        parts.append(f"{name} b={beta:.2f} {est.info['regime']} err {err:.1e} {gate}")
    assert report(8, ok, "; ".join(parts), time.perf_counter() - t0, 300)


def test_criterion_09_flip_sandwich():
    t0 = time.perf_counter()
    q = 10 ** 6
    beta = 2 * math.log(q)
    p = 1 - F(1, q * q)
    eps = 0.05
    P = phase_constants(q, beta, 2)
    a = estimate_a_dis(q, beta, 2, ConstantEstimates())
    T = build_torus(2, 6)
    shapes = {"vertex": [(1, 1)], "domino": [(1, 1), (2, 1)], "L": [(1, 1), (2, 1), (1, 2)],
              "square": [(1, 1), (2, 1), (1, 2), (2, 2)],
              "plus": [(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)],
              "2x3": [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2)]}
    ok, worst, sandwich = True, 0.0, True
    for pts in shapes.values():
        g = construct_from_interior(ORD, {T.vertex_index(x) for x in pts}, T)
        R = Region.interior_of(g)
        Z = Z_contour_exact(R, DIS, p, q)
        M = math.ceil(2 / a * math.log(8 * q / eps) + 2 / a * (P.kappa + 3) * g.size)
        Zf = Z_flip_exact(R, M, p, q)
        err = float((Z - Zf) / Z)
        worst = max(worst, err)
        ok = ok and 0 <= err <= eps
        sandwich = sandwich and all(Z_flip_exact(R, k, p, q) <= Z for k in range(R.num_vertices + 1))
    detail = f"a_dis~{a:.3g}, {len(shapes)} interiors, max rel gap {worst:.1e}, sandwich {sandwich}"
    assert report(9, ok and sandwich, detail, time.perf_counter() - t0, 120)


def test_criterion_10_sampler_tv():
    t0 = time.perf_counter()
    q, eps, n = 50, 0.05, 100_000
    beta = 2 * math.log(q)
    T = build_torus(2, 3)
    cs = contour_sampler(q, beta, 2, 3, eps)
    rng = make_rng(10)
    w = 1 << np.arange(T.num_edges, dtype=np.int64)
    idx = np.fromiter((int(cs.sample(rng, verify=(i < 100)) @ w) for i in range(n)), dtype=np.int64, count=n)
    p = -math.expm1(-beta)
    split = exact_contour_split(T, mpmath.mpf(p), mpmath.mpf(q))
    mu = np.where(split.classes == 1, rc_distribution(T, p, q), 0.0)
    mu /= mu.sum()
    tv = tv_distance(np.bincount(idx, minlength=1 << T.num_edges) / n, mu)
    bound = eps + 3 * math.sqrt(mu.size / n)
    # composite: exact random-cluster draws coloured by Edwards-Sokal on the triangle
    G = cycle_graph(3)
    murc = rc_distribution(G, p, q)
    pi = potts_distribution(G, beta, q)
    draws = rng.choice(murc.size, size=n, p=murc)
    cols = [coloring_index(edwards_sokal(G, [e for e in range(3) if x >> e & 1], q, rng), q) for x in draws]
    tv_es = tv_distance(np.bincount(cols, minlength=pi.size) / n, pi)
    bound_es = eps + 3 * math.sqrt(pi.size / n)
    ok = tv <= bound and tv_es <= bound_es
    detail = (f"TV to ordered law {tv:.4f} (bound {bound:.2f}); Edwards-Sokal TV {tv_es:.4f} "
              f"(bound {bound_es:.2f}); {n} samples each")
    assert report(10, ok, detail, time.perf_counter() - t0, 600)


def test_criterion_11_glauber():
    t0 = time.perf_counter()
    G4 = grid_graph(2, 2)
    Pm = transition_matrix(G4, 3, 1.0)
    pi4 = potts_distribution(G4, 1.0, 3)
    flow = pi4[:, None] * Pm
    db = float(np.abs(flow - flow.T).max())
    G = cycle_graph(3)
    tr = glauber_trace(G, 3, 1.0, 1_000_000, seed=11)
    tv = tv_distance(np.bincount(tr, minlength=27) / tr.size, potts_distribution(G, 1.0, 3))
    ok = db < 1e-15 and tv <= 0.02
    assert report(11, ok, f"detailed balance max {db:.1e}; triangle TV {tv:.4f} after 1e6 sweeps",
                  time.perf_counter() - t0, 300)


def test_criterion_12_boundary_identities():
    t0 = time.perf_counter()
    p, q = F(1, 3), F(5)
    regions = {"vertex": [(0, 0)], "edge": [(0, 0), (0, 1)], "square": [(0, 0), (0, 1), (1, 0), (1, 1)]}
    ok, n = True, 0
    for pts in regions.values():
        for bc in ("free", "wired"):
            emb = embed_simply_connected(pts, bc)
            z = Z_contour_exact(Region.interior_of(emb.contour), emb.contour.interior_label, p, q)
            zb = exact_Z_boundary(pts, bc, p, q).value
            ok = ok and isinstance(z, F) and z == emb.exact_normalization(p, q) * zb
            n += 1
    assert report(12, ok, f"{n} region/boundary pairs equal in rational form", time.perf_counter() - t0, 60)


def test_criterion_13_potts_identity():
    t0 = time.perf_counter()
    r = checks.fk_identity(q=3, betas=(0.1, 0.5, 1.0, 2.0))
    detail = f"max rel error {r.detail['max_rel_error']:.1e} on {len(checks.oracle_graphs())} graphs"
    assert report(13, r.passed, detail, time.perf_counter() - t0, 10)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
