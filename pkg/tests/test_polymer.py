import math
from collections import Counter
from fractions import Fraction as F
from itertools import combinations, product

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import A_KP, B, HOST_DEGREE, interval_universe, log1p_series, perturbed, universe_strategy
from rccount.lattice import path_graph
from rccount.oracle import exact_Z_rc
from rccount.ht_model import HTParams, ht_model
from rccount.polymer import (Polymer, PolymerModel, enumerate_clusters, exhaustive_log_partition,
                             kp_bound_exponent, kp_verify, sample_compatible_collection,
                             truncated_expansion, truncation_error_bound, truncation_size, ursell)


def brute_ursell(k, edges):
    total = 0
    for r in range(len(edges) + 1):
        for sub in combinations(edges, r):
            G = nx.Graph()
            G.add_nodes_from(range(k))
            G.add_edges_from(sub)
            if nx.is_connected(G):
                total += (-1) ** r
    return F(total, math.factorial(k))


def test_ursell_small():
    assert ursell((1, [])) == 1
    assert ursell((2, [(0, 1)])) == F(-1, 2)
    assert ursell((3, [(0, 1), (1, 2), (0, 2)])) == F(1, 3)
    assert ursell((2, [])) == 0


@pytest.mark.parametrize("k", range(1, 8))
def test_ursell_complete(k):
    assert ursell(nx.complete_graph(k)) == F((-1) ** (k - 1), k)


@given(st.integers(1, 5).flatmap(
    lambda k: st.tuples(st.just(k), st.lists(st.tuples(st.integers(0, k - 1), st.integers(0, k - 1)),
                                              max_size=8))))
def test_ursell_against_subset_sum(H):
    k, edges = H
    edges = sorted({tuple(sorted(e)) for e in edges if e[0] != e[1]})
    val = ursell((k, edges))
    assert val == brute_ursell(k, edges)
    # sign alternates with the vertex count
    assert val * (-1) ** (k - 1) >= 0


def test_single_polymer_clusters():
    model = PolymerModel([Polymer("g", math.log(0.1), 1.0, 1, frozenset({0}))], 1)
    clusters, _ = enumerate_clusters(model, 4)
    assert [c.multiplicities for c in clusters] == [(1,), (2,), (3,)]
    assert [c.coefficient for c in clusters] == [1, F(-1, 2), F(1, 3)]
    assert truncated_expansion(model, 4) == pytest.approx(0.1 - 0.005 + 0.001 / 3, rel=1e-12)
    assert truncated_expansion(model, 4) == pytest.approx(0.0953333, abs=1e-7)


def test_empty_universe():
    model = PolymerModel([], 5)
    assert enumerate_clusters(model, 10)[0] == []
    assert truncated_expansion(model, 10) == 0.0
    assert sample_compatible_collection(model, 0.1, seed=0) == []


def test_compatible_pair_has_no_mixed_cluster():
    model = interval_universe(6, [(0, 1, 0), (3, 1, 0)])
    clusters, _ = enumerate_clusters(model, 3)
    assert all(len(c.polymers) == 1 for c in clusters)


def test_self_incompatible_and_symmetric():
    model = interval_universe(6, [(0, 2, 0), (1, 2, 0), (4, 1, 0)])
    a, b, c = model.polymers
    assert not model.compatible(a, a)
    assert model.compatible(a, b) == model.compatible(b, a) is False
    assert model.compatible(a, c) and model.compatible(c, a)


def brute_clusters(model, m, max_len):
    """Clusters from ordered tuples, grouped into multisets."""
    pol = [g for g in model.polymers if g.size < m]
    got = Counter()
    for k in range(1, max_len + 1):
        for tup in product(range(len(pol)), repeat=k):
            if sum(pol[i].size for i in tup) >= m:
                continue
            edges = [(a, b) for a in range(k) for b in range(a + 1, k)
                     if not model.compatible(pol[tup[a]], pol[tup[b]])]
            G = nx.Graph()
            G.add_nodes_from(range(k))
            G.add_edges_from(edges)
            if nx.is_connected(G):
                got[tuple(sorted(Counter(tup).items()))] += ursell((k, edges))
    return {key: v for key, v in got.items() if v != 0}


@given(universe_strategy(st, max_polymers=4))
def test_clusters_match_ordered_tuples(model):
    m = 4
    clusters, pol = enumerate_clusters(model, m)
    mine = {tuple(zip(c.polymers, c.multiplicities)): c.coefficient for c in clusters
            if c.coefficient != 0}
    assert mine == brute_clusters(model, m, 3)


def test_kp_verify_examples():
    a = kp_bound_exponent(0.5, 4)
    assert a == pytest.approx(2 * (3 + math.log(4)) + 3)
    ht = ht_model(path_graph(2), HTParams(1e4, 0.05, 2), 1)
    assert ht.polymers[0].weight == pytest.approx(5.1271e-6, rel=1e-4)
    assert kp_verify(ht, 0.5, 4, 1).ok
    bad = PolymerModel([Polymer("g", 0.0, 1.0, 1, frozenset({0}))], 1)
    res = kp_verify(bad, 0.5, 4, 1)
    assert not res.ok and res.witness.key == "g"
    zero = PolymerModel([Polymer("g", -math.inf, 1.0, 1, frozenset({0}))], 1)
    assert kp_verify(zero, 0.5, 4, 5)


def test_truncation_bound_values():
    assert truncation_error_bound(1, 0) == 1
    assert truncation_error_bound(18, 5) == pytest.approx(18 * math.exp(-15))
    assert truncation_error_bound(18, 5) == pytest.approx(5.5e-6, rel=0.01)
    m = math.log(8 * 100 / 0.8) / 3
    assert truncation_error_bound(100, m) == pytest.approx(0.1)
    assert truncation_size(100, 0.1) == math.ceil(math.log(1000) / 3)


def test_ht_single_edge_against_exact():
    G = path_graph(2)
    P = HTParams(1e4, 0.05, 2)
    m = 6
    T = truncated_expansion(ht_model(G, P, m - 1), m)
    logZ = G.num_edges * -P.beta + 2 * math.log(P.q) + T
    exact = exact_Z_rc(G, P.p, P.q).log()
    assert abs(logZ - exact) <= truncation_error_bound(2, m)


@given(universe_strategy(st))
def test_truncation_within_bound(model):
    N = model.host_size
    assert kp_verify(model, B, HOST_DEGREE, 10).ok
    exact = exhaustive_log_partition(model)
    for m in range(1, 9):
        assert abs(truncated_expansion(model, m) - exact) <= N * math.exp(-3 * m)


@given(universe_strategy(st), st.data())
def test_perturbed_weights_stay_close(model, data):
    N = model.host_size
    eps = 1 / (2 * N)
    m = math.ceil(math.log(8 / eps) / 3)
    signs = [data.draw(st.floats(-1, 1)) for _ in model.polymers]
    diff = truncated_expansion(perturbed(model, eps, signs), m) - truncated_expansion(model, m)
    assert abs(diff) <= N * eps / 4


def test_log1p_series_agrees():
    model = PolymerModel([Polymer("g", math.log(0.05), 1.0, 1, frozenset({0}))], 1)
    for m in range(1, 7):
        assert truncated_expansion(model, m) == pytest.approx(log1p_series(0.05, m - 1), abs=1e-15)


def test_sampler_law_small_model():
    # two overlapping polymers and one separate one; exact law over compatible collections
    model = interval_universe(6, [(0, 2, -5.0), (1, 1, -5.5), (4, 1, -6.0)])
    w = [g.weight for g in model.polymers]
    collections = {(): 1.0, (0,): w[0], (1,): w[1], (2,): w[2], (0, 2): w[0] * w[2], (1, 2): w[1] * w[2]}
    Z = sum(collections.values())
    rng = np.random.default_rng(7)
    n = 3000
    counts = Counter(tuple(sorted(g.key for g in sample_compatible_collection(model, 1e-3, rng)))
                     for _ in range(n))
    tv = 0.5 * sum(abs(counts.get(k, 0) / n - v / Z) for k, v in collections.items())
    assert set(counts) <= set(collections)
    assert tv < 0.04


def test_sampler_weight_zero():
    zero = PolymerModel([Polymer("g", -math.inf, 1.0, 1, frozenset({0}))], 1)
    assert sample_compatible_collection(zero, 0.1, seed=1) == []
