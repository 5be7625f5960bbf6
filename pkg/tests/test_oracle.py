import math
from fractions import Fraction as F
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rccount.lattice import (SimpleGraph, build_torus, complete_graph, connected_components,
                             cycle_graph, grid_graph, path_graph)
from rccount.oracle import (ExactValue, classify_configurations, exact_contour_split, exact_Z_boundary,
                            exact_Z_potts, exact_Z_potts_boundary, exact_Z_rc, potts_distribution,
                            rc_distribution, region_graph, tv_distance)

T23_HALF_TWO = F(9859, 2048)
SQUARE = [(0, 0), (0, 1), (1, 0), (1, 1)]


def brute_rc(G, p, q):
    total = 0
    for bits in product((0, 1), repeat=G.num_edges):
        A = [e for e, b in enumerate(bits) if b]
        c = connected_components(G, A)[1]
        total += p ** len(A) * (1 - p) ** (G.num_edges - len(A)) * q ** c
    return total


def test_closed_forms():
    assert exact_Z_rc(path_graph(2), F(1, 2), 2).value == 3
    assert exact_Z_rc(SimpleGraph(1, []), F(1, 3), 7).value == 7
    assert exact_Z_potts(path_graph(2), 1, 2).value == pytest.approx(2 * math.exp(-1) + 2, rel=1e-15)
    assert exact_Z_potts(cycle_graph(3), 0, 3).value == 27


@pytest.mark.parametrize("G", [cycle_graph(3), grid_graph(2, 3), complete_graph(4), cycle_graph(5)],
                         ids=lambda G: G.name)
def test_matches_brute_force(G):
    assert exact_Z_rc(G, F(1, 3), F(5)).value == brute_rc(G, F(1, 3), F(5))
    assert exact_Z_rc(G, F(1, 3), F(5)).is_rational


def test_float_input_goes_high_precision():
    v = exact_Z_rc(cycle_graph(3), 0.25, 2.5)
    assert not v.is_rational
    assert float(v) == pytest.approx(float(brute_rc(cycle_graph(3), F(1, 4), F(5, 2))), rel=1e-14)


def test_torus_regression(t23):
    assert exact_Z_rc(t23, F(1, 2), 2).value == T23_HALF_TWO


def test_contour_split_reconciles(t23):
    s = exact_contour_split(t23, F(1, 2), 2)
    assert s.Z_tunnel + s.qZ_ord + s.Z_dis == T23_HALF_TWO
    assert (s.Z_tunnel, s.qZ_ord, s.Z_dis) == (F(28987, 16384), F(35447, 16384), F(7219, 8192))
    assert set(np.unique(s.classes)) <= {0, 1, 2}


def test_classifier_totals_are_even(t23):
    st_ = classify_configurations(t23)
    assert st_.shape[0] == 1 << 18
    assert not (st_[:, 5] % 2).any()
    # empty set: all vertices disordered, no boundary
    assert st_[0, 0] == 2 and st_[0, 5] == 0
    # full set: ordered
    assert st_[-1, 0] == 1


def test_region_constants():
    assert exact_Z_boundary([(0, 0)], "free", F(1, 2), 2).value == 2
    assert exact_Z_boundary([(0, 0)], "wired", F(1, 2), 2).value == 2
    assert exact_Z_boundary(SQUARE, "free", F(1, 2), 2).value == F(41, 8)
    assert exact_Z_boundary(SQUARE, "wired", F(1, 2), 2).value == 2
    assert exact_Z_boundary(SQUARE, "free", F(1, 2), 2).value == brute_rc(grid_graph(2, 2), F(1, 2), 2)


def test_region_graph_wired_interior():
    pts = [(i, j) for i in range(3) for j in range(3)]
    nv, edges = region_graph(pts, "wired")
    # eight boundary vertices merge, the centre stays
    assert nv == 2
    assert len(edges) == 12


def test_wired_potts_identity():
    pts = [(i, j) for i in range(3) for j in range(3)]
    q, beta = 3, mpmath.mpf("0.7")
    zp = exact_Z_potts_boundary(pts, beta, q, r=1).value
    zw = exact_Z_boundary(pts, "wired", 1 - mpmath.exp(-beta), q).value
    assert abs(q * zp - zw) < mpmath.mpf(10) ** -40 * zw


def test_potts_conventions():
    G, beta, q = cycle_graph(3), 1.0, 3
    zr = float(exact_Z_rc(G, -math.expm1(-beta), q).value)
    mono = float(exact_Z_potts(G, beta, q, hamiltonian="monochromatic").value)
    assert mono == pytest.approx(math.exp(3 * beta) * zr, rel=1e-12)
    assert float(exact_Z_potts(G, beta, q).value) == pytest.approx(zr, rel=1e-12)


def test_distributions_normalised():
    G = grid_graph(2, 2)
    mu = rc_distribution(G, 0.4, 2.0)
    assert mu.sum() == pytest.approx(1.0)
    pi = potts_distribution(G, 0.7, 3)
    assert pi.shape == (81,) and pi.sum() == pytest.approx(1.0)
    # constant colourings are the most likely
    assert pi.argmax() in (0, 40, 80)


def test_tv_distance():
    assert tv_distance([0.2, 0.8], [0.2, 0.8]) == 0
    assert tv_distance([1, 0], [0.5, 0.5]) == 0.5


@given(st.fractions(F(1, 20), F(19, 20)), st.integers(1, 6))
def test_rational_path_exact(p, q):
    G = grid_graph(2, 2)
    assert exact_Z_rc(G, p, q).value == brute_rc(G, p, q)


def test_log_of_exact_value():
    v = ExactValue(F(1, 3) ** 400, "x")
    assert v.log() == pytest.approx(-400 * math.log(3))
