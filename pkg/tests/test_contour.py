from fractions import Fraction as F

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rccount import _geometry as geo
from rccount.checks import recursive_levels
from rccount.contour import (DIS, ORD, Contour, Region, assign_levels, compatible, construct_from_interior,
                             decompose, embed_simply_connected, enumerate_contours, exterior, inside,
                             interior, max_occupied, max_vacant, reconstruct, thicken_boundary,
                             winding_vector)
from rccount.errors import InvalidCollection, NotSimplyConnected
from rccount.lattice import EdgeConfig, build_torus
from rccount.oracle import exact_Z_boundary
from rccount.ps_count import Z_contour_exact

T5 = build_torus(2, 5)


def hole_at(T, x):
    v = T.vertex_index(x)
    return [e for e, (a, b) in enumerate(T.edges) if v not in (a, b)]


def only_contour(T, A):
    mc = decompose(T, A)
    assert len(mc.contours) == 1 and not mc.interfaces
    return mc.contours[0]


def test_boundary_of_trivial_sets():
    assert thicken_boundary(T5, []) == []
    assert thicken_boundary(T5, range(T5.num_edges)) == []


def test_single_edge_boundary():
    (b,) = thicken_boundary(T5, [0])
    assert b.size == 6
    assert winding_vector(b) == (0, 0) and b.is_contour


def test_ring_gives_two_interfaces():
    ring = [T5.edge_index(T5.vertex_index((0, i)), 1) for i in range(5)]
    pieces = thicken_boundary(T5, ring)
    assert len(pieces) == 2
    assert all(b.winding == (1, 0) for b in pieces)
    mc = decompose(T5, ring)
    assert len(mc.interfaces) == 2 and mc.is_tunnel


def test_decompose_trivial_sets():
    mc = decompose(T5, [])
    assert mc.contours == () and mc.interfaces == ()
    assert [l for _, l in mc.labelling] == [DIS]
    full = decompose(T5, range(T5.num_edges))
    assert [l for _, l in full.labelling] == [ORD]
    assert reconstruct(mc) == EdgeConfig.empty(T5)
    assert reconstruct(full) == EdgeConfig.full(T5)


def test_single_edge_interior():
    g = only_contour(T5, [0])
    assert g.label == DIS
    assert interior(g) == frozenset(T5.edges[0])
    assert len(exterior(g)) == 23


def test_vertex_hole():
    g = only_contour(T5, hole_at(T5, (2, 2)))
    assert g.label == ORD and g.size == 4
    assert interior(g) == {T5.vertex_index((2, 2))}


def test_missing_edge_is_smallest_contour():
    T = build_torus(2, 3)
    g = only_contour(T, [e for e in range(18) if e != 4])
    assert g.size == 2 and g.label == ORD
    assert g.interior_vertex_count() == 0


def test_compatibility_by_distance():
    a = only_contour(T5, hole_at(T5, (0, 0)))
    b = only_contour(T5, hole_at(T5, (1, 0)))
    c = only_contour(build_torus(2, 7), hole_at(build_torus(2, 7), (3, 3)))
    T7 = build_torus(2, 7)
    d = only_contour(T7, hole_at(T7, (0, 0)))
    assert not compatible(a, a)
    assert not compatible(a, b)
    assert compatible(c, d) and compatible(d, c)


def test_construct_from_interior():
    u, v = T5.edges[0]
    assert construct_from_interior(DIS, {u, v}, T5) == only_contour(T5, [0])
    w = T5.vertex_index((2, 2))
    assert construct_from_interior(ORD, {w}, T5) == only_contour(T5, hole_at(T5, (2, 2)))
    g = only_contour(T5, [0])
    assert construct_from_interior(DIS, Region.interior_of(g)) == g
    with pytest.raises(InvalidCollection):
        construct_from_interior(DIS, {0, 12}, T5)


@pytest.mark.parametrize("m,ords,diss", [(1, 0, 0), (3, 18, 0), (4, 81, 0)])
def test_small_listings(m, ords, diss):
    L = enumerate_contours(Region.whole(build_torus(2, 3)), m)
    assert (len(L.ord), len(L.dis)) == (ords, diss)


def test_vertex_holes_in_listing():
    T = build_torus(2, 3)
    L = enumerate_contours(Region.whole(T), 4)
    holes = [g for g in L.ord if g.size == 4 and g.interior_vertex_count() == 1]
    assert len(holes) == 9


def test_isoperimetric_caps():
    assert max_occupied(6, 2) == 1
    assert max_vacant(4, 2) == 4
    assert max_vacant(6, 2) == 7


@pytest.fixture(scope="module")
def t24_listing():
    return enumerate_contours(Region.whole(build_torus(2, 4)), 6)


def test_interior_bounds(t24_listing):
    n = 4
    for g in t24_listing.all():
        k = g.interior_vertex_count()
        assert k <= min(g.size ** 2, n / 2 * g.size)


def test_levels_match_recursive_definition(t24_listing):
    listed = t24_listing.all()
    assert recursive_levels(listed) == t24_listing.level
    assert assign_levels(listed) == t24_listing.level


def test_listing_is_translation_invariant(t24_listing):
    from collections import Counter
    sizes = Counter((g.label, g.size) for g in t24_listing.all())
    # contractible contours have full translation orbits
    assert all(v % 16 == 0 for v in sizes.values())


def _external(mc):
    cs = list(mc.contours)
    return [g for g in cs if not any(h is not g and inside(g, h) for h in cs)]


@given(st.integers(3, 4), st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95))
def test_roundtrip_and_exterior(n, seed, density):
    T = build_torus(2, n)
    rng = np.random.default_rng(seed)
    A = EdgeConfig.from_array(T, (rng.random(T.num_edges) < density).astype(np.uint8))
    mc = decompose(T, A)
    assert reconstruct(mc) == A
    total = sum(g.size for g in mc.contours) + sum(b.size for b in mc.interfaces)
    assert total % 2 == 0
    if mc.is_tunnel or not mc.contours:
        return
    ext = _external(mc)
    for a in ext:
        for b in ext:
            if a is not b:
                assert compatible(a, b) and not inside(a, b)
    assert exterior_is_connected(T, ext)


def exterior_is_connected(T, contours):
    H = geo.half_lattice(T.d, T.n)
    inner = np.zeros(H.ncell, dtype=bool)
    for g in contours:
        inner |= g.interior_cells().astype(bool)
    cells = set(np.nonzero(~inner)[0].tolist())
    G = nx.Graph()
    G.add_nodes_from(cells)
    G.add_edges_from((c, int(y)) for c in cells for y in H.cell_nbrs[c] if int(y) in cells)
    return nx.is_connected(G)


def test_exterior_connected_as_region_not_as_vertex_set():
    # three disordered contours leave two diagonal exterior vertices
    T = build_torus(2, 3)
    A = [T.edges.index(e) for e in [(1, 4), (1, 2), (3, 5), (6, 7)]]
    mc = decompose(T, A)
    ext = _external(mc)
    assert len(ext) == 3
    outside = set(range(9)).difference(*[interior(g) for g in ext])
    assert outside == {0, 8}
    assert not any({u, v} == outside for u, v in T.edges)
    assert exterior_is_connected(T, ext)


def test_reconstruct_rejects_bad_labels():
    from rccount.contour import MatchingCollection
    mc = decompose(T5, [0])
    bad = MatchingCollection(mc.d, mc.n, mc.contours, mc.interfaces,
                             tuple((c, ORD) for c, _ in mc.labelling))
    with pytest.raises(InvalidCollection):
        reconstruct(bad)


def test_embedding_sizes():
    emb = embed_simply_connected([(0, 0)], "free")
    assert emb.torus.n == 5 and emb.num_vertices == 1
    assert emb.contour.interior_label == DIS
    emb = embed_simply_connected([(0, 0), (0, 1), (1, 0), (1, 1)], "wired")
    assert emb.torus.n == 12 and emb.contour.interior_label == ORD


def test_not_simply_connected():
    ring = [(i, j) for i in range(3) for j in range(3) if (i, j) != (1, 1)]
    with pytest.raises(NotSimplyConnected):
        embed_simply_connected(ring, "free")
    with pytest.raises(NotSimplyConnected):
        embed_simply_connected([(0, 0), (2, 0)], "free")


@pytest.mark.parametrize("pts", [[(0, 0)], [(0, 0), (0, 1)]], ids=["vertex", "edge"])
@pytest.mark.parametrize("bc", ["free", "wired"])
def test_boundary_identity_small(pts, bc):
    p, q = F(1, 3), F(5)
    emb = embed_simply_connected(pts, bc)
    R = Region.interior_of(emb.contour)
    z = Z_contour_exact(R, emb.contour.interior_label, p, q)
    assert z == emb.exact_normalization(p, q) * exact_Z_boundary(pts, bc, p, q).value


def test_single_vertex_free_closed_form():
    p, q = F(1, 3), F(5)
    emb = embed_simply_connected([(0, 0)], "free")
    z = Z_contour_exact(Region.interior_of(emb.contour), DIS, p, q)
    assert z * (1 - p) ** (-emb.contour.size // 2) == q
