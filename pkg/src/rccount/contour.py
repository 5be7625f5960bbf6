"""Contours and interfaces of thickened edge configurations on the torus.

An edge set A is thickened to the union of closed 1/4-neighbourhoods of its
occupied cubes.  The boundary of that set splits into connected pieces on
the dual half lattice: contours (trivial winding) and interfaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _geometry as geo
from .errors import BudgetExceeded, InvalidCollection, NotSimplyConnected
from .lattice import (EdgeConfig, SimpleGraph, TorusGraph, build_torus,
                      connected_sets, enumerate_connected_edge_sets)

ORD = "ord"
DIS = "dis"
LABELS = (ORD, DIS)


def flip(label: str) -> str:
    return DIS if label == ORD else ORD


@dataclass(frozen=True)
class BoundaryComponent:
    d: int
    n: int
    faces: tuple
    winding: tuple
    size: int

    @property
    def is_contour(self) -> bool:
        return not any(self.winding)


@dataclass(frozen=True)
class Contour:
    """A boundary component with trivial winding, optionally labelled by the
    phase on its exterior side."""

    d: int
    n: int
    faces: tuple
    size: int
    label: Optional[str] = None

    @property
    def winding(self) -> tuple:
        return (0,) * self.d

    def with_label(self, label: Optional[str]) -> "Contour":
        return Contour(self.d, self.n, self.faces, self.size, label)

    @property
    def interior_label(self) -> Optional[str]:
        return None if self.label is None else flip(self.label)

    @property
    def lattice(self):
        return geo.half_lattice(self.d, self.n)

    def interior_cells(self) -> np.ndarray:
        return _interior_cells(self.d, self.n, self.faces)

    def interior_vertex_count(self) -> int:
        H = self.lattice
        return int((self.interior_cells() & H.is_vertex).sum())

    def exterior_vertex_count(self) -> int:
        return self.lattice.T.num_vertices - self.interior_vertex_count()

    def record(self, level: Optional[int] = None) -> dict:
        return {"label": self.label, "size": self.size, "level": level,
                "interior_vertex_count": self.interior_vertex_count(),
                "faces": list(self.faces)}


Interface = BoundaryComponent


@lru_cache(maxsize=200_000)
def _interior_cells(d, n, faces) -> np.ndarray:
    H = geo.half_lattice(d, n)
    comp = np.full(H.nface, -1, dtype=np.int64)
    comp[list(faces)] = 0
    start = H.face_cells[faces[0], 0]
    m = geo.interior_mask(comp, 0, start, H.is_vertex, H.cell_faces, H.cell_nbrs)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=200_000)
def _corner_set(d, n, faces) -> frozenset:
    H = geo.half_lattice(d, n)
    return frozenset(H.face_corners[list(faces)].ravel().tolist())


@lru_cache(maxsize=200_000)
def _halo(d, n, faces) -> np.ndarray:
    H = geo.half_lattice(d, n)
    h = np.unique(H.face_halo[list(faces)].ravel())
    h.setflags(write=False)
    return h


# ---------------------------------------------------------------- regions

class Region:
    """A region of the torus given by a set of half-lattice cells."""

    def __init__(self, d: int, n: int, cells: np.ndarray, name: str = ""):
        self.d, self.n = d, n
        self.H = geo.half_lattice(d, n)
        self.cells = np.asarray(cells, dtype=np.uint8)
        self.cells.setflags(write=False)
        self.key = (d, n, np.packbits(self.cells).tobytes())
        self.name = name
        self.contour = None

    @classmethod
    def whole(cls, T: TorusGraph) -> "Region":
        H = geo.half_lattice(T.d, T.n)
        return cls(T.d, T.n, np.ones(H.ncell, dtype=np.uint8), name="torus")

    @classmethod
    def interior_of(cls, gamma: Contour) -> "Region":
        r = cls(gamma.d, gamma.n, gamma.interior_cells(), name="interior")
        r.contour = gamma
        return r

    @property
    def is_whole(self) -> bool:
        return bool(self.cells.all())

    @property
    def torus(self) -> TorusGraph:
        return self.H.T

    def vertices(self) -> list[int]:
        H = self.H
        vc = np.nonzero(self.cells & H.is_vertex)[0]
        return sorted(int(H.cell_vertex[c]) for c in vc)

    @property
    def num_vertices(self) -> int:
        return int((self.cells & self.H.is_vertex).sum())

    def contains_contour(self, gamma) -> bool:
        """Whether gamma lies at l-infinity distance >= 1/2 from the complement."""
        return bool(self.cells[_halo(self.d, self.n, gamma.faces)].all())

    def edges_inside(self) -> list[int]:
        """Edges whose closed segment lies in the region."""
        H = self.H
        T = H.T
        out = []
        for e, (u, v) in enumerate(T.edges):
            if (self.cells[H.edge_cell[e]] and self.cells[H.vertex_cell[u]]
                    and self.cells[H.vertex_cell[v]]):
                out.append(e)
        return out

    def edges_meeting(self) -> list[int]:
        """Edges whose segment meets the region."""
        H = self.H
        T = H.T
        out = []
        for e, (u, v) in enumerate(T.edges):
            if (self.cells[H.edge_cell[e]] or self.cells[H.vertex_cell[u]]
                    or self.cells[H.vertex_cell[v]]):
                out.append(e)
        return out

    def dual_size(self) -> int:
        """Number of dual faces that can carry a contour lying in the region."""
        H = self.H
        return int(self.cells[H.face_halo].all(axis=1).sum())

    def __eq__(self, other):
        return isinstance(other, Region) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Region(d={self.d}, n={self.n}, vertices={self.num_vertices})"


# ---------------------------------------------------------------- decomposition

def _edge_array(G: TorusGraph, A) -> np.ndarray:
    if isinstance(A, EdgeConfig):
        if A.num_edges != G.num_edges:
            raise ValueError("edge configuration belongs to another graph")
        return A.to_array()
    if isinstance(A, np.ndarray) and A.dtype in (np.uint8, np.bool_) and A.shape == (G.num_edges,):
        return A.astype(np.uint8)
    arr = np.zeros(G.num_edges, dtype=np.uint8)
    arr[list(A)] = 1
    return arr


def _run(G: TorusGraph, a: np.ndarray):
    H = geo.half_lattice(G.d, G.n)
    return H, geo.decompose_kernel(a, H.req, H.is_vertex, H.face_cells, H.face_adj,
                                   H.face_loop, H.face_cross, H.cell_faces, H.cell_nbrs, G.d)


def thickened_cells(G: TorusGraph, A) -> np.ndarray:
    H = geo.half_lattice(G.d, G.n)
    return geo.thicken(_edge_array(G, A), H.req, H.is_vertex)


def _groups(comp, nc):
    order = np.argsort(comp, kind="stable")
    bounds = np.searchsorted(comp[order], np.arange(-1, nc), side="right").tolist()
    order = order.tolist()
    return [tuple(order[bounds[t]:bounds[t + 1]]) for t in range(nc)]


def thicken_boundary(G: TorusGraph, A) -> list[BoundaryComponent]:
    H, res = _run(G, _edge_array(G, A))
    S, B, comp, nc, wind, size = res[:6]
    faces = _groups(comp, nc)
    return [BoundaryComponent(G.d, G.n, faces[t], tuple(int(x) for x in wind[t]), int(size[t]))
            for t in range(nc)]


def winding_vector(c, n: Optional[int] = None) -> tuple:
    """Parities of the intersections of a boundary piece with the fundamental loops."""
    H = geo.half_lattice(c.d, c.n if n is None else n)
    w = [0] * c.d
    for f in c.faces:
        i = H.face_loop[f]
        if i >= 0:
            w[i] ^= 1
    return tuple(w)


@dataclass(frozen=True)
class MatchingCollection:
    d: int
    n: int
    contours: tuple
    interfaces: tuple
    labelling: tuple  # (representative cell, label) per complement component

    @property
    def is_tunnel(self) -> bool:
        return bool(self.interfaces)

    def exterior_label(self) -> Optional[str]:
        """Label of Ext Gamma, or None when interfaces are present."""
        if self.interfaces:
            return None
        H = geo.half_lattice(self.d, self.n)
        inside = np.zeros(H.ncell, dtype=bool)
        for g in self.contours:
            inside |= g.interior_cells().astype(bool)
        free = np.nonzero(~inside)[0]
        if free.size == 0:
            raise InvalidCollection("no cell lies outside every contour")
        lab = dict(self.labelling)
        U = np.zeros(H.nface, dtype=np.uint8)
        for g in self.contours:
            U[list(g.faces)] = 1
        comp, _ = geo.cell_components(U, H.cell_faces, H.cell_nbrs)
        reps = {}
        for c in range(H.ncell):
            reps.setdefault(int(comp[c]), c)
        return lab[reps[int(comp[free[0]])]]

    def classification(self) -> str:
        lab = self.exterior_label()
        return "tunnel" if lab is None else lab


def decompose(G: TorusGraph, A) -> MatchingCollection:
    H, res = _run(G, _edge_array(G, A))
    S, B, comp, nc, wind, size, ccomp, ncc, inner, is_contour, ext_label = res
    faces = _groups(comp, nc)
    contours, interfaces = [], []
    for t in range(nc):
        if is_contour[t]:
            contours.append(Contour(G.d, G.n, faces[t], int(size[t]),
                                    ORD if ext_label[t] == 1 else DIS))
        else:
            interfaces.append(BoundaryComponent(G.d, G.n, faces[t],
                                                tuple(int(x) for x in wind[t]), int(size[t])))
    _, reps = np.unique(ccomp, return_index=True)
    labelling = tuple(sorted((int(c), ORD if S[c] else DIS) for c in reps))
    return MatchingCollection(G.d, G.n, tuple(sorted(contours, key=lambda g: g.faces)),
                              tuple(sorted(interfaces, key=lambda g: g.faces)), labelling)


def compatible(g1, g2) -> bool:
    """Whether two boundary pieces are at l-infinity distance at least 1/2."""
    return _corner_set(g1.d, g1.n, g1.faces).isdisjoint(_corner_set(g2.d, g2.n, g2.faces))


def inside(g1: Contour, g2: Contour) -> bool:
    """Whether the (compatible) contour g1 lies in the interior of g2."""
    H = geo.half_lattice(g1.d, g1.n)
    return bool(g2.interior_cells()[H.face_cells[g1.faces[0], 0]])


def mutually_external(g1: Contour, g2: Contour) -> bool:
    return compatible(g1, g2) and not inside(g1, g2) and not inside(g2, g1)


def reconstruct(mc: MatchingCollection) -> EdgeConfig:
    """The edge set whose decomposition is ``mc``."""
    T = build_torus(mc.d, mc.n)
    H = geo.half_lattice(mc.d, mc.n)
    pieces = list(mc.contours) + list(mc.interfaces)
    U = np.zeros(H.nface, dtype=np.uint8)
    for i, g in enumerate(pieces):
        if not g.faces:
            raise InvalidCollection("empty boundary piece")
        if U[list(g.faces)].any():
            raise InvalidCollection("boundary pieces overlap")
        U[list(g.faces)] = 1
        for h in pieces[:i]:
            if not compatible(g, h):
                raise InvalidCollection("boundary pieces closer than 1/2")
    for g in mc.contours:
        if any(winding_vector(g)):
            raise InvalidCollection("contour with non-trivial winding")
    for g in mc.interfaces:
        if not any(winding_vector(g)):
            raise InvalidCollection("interface with trivial winding")
    comp, nc = geo.cell_components(U, H.cell_faces, H.cell_nbrs)
    lab = {}
    for c, l in mc.labelling:
        if l not in LABELS:
            raise InvalidCollection(f"unknown label {l!r}")
        k = int(comp[c])
        if k in lab:
            raise InvalidCollection("two labels for one component")
        lab[k] = l
    if len(lab) != nc:
        raise InvalidCollection("labelling does not cover every component")
    comp_label = np.array([1 if lab[k] == ORD else 0 for k in range(nc)], dtype=np.uint8)
    S = comp_label[comp]
    fc = H.face_cells
    if (S[fc[:, 0]] == S[fc[:, 1]])[U.astype(bool)].any():
        raise InvalidCollection("labels do not flip across a boundary piece")
    a = H.edges_from_cells(S)
    if not np.array_equal(geo.thicken(a, H.req, H.is_vertex), S):
        raise InvalidCollection("labelling is not the thickening of any edge set")
    if decompose(T, a) != mc:
        raise InvalidCollection("collection does not match its own reconstruction")
    return EdgeConfig.from_array(T, a)


def interior(gamma: Contour) -> frozenset:
    """Vertex set Int(gamma) on the torus."""
    H = geo.half_lattice(gamma.d, gamma.n)
    vc = np.nonzero(gamma.interior_cells() & H.is_vertex)[0]
    return frozenset(int(H.cell_vertex[c]) for c in vc)


def exterior(gamma: Contour) -> frozenset:
    T = build_torus(gamma.d, gamma.n)
    return frozenset(range(T.num_vertices)) - interior(gamma)


# ---------------------------------------------------------------- construction

def _outer_contours(G: TorusGraph, a: np.ndarray):
    """Contours of the boundary of a that lie in no other contour's interior.

    Returns None when interfaces are present.
    """
    H, res = _run(G, a)
    S, B, comp, nc, wind, size, ccomp, ncc, inner, is_contour, ext_label = res
    if nc == 0:
        return []
    if not is_contour.all():
        return None
    first = {}
    for f in np.nonzero(comp >= 0)[0]:
        first.setdefault(int(comp[f]), int(f))
    out = []
    for t in range(nc):
        c = H.face_cells[first[t], 0]
        if any(inner[u, c] for u in range(nc) if u != t):
            continue
        out.append((t, comp, size, ext_label))
    faces = _groups(comp, nc)
    return [Contour(G.d, G.n, faces[t], int(size[t]), ORD if ext_label[t] == 1 else DIS)
            for t, *_ in out]


def construct_from_interior(label: str, region, G: Optional[TorusGraph] = None) -> Contour:
    """Rebuild the contour with exterior label ``label`` whose interior is ``region``.

    ``region`` is a Region, or a vertex set together with the torus ``G``.
    """
    if isinstance(region, Region):
        G = region.torus
        edges = region.edges_inside() if label == DIS else region.edges_meeting()
    else:
        if G is None:
            raise ValueError("a vertex set needs its torus")
        V = set(region)
        if label == DIS:
            edges = [e for e, (u, v) in enumerate(G.edges) if u in V and v in V]
        else:
            edges = [e for e, (u, v) in enumerate(G.edges) if u in V or v in V]
    a = np.zeros(G.num_edges, dtype=np.uint8)
    a[edges] = 1
    if label == ORD:
        a = 1 - a
    outer = _outer_contours(G, a)
    if not outer or len(outer) != 1 or outer[0].label != label:
        raise InvalidCollection("region is not the interior of a single contour")
    return outer[0]


# ---------------------------------------------------------------- enumeration

@dataclass
class ContourListing:
    region: Region
    m: int
    ord: list
    dis: list
    level: dict = field(default_factory=dict)

    def all(self) -> list:
        return self.ord + self.dis

    def records(self) -> list[dict]:
        out = []
        for g in sorted(self.all(), key=lambda g: (self.level[g], g.size, g.label, g.faces)):
            out.append(g.record(self.level[g]))
        return out


def _translates(H, gamma: Contour, shifts) -> list:
    out = []
    fa = np.array(gamma.faces, dtype=np.int64)
    for tab in shifts:
        out.append(Contour(gamma.d, gamma.n, tuple(sorted(tab[fa].tolist())), gamma.size, gamma.label))
    return out


@lru_cache(maxsize=16)
def _shift_tables(d, n):
    H = geo.half_lattice(d, n)
    return [H.face_shift(t) for t in product(range(n), repeat=d)]


def _iso_volume(s: float, d: int) -> float:
    """Largest vertex count with edge boundary at most s in Z^d."""
    return (s / (2 * d)) ** (d / (d - 1)) if d > 1 else math.inf


def max_occupied(m: int, d: int) -> int:
    """Most edges inside a disordered-exterior contour of size at most m."""
    return max(0, math.floor(d * _iso_volume(m, d) - m / 2 + 1e-9))


def max_vacant(m: int, d: int) -> int:
    """Most edges inside an ordered-exterior contour of size at most m."""
    return max(0, math.floor(m / 2 + d * _iso_volume(m, d) + 1e-9))


def enumerate_contours(region, m: int, budget: Optional[int] = None) -> ContourListing:
    """All labelled contours of size at most m lying in ``region``, with levels.

    ``region`` may be a Region or a TorusGraph.  ``budget`` caps the number
    of seed edge sets examined.
    """
    if isinstance(region, TorusGraph):
        region = Region.whole(region)
    T = region.torus
    H = region.H
    d = T.d
    whole = region.is_whole
    found: set = set()
    examined = 0

    def visit(a, want):
        nonlocal examined
        examined += 1
        if budget is not None and examined > budget:
            raise BudgetExceeded(f"contour enumeration exceeded {budget} seed sets")
        outer = _outer_contours(T, a)
        if not outer or len(outer) != 1:
            return
        g = outer[0]
        if g.label == want and g.size <= m and region.contains_contour(g):
            found.add(g)

    if whole:
        seeds = [T.edge_index(0, k) for k in range(d)]
    else:
        seeds = None

    # Canonical generators: the edges inside Int(gamma), all occupied (dis
    # exterior) or all vacant (ord exterior).  With k the number of vertices
    # they touch (dis) or isolate (ord), the size is 2dk - 2|X| (dis) or
    # 2|X| - 2dk (ord); the edge-isoperimetric inequality then caps |X|.
    ends = T.edge_endpoints()
    deg = 2 * d

    # disordered exterior: edge-connected occupied sets inside the region
    inside = set(region.edges_inside())
    cap = min(max_occupied(m, d), len(inside))
    dis_seeds = seeds if whole else sorted(inside)
    base = np.zeros(T.num_edges, dtype=np.uint8)
    for s in dis_seeds:
        if s not in inside or cap < 1:
            continue
        allowed = inside if whole else {e for e in inside if e >= s}
        for X in enumerate_connected_edge_sets(T, s, cap, "edge", allowed=allowed):
            k = len(set(ends[list(X)].ravel().tolist()))
            if deg * k - 2 * len(X) > m:
                continue
            a = base.copy()
            a[list(X)] = 1
            visit(a, DIS)
    # ordered exterior: vacant sets meeting the region, connected through
    # shared endpoints or unit cubes
    meeting = {e for e in region.edges_meeting() if region.cells[H.edge_cell[e]]}
    cap = min(max_vacant(m, d), len(meeting))
    ord_seeds = seeds if whole else sorted(meeting)
    for s in ord_seeds:
        if s not in meeting or cap < 1:
            continue
        allowed = meeting if whole else {e for e in meeting if e >= s}
        for X in enumerate_connected_edge_sets(T, s, cap, "cube", allowed=allowed):
            cnt: dict = {}
            for v in ends[list(X)].ravel().tolist():
                cnt[v] = cnt.get(v, 0) + 1
            k = sum(1 for c in cnt.values() if c == deg)
            if 2 * len(X) - deg * k > m:
                continue
            a = np.ones(T.num_edges, dtype=np.uint8)
            a[list(X)] = 0
            visit(a, ORD)
    if whole:
        shifts = _shift_tables(T.d, T.n)
        full = set()
        for g in found:
            full.update(_translates(H, g, shifts))
        found = full
    contours = sorted(found, key=lambda g: (g.size, g.label, g.faces))
    level = assign_levels(contours)
    ordl = sorted([g for g in contours if g.label == ORD], key=lambda g: (level[g], g.size, g.faces))
    disl = sorted([g for g in contours if g.label == DIS], key=lambda g: (level[g], g.size, g.faces))
    return ContourListing(region, m, ordl, disl, level)


def containment_matrix(contours: Sequence[Contour]) -> np.ndarray:
    """M[i, j] is True when contour j lies in the region Int(contour i)."""
    k = len(contours)
    if k == 0:
        return np.zeros((0, 0), dtype=bool)
    H = contours[0].lattice
    I = np.stack([g.interior_cells() for g in contours]).astype(np.int32)
    Hm = np.zeros((k, H.ncell), dtype=np.int32)
    for j, g in enumerate(contours):
        Hm[j, _halo(g.d, g.n, g.faces)] = 1
    outside = (1 - I)
    miss = Hm @ outside.T  # miss[j, i]: halo cells of j outside Int(i)
    M = (miss.T == 0)
    np.fill_diagonal(M, False)
    return M


def assign_levels(contours: Sequence[Contour]) -> dict:
    """Level 0 for thin contours, else one more than the largest level inside."""
    contours = list(contours)
    if not contours:
        return {}
    M = containment_matrix(contours)
    ncells = [int(g.interior_cells().sum()) for g in contours]
    order = sorted(range(len(contours)), key=lambda i: ncells[i])
    lev = [0] * len(contours)
    for i in order:
        inner = np.nonzero(M[i])[0]
        lev[i] = 0 if inner.size == 0 else 1 + max(lev[j] for j in inner)
    return {g: lev[i] for i, g in enumerate(contours)}


# ---------------------------------------------------------------- Z^d regions

def _check_simply_connected(pts: set, d: int):
    pts = set(pts)
    if not pts:
        raise NotSimplyConnected("empty region")

    def nbrs(x):
        for k in range(d):
            for s in (-1, 1):
                y = list(x)
                y[k] += s
                yield tuple(y)

    def connected(S):
        S = set(S)
        start = next(iter(S))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in nbrs(x):
                if y in S and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == S

    if not connected(pts):
        raise NotSimplyConnected("region is not connected")
    lo = [min(p[k] for p in pts) - 1 for k in range(d)]
    hi = [max(p[k] for p in pts) + 1 for k in range(d)]
    box = set(product(*[range(a, b + 1) for a, b in zip(lo, hi)]))
    if not connected(box - pts):
        raise NotSimplyConnected("complement of the region is not connected")


@dataclass(frozen=True)
class Embedding:
    """A Z^d region placed in a torus together with its boundary contour."""

    torus: TorusGraph
    vertex_map: dict
    bc: str
    contour: Contour
    num_vertices: int
    num_edges: int
    dual_size: int

    def log_normalization(self, p: float, q: float) -> float:
        """log of the factor c with contour partition function = c * Z^bc."""
        import math
        if self.bc == "free":
            return 0.5 * self.contour.size * math.log1p(-p)
        k = self.contour.interior_vertex_count()
        return -math.log(q) + (self.torus.d * k - self.num_edges) * math.log(p)

    def exact_normalization(self, p, q):
        if self.bc == "free":
            return (1 - p) ** (self.contour.size // 2)
        k = self.contour.interior_vertex_count()
        return p ** (self.torus.d * k - self.num_edges) / q


def embed_simply_connected(points: Iterable[Sequence[int]], bc: str) -> Embedding:
    """Embed a simply connected Λ ⊂ Z^d into T^d_n with n = 3|Λ|.

    free: the ordered-exterior contour around Λ; its interior carries the
    free-boundary model on Λ.  wired: a disordered-exterior contour whose
    interior forces every edge outside E(Λ) so that the boundary vertices of
    Λ are joined.
    """
    pts = [tuple(int(c) for c in p) for p in points]
    if not pts:
        raise NotSimplyConnected("empty region")
    d = len(pts[0])
    pset = set(pts)
    _check_simply_connected(pset, d)
    n = max(5, 3 * len(pset))
    lo = [min(p[k] for p in pset) for k in range(d)]
    off = [n // 3 - lo[k] for k in range(d)]
    T = build_torus(d, n)
    vmap = {p: T.vertex_index([p[k] + off[k] for k in range(d)]) for p in pset}
    V = set(vmap.values())
    E_in = [e for e, (u, v) in enumerate(T.edges) if u in V and v in V]
    H = geo.half_lattice(d, n)
    if bc == "free":
        a = np.ones(T.num_edges, dtype=np.uint8)
        for e, (u, v) in enumerate(T.edges):
            if u in V or v in V:
                a[e] = 0
        outer = _outer_contours(T, a)
        if not outer or len(outer) != 1:
            raise NotSimplyConnected("no unique ordered contour around the region")
        gamma = outer[0]
    elif bc == "wired":
        gamma = _wired_contour(T, H, V, E_in)
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    reg = Region.interior_of(gamma)
    return Embedding(T, vmap, bc, gamma, len(V), len(E_in), reg.dual_size())


def _wired_contour(T, H, V, E_in):
    # hole left by removing the induced edges, together with the vertex
    # cells of the region (this keeps single vertices well defined)
    a = np.ones(T.num_edges, dtype=np.uint8)
    a[E_in] = 0
    S = geo.thicken(a, H.req, H.is_vertex)
    hole = (S == 0)
    for v in V:
        hole[H.vertex_cell[v]] = True
    hole_cells = np.nonzero(hole)[0]
    # an edge is kept when its midpoint is within 1/2 of the closed hole; in
    # doubled coordinates that is distance <= 1 between the midpoint and a
    # hole cell centre
    m = H.m
    keep = np.zeros(T.num_edges, dtype=np.uint8)
    keep[E_in] = 1
    Yh = H.Y[hole_cells]
    for e in range(T.num_edges):
        y = H.Y[H.edge_cell[e]]
        diff = np.abs(Yh - y) % m
        diff = np.minimum(diff, m - diff)
        if (diff.max(axis=1) <= 1).any():
            keep[e] = 1
    outer = _outer_contours(T, keep)
    if not outer or len(outer) != 1 or outer[0].label != DIS:
        raise NotSimplyConnected("no unique disordered contour around the region")
    return outer[0]
