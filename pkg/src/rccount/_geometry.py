"""Half-lattice tables and compiled kernels behind the contour module.

Cells of the half lattice are the cubes of side 1/2 centred at the points
Y/2, Y in Z_{2n}^d ("doubled" coordinates).  A cell whose doubled coordinates
have odd entries in the axes J sits at the centre of the |J|-dimensional unit
cube spanned by those axes.  Face (c, k) separates cell c from c + e_k and
has id c*d + k.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np
from numba import njit

from .lattice import TorusGraph, build_torus


class HalfLattice:
    def __init__(self, T: TorusGraph):
        self.T = T
        d, n = T.d, T.n
        self.d, self.n = d, n
        m = 2 * n
        self.m = m
        ncell = m ** d
        self.ncell = ncell
        self.nface = ncell * d
        Y = np.array(np.unravel_index(np.arange(ncell), (m,) * d)).T.astype(np.int64)
        self.Y = Y
        self.cstrides = np.array([m ** (d - 1 - k) for k in range(d)], dtype=np.int64)
        plus = np.empty((ncell, d), dtype=np.int64)
        minus = np.empty((ncell, d), dtype=np.int64)
        for k in range(d):
            Z = Y.copy()
            Z[:, k] = (Z[:, k] + 1) % m
            plus[:, k] = Z @ self.cstrides
            Z[:, k] = (Y[:, k] - 1) % m
            minus[:, k] = Z @ self.cstrides
        self.plus, self.minus = plus, minus
        odd = Y % 2
        self.nodd = odd.sum(axis=1)
        self.is_vertex = (self.nodd == 0).astype(np.uint8)
        self.cell_vertex = np.full(ncell, -1, dtype=np.int64)
        vc = np.nonzero(self.nodd == 0)[0]
        self.cell_vertex[vc] = (Y[vc] // 2) @ T.strides
        self.vertex_cell = np.empty(T.num_vertices, dtype=np.int64)
        self.vertex_cell[self.cell_vertex[vc]] = vc

        # edges whose presence decides the cell: "any" for vertex cells,
        # "all" otherwise
        R = max(2 * d, d * 2 ** (d - 1))
        req = np.full((ncell, R), -1, dtype=np.int64)
        for c in range(ncell):
            y = Y[c]
            s = odd[c]
            J = [j for j in range(d) if s[j]]
            if not J:
                v = T.vertex_index(y // 2)
                lst = []
                for k in range(d):
                    lst.append(T.edge_index(v, k))
                    lst.append(T.edge_index(T.neighbor(v, k, -1), k))
            else:
                base = (y - s) // 2
                lst = []
                for sub in product((0, 1), repeat=len(J)):
                    x = base.copy()
                    for j, b in zip(J, sub):
                        x[j] += b
                    v = T.vertex_index(x)
                    for j, b in zip(J, sub):
                        if b == 0:
                            lst.append(T.edge_index(v, j))
            req[c, :len(lst)] = lst
        self.req = req
        self.edge_cell = np.empty(T.num_edges, dtype=np.int64)
        for v in range(T.num_vertices):
            for k in range(d):
                y = 2 * T.coords[v]
                y[k] += 1
                self.edge_cell[T.edge_index(v, k)] = int((y % m) @ self.cstrides)

        # faces
        nf = self.nface
        fc = np.empty((nf, 2), dtype=np.int64)
        faxis = np.tile(np.arange(d), ncell)
        fcell = np.repeat(np.arange(ncell), d)
        fc[:, 0] = fcell
        fc[:, 1] = plus[fcell, faxis]
        self.face_cells = fc
        self.face_axis = faxis
        fY = Y[fcell]
        # a face meets a torus edge iff all coordinates transverse to it are even
        cross = np.ones(nf, dtype=bool)
        for j in range(d):
            cross &= (fY[:, j] % 2 == 0) | (faxis == j)
        self.face_cross = cross.astype(np.uint8)
        cross_edge = np.full(nf, -1, dtype=np.int64)
        for f in np.nonzero(cross)[0]:
            v = T.vertex_index(fY[f] // 2)
            cross_edge[f] = T.edge_index(v, int(faxis[f]))
        self.face_cross_edge = cross_edge
        # fundamental loop L_i: the line along axis i with all other doubled
        # coordinates equal to 1
        loop = np.full(nf, -1, dtype=np.int64)
        for f in range(nf):
            k = faxis[f]
            if all(fY[f, j] == 1 for j in range(d) if j != k):
                loop[f] = k
        self.face_loop = loop

        # faces sharing a (d-2)-face
        adj = np.empty((nf, 6 * (d - 1)), dtype=np.int64)
        for f in range(nf):
            c, k = fcell[f], faxis[f]
            out = []
            for j in range(d):
                if j == k:
                    continue
                cp, cm = plus[c, j], minus[c, j]
                ck = plus[c, k]
                out.append(cp * d + k)
                out.append(cm * d + k)
                out.append(c * d + j)
                out.append(ck * d + j)
                out.append(cm * d + j)
                out.append(minus[ck, j] * d + j)
            adj[f] = out
        self.face_adj = adj

        # corner points of each face; corner P has integer id P - 1/2
        nc = 2 ** (d - 1)
        corners = np.empty((nf, nc), dtype=np.int64)
        for f in range(nf):
            k = faxis[f]
            others = [j for j in range(d) if j != k]
            for i, sub in enumerate(product((0, 1), repeat=d - 1)):
                P = fY[f].copy()
                for j, b in zip(others, sub):
                    P[j] -= b
                corners[f, i] = int((P % m) @ self.cstrides)
        self.face_corners = corners

        # cells within distance < 1/2 of a face
        hal = []
        for f in range(nf):
            k = faxis[f]
            others = [j for j in range(d) if j != k]
            row = []
            for a in (0, 1):
                for sub in product((-1, 0, 1), repeat=d - 1):
                    P = fY[f].copy()
                    P[k] += a
                    for j, b in zip(others, sub):
                        P[j] += b
                    row.append(int((P % m) @ self.cstrides))
            hal.append(row)
        self.face_halo = np.array(hal, dtype=np.int64)

        # faces around each cell, with the neighbour across
        cf = np.empty((ncell, 2 * d), dtype=np.int64)
        cn = np.empty((ncell, 2 * d), dtype=np.int64)
        for k in range(d):
            cf[:, 2 * k] = np.arange(ncell) * d + k
            cn[:, 2 * k] = plus[:, k]
            cf[:, 2 * k + 1] = minus[:, k] * d + k
            cn[:, 2 * k + 1] = minus[:, k]
        self.cell_faces = cf
        self.cell_nbrs = cn

    # translations by a torus vector
    def cell_shift(self, t) -> np.ndarray:
        Z = (self.Y + 2 * np.asarray(t, dtype=np.int64)) % self.m
        return Z @ self.cstrides

    def face_shift(self, t) -> np.ndarray:
        cs = self.cell_shift(t)
        return cs[np.repeat(np.arange(self.ncell), self.d)] * self.d + self.face_axis

    def face_center_x4(self, f: int) -> tuple[int, ...]:
        """Face centre in quarter-grid integer coordinates (mod 4n)."""
        c, k = divmod(int(f), self.d)
        y = 2 * self.Y[c]
        y[k] += 1
        return tuple(int(v) for v in y % (4 * self.n))

    def edges_from_cells(self, S: np.ndarray) -> np.ndarray:
        return S[self.edge_cell].astype(np.uint8)


@lru_cache(maxsize=None)
def half_lattice(d: int, n: int) -> HalfLattice:
    return HalfLattice(build_torus(d, n))


# ---------------------------------------------------------------- kernels

@njit(cache=True)
def thicken(a, req, is_vertex):
    ncell = req.shape[0]
    S = np.zeros(ncell, dtype=np.uint8)
    for c in range(ncell):
        if is_vertex[c]:
            hit = 0
            for r in range(req.shape[1]):
                e = req[c, r]
                if e < 0:
                    break
                if a[e]:
                    hit = 1
                    break
            S[c] = hit
        else:
            ok = 1
            for r in range(req.shape[1]):
                e = req[c, r]
                if e < 0:
                    break
                if not a[e]:
                    ok = 0
                    break
            S[c] = ok
    return S


@njit(cache=True)
def boundary_faces(S, face_cells):
    nf = face_cells.shape[0]
    B = np.zeros(nf, dtype=np.uint8)
    for f in range(nf):
        if S[face_cells[f, 0]] != S[face_cells[f, 1]]:
            B[f] = 1
    return B


@njit(cache=True)
def face_components(B, face_adj):
    nf = B.shape[0]
    comp = np.full(nf, -1, dtype=np.int64)
    stack = np.empty(nf, dtype=np.int64)
    nc = 0
    for f in range(nf):
        if B[f] and comp[f] < 0:
            comp[f] = nc
            top = 0
            stack[0] = f
            top = 1
            while top > 0:
                top -= 1
                g = stack[top]
                for i in range(face_adj.shape[1]):
                    h = face_adj[g, i]
                    if B[h] and comp[h] < 0:
                        comp[h] = nc
                        stack[top] = h
                        top += 1
            nc += 1
    return comp, nc


@njit(cache=True)
def component_stats(comp, nc, face_loop, face_cross, d):
    wind = np.zeros((nc, d), dtype=np.int64)
    size = np.zeros(nc, dtype=np.int64)
    for f in range(comp.shape[0]):
        t = comp[f]
        if t < 0:
            continue
        if face_cross[f]:
            size[t] += 1
        if face_loop[f] >= 0:
            wind[t, face_loop[f]] ^= 1
    return wind, size


@njit(cache=True)
def cell_components(blocked, cell_faces, cell_nbrs):
    """Components of cells joined across faces with blocked[f] == 0."""
    ncell = cell_faces.shape[0]
    comp = np.full(ncell, -1, dtype=np.int64)
    stack = np.empty(ncell, dtype=np.int64)
    nc = 0
    for c in range(ncell):
        if comp[c] >= 0:
            continue
        comp[c] = nc
        stack[0] = c
        top = 1
        while top > 0:
            top -= 1
            x = stack[top]
            for i in range(cell_faces.shape[1]):
                if blocked[cell_faces[x, i]]:
                    continue
                y = cell_nbrs[x, i]
                if comp[y] < 0:
                    comp[y] = nc
                    stack[top] = y
                    top += 1
        nc += 1
    return comp, nc


@njit(cache=True)
def side_mask(comp, t, start, cell_faces, cell_nbrs):
    """Cells reachable from ``start`` without crossing a face of component t."""
    ncell = cell_faces.shape[0]
    seen = np.zeros(ncell, dtype=np.uint8)
    stack = np.empty(ncell, dtype=np.int64)
    seen[start] = 1
    stack[0] = start
    top = 1
    while top > 0:
        top -= 1
        x = stack[top]
        for i in range(cell_faces.shape[1]):
            if comp[cell_faces[x, i]] == t:
                continue
            y = cell_nbrs[x, i]
            if not seen[y]:
                seen[y] = 1
                stack[top] = y
                top += 1
    return seen


@njit(cache=True)
def interior_mask(comp, t, start, is_vertex, cell_faces, cell_nbrs):
    """Interior cells of contour t: the side with fewer vertices, ties go to
    the side not containing cell 0."""
    side = side_mask(comp, t, start, cell_faces, cell_nbrs)
    nv_in = 0
    nv_tot = 0
    for c in range(side.shape[0]):
        if is_vertex[c]:
            nv_tot += 1
            if side[c]:
                nv_in += 1
    nv_out = nv_tot - nv_in
    take = False
    if nv_in < nv_out:
        take = True
    elif nv_in == nv_out and side[0] == 0:
        take = True
    if take:
        return side
    # the other side: cells not reached, except nothing else is removed since
    # the contour separates the torus into exactly two pieces
    other = np.empty_like(side)
    for c in range(side.shape[0]):
        other[c] = 1 - side[c]
    return other


@njit(cache=True)
def decompose_kernel(a, req, is_vertex, face_cells, face_adj, face_loop, face_cross,
                     cell_faces, cell_nbrs, d):
    S = thicken(a, req, is_vertex)
    B = boundary_faces(S, face_cells)
    comp, nc = face_components(B, face_adj)
    wind, size = component_stats(comp, nc, face_loop, face_cross, d)
    ccomp, ncc = cell_components(B, cell_faces, cell_nbrs)
    ncell = S.shape[0]
    # interiors of contours, one row per boundary component (empty for interfaces)
    inner = np.zeros((nc, ncell), dtype=np.uint8)
    first = np.full(nc, -1, dtype=np.int64)
    for f in range(comp.shape[0]):
        if comp[f] >= 0 and first[comp[f]] < 0:
            first[comp[f]] = f
    is_contour = np.zeros(nc, dtype=np.uint8)
    ext_label = np.full(nc, -1, dtype=np.int64)
    for t in range(nc):
        z = 0
        for j in range(d):
            z += wind[t, j]
        if z != 0:
            continue
        is_contour[t] = 1
        start = face_cells[first[t], 0]
        m = interior_mask(comp, t, start, is_vertex, cell_faces, cell_nbrs)
        inner[t] = m
        # label on the exterior side of the first face
        c0 = face_cells[first[t], 0]
        c1 = face_cells[first[t], 1]
        if m[c0]:
            ext_label[t] = S[c1]
        else:
            ext_label[t] = S[c0]
    return S, B, comp, nc, wind, size, ccomp, ncc, inner, is_contour, ext_label


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def classify_all(E, start, stop, ends, nv, req, is_vertex, face_cells, face_adj, face_loop,
                 face_cross, cell_faces, cell_nbrs, d):
    """Statistics of every edge set with index in [start, stop).

    Columns: class (0 tunnel, 1 ordered exterior, 2 disordered exterior),
    |A|, c(V, A), ordered complement components, ordered vertices, total
    boundary size, number of contours, number of interfaces.
    """
    cnt = stop - start
    out = np.zeros((cnt, 8), dtype=np.int64)
    a = np.zeros(E, dtype=np.uint8)
    parent = np.empty(nv, dtype=np.int64)
    ncell = req.shape[0]
    for idx in range(cnt):
        x = start + idx
        na = 0
        for e in range(E):
            a[e] = (x >> e) & 1
            na += a[e]
        for v in range(nv):
            parent[v] = v
        c = nv
        for e in range(E):
            if a[e]:
                r0 = _find(parent, ends[e, 0])
                r1 = _find(parent, ends[e, 1])
                if r0 != r1:
                    parent[max(r0, r1)] = min(r0, r1)
                    c -= 1
        S, B, comp, nc, wind, size, ccomp, ncc, inner, is_contour, ext_label = decompose_kernel(
            a, req, is_vertex, face_cells, face_adj, face_loop, face_cross, cell_faces, cell_nbrs, d)
        tot = 0
        ncont = 0
        nint = 0
        for t in range(nc):
            tot += size[t]
            if is_contour[t]:
                ncont += 1
            else:
                nint += 1
        seen = np.zeros(ncc, dtype=np.uint8)
        cord = 0
        nord = 0
        for cc in range(ncell):
            if S[cc]:
                if not seen[ccomp[cc]]:
                    seen[ccomp[cc]] = 1
                    cord += 1
                if is_vertex[cc]:
                    nord += 1
        if nint > 0:
            cls = 0
        else:
            lab = -1
            for cc in range(ncell):
                inside = False
                for t in range(nc):
                    if inner[t, cc]:
                        inside = True
                        break
                if not inside:
                    lab = S[cc]
                    break
            cls = 1 if lab == 1 else 2
        out[idx, 0] = cls
        out[idx, 1] = na
        out[idx, 2] = c
        out[idx, 3] = cord
        out[idx, 4] = nord
        out[idx, 5] = tot
        out[idx, 6] = ncont
        out[idx, 7] = nint
    return out
