"""Deterministic incremental quickhull in R^3 and vertical-line queries.

Algorithm notes
---------------
Points are deduplicated and sorted lexicographically up front, so the
result does not depend on input order; all ties (initial simplex, apex
selection) resolve to the lexicographically smallest candidate.  Facets
keep conflict lists of outside points; an insertion picks the farthest
conflict point of the next queued facet, floods the visible region,
walks the horizon cycle and rebuilds the cone.  Conflict points of dead
facets are retested against the new facets and, if below all of them,
against the alive facets across the horizon (a point beyond the old hull
that is beyond none of the new facets can only be beyond a horizon
neighbor); only then is a point dropped as interior.  Dropped points are
within EPS_FRAC * scale of the hull at drop time and the hull only grows
afterwards, so the mesh satisfies its halfspace soundness tolerance by
construction.

Rank-deficient inputs (single point, collinear, coplanar) come back as
degenerate meshes with no facets, carrying the affine hull (anchor point
plus orthonormal basis) and, for rank 2, the planar hull vertices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BarrierGapError, DegenerateHullError, DomainError

# Conflict/visibility threshold as a fraction of the bounding-box diameter.
# One tenth of the mesh soundness tolerance TOL_FRAC, so points absorbed as
# interior stay well inside the advertised slack.
EPS_FRAC = 1e-10
TOL_FRAC = 1e-9
# Rank-decision threshold for the initial simplex, relative to the diameter.
DEGENERACY_FRAC = 1e-12
# Facet normals with |z component| below this act as vertical side walls in
# slab queries.
FACET_NORMAL_TOL = 1e-12


@dataclass(frozen=True)
class HullMesh:
    """Triangulated convex hull: halfspace form normals[i] . x <= offsets[i].

    ``vertices`` are in lexicographic order; ``facets`` holds index triples
    into it.  ``tol`` is the scale-aware halfspace slack every input point
    satisfies.  Degenerate meshes have no facets; ``affine_point`` and
    ``affine_basis`` describe the affine hull instead.
    """

    vertices: np.ndarray
    facets: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    tol: float
    degenerate: bool = False
    affine_dim: int = 3
    affine_point: np.ndarray | None = None
    affine_basis: np.ndarray | None = None


class HullSlab(NamedTuple):
    """x3 interval cut out of a hull by the vertical line at (x1, x2)."""

    x1: float
    x2: float
    lo: float
    hi: float
    empty: bool


def _unit(v: np.ndarray) -> np.ndarray:
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise BarrierGapError("zero vector cannot be normalized")
    return v / n


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip so the first nonzero component is positive (deterministic basis)."""
    for c in v:
        if c != 0.0:
            return v if c > 0.0 else -v
    return v


def _monotone_chain(uv: np.ndarray) -> list[int]:
    """Indices of the 2D convex hull of (n, 2) points, counterclockwise."""
    order = np.lexsort((uv[:, 1], uv[:, 0]))

    def cross(o, a, b):
        return (uv[a, 0] - uv[o, 0]) * (uv[b, 1] - uv[o, 1]) - (
            uv[a, 1] - uv[o, 1]
        ) * (uv[b, 0] - uv[o, 0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(int(i))
    return lower[:-1] + upper[:-1]


def _degenerate_mesh(pts: np.ndarray, dim: int, basis: list[np.ndarray], tol: float) -> HullMesh:
    anchor = pts[0].copy()
    if dim == 0:
        verts = pts[:1].copy()
    elif dim == 1:
        t = (pts - anchor) @ basis[0]
        ends = pts[[int(np.argmin(t)), int(np.argmax(t))]]
        verts = ends[np.lexsort((ends[:, 2], ends[:, 1], ends[:, 0]))]
    else:
        b1, b2 = basis
        uv = np.stack([(pts - anchor) @ b1, (pts - anchor) @ b2], axis=1)
        verts = pts[_monotone_chain(uv)]
    return HullMesh(
        vertices=verts,
        facets=np.empty((0, 3), dtype=np.int64),
        normals=np.empty((0, 3)),
        offsets=np.empty(0),
        tol=tol,
        degenerate=True,
        affine_dim=dim,
        affine_point=anchor,
        affine_basis=np.array(basis).reshape(dim, 3),
    )


def convex_hull_3d(points) -> HullMesh:
    """Convex hull of a 3D point cloud as a triangulated mesh.

    Deterministic: identical input sets (in any order) give identical
    meshes.  Rank-deficient inputs return degenerate meshes; see the
    module docstring.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DomainError("convex hull of an empty point set")
    pts = pts.reshape(-1, 3)
    if not np.all(np.isfinite(pts)):
        raise DomainError("hull input contains non-finite coordinates")
    pts = np.unique(pts, axis=0)  # lexicographic sort + exact dedupe
    n = pts.shape[0]

    extent = pts.max(axis=0) - pts.min(axis=0)
    diameter = float(np.linalg.norm(extent))
    tol = TOL_FRAC * diameter
    eps = EPS_FRAC * diameter
    rank_tol = DEGENERACY_FRAC * max(diameter, 1e-300)

    if n == 1 or diameter == 0.0:
        return _degenerate_mesh(pts, 0, [], tol)

    # Initial simplex: lex-smallest point, farthest point, farthest from
    # the line, farthest from the plane; each argmax breaks ties at the
    # lexicographically smallest point.
    i0 = 0
    d0 = pts - pts[i0]
    i1 = int(np.argmax(np.einsum("ij,ij->i", d0, d0)))
    e1 = _unit(pts[i1] - pts[i0])
    perp = d0 - np.outer(d0 @ e1, e1)
    line_d = np.einsum("ij,ij->i", perp, perp)
    i2 = int(np.argmax(line_d))
    if math.sqrt(line_d[i2]) <= rank_tol:
        return _degenerate_mesh(pts, 1, [_canonical_sign(e1)], tol)
    nrm = _unit(np.cross(pts[i1] - pts[i0], pts[i2] - pts[i0]))
    plane_d = d0 @ nrm
    i3 = int(np.argmax(np.abs(plane_d)))
    if abs(plane_d[i3]) <= rank_tol:
        nrm = _canonical_sign(nrm)
        k = int(np.argmin(np.abs(nrm)))
        b1 = np.zeros(3)
        b1[k] = 1.0
        b1 = _unit(b1 - (b1 @ nrm) * nrm)
        return _degenerate_mesh(pts, 2, [b1, np.cross(nrm, b1)], tol)

    interior = pts[[i0, i1, i2, i3]].mean(axis=0)

    tris: list[list[int]] = []
    nrms: list[np.ndarray] = []
    offs: list[float] = []
    adjs: list[list[int]] = []
    alive: list[bool] = []
    confl: list[np.ndarray | None] = []
    far: list[tuple[float, int]] = []
    queue: deque[int] = deque()

    def facet_dist(f: int, p: np.ndarray) -> float:
        return float(nrms[f] @ p - offs[f])

    def add_facet(a: int, b: int, c: int) -> int:
        ax, ay, az = pts[a]
        ux, uy, uz = pts[b, 0] - ax, pts[b, 1] - ay, pts[b, 2] - az
        vx, vy, vz = pts[c, 0] - ax, pts[c, 1] - ay, pts[c, 2] - az
        nx = uy * vz - uz * vy
        ny = uz * vx - ux * vz
        nz = ux * vy - uy * vx
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if norm <= 1e-30 * max(1.0, diameter * diameter):
            raise BarrierGapError("degenerate facet during hull construction")
        normal = np.array((nx / norm, ny / norm, nz / norm))
        offset = float(normal @ pts[a])
        if float(normal @ interior) > offset:
            a, b, c = a, c, b
            normal = -normal
            offset = float(normal @ pts[a])
        tris.append([a, b, c])
        nrms.append(normal)
        offs.append(offset)
        adjs.append([-1, -1, -1])
        alive.append(True)
        confl.append(None)
        far.append((0.0, -1))
        return len(tris) - 1

    def link(pending: dict, f: int) -> None:
        a, b, c = tris[f]
        for slot, (u, v) in enumerate(((b, c), (c, a), (a, b))):
            key = (u, v) if u < v else (v, u)
            if key in pending:
                g, gslot = pending.pop(key)
                adjs[f][slot] = g
                adjs[g][gslot] = f
            else:
                pending[key] = (f, slot)

    def assign_conflicts(cands: np.ndarray, fs: list[int]) -> np.ndarray:
        """First-match partition of candidate point indices onto facets fs;
        returns the indices claimed by none of them."""
        if cands.size == 0:
            return cands
        P = pts[cands]
        claimed = np.zeros(cands.size, dtype=bool)
        for f in fs:
            rem = ~claimed
            if not rem.any():
                break
            d = P[rem] @ nrms[f] - offs[f]
            take = d > eps
            if not take.any():
                continue
            idx = cands[rem][take]
            dts = d[take]
            old = confl[f]
            if old is not None and old.size:
                merged = np.concatenate([old, idx])
                order = np.argsort(merged, kind="stable")
                confl[f] = merged[order]
                # recompute far over merged set
                dall = pts[confl[f]] @ nrms[f] - offs[f]
                best = int(np.argmax(dall))
                far[f] = (float(dall[best]), int(confl[f][best]))
            else:
                confl[f] = idx
                best = int(np.argmax(dts))
                far[f] = (float(dts[best]), int(idx[best]))
            sel = np.zeros(rem.sum(), dtype=bool)
            sel[take] = True
            claimed[rem] = sel
            queue.append(f)
        return cands[~claimed]

    pending: dict = {}
    for (a, b, c) in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        link(pending, add_facet(a, b, c))
    if pending:
        raise BarrierGapError("initial simplex adjacency incomplete")

    initial = np.arange(n, dtype=np.int64)
    initial = initial[~np.isin(initial, [i0, i1, i2, i3])]
    assign_conflicts(initial, [0, 1, 2, 3])

    while queue:
        f = queue.popleft()
        if not alive[f] or confl[f] is None or confl[f].size == 0:
            continue
        apex = far[f][1]
        apex_pt = pts[apex]

        # Flood the visible region from f; collect directed horizon edges.
        # Visibility cuts at plain float sign, not at eps: the strictly
        # visible set is connected, and an eps-wide "invisible" band can
        # sever it on nearly coplanar patches, folding the surface around
        # an unreached lobe.  At sign level the ambiguity is rounding
        # sized, so a misclassified facet folds by a rounding amount only.
        visible = {f}
        stack = [f]
        horizon: list[tuple[int, int, int]] = []
        while stack:
            g = stack.pop()
            for slot in range(3):
                h = adjs[g][slot]
                if h in visible:
                    continue
                if facet_dist(h, apex_pt) > 0.0:
                    visible.add(h)
                    stack.append(h)
                else:
                    u = tris[g][(slot + 1) % 3]
                    v = tris[g][(slot + 2) % 3]
                    horizon.append((u, v, h))

        if len(horizon) < 3:
            raise BarrierGapError("hull horizon collapsed; input too degenerate")
        nxt = {}
        for (u, v, h) in horizon:
            if u in nxt:
                raise BarrierGapError("hull horizon is not a simple cycle")
            nxt[u] = (v, h)
        start = min(nxt)
        loop: list[tuple[int, int, int]] = []
        u = start
        while True:
            try:
                v, h = nxt.pop(u)
            except KeyError:
                raise BarrierGapError("hull horizon is not a simple cycle") from None
            loop.append((u, v, h))
            u = v
            if u == start:
                break
        if nxt:
            raise BarrierGapError("hull horizon is not a simple cycle")

        cands: list[np.ndarray] = []
        for g in visible:
            if confl[g] is not None and confl[g].size:
                cands.append(confl[g])
            alive[g] = False
            confl[g] = None
        candidates = (
            np.sort(np.concatenate(cands)) if cands else np.empty(0, dtype=np.int64)
        )
        candidates = candidates[candidates != apex]

        pending = {}
        new_ids = []
        horizon_facets = []
        for (u, v, h) in loop:
            nf = add_facet(u, v, apex)
            new_ids.append(nf)
            horizon_facets.append(h)
            key = (u, v) if u < v else (v, u)
            hslot = next(
                s
                for s in range(3)
                if {tris[h][(s + 1) % 3], tris[h][(s + 2) % 3]} == {u, v}
            )
            adjs[h][hslot] = nf
            pending[key] = (h, hslot)
            link(pending, nf)
        # link() pairs each horizon key against its stored (h, slot) entry
        # and new-facet edges against each other; nothing may remain open.
        if pending:
            raise BarrierGapError("hull cone adjacency incomplete")

        rest = assign_conflicts(candidates, new_ids)
        # Points beyond the old hull but under every new facet can only be
        # beyond a horizon neighbor (see module docstring).
        rest = assign_conflicts(rest, sorted(set(horizon_facets)))
        # anything left is interior within eps

        if not queue:
            # Verify-and-repair sweep: reclaim any point that slipped out
            # of conflict tracking but still sits beyond the surface by
            # more than eps.  Normally a no-op; it turns residual
            # bookkeeping corner cases into extra insertions instead of a
            # silently unsound mesh.
            live_now = [g for g in range(len(tris)) if alive[g]]
            normals_now = np.array([nrms[g] for g in live_now])
            offsets_now = np.array([offs[g] for g in live_now])
            worst = np.full(n, -np.inf)
            for a in range(0, n, 8192):
                b = min(a + 8192, n)
                d = pts[a:b] @ normals_now.T - offsets_now
                worst[a:b] = d.max(axis=1)
            # Strays may include existing vertices (a fold); re-inserting
            # one either heals the surface or trips a loud adjacency or
            # degeneracy error, never a silently unsound mesh.
            stray = np.flatnonzero(worst > eps).astype(np.int64)
            if stray.size:
                assign_conflicts(stray, live_now)

    live = [f for f in range(len(tris)) if alive[f]]
    used = sorted({i for f in live for i in tris[f]})
    remap = {old: new for new, old in enumerate(used)}
    vertices = pts[used]
    facets = np.array([[remap[i] for i in tris[f]] for f in live], dtype=np.int64)
    normals = np.array([nrms[f] for f in live])
    offsets = np.array([offs[f] for f in live])
    return HullMesh(vertices, facets, normals, offsets, tol=tol)


def hull_slab_many(
    mesh: HullMesh, x1s, x2s, chunk: int = 512
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hull slabs over many (x1, x2) queries.

    Returns (lo, hi, empty) arrays.  Facets with |z normal| above
    FACET_NORMAL_TOL bound the slab from above or below; near-vertical
    facets act as 2D feasibility cuts.
    """
    if mesh.degenerate:
        raise DegenerateHullError(
            f"slab query requires a full-dimensional hull (affine dim {mesh.affine_dim})"
        )
    x1s = np.atleast_1d(np.asarray(x1s, dtype=float))
    x2s = np.atleast_1d(np.asarray(x2s, dtype=float))
    m = x1s.size
    nz = mesh.normals[:, 2]
    up = nz > FACET_NORMAL_TOL
    dn = nz < -FACET_NORMAL_TOL
    side = ~(up | dn)

    lo = np.full(m, -np.inf)
    hi = np.full(m, np.inf)
    feas = np.ones(m, dtype=bool)
    for a in range(0, m, chunk):
        b = min(a + chunk, m)
        q1 = x1s[a:b][None, :]
        q2 = x2s[a:b][None, :]
        if up.any():
            r = mesh.offsets[up, None] - mesh.normals[up, 0, None] * q1 - mesh.normals[up, 1, None] * q2
            hi[a:b] = np.min(r / nz[up, None], axis=0)
        if dn.any():
            r = mesh.offsets[dn, None] - mesh.normals[dn, 0, None] * q1 - mesh.normals[dn, 1, None] * q2
            lo[a:b] = np.max(r / nz[dn, None], axis=0)
        if side.any():
            r = mesh.offsets[side, None] - mesh.normals[side, 0, None] * q1 - mesh.normals[side, 1, None] * q2
            feas[a:b] = np.all(r >= -mesh.tol, axis=0)
    empty = ~feas | (lo > hi + mesh.tol) | ~np.isfinite(lo) | ~np.isfinite(hi)
    return lo, hi, empty


def hull_slab(mesh: HullMesh, x1: float, x2: float) -> HullSlab:
    """Intersection of the vertical line at (x1, x2) with the hull."""
    lo, hi, empty = hull_slab_many(mesh, [x1], [x2])
    if empty[0]:
        return HullSlab(float(x1), float(x2), math.nan, math.nan, True)
    return HullSlab(float(x1), float(x2), float(lo[0]), float(hi[0]), False)
