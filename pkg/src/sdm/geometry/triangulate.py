"""Planar polygon triangulation for template faces.

Simple polygons go through ear clipping; polygons with holes are first
reduced by bridging each hole into the outer ring (keyhole cut). The
triangulator works on vertex *indices* and never invents coordinates, so
every boundary edge of the input survives bit-exact as a triangle edge;
face adjacency derived from shared edges depends on this.
"""
from __future__ import annotations

import numpy as np


class TriangulationError(Exception):
    pass


def signed_area(coords: np.ndarray, ring: list[int] | None = None) -> float:
    pts = coords if ring is None else coords[ring]
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _close(p, q, eps) -> bool:
    return abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps


def _on_segment(p, a, b, eps) -> bool:
    if abs(_orient(a, b, p)) > eps:
        return False
    return (
        min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
        and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
    )


def _segments_blocked(p1, p2, q1, q2, eps) -> bool:
    """True when candidate bridge p1p2 may not coexist with edge q1q2.

    Shared endpoints are fine; proper crossings and mid-edge touches are not.
    """
    if _close(p1, q1, eps) or _close(p1, q2, eps) or _close(p2, q1, eps) or _close(p2, q2, eps):
        return False
    o1 = _orient(p1, p2, q1)
    o2 = _orient(p1, p2, q2)
    o3 = _orient(q1, q2, p1)
    o4 = _orient(q1, q2, p2)
    if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and (
        (o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)
    ):
        return True
    for p, a, b in ((q1, p1, p2), (q2, p1, p2), (p1, q1, q2), (p2, q1, q2)):
        if _on_segment(p, a, b, eps):
            return True
    return False


def point_in_polygon(p, poly: np.ndarray, eps: float) -> bool:
    """Strict interior test; points on the boundary count as outside."""
    n = len(poly)
    for i in range(n):
        if _on_segment(p, poly[i], poly[(i + 1) % n], eps):
            return False
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = poly[i]
        xj, yj = poly[j]
        if (yi > p[1]) != (yj > p[1]):
            xint = (xj - xi) * (p[1] - yi) / (yj - yi) + xi
            if p[0] < xint:
                inside = not inside
        j = i
    return inside


def _point_in_triangle_strict(p, a, b, c, eps) -> bool:
    d1 = _orient(a, b, p)
    d2 = _orient(b, c, p)
    d3 = _orient(c, a, p)
    return (d1 > eps and d2 > eps and d3 > eps) or (d1 < -eps and d2 < -eps and d3 < -eps)


def _point_blocks_ear(p, a, b, c, area_eps, len_eps) -> bool:
    """Point inside or on the boundary of CCW ear abc (corners excused).

    On-edge points must block the clip: hole bridges in rectilinear faces
    put ring vertices exactly on candidate ear edges, and clipping across
    them corrupts the remaining ring.
    """
    if _close(p, a, len_eps) or _close(p, b, len_eps) or _close(p, c, len_eps):
        return False
    return (
        _orient(a, b, p) >= -area_eps
        and _orient(b, c, p) >= -area_eps
        and _orient(c, a, p) >= -area_eps
    )


def _merge_hole(coords, ring: list[int], hole: list[int], obstacles: list[list[int]], eps):
    """Splice ``hole`` (CW indices) into ``ring`` (CCW indices) via the nearest
    clear bridge, duplicating the two bridge endpoints."""
    cands = []
    for hp in range(len(hole)):
        for rp in range(len(ring)):
            d = coords[hole[hp]] - coords[ring[rp]]
            cands.append((float(d @ d), hp, rp))
    cands.sort(key=lambda t: t[0])

    edges = []
    for cyc in [ring, hole] + obstacles:
        n = len(cyc)
        for i in range(n):
            edges.append((cyc[i], cyc[(i + 1) % n]))

    m = len(hole)
    for _, hp, rp in cands:
        a, b = coords[hole[hp]], coords[ring[rp]]
        if _close(a, b, eps):
            continue
        if any(_segments_blocked(a, b, coords[q1], coords[q2], eps) for q1, q2 in edges):
            continue
        mid = (a + b) / 2.0
        if any(point_in_polygon(mid, coords[obs], eps) for obs in obstacles):
            continue
        merged = ring[: rp + 1]
        merged.extend(hole[(hp + i) % m] for i in range(m))
        merged.append(hole[hp])
        merged.append(ring[rp])
        merged.extend(ring[rp + 1:])
        return merged
    raise TriangulationError("no visible bridge found for hole")


def _ear_clip(coords, ring: list[int], area_eps: float, len_eps: float):
    n = len(ring)
    if n < 3:
        raise TriangulationError("polygon with fewer than 3 vertices")
    idx = list(ring)
    tris: list[tuple[int, int, int]] = []

    def is_ear(k: int) -> bool:
        i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
        a, b, c = coords[i0], coords[i1], coords[i2]
        if _orient(a, b, c) <= area_eps:
            return False
        for j in idx:
            if j in (i0, i1, i2):
                continue
            if _point_blocks_ear(coords[j], a, b, c, area_eps, len_eps):
                return False
        return True

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:
            raise TriangulationError("ear clipping failed to converge")
        clipped = False
        for k in range(len(idx)):
            if is_ear(k):
                tris.append((idx[k - 1], idx[k], idx[(k + 1) % len(idx)]))
                del idx[k]
                clipped = True
                break
        if not clipped:
            raise TriangulationError("no ear found (degenerate or self-intersecting input)")
    a, b, c = idx
    if _orient(coords[a], coords[b], coords[c]) > area_eps:
        tris.append((a, b, c))
    elif not tris:
        raise TriangulationError("degenerate final triangle")
    return tris


def triangulate_indexed(coords: np.ndarray, outer: list[int], holes: list[list[int]]):
    """Triangulate the region bounded by ``outer`` minus ``holes``.

    ``coords``: (m, 2) float array; ``outer``/``holes`` index into it.
    Returns CCW triangles as index triples into ``coords``.
    """
    coords = np.asarray(coords, dtype=np.float64)
    span = float(np.ptp(coords[outer], axis=0).max())
    eps = max(span, 1.0) * 1e-9

    if signed_area(coords, outer) < 0:
        outer = outer[::-1]
    fixed_holes = []
    for h in holes:
        if signed_area(coords, h) > 0:
            h = h[::-1]
        fixed_holes.append(h)
    # bridge right-most holes first so later bridges cannot cross earlier ones
    fixed_holes.sort(key=lambda h: -float(coords[h, 0].max()))

    ring = list(outer)
    for i, h in enumerate(fixed_holes):
        ring = _merge_hole(coords, ring, h, fixed_holes[i + 1:], eps)
    return _ear_clip(coords, ring, eps * max(span, 1.0), eps)


def triangulate_face(outer: np.ndarray, holes=None):
    """Convenience wrapper over coordinates; returns (vertices, triangles)."""
    outer = np.asarray(outer, dtype=np.float64)
    holes = [np.asarray(h, dtype=np.float64) for h in (holes or [])]
    coords = np.concatenate([outer] + holes, axis=0) if holes else outer.copy()
    outer_idx = list(range(len(outer)))
    hole_idx = []
    base = len(outer)
    for h in holes:
        hole_idx.append(list(range(base, base + len(h))))
        base += len(h)
    tris = triangulate_indexed(coords, outer_idx, hole_idx)
    return coords, tris


def local_triangle_neighbors(tri_vertices: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Neighbor indices of each triangle within one face, self-padded to 3.

    ``tri_vertices``: (T, 3, 3) in model units; neighbors share a whole edge.
    """
    T = tri_vertices.shape[0]
    nbrs: list[set[int]] = [set() for _ in range(T)]
    edge_map: dict[tuple, list[int]] = {}

    def vkey(v):
        return (int(round(v[0] / tol)), int(round(v[1] / tol)), int(round(v[2] / tol)))

    for t in range(T):
        vs = tri_vertices[t]
        for e in range(3):
            k1, k2 = vkey(vs[e]), vkey(vs[(e + 1) % 3])
            key = (k1, k2) if k1 <= k2 else (k2, k1)
            edge_map.setdefault(key, []).append(t)
    for members in edge_map.values():
        if len(members) == 2:
            a, b = members
            nbrs[a].add(b)
            nbrs[b].add(a)
    out = np.empty((T, 3), dtype=np.int64)
    for t in range(T):
        ns = sorted(nbrs[t])[:3]
        while len(ns) < 3:
            ns.append(t)
        out[t] = ns
    return out
