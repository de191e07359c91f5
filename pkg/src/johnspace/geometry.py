"""Vectorized planar primitives: segment distances, ray casting, ring checks.

Points within ``BOUNDARY_BAND`` of a boundary segment are treated as boundary
points and excluded from the interior, which keeps containment deterministic
on grid-aligned inputs.
"""

from __future__ import annotations

import numpy as np

BOUNDARY_BAND = 1e-12

# chunk size for (points x segments) distance matrices, keeps memory bounded
_CHUNK = 4096


def ring_array(ring):
    arr = np.asarray(ring, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("a ring needs at least 3 planar vertices")
    return arr


def ring_segments(ring):
    """Return (a, b) arrays of segment endpoints for a closed ring."""
    a = ring_array(ring)
    return a, np.roll(a, -1, axis=0)


def segment_point_distance(pts, a, b):
    """Distances from each point to each segment, shape (n_pts, n_segs)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    ab = b - a
    denom = (ab * ab).sum(axis=1)
    denom = np.where(denom > 0.0, denom, 1.0)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip((ap * ab[None, :, :]).sum(axis=2) / denom[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    diff = pts[:, None, :] - proj
    return np.sqrt((diff * diff).sum(axis=2))


def min_distance_to_segments(pts, seg_a, seg_b):
    """Min distance from each point to a segment soup, computed in chunks."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.empty(len(pts))
    for i in range(0, len(pts), _CHUNK):
        out[i : i + _CHUNK] = segment_point_distance(pts[i : i + _CHUNK], seg_a, seg_b).min(axis=1)
    return out


def _crossings(pts, a, b):
    """Even-odd crossing counts of a rightward ray against a segment soup."""
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    ay, by = a[:, 1][None, :], b[:, 1][None, :]
    ax, bx = a[:, 0][None, :], b[:, 0][None, :]
    straddle = (ay > py) != (by > py)
    # x-coordinate where the ray meets the supporting line; guarded by straddle
    dy = np.where(straddle, by - ay, 1.0)
    xi = ax + (py - ay) * (bx - ax) / dy
    return (straddle & (px < xi)).sum(axis=1)


def even_odd_inside(pts, seg_a, seg_b):
    """Strict even-odd containment against all segments of all rings.

    Points within BOUNDARY_BAND of any segment count as boundary (outside).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    inside = np.zeros(len(pts), dtype=bool)
    for i in range(0, len(pts), _CHUNK):
        sl = slice(i, min(i + _CHUNK, len(pts)))
        chunk = pts[sl]
        parity = _crossings(chunk, seg_a, seg_b) % 2 == 1
        near = segment_point_distance(chunk, seg_a, seg_b).min(axis=1) < BOUNDARY_BAND
        inside[sl] = parity & ~near
    return inside


def polygon_diameter(ring):
    """Max pairwise vertex distance; equals the polygon diameter."""
    v = ring_array(ring)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=2)).max())


def _orient(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def segments_properly_intersect(p1, p2, p3, p4):
    """True when open segments p1p2 and p3p4 cross at a single interior point."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def ring_is_simple(ring):
    """Quadratic check that a closed ring has no self intersections."""
    v = ring_array(ring)
    n = len(v)
    segs = [(v[i], v[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent segments share an endpoint
            if segments_properly_intersect(*segs[i], *segs[j]):
                return False
    return True


def rings_intersect(ring_a, ring_b):
    va, vb = ring_array(ring_a), ring_array(ring_b)
    na, nb = len(va), len(vb)
    for i in range(na):
        for j in range(nb):
            if segments_properly_intersect(va[i], va[(i + 1) % na], vb[j], vb[(j + 1) % nb]):
                return True
    return False
