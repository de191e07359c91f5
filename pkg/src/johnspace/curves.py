"""Polygonal curves with cached Euclidean and quasihyperbolic prefix lengths.

A curve either references vertices of a :class:`~johnspace.domain.DiscreteSpace`
(graph backend) or free points inside a continuum domain (analytic backend).
Prefix arrays are fixed at construction; all curve operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .domain import DiscreteSpace, _subdivided_qh_weights
from .errors import DegenerateCurveError, DomainError, MalformedCurveError
from .validation import as_points_array


@dataclass(frozen=True)
class PolyCurve:
    points: object  # (k, 2) array or None for abstract graph curves
    d: object  # (k,) boundary distances
    prefix_len: object  # cumulative Euclidean length
    prefix_qh: object  # cumulative quasihyperbolic length
    vertex_ids: tuple | None = None
    space: DiscreteSpace | None = None
    stages: tuple | None = None  # construction annotations, optional

    def __post_init__(self):
        pl = np.asarray(self.prefix_len, float)
        pq = np.asarray(self.prefix_qh, float)
        if pl[0] != 0.0 or pq[0] != 0.0:
            raise MalformedCurveError("prefix lengths must start at 0")
        if np.any(np.diff(pl) < 0) or np.any(np.diff(pq) < 0):
            raise MalformedCurveError("prefix lengths must be nondecreasing")
        if np.any(np.asarray(self.d, float) <= 0):
            raise DegenerateCurveError("curve touches the boundary")

    @property
    def n_vertices(self):
        return len(self.d)

    def start(self):
        return 0

    @property
    def length(self):
        return float(self.prefix_len[-1])

    @property
    def qh(self):
        return float(self.prefix_qh[-1])

    def point(self, i):
        if self.points is None:
            raise DomainError("abstract curve has no geometry")
        return tuple(float(c) for c in self.points[i])

    def reversed(self):
        k = self.n_vertices
        pl = self.prefix_len[-1] - np.asarray(self.prefix_len)[::-1]
        pq = self.prefix_qh[-1] - np.asarray(self.prefix_qh)[::-1]
        pl = pl - pl[0]
        pq = pq - pq[0]
        pl[0] = 0.0
        pq[0] = 0.0
        return PolyCurve(
            points=None if self.points is None else np.asarray(self.points)[::-1].copy(),
            d=np.asarray(self.d)[::-1].copy(),
            prefix_len=pl,
            prefix_qh=pq,
            vertex_ids=None if self.vertex_ids is None else tuple(reversed(self.vertex_ids)),
            space=self.space,
            stages=None,
        )

    def subcurve(self, i0, i1):
        """Prefix-consistent slice from vertex i0 to i1 inclusive."""
        if not 0 <= i0 <= i1 < self.n_vertices:
            raise MalformedCurveError("subcurve indices out of range")
        sl = slice(i0, i1 + 1)
        return PolyCurve(
            points=None if self.points is None else np.asarray(self.points)[sl].copy(),
            d=np.asarray(self.d)[sl].copy(),
            prefix_len=np.asarray(self.prefix_len)[sl] - self.prefix_len[i0],
            prefix_qh=np.asarray(self.prefix_qh)[sl] - self.prefix_qh[i0],
            vertex_ids=None if self.vertex_ids is None else self.vertex_ids[i0 : i1 + 1],
            space=self.space,
        )

    def with_stages(self, stages):
        return replace(self, stages=tuple(stages))

    def to_json(self):
        out = {"len": self.length, "qh_len": self.qh}
        if self.points is not None:
            out["vertices"] = [[float(x), float(y)] for x, y in np.asarray(self.points)]
        else:
            out["vertex_ids"] = list(self.vertex_ids)
        if self.stages is not None:
            out["stages"] = [dict(s) for s in self.stages]
        return out


def concat_curves(first, second):
    """Join two curves sharing an endpoint vertex; prefixes are re-based."""
    same_vertex = (
        first.vertex_ids is not None
        and second.vertex_ids is not None
        and first.vertex_ids[-1] == second.vertex_ids[0]
    )
    same_point = (
        first.points is not None
        and second.points is not None
        and np.allclose(first.points[-1], second.points[0], atol=0.0)
    )
    if not (same_vertex or same_point):
        raise MalformedCurveError("curves do not share an endpoint")
    pl = np.concatenate([first.prefix_len, first.prefix_len[-1] + np.asarray(second.prefix_len)[1:]])
    pq = np.concatenate([first.prefix_qh, first.prefix_qh[-1] + np.asarray(second.prefix_qh)[1:]])
    return PolyCurve(
        points=None
        if first.points is None
        else np.concatenate([first.points, np.asarray(second.points)[1:]]),
        d=np.concatenate([first.d, np.asarray(second.d)[1:]]),
        prefix_len=pl,
        prefix_qh=pq,
        vertex_ids=None if first.vertex_ids is None else first.vertex_ids + second.vertex_ids[1:],
        space=first.space or second.space,
    )


def curve_from_vertices(space, ids, prefix_qh=None, prefix_len=None):
    """Curve through consecutive-adjacent vertices of a discrete space.

    Precomputed prefixes (e.g. a geodesic's distance labels) may be passed so
    the stored values match the search bit for bit.
    """
    ids = tuple(int(i) for i in ids)
    if not ids:
        raise MalformedCurveError("a curve needs at least one vertex")
    if prefix_len is None or prefix_qh is None:
        pl = [0.0]
        pq = [0.0]
        for a, b in zip(ids[:-1], ids[1:]):
            we = next((w for v, w in space.adj_euclid[a] if v == b), None)
            wq = next((w for v, w in space.adj_qh[a] if v == b), None)
            if we is None:
                raise MalformedCurveError(f"vertices {a} and {b} are not adjacent")
            pl.append(pl[-1] + we)
            pq.append(pq[-1] + wq)
        # keep any prefix the caller supplied (e.g. geodesic labels) bit-exact
        if prefix_len is None:
            prefix_len = np.array(pl)
        if prefix_qh is None:
            prefix_qh = np.array(pq)
    return PolyCurve(
        points=None if space.positions is None else space.positions[list(ids)].copy(),
        d=space.d[list(ids)].copy(),
        prefix_len=np.asarray(prefix_len, float),
        prefix_qh=np.asarray(prefix_qh, float),
        vertex_ids=ids,
        space=space,
    )


def curve_from_points(domain, pts):
    """Free polygonal curve inside a continuum domain (analytic backend).

    Segment containment is enforced at endpoints and midpoints; the
    quasihyperbolic prefix uses the same subdivided trapezoid rule as grid
    edges.
    """
    pts = as_points_array(pts)
    if len(pts) == 0:
        raise MalformedCurveError("a curve needs at least one vertex")
    if not domain.contains_many(pts).all():
        raise DegenerateCurveError("curve vertex outside the domain")
    d = domain.boundary_distance_many(pts)
    if len(pts) > 1:
        mids = (pts[:-1] + pts[1:]) / 2.0
        if not domain.contains_many(mids).all():
            raise DegenerateCurveError("curve segment leaves the domain")
        seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
        qh = _subdivided_qh_weights(pts[:-1], pts[1:], d[:-1], d[1:], seg, domain.boundary_distance_many)
        prefix_len = np.concatenate([[0.0], np.cumsum(seg)])
        prefix_qh = np.concatenate([[0.0], np.cumsum(qh)])
    else:
        prefix_len = np.zeros(1)
        prefix_qh = np.zeros(1)
    return PolyCurve(points=pts, d=d, prefix_len=prefix_len, prefix_qh=prefix_qh)


def sampled_segment_curve(domain, p, q, n_subdivisions):
    """Straight segment from p to q sampled at n_subdivisions + 1 points."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    t = np.linspace(0.0, 1.0, int(n_subdivisions) + 1)[:, None]
    return curve_from_points(domain, p * (1.0 - t) + q * t)


def curve_length(curve):
    """Euclidean length: the final cumulative prefix."""
    return curve.length


def qh_length(curve):
    """Quasihyperbolic length: the final cumulative quasihyperbolic prefix."""
    return curve.qh


@dataclass(frozen=True)
class GeodesicResult:
    """A minimizing curve and the achieved infimum in the selected mode."""

    curve: PolyCurve
    value: float
    mode: str  # "euclid" or "qh"
