"""Noncomplete planar metric spaces and their discretizations.

Two continuum backends are provided: polygonal domains (an outer ring minus
holes, boundary distance measured to the nearest segment) and an analytic
disk whose boundary distance ``radius - |p - center|`` carries no
polygonization error.  Boundary-marked weighted graphs give an abstract third
backend where the metric is the interior path metric and the boundary
distance is the shortest path into the marked vertex set.

``build_grid_space`` clips an axis-aligned grid with 8-connected edges to a
continuum domain and equips every edge with a Euclidean weight and a
quasihyperbolic weight.  The quasihyperbolic weight of an edge (u, v) of
length L is the trapezoid value L * (1/d(u) + 1/d(v)) / 2, refined by
splitting the segment into ceil(2L / min(d(u), d(v))) pieces sampled inside
the segment whenever the endpoints are closer to the boundary than 2L.

All types are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from . import geometry
from .errors import DomainError, ParameterError, ResolutionError, UnreachableError
from .validation import as_point, as_points_array, check_positive

# virtual-subdivision count per edge is capped; edges this close to the
# boundary never participate in geodesics, only their finiteness matters
_MAX_SUBDIV = 1024


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParameterError("point coordinates must be finite")

    def __iter__(self):
        yield self.x
        yield self.y


# ---------------------------------------------------------------------------
# continuum backends


@dataclass(frozen=True)
class Disk:
    """Analytic disk backend; boundary distance is radius - |p - center|."""

    center: tuple = (0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        check_positive("radius", self.radius)

    def bounds(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def contains_many(self, pts):
        pts = as_points_array(pts)
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return d < self.radius - geometry.BOUNDARY_BAND

    def contains(self, p):
        return bool(self.contains_many([as_point(p)])[0])

    def boundary_distance_many(self, pts):
        pts = as_points_array(pts)
        return self.radius - np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])

    def boundary_distance(self, p):
        p = as_point(p)
        if not self.contains(p):
            raise DomainError(f"point {p} lies outside the disk")
        return float(self.boundary_distance_many([p])[0])

    def diameter(self):
        return 2.0 * self.radius

    def sample_points(self, rng, n):
        """Uniform interior samples (area measure)."""
        r = self.radius * np.sqrt(rng.random(n))
        th = rng.random(n) * 2.0 * np.pi
        return np.column_stack([self.center[0] + r * np.cos(th), self.center[1] + r * np.sin(th)])

    def to_json(self):
        return {"disk": {"center": list(self.center), "radius": self.radius}}


class PolygonalDomain:
    """Planar domain bounded by a simple outer ring minus simple holes."""

    def __init__(self, outer, holes=(), validate=True):
        self.outer = geometry.ring_array(outer)
        self.holes = tuple(geometry.ring_array(h) for h in holes)
        rings = (self.outer,) + self.holes
        seg = [geometry.ring_segments(r) for r in rings]
        self._seg_a = np.concatenate([s[0] for s in seg])
        self._seg_b = np.concatenate([s[1] for s in seg])
        if validate:
            self._validate()

    def _validate(self):
        if not geometry.ring_is_simple(self.outer):
            raise DomainError("outer ring is self-intersecting")
        outer_a, outer_b = geometry.ring_segments(self.outer)
        for i, h in enumerate(self.holes):
            if not geometry.ring_is_simple(h):
                raise DomainError(f"hole {i} is self-intersecting")
            if geometry.rings_intersect(self.outer, h):
                raise DomainError(f"hole {i} crosses the outer ring")
            if not geometry.even_odd_inside(h, outer_a, outer_b).all():
                raise DomainError(f"hole {i} is not strictly inside the outer ring")
            for j in range(i):
                if geometry.rings_intersect(h, self.holes[j]):
                    raise DomainError(f"holes {j} and {i} intersect")

    def bounds(self):
        return (
            float(self.outer[:, 0].min()),
            float(self.outer[:, 1].min()),
            float(self.outer[:, 0].max()),
            float(self.outer[:, 1].max()),
        )

    def contains_many(self, pts):
        # even-odd over all rings at once: a point inside the outer ring and
        # inside a hole has even parity, hence counts as outside
        return geometry.even_odd_inside(as_points_array(pts), self._seg_a, self._seg_b)

    def contains(self, p):
        return bool(self.contains_many([as_point(p)])[0])

    def boundary_distance_many(self, pts):
        return geometry.min_distance_to_segments(as_points_array(pts), self._seg_a, self._seg_b)

    def boundary_distance(self, p):
        p = as_point(p)
        if not self.contains(p):
            raise DomainError(f"point {p} lies outside the domain")
        return float(self.boundary_distance_many([p])[0])

    def diameter(self):
        # holes cannot extend the diameter, the outer ring decides it
        return geometry.polygon_diameter(self.outer)

    def sample_points(self, rng, n):
        """Uniform interior samples by rejection from the bounding box."""
        xmin, ymin, xmax, ymax = self.bounds()
        out = np.empty((0, 2))
        while len(out) < n:
            cand = rng.random((max(4 * n, 64), 2))
            cand[:, 0] = xmin + cand[:, 0] * (xmax - xmin)
            cand[:, 1] = ymin + cand[:, 1] * (ymax - ymin)
            out = np.concatenate([out, cand[self.contains_many(cand)]])
        return out[:n]

    def to_json(self):
        return {
            "outer": [[float(x), float(y)] for x, y in self.outer],
            "holes": [[[float(x), float(y)] for x, y in h] for h in self.holes],
        }

    def __repr__(self):
        return f"PolygonalDomain({len(self.outer)} outer vertices, {len(self.holes)} holes)"


def contains(domain, p):
    """Strict containment under the even-odd rule."""
    return domain.contains(p)


def boundary_distance(domain, p):
    """Distance from an interior point to the nearest boundary segment."""
    return domain.boundary_distance(p)


def diameter(domain):
    """Diameter of the closed domain."""
    return domain.diameter()


def load_domain(source):
    """Build a domain from a JSON dict, string, or file path."""
    if isinstance(source, (str, bytes)):
        text = source
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            with open(source) as fh:
                obj = json.load(fh)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise DomainError("domain JSON must be an object")
    if "disk" in obj:
        entry = obj["disk"]
        return Disk(tuple(entry.get("center", (0.0, 0.0))), float(entry.get("radius", 1.0)))
    if "outer" not in obj:
        raise DomainError("domain JSON needs an 'outer' ring (or a 'disk' entry)")
    return PolygonalDomain(obj["outer"], obj.get("holes", ()))


# ---------------------------------------------------------------------------
# abstract graph backend


class GraphSpace:
    """Boundary-marked weighted graph; the interior vertices form the space."""

    def __init__(self, vertices, edges, boundary):
        # vertices: sequence of ids or of (id, (x, y)) / {"id":..,"pos":..}
        ids = []
        pos = {}
        for v in vertices:
            if isinstance(v, dict):
                ids.append(v["id"])
                if v.get("pos") is not None:
                    pos[v["id"]] = as_point(v["pos"])
            elif isinstance(v, (tuple, list)) and len(v) == 2 and not isinstance(v[0], (int, float)):
                ids.append(v[0])
                if v[1] is not None:
                    pos[v[0]] = as_point(v[1])
            else:
                ids.append(v)
        if len(set(ids)) != len(ids):
            raise DomainError("duplicate vertex ids")
        self.ids = tuple(ids)
        self.positions = pos
        index = {u: i for i, u in enumerate(ids)}
        self.edges = []
        for u, v, length in edges:
            if u not in index or v not in index or u == v:
                raise DomainError(f"bad edge ({u!r}, {v!r})")
            check_positive("edge length", length)
            self.edges.append((u, v, float(length)))
        self.boundary = tuple(b for b in boundary)
        if not self.boundary:
            raise DomainError("boundary set must be nonempty")
        for b in self.boundary:
            if b not in index:
                raise DomainError(f"boundary id {b!r} is not a vertex")
        self.interior = tuple(u for u in ids if u not in set(self.boundary))
        if not self.interior:
            raise DomainError("no interior vertices")
        if not self._interior_connected():
            raise DomainError("interior vertices are not connected")

    def _adj(self, vertex_set=None):
        keep = set(self.ids if vertex_set is None else vertex_set)
        adj = {u: [] for u in keep}
        for u, v, w in self.edges:
            if u in keep and v in keep:
                adj[u].append((v, w))
                adj[v].append((u, w))
        return adj

    def _interior_connected(self):
        adj = self._adj(self.interior)
        seen = {self.interior[0]}
        stack = [self.interior[0]]
        while stack:
            for v, _ in adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self.interior)

    def to_json(self):
        verts = []
        for u in self.ids:
            entry = {"id": u}
            if u in self.positions:
                entry["pos"] = list(self.positions[u])
            verts.append(entry)
        return {
            "vertices": verts,
            "edges": [[u, v, w] for u, v, w in self.edges],
            "boundary": list(self.boundary),
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (str, bytes)):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError:
                with open(obj) as fh:
                    obj = json.load(fh)
        return cls(obj["vertices"], obj["edges"], obj["boundary"])


def _multi_source_dijkstra(adj, sources):
    dist = {u: math.inf for u in adj}
    heap = []
    for s in sources:
        dist[s] = 0.0
        heappush(heap, (0.0, s))
    while heap:
        du, u = heappop(heap)
        if du > dist[u]:
            continue
        for v, w in adj[u]:
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


# ---------------------------------------------------------------------------
# discrete space


def _subdivided_qh_weights(pu, pv, du, dv, length, sample_distance):
    """Quasihyperbolic edge weights via trapezoid rule with virtual splits.

    ``sample_distance(points) -> distances`` supplies boundary distances at
    interior sample points; endpoint distances are reused exactly.
    """
    pu = np.asarray(pu, float)
    pv = np.asarray(pv, float)
    du = np.asarray(du, float)
    dv = np.asarray(dv, float)
    length = np.asarray(length, float)
    dmin = np.minimum(du, dv)
    ratio = 2.0 * length / np.maximum(dmin, 1e-300)
    # snap before ceil so scale-invariant inputs keep identical split counts
    m = np.maximum(1, np.ceil(ratio - 1e-9).astype(int))
    m = np.minimum(m, _MAX_SUBDIV)
    w = np.empty(len(length))
    plain = m == 1
    w[plain] = length[plain] * (1.0 / du[plain] + 1.0 / dv[plain]) / 2.0
    for mv in np.unique(m[~plain]):
        sel = m == mv
        t = np.linspace(0.0, 1.0, mv + 1)[1:-1]
        samples = pu[sel][:, None, :] * (1.0 - t)[None, :, None] + pv[sel][:, None, :] * t[None, :, None]
        dd = sample_distance(samples.reshape(-1, 2)).reshape(sel.sum(), mv - 1)
        dd = np.maximum(dd, 1e-300)
        inv_end = 0.5 / du[sel] + 0.5 / dv[sel]
        w[sel] = (length[sel] / mv) * (inv_end + (1.0 / dd).sum(axis=1))
    return w


def _interp_qh_weights(du, dv, length):
    """Same trapezoid scheme for abstract edges, interpolating d linearly."""
    du = np.asarray(du, float)
    dv = np.asarray(dv, float)
    length = np.asarray(length, float)
    dmin = np.minimum(du, dv)
    m = np.maximum(1, np.ceil(2.0 * length / np.maximum(dmin, 1e-300) - 1e-9).astype(int))
    m = np.minimum(m, _MAX_SUBDIV)
    w = np.empty(len(length))
    for i in range(len(length)):
        t = np.linspace(0.0, 1.0, m[i] + 1)
        dd = np.maximum((1.0 - t) * du[i] + t * dv[i], 1e-300)
        inv = 1.0 / dd
        w[i] = (length[i] / m[i]) * (inv[0] / 2.0 + inv[1:-1].sum() + inv[-1] / 2.0)
    return w


class DiscreteSpace:
    """Finite vertex/edge approximation of a noncomplete metric space.

    Carries positions (when geometric), per-vertex boundary distance ``d``,
    and per-edge Euclidean and quasihyperbolic weights.  Immutable; geodesic
    queries against it are pure functions.
    """

    def __init__(self, backend, positions, d, edges, domain=None, h=None, labels=None):
        self.backend = backend
        self.positions = None if positions is None else np.asarray(positions, float)
        self.d = np.asarray(d, float)
        if np.any(self.d <= 0):
            raise DomainError("interior vertices must have positive boundary distance")
        self.edges_u = np.asarray([e[0] for e in edges], dtype=int)
        self.edges_v = np.asarray([e[1] for e in edges], dtype=int)
        self.edges_len = np.asarray([e[2] for e in edges], dtype=float)
        self.edges_qh = np.asarray([e[3] for e in edges], dtype=float)
        self.domain = domain
        self.h = h
        self.labels = labels
        n = len(self.d)
        adj_e = [[] for _ in range(n)]
        adj_q = [[] for _ in range(n)]
        for u, v, le, lq in zip(self.edges_u, self.edges_v, self.edges_len, self.edges_qh):
            adj_e[u].append((int(v), float(le)))
            adj_e[v].append((int(u), float(le)))
            adj_q[u].append((int(v), float(lq)))
            adj_q[v].append((int(u), float(lq)))
        for row_e, row_q in zip(adj_e, adj_q):
            row_e.sort()
            row_q.sort()
        self.adj_euclid = adj_e
        self.adj_qh = adj_q
        self._metric_cache = {}
        self._diam = None

    @property
    def n(self):
        return len(self.d)

    def __repr__(self):
        return f"DiscreteSpace({self.backend}, {self.n} vertices, {len(self.edges_u)} edges)"

    # -- metric ------------------------------------------------------------

    def metric(self, u, v):
        """Distance |u - v| of the underlying space between two vertices."""
        if self.positions is not None:
            pu, pv = self.positions[u], self.positions[v]
            return float(math.hypot(pu[0] - pv[0], pu[1] - pv[1]))
        return float(self._path_metric_from(u)[v])

    def _path_metric_from(self, u):
        if u not in self._metric_cache:
            dist = [math.inf] * self.n
            dist[u] = 0.0
            heap = [(0.0, u)]
            while heap:
                du_, x = heappop(heap)
                if du_ > dist[x]:
                    continue
                for y, w in self.adj_euclid[x]:
                    nd = du_ + w
                    if nd < dist[y]:
                        dist[y] = nd
                        heappush(heap, (nd, y))
            self._metric_cache[u] = dist
        return self._metric_cache[u]

    def space_diameter(self):
        """Diameter of the underlying space (domain diameter when available)."""
        if self._diam is None:
            if self.domain is not None:
                self._diam = self.domain.diameter()
            elif self.positions is not None:
                diff = self.positions[:, None, :] - self.positions[None, :, :]
                self._diam = float(np.sqrt((diff * diff).sum(axis=2)).max())
            else:
                self._diam = max(
                    max(x for x in self._path_metric_from(u) if math.isfinite(x)) for u in range(self.n)
                )
        return self._diam

    def eps_tolerance(self, factor=3.0):
        """Discretization slack: factor * (max sample spacing) / min d."""
        if self.h is not None:
            spacing = self.h
        elif len(self.edges_len) > 0:
            m = np.maximum(1, np.ceil(2.0 * self.edges_len / np.minimum(self.d[self.edges_u], self.d[self.edges_v]) - 1e-9))
            spacing = float((self.edges_len / m).max())
        else:
            spacing = 0.0
        return factor * spacing / float(self.d.min())

    def nearest_vertex(self, p):
        if self.positions is None:
            raise DomainError("space has no geometry; address vertices by id")
        p = as_point(p)
        dx = self.positions[:, 0] - p[0]
        dy = self.positions[:, 1] - p[1]
        return int(np.argmin(dx * dx + dy * dy))

    def vertex_id(self, label):
        if self.labels is None:
            raise DomainError("space has no vertex labels")
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown vertex label {label!r}") from None

    def remove_vertices(self, drop):
        """Sub-space on the surviving vertices; weights are kept, not rebuilt.

        Models inserting an obstacle: boundary distances keep their original
        values.  Returns (space, old_to_new index mapping).
        """
        drop = set(int(v) for v in drop)
        keep = [i for i in range(self.n) if i not in drop]
        old_to_new = {old: new for new, old in enumerate(keep)}
        edges = [
            (old_to_new[u], old_to_new[v], le, lq)
            for u, v, le, lq in zip(self.edges_u, self.edges_v, self.edges_len, self.edges_qh)
            if u in old_to_new and v in old_to_new
        ]
        sub = DiscreteSpace(
            self.backend,
            None if self.positions is None else self.positions[keep],
            self.d[keep],
            edges,
            domain=self.domain,
            h=self.h,
            labels=None if self.labels is None else tuple(self.labels[i] for i in keep),
        )
        return sub, old_to_new


def build_grid_space(domain, h):
    """Axis-aligned grid of spacing h clipped to the domain, 8-connected.

    Grid nodes sit at integer multiples of h.  An edge is kept only when both
    endpoints and the midpoint lie strictly inside the domain.
    """
    check_positive("h", h)
    xmin, ymin, xmax, ymax = domain.bounds()
    ix0, ix1 = math.ceil(xmin / h - 1e-9), math.floor(xmax / h + 1e-9)
    iy0, iy1 = math.ceil(ymin / h - 1e-9), math.floor(ymax / h + 1e-9)
    if ix1 < ix0 or iy1 < iy0:
        raise ResolutionError("grid spacing exceeds the domain extent")
    nx, ny = ix1 - ix0 + 1, iy1 - iy0 + 1
    ixs = np.arange(ix0, ix1 + 1)
    iys = np.arange(iy0, iy1 + 1)
    gx, gy = np.meshgrid(ixs * h, iys * h)  # row-major by (iy, ix)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = domain.contains_many(pts)
    if not inside.any():
        raise ResolutionError("no grid vertex falls inside the domain")
    index = np.full(nx * ny, -1, dtype=int)
    index[inside] = np.arange(inside.sum())
    index = index.reshape(ny, nx)
    vpts = pts[inside]
    d = domain.boundary_distance_many(vpts)

    edge_u, edge_v = [], []
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        src = index[max(0, -dy) : ny - max(0, dy), max(0, -dx) : nx - max(0, dx)]
        dst = index[max(0, dy) : ny - max(0, -dy), max(0, dx) : nx - max(0, -dx)]
        ok = (src >= 0) & (dst >= 0)
        edge_u.append(src[ok].ravel())
        edge_v.append(dst[ok].ravel())
    edge_u = np.concatenate(edge_u)
    edge_v = np.concatenate(edge_v)
    mids = (vpts[edge_u] + vpts[edge_v]) / 2.0
    ok = domain.contains_many(mids)
    edge_u, edge_v = edge_u[ok], edge_v[ok]
    pu, pv = vpts[edge_u], vpts[edge_v]
    lengths = np.hypot(pu[:, 0] - pv[:, 0], pu[:, 1] - pv[:, 1])
    qh = _subdivided_qh_weights(pu, pv, d[edge_u], d[edge_v], lengths, domain.boundary_distance_many)
    edges = list(zip(edge_u.tolist(), edge_v.tolist(), lengths.tolist(), qh.tolist()))
    return DiscreteSpace("grid", vpts, d, edges, domain=domain, h=float(h))


def build_graph_space(graph):
    """Discrete space over the interior of a boundary-marked graph.

    d(v) is the shortest-path distance into the boundary set; the space
    metric is the interior path metric.
    """
    full_adj = graph._adj()
    dist_to_boundary = _multi_source_dijkstra(full_adj, graph.boundary)
    interior = graph.interior
    index = {u: i for i, u in enumerate(interior)}
    d = np.array([dist_to_boundary[u] for u in interior])
    if not np.all(np.isfinite(d)):
        bad = interior[int(np.argmax(~np.isfinite(d)))]
        raise UnreachableError(f"vertex {bad!r} cannot reach the boundary")
    positions = None
    if all(u in graph.positions for u in interior):
        positions = np.array([graph.positions[u] for u in interior])
    raw = [(index[u], index[v], w) for u, v, w in graph.edges if u in index and v in index]
    if raw:
        eu = np.array([e[0] for e in raw])
        ev = np.array([e[1] for e in raw])
        el = np.array([e[2] for e in raw])
        qh = _interp_qh_weights(d[eu], d[ev], el)
        edges = list(zip(eu.tolist(), ev.tolist(), el.tolist(), qh.tolist()))
    else:
        edges = []
    space = DiscreteSpace("graph", positions, d, edges, labels=tuple(interior))
    if positions is not None:
        # positions on abstract graphs are for rendering only; the metric
        # stays the path metric
        space.positions_for_render = space.positions
        space.positions = None
    return space


# ---------------------------------------------------------------------------
# local quasiconvexity probe


def local_quasiconvexity_probe(space, lam, c, samples=64, pairs_per_ball=8, seed=42):
    """Sampled check that balls B(x, lam*d(x)) join points c-quasiconvexly.

    Euclidean-weight shortest paths between sampled pairs are compared with
    the space metric; reports the worst observed ratio.
    """
    from .john import ConditionReport, Witness  # local import, avoids a cycle
    from .qhmetric import shortest_path_tree

    check_in = 0.0 < lam <= 0.5
    if not check_in:
        raise ParameterError("lam must lie in (0, 1/2]")
    if c < 1.0:
        raise ParameterError("c must be >= 1")
    rng = np.random.default_rng(seed)
    n = space.n
    centers = np.arange(n) if n <= samples else rng.choice(n, size=samples, replace=False)
    worst = 0.0
    witness = None
    checked = 0
    for x in sorted(int(v) for v in centers):
        radius = lam * space.d[x]
        if space.positions is not None:
            px = space.positions[x]
            inball = np.nonzero(np.hypot(space.positions[:, 0] - px[0], space.positions[:, 1] - px[1]) < radius)[0]
        else:
            dists = space._path_metric_from(x)
            inball = np.array([v for v in range(n) if dists[v] < radius])
        if len(inball) < 2:
            continue  # empty ball, skipped sample
        k = min(pairs_per_ball, len(inball) * (len(inball) - 1) // 2)
        for _ in range(k):
            u, v = (int(w) for w in rng.choice(inball, size=2, replace=False))
            if u == v:
                continue
            sep = space.metric(u, v)
            if sep <= 0:
                continue
            dist, _ = shortest_path_tree(space, u, mode="euclid", target=v)
            ratio = dist[v] / sep
            checked += 1
            if ratio > worst:
                worst = ratio
                witness = Witness(basepoint=u, point=v, value=ratio)
    return ConditionReport(
        condition="LQC",
        constants={"lambda": lam, "c": c, "samples": float(checked)},
        worst_margin=c - worst,
        witness=witness,
    )
