"""Carrot arcs and the five John-space condition checkers.

A length carrot arc from x at constant ``a`` satisfies
``prefix_len(z) <= a * d(z)`` at every vertex z; a space is length a-John
with center x0 when every basepoint admits such an arc into x0.  The five
checkers cover, in order:

  C1  length carrot arcs into the center exist (the defining property),
  C2  bounded relative diameter plus a logarithmic growth bound on the
      quasihyperbolic prefix along each arc,
  C3  bounded quasihyperbolic prefix up to the first point where the
      boundary distance doubles (or to the center when already deep),
  C4  quasiconvexity and the carrot property witnessed by one curve,
  C5  the diameter-carrot property plus the natural condition: the
      quasihyperbolic diameter of every prefix is controlled by a monotone
      function of its relative distance.

Margins reported by the checkers already include the per-space
discretization slack, so ``pass`` is exactly ``worst_margin >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import curve_from_vertices
from .errors import MalformedCurveError, ParameterError, UnreachableError
from .qhmetric import astar_euclid, path_from_predecessors, prefix_qh_diameter_lower, shortest_path_tree

BISECTION_TOL = 1e-3


@dataclass(frozen=True)
class Witness:
    """Where a margin is attained: a basepoint and a point on its curve."""

    basepoint: int
    point: int
    value: float
    detail: str = ""

    def to_json(self):
        out = {"basepoint": self.basepoint, "point": self.point, "value": self.value}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class ConditionReport:
    """Verdict for one condition: constants used, worst margin, witness."""

    condition: str
    constants: dict
    worst_margin: float
    witness: Witness | None = None
    data: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self):
        return self.worst_margin >= 0.0

    def to_json(self):
        return {
            "condition": self.condition,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "pass": bool(self.passed),
            "worst_margin": float(self.worst_margin),
            "witness": None if self.witness is None else self.witness.to_json(),
        }


@dataclass(frozen=True)
class JohnProfile:
    """Per-basepoint minimal carrot constants and the witnessing arcs."""

    center: int
    sample_ids: tuple
    a_by_sample: dict
    curves: dict
    failures: tuple = ()

    @property
    def a(self):
        feasible = [v for v in self.a_by_sample.values() if math.isfinite(v)]
        return max(feasible) if feasible else math.inf

    def worst_sample(self):
        return max(self.a_by_sample, key=lambda k: self.a_by_sample[k])

    def to_json(self):
        return {
            "center": self.center,
            "a": float(self.a),
            "samples": {str(k): float(v) for k, v in self.a_by_sample.items()},
            "failures": list(self.failures),
        }


# ---------------------------------------------------------------------------
# carrot primitives


def carrot_margin(curve, a):
    """min over curve vertices of (a * d - prefix_len); >= 0 iff a-carrot."""
    return float((a * np.asarray(curve.d) - np.asarray(curve.prefix_len)).min())


def min_carrot_constant_for_curve(curve):
    """Largest prefix-to-distance ratio: the least a with nonneg margin."""
    return float((np.asarray(curve.prefix_len) / np.asarray(curve.d)).max())


def _carrot_argmax(curve):
    return int(np.argmax(np.asarray(curve.prefix_len) / np.asarray(curve.d)))


def default_carrot_cap(space):
    """Search ceiling for the carrot constant; any simple path feasible at
    all is feasible here."""
    return 2.0 * space.space_diameter() / float(space.d.min())


def best_carrot_arc(space, x, x0, tol=BISECTION_TOL, a_max=None, _bracket=None):
    """Least carrot constant (within multiplicative ``tol``) joining x to x0.

    Bisection over the constant; each feasibility probe runs a shortest-path
    search that relaxes an edge only when the arrival keeps the prefix within
    the carrot bound.  Returns ``(curve, a)``; a not-John verdict (no
    feasible constant below ``a_max``) is ``(None, inf)``, distinguished from
    connectivity errors which raise.
    """
    x, x0 = int(x), int(x0)
    if a_max is None:
        a_max = default_carrot_cap(space)
    if x == x0:
        curve = curve_from_vertices(space, [x], prefix_len=np.zeros(1), prefix_qh=np.zeros(1))
        return curve, 1.0

    if _bracket is None:
        g, pred, found = astar_euclid(space, x, x0, carrot_a=None)
        if not found:
            raise UnreachableError(f"vertices {x} and {x0} are not connected")
        ids = path_from_predecessors(pred, x, x0)
        hi_curve = curve_from_vertices(space, ids, prefix_len=np.array([g[v] for v in ids]))
        lo = max(1.0, g[x0] / float(space.d[x0]))
        qdist, qpred = shortest_path_tree(space, x0, mode="qh", target=x)
        qids = path_from_predecessors(qpred, x0, x)[::-1]
        q_curve = curve_from_vertices(space, qids)
        if min_carrot_constant_for_curve(q_curve) < min_carrot_constant_for_curve(hi_curve):
            hi_curve = q_curve
    else:
        lo, hi_curve = _bracket
    hi = max(1.0, min_carrot_constant_for_curve(hi_curve))

    def probe(a):
        g, pred, found = astar_euclid(space, x, x0, carrot_a=a)
        if not found:
            return None
        ids = path_from_predecessors(pred, x, x0)
        return curve_from_vertices(space, ids, prefix_len=np.array([g[v] for v in ids]))

    if hi > a_max:
        cand = probe(a_max)
        if cand is None:
            return None, math.inf
        hi, hi_curve = a_max, cand
    if lo >= hi / (1.0 + tol):
        return hi_curve, hi
    cand = probe(lo)
    if cand is not None:
        return cand, lo
    while hi > lo * (1.0 + tol):
        mid = math.sqrt(lo * hi)
        cand = probe(mid)
        if cand is None:
            lo = mid
        else:
            hi, hi_curve = mid, cand
    return hi_curve, hi


# ---------------------------------------------------------------------------
# sampling


def stratified_sample(space, n, include_min_d=True):
    """Deterministic stratified basepoint sample.

    All vertices when the space is small; otherwise the smallest-id vertex of
    each cell of a near-square spatial partition, thinned evenly.  The vertex
    nearest the boundary is always included so worst-case basepoints are
    covered.
    """
    if n <= 0:
        raise ParameterError("sample count must be >= 1")
    if space.n <= n:
        return tuple(range(space.n))
    if space.positions is None:
        return tuple(range(n))
    pos = space.positions
    k = max(2, math.ceil(math.sqrt(n * 1.3)))
    xmin, ymin = pos.min(axis=0)
    xmax, ymax = pos.max(axis=0)
    cx = np.minimum(((pos[:, 0] - xmin) / max(xmax - xmin, 1e-300) * k).astype(int), k - 1)
    cy = np.minimum(((pos[:, 1] - ymin) / max(ymax - ymin, 1e-300) * k).astype(int), k - 1)
    cell = cy * k + cx
    order = np.argsort(cell, kind="stable")
    picks = []
    seen = set()
    for idx in order:
        c = cell[idx]
        if c not in seen:
            seen.add(c)
            picks.append(int(idx))
    if len(picks) > n:
        keep = np.unique(np.linspace(0, len(picks) - 1, n).round().astype(int))
        picks = [picks[i] for i in keep]
    if include_min_d:
        worst = int(np.argmin(space.d))
        if worst not in picks:
            picks[-1] = worst
    return tuple(sorted(set(picks)))


# ---------------------------------------------------------------------------
# condition checkers


def check_condition1(space, x0, samples=200, tol=BISECTION_TOL, a_max=None):
    """Search carrot arcs from sampled basepoints into the center.

    Returns (report, profile).  The report's margin is the slack left under
    the search ceiling; basepoints with no feasible constant flip the report
    to fail and are listed as witnesses.
    """
    x0 = int(x0)
    if a_max is None:
        a_max = default_carrot_cap(space)
    ids = stratified_sample(space, samples) if isinstance(samples, int) else tuple(int(s) for s in samples)

    # shared brackets: one Euclidean and one quasihyperbolic tree from the
    # center bound every basepoint's optimum from both sides
    edist, epred = shortest_path_tree(space, x0, mode="euclid")
    _, qpred = shortest_path_tree(space, x0, mode="qh")

    a_by = {}
    curves = {}
    failures = []
    for x in ids:
        if not math.isfinite(edist[x]):
            raise UnreachableError(f"vertex {x} cannot reach the center")
        if x == x0:
            curve, a = best_carrot_arc(space, x, x0, tol=tol, a_max=a_max)
        else:
            e_ids = path_from_predecessors(epred, x0, x)[::-1]
            e_curve = curve_from_vertices(space, e_ids)
            q_ids = path_from_predecessors(qpred, x0, x)[::-1]
            q_curve = curve_from_vertices(space, q_ids)
            hi_curve = min((e_curve, q_curve), key=min_carrot_constant_for_curve)
            lo = max(1.0, edist[x] / float(space.d[x0]))
            curve, a = best_carrot_arc(space, x, x0, tol=tol, a_max=a_max, _bracket=(lo, hi_curve))
        a_by[x] = a
        if curve is None:
            failures.append(x)
        else:
            curves[x] = curve
    profile = JohnProfile(center=x0, sample_ids=ids, a_by_sample=a_by, curves=curves, failures=tuple(failures))
    if failures:
        witness = Witness(basepoint=failures[0], point=failures[0], value=math.inf, detail="no feasible carrot constant")
        margin = -math.inf
    else:
        worst = profile.worst_sample()
        witness = Witness(basepoint=worst, point=_carrot_argmax(curves[worst]), value=profile.a)
        margin = a_max - profile.a
    report = ConditionReport(
        condition="C1",
        constants={"a": profile.a, "a_max": a_max, "tol": tol},
        worst_margin=margin,
        witness=witness,
        data={"profile": profile},
    )
    return report, profile


def _resolve_eps(space, eps):
    return space.eps_tolerance() if eps is None else float(eps)


def check_condition2(space, x0, curves, b, b1, b2, eps=None):
    """Relative-diameter bound and logarithmic qh growth along each curve.

    Checks diam(D) <= b * d(x0) and, for every curve from x1 and every vertex
    y on it, prefix_qh(y) <= b1 * |log(d(y) / d(x1))| + b2, all with the
    discretization slack folded into the margin.
    """
    eps = _resolve_eps(space, eps)
    x0 = int(x0)
    margin = b * float(space.d[x0]) + eps - space.space_diameter()
    witness = Witness(basepoint=x0, point=x0, value=space.space_diameter(), detail="diameter check")
    for x1, curve in curves.items():
        d = np.asarray(curve.d)
        bound = b1 * np.abs(np.log(d / d[0])) + b2 + eps
        margins = bound - np.asarray(curve.prefix_qh)
        j = int(np.argmin(margins))
        if margins[j] < margin:
            margin = float(margins[j])
            witness = Witness(basepoint=int(x1), point=j, value=float(curve.prefix_qh[j]))
    return ConditionReport(
        condition="C2",
        constants={"b": b, "b1": b1, "b2": b2, "eps": eps},
        worst_margin=margin,
        witness=witness,
    )


def stopping_index(curve, d0_center):
    """Index of the condition-3 stopping point y on a curve from x1.

    y is the last vertex (the center) when d(x1) >= d(center) / 2, otherwise
    the first vertex whose boundary distance has doubled.  Exact doubling is
    measure-zero on a grid, so the first vertex at or past the threshold is
    used and the crossing edge's earlier vertex is reported as the witness.
    """
    d = np.asarray(curve.d)
    if d[0] >= 0.5 * d0_center:
        return curve.n_vertices - 1
    past = np.nonzero(d >= 2.0 * d[0])[0]
    if len(past) == 0:
        raise MalformedCurveError("curve reaches neither a doubling point nor the center")
    return int(past[0])


def check_condition3(space, x0, curves, b, eps=None):
    """Quasihyperbolic prefix bound up to the doubling point (or center)."""
    eps = _resolve_eps(space, eps)
    x0 = int(x0)
    d0 = float(space.d[x0])
    margin = math.inf
    witness = None
    for x1, curve in curves.items():
        if curve.vertex_ids is not None and curve.vertex_ids[-1] != x0:
            raise MalformedCurveError(f"curve from {x1} does not end at the center")
        j = stopping_index(curve, d0)
        m = b + eps - float(curve.prefix_qh[j])
        if m < margin:
            margin = m
            witness = Witness(basepoint=int(x1), point=max(j - 1, 0), value=float(curve.prefix_qh[j]), detail="crossing edge start")
    if witness is None:
        margin = b + eps
    return ConditionReport(
        condition="C3",
        constants={"b": b, "eps": eps},
        worst_margin=margin,
        witness=witness,
    )


def check_condition4(space, x0, curves, a, eps=None):
    """One curve per basepoint must be both a-quasiconvex and an a-carrot."""
    eps = _resolve_eps(space, eps)
    x0 = int(x0)
    margin = math.inf
    witness = None
    for x1, curve in curves.items():
        sep = space.metric(int(x1), x0)
        m_qc = a * sep + eps - curve.length
        m_carrot = carrot_margin(curve, a) + eps
        if m_qc < margin:
            margin = float(m_qc)
            witness = Witness(basepoint=int(x1), point=curve.n_vertices - 1, value=curve.length, detail="quasiconvexity")
        if m_carrot < margin:
            margin = float(m_carrot)
            witness = Witness(basepoint=int(x1), point=_carrot_argmax(curve), value=min_carrot_constant_for_curve(curve), detail="carrot")
    if witness is None:
        margin = eps
    return ConditionReport(
        condition="C4",
        constants={"a": a, "eps": eps},
        worst_margin=margin,
        witness=witness,
    )


def _prefix_diameters(points):
    """diam of the first j+1 points, for every j; quadratic but vectorized."""
    pts = np.asarray(points)
    k = len(pts)
    out = np.zeros(k)
    best = 0.0
    for j in range(1, k):
        dj = np.hypot(pts[:j, 0] - pts[j, 0], pts[:j, 1] - pts[j, 1]).max()
        best = max(best, float(dj))
        out[j] = best
    return out


def curve_prefix_diameters(curve, space=None):
    if curve.points is not None:
        return _prefix_diameters(curve.points)
    space = space or curve.space
    ids = curve.vertex_ids
    k = len(ids)
    out = np.zeros(k)
    best = 0.0
    for j in range(1, k):
        dj = max(space.metric(ids[i], ids[j]) for i in range(j))
        best = max(best, dj)
        out[j] = best
    return out


def check_condition5(space, x0, curves, a, phi, eps=None, max_probes=8):
    """Diameter-carrot property plus the natural condition.

    diameter carrot: diam(curve[0..z]) <= a * d(z) for every z.  natural: the
    lower bracket of the prefix quasihyperbolic diameter stays below
    phi(prefix diameter / min boundary distance along the prefix).
    """
    eps = _resolve_eps(space, eps)
    _check_monotone(phi)
    margin = math.inf
    witness = None
    for x1, curve in curves.items():
        diam = curve_prefix_diameters(curve, space)
        d = np.asarray(curve.d)
        m_dc = a * d + eps - diam
        j = int(np.argmin(m_dc))
        if m_dc[j] < margin:
            margin = float(m_dc[j])
            witness = Witness(basepoint=int(x1), point=j, value=float(diam[j]), detail="diameter carrot")
        lower = prefix_qh_diameter_lower(curve, max_probes=max_probes, space=space)
        dist_prefix = np.minimum.accumulate(d)
        phi_vals = np.array([phi(t) for t in diam / dist_prefix])
        m_nat = phi_vals + eps - lower
        j = int(np.argmin(m_nat))
        if m_nat[j] < margin:
            margin = float(m_nat[j])
            witness = Witness(basepoint=int(x1), point=j, value=float(lower[j]), detail="natural condition")
    if witness is None:
        margin = eps
    return ConditionReport(
        condition="C5",
        constants={"a": a, "eps": eps},
        worst_margin=margin,
        witness=witness,
    )


def _check_monotone(phi, lo=0.0, hi=64.0, n=17):
    vals = [phi(t) for t in np.linspace(lo, hi, n)]
    if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
        raise ParameterError("phi must be nondecreasing")
