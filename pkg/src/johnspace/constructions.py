"""Constant derivations and constructive carrot curves.

The derivations chain the quantitative constants between the five
conditions; the constructions build the condition-4 witness curve from a
condition-3 oracle, split into three exclusive cases by how far the
basepoint sits from the center:

  A  the basepoint is within (lam/c) * d(center): a locally quasiconvex
     shortcut already is a carrot arc,
  B  far but deep (d(x1) >= d(center)/2): the oracle curve itself works,
  C  far and shallow: concatenate oracle curves truncated at successive
     boundary-distance doublings until deep, then append the full tail.

The default oracle hands out quasihyperbolic geodesics toward the center;
they minimize the quantity condition 3 bounds, so they witness the condition
whenever anything does, up to discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import concat_curves, curve_from_vertices
from .errors import (
    CaseRoutingError,
    ConstructionError,
    OracleContractError,
    ParameterError,
)
from .john import carrot_margin, min_carrot_constant_for_curve, stopping_index
from .qhmetric import path_from_predecessors, shortest_path_tree


@dataclass(frozen=True)
class ConstantLedger:
    """Named constants with a note recording which derivation produced them."""

    entries: tuple = ()

    def with_constant(self, name, value, provenance):
        if value < 0:
            raise ParameterError(f"constant {name} must be >= 0")
        return ConstantLedger(self.entries + ((name, float(value), provenance),))

    def get(self, name):
        for n, v, _ in reversed(self.entries):
            if n == name:
                return v
        raise KeyError(name)

    def to_json(self):
        return [{"name": n, "value": v, "provenance": p} for n, v, p in self.entries]


# ---------------------------------------------------------------------------
# constant derivations


def derive_c2_from_c1(a):
    """(b, b1, b2) = (3a, a, (3 + log 2a) * a) from the carrot constant."""
    if a < 1.0:
        raise ParameterError("carrot constant must be >= 1")
    return 3.0 * a, a, (3.0 + math.log(2.0 * a)) * a


def derive_c3_from_c2(b, b1, b2):
    """Doubling-step bound from the growth bound; b1*log(2b) + b2 for b > 1."""
    return max(b1 * math.log(2.0 * b) + b2, b1 * math.log(2.0) + b2)


@dataclass(frozen=True)
class LogPhi:
    """Monotone control t -> b1 * log(1 + t) + b2."""

    b1: float
    b2: float

    def __call__(self, t):
        return self.b1 * math.log1p(t) + self.b2


def derive_phi_from_c1(a):
    """Natural-condition control built from the carrot constant."""
    _, b1, b2 = derive_c2_from_c1(a)
    return LogPhi(b1, b2)


def derive_c3_from_c5(a, phi):
    """Doubling-step bound from the natural condition: 2 * phi(2a(1+a)).

    The factor 2 absorbs the near-geodesic replacement curve the argument
    routes through.
    """
    if a < 1.0:
        raise ParameterError("carrot constant must be >= 1")
    return 2.0 * phi(2.0 * a * (1.0 + a))


def combined_case_constant(b, lam, c):
    """Carrot/quasiconvexity constant covering all three construction cases."""
    e2b = math.exp(2.0 * b)
    return max(lam / (1.0 - lam), e2b, c * math.exp(b) / lam, 4.0 * e2b, (4.0 * c / lam) * e2b)


# ---------------------------------------------------------------------------
# oracle and helpers


def qh_geodesic_oracle(space, x0):
    """Condition-3 oracle: quasihyperbolic geodesics toward the center.

    One shortest-path tree from the center serves every query; ``oracle(x)``
    returns the geodesic curve from x to the center.
    """
    x0 = int(x0)
    dist, pred = shortest_path_tree(space, x0, mode="qh")

    def oracle(x):
        ids = path_from_predecessors(pred, x0, int(x))[::-1]
        return curve_from_vertices(space, ids)

    return oracle


def empirical_condition3_bound(space, x0, oracle, sample_ids):
    """Max quasihyperbolic prefix at the stopping point over sampled curves."""
    d0 = float(space.d[int(x0)])
    worst = 0.0
    for x in sample_ids:
        curve = oracle(x)
        j = stopping_index(curve, d0)
        worst = max(worst, float(curve.prefix_qh[j]))
    return worst


def first_point_with_distance(curve, target):
    """Smallest vertex index with boundary distance >= target, else None."""
    hits = np.nonzero(np.asarray(curve.d) >= target)[0]
    return int(hits[0]) if len(hits) else None


def route_case(space, x1, x0, lam, c):
    """Exclusive A/B/C routing; the threshold itself routes to A."""
    x1, x0 = int(x1), int(x0)
    sep = space.metric(x1, x0)
    if sep <= (lam / c) * float(space.d[x0]):
        return "A"
    if float(space.d[x1]) >= 0.5 * float(space.d[x0]):
        return "B"
    return "C"


# ---------------------------------------------------------------------------
# case constructions


def construct_case_a(space, x1, x0, lam, c, eps=None):
    """Shortcut case: the Euclidean geodesic, certified as a carrot arc."""
    from .qhmetric import euclid_geodesic

    x1, x0 = int(x1), int(x0)
    eps = space.eps_tolerance() if eps is None else float(eps)
    sep = space.metric(x1, x0)
    if sep > (lam / c) * float(space.d[x0]):
        raise CaseRoutingError("basepoint too far from the center for case A")
    if x1 == x0:
        return curve_from_vertices(space, [x1], prefix_len=np.zeros(1), prefix_qh=np.zeros(1))
    geo = euclid_geodesic(space, x1, x0)
    curve = geo.curve if geo.curve.vertex_ids[0] == x1 else geo.curve.reversed()
    if curve.length > c * sep + eps:
        raise ConstructionError("case A path is not c-quasiconvex")
    bound = lam / (1.0 - lam)
    if min_carrot_constant_for_curve(curve) > bound + eps:
        raise ConstructionError(f"case A carrot constant exceeds {bound}")
    return curve


def construct_case_b(space, x1, x0, b, lam, c, cond3_oracle, eps=None):
    """Deep case: the oracle curve is already quasiconvex and a carrot arc."""
    x1, x0 = int(x1), int(x0)
    eps = space.eps_tolerance() if eps is None else float(eps)
    sep = space.metric(x1, x0)
    if sep <= (lam / c) * float(space.d[x0]) or float(space.d[x1]) < 0.5 * float(space.d[x0]):
        raise CaseRoutingError("case B needs a far, deep basepoint")
    curve = cond3_oracle(x1)
    if curve.qh > b + eps:
        raise OracleContractError(f"oracle curve has qh length {curve.qh:.6g} > {b:.6g}")
    if carrot_margin(curve, math.exp(2.0 * b)) < -eps:
        raise ConstructionError("case B curve misses the carrot bound exp(2b)")
    if curve.length > (c * math.exp(b) / lam) * sep + eps:
        raise ConstructionError("case B curve misses the quasiconvexity bound")
    return curve


def chain_construction(space, x1, x0, b, lam, c, cond3_oracle, eps=None):
    """Doubling chain: oracle curves truncated at distance doublings.

    Stage curves double the boundary distance of their start until the deep
    case is reached; the final stage appends the oracle curve whole.  The
    concatenation is certified as a 4*exp(2b)-carrot arc of length at most
    (4c / lam) * exp(2b) * |x1 - x0| with slack eps scaled by the stage count.
    """
    x1, x0 = int(x1), int(x0)
    eps = space.eps_tolerance() if eps is None else float(eps)
    d0 = float(space.d[x0])
    if space.metric(x1, x0) <= (lam / c) * d0 or float(space.d[x1]) >= 0.5 * d0:
        raise CaseRoutingError("chain construction needs a far, shallow basepoint")
    max_stages = math.ceil(math.log2(d0 / float(space.d[x1]))) + 1
    stages = []
    pieces = []
    current = x1
    while True:
        if len(pieces) > max_stages:
            raise ConstructionError("doubling chain failed to terminate")
        curve = cond3_oracle(current)
        if float(space.d[current]) >= 0.5 * d0:
            if curve.qh > b + eps:
                raise OracleContractError("oracle tail violates the prefix bound")
            pieces.append(curve)
            stages.append(_stage_entry(space, current, x0, curve.qh))
            break
        j = first_point_with_distance(curve, 2.0 * float(space.d[current]))
        if j is None:
            raise OracleContractError("oracle curve never doubles the boundary distance")
        piece = curve.subcurve(0, j)
        if piece.qh > b + eps:
            raise OracleContractError("oracle stage violates the prefix bound")
        nxt = piece.vertex_ids[-1]
        pieces.append(piece)
        stages.append(_stage_entry(space, current, nxt, piece.qh))
        current = nxt
    chain = pieces[0]
    for piece in pieces[1:]:
        chain = concat_curves(chain, piece)
    slack = eps * len(pieces)
    a_bound = 4.0 * math.exp(2.0 * b)
    if carrot_margin(chain, a_bound) < -slack:
        raise ConstructionError("chain misses the carrot bound 4*exp(2b)")
    if chain.length > (4.0 * c / lam) * math.exp(2.0 * b) * space.metric(x1, x0) + slack:
        raise ConstructionError("chain misses the total length bound")
    return chain.with_stages(stages)


def _stage_entry(space, u, v, qh_len):
    entry = {"from": int(u), "to": int(v), "qh_len": float(qh_len)}
    if space.positions is not None:
        entry["from_pos"] = [float(t) for t in space.positions[u]]
        entry["to_pos"] = [float(t) for t in space.positions[v]]
    return entry


def construct_carrot_curve(space, x1, x0, b, lam, c, cond3_oracle=None, eps=None):
    """Route a basepoint through the applicable case and build its curve."""
    if cond3_oracle is None:
        cond3_oracle = qh_geodesic_oracle(space, x0)
    case = route_case(space, x1, x0, lam, c)
    if case == "A":
        return construct_case_a(space, x1, x0, lam, c, eps=eps), case
    if case == "B":
        return construct_case_b(space, x1, x0, b, lam, c, cond3_oracle, eps=eps), case
    return chain_construction(space, x1, x0, b, lam, c, cond3_oracle, eps=eps), case
