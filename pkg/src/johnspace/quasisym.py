"""Explicit quasisymmetric maps, empirical control functions, distortion checks.

The gallery holds closed-form planar homeomorphisms: similarities, invertible
linear maps, and radial power stretches f(z) = c + (z - c)|z - c|^(alpha - 1).
A map f is eta-quasisymmetric when |x-a| <= t |x-b| forces
|f(x)-f(a)| <= eta(t) |f(x)-f(b)|; the control eta is estimated empirically
by sampling triples, binning by t, and taking the monotone envelope of the
per-bin suprema.  Sampled suprema underestimate the true control, so bounds
built from an estimate inflate it by 10 percent before use.

The distortion checks mirror how a John center transfers through f: images
of diameter carrot arcs stay diameter carrots at 2*eta(a); relative distances
of connected sets distort by at most 6 * eta_inverse; quasihyperbolic
distances distort coarsely as k' <= c1 * k + c2.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .domain import Disk, DiscreteSpace, PolygonalDomain
from .errors import DomainError, ParameterError, SingularPointError
from .john import ConditionReport, Witness, check_condition1, curve_prefix_diameters
from .qhmetric import pairwise_qh
from .validation import as_point, as_points_array, check_positive

ETA_INFLATION = 1.1


# ---------------------------------------------------------------------------
# map gallery


class QuasiMap:
    """Base class for the closed-form planar map gallery."""

    kind = "base"

    def transform(self, pts):
        raise NotImplementedError

    def apply(self, p):
        return tuple(float(v) for v in self.transform(np.asarray(as_point(p)).reshape(1, 2))[0])

    def inverse(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Similarity(QuasiMap):
    scale: float = 1.0
    rotation: float = 0.0
    translation: tuple = (0.0, 0.0)

    kind = "similarity"

    def __post_init__(self):
        check_positive("scale", self.scale)
        object.__setattr__(self, "translation", as_point(self.translation))

    def transform(self, pts):
        pts = as_points_array(pts)
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        x = self.scale * (c * pts[:, 0] - s * pts[:, 1]) + self.translation[0]
        y = self.scale * (s * pts[:, 0] + c * pts[:, 1]) + self.translation[1]
        return np.column_stack([x, y])

    def inverse(self):
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        tx, ty = self.translation
        inv_t = (-(c * tx - s * ty) / self.scale, -(s * tx + c * ty) / self.scale)
        return Similarity(1.0 / self.scale, -self.rotation, inv_t)

    def to_json(self):
        return {
            "kind": "similarity",
            "scale": self.scale,
            "rotation": self.rotation,
            "translation": list(self.translation),
        }


def identity_map():
    return Similarity(1.0, 0.0, (0.0, 0.0))


@dataclass(frozen=True)
class LinearMap(QuasiMap):
    matrix: tuple = ((1.0, 0.0), (0.0, 1.0))

    kind = "linear"

    def __post_init__(self):
        m = np.asarray(self.matrix, float)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ParameterError("linear map needs a finite 2x2 matrix")
        if abs(np.linalg.det(m)) < 1e-300:
            raise ParameterError("linear map must be invertible")
        object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in m))

    def transform(self, pts):
        return as_points_array(pts) @ np.asarray(self.matrix).T

    def inverse(self):
        return LinearMap(tuple(map(tuple, np.linalg.inv(np.asarray(self.matrix)))))

    def to_json(self):
        return {"kind": "linear", "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class RadialPower(QuasiMap):
    """f(z) = center + (z - center) |z - center|^(alpha - 1)."""

    alpha: float = 0.5
    center: tuple = (0.0, 0.0)

    kind = "radial_power"

    def __post_init__(self):
        check_positive("alpha", self.alpha)
        object.__setattr__(self, "center", as_point(self.center))

    def transform(self, pts):
        pts = as_points_array(pts)
        rel = pts - np.asarray(self.center)
        r = np.hypot(rel[:, 0], rel[:, 1])
        # continuous extension at the center: |f(z) - c| = r^alpha -> 0
        factor = np.where(r > 0.0, np.maximum(r, 1e-300) ** (self.alpha - 1.0), 0.0)
        return np.asarray(self.center) + rel * factor[:, None]

    def apply(self, p):
        p = as_point(p)
        if p == self.center and self.alpha < 1.0:
            raise SingularPointError("radial power map is singular at its center for alpha < 1")
        return tuple(float(v) for v in self.transform(np.asarray(p).reshape(1, 2))[0])

    def inverse(self):
        return RadialPower(1.0 / self.alpha, self.center)

    def to_json(self):
        return {"kind": "radial_power", "alpha": self.alpha, "center": list(self.center)}


def apply_map(mapping, p):
    """Evaluate a gallery map at one point."""
    return mapping.apply(p)


def load_map(source):
    if isinstance(source, (str, bytes)):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError:
            with open(source) as fh:
                obj = json.load(fh)
    else:
        obj = source
    kind = obj.get("kind")
    if kind == "similarity":
        return Similarity(obj.get("scale", 1.0), obj.get("rotation", 0.0), tuple(obj.get("translation", (0.0, 0.0))))
    if kind == "linear":
        return LinearMap(tuple(map(tuple, obj["matrix"])))
    if kind == "radial_power":
        return RadialPower(obj.get("alpha", 0.5), tuple(obj.get("center", (0.0, 0.0))))
    if kind == "identity":
        return identity_map()
    raise ParameterError(f"unknown map kind {kind!r}")


def image_domain_of(mapping, domain):
    """Image of a continuum domain under a gallery map, when closed-form.

    Affine-type maps move polygon vertices; radial powers fix disks centered
    at the map center.
    """
    if isinstance(mapping, (Similarity, LinearMap)):
        if isinstance(domain, PolygonalDomain):
            outer = mapping.transform(domain.outer)
            holes = [mapping.transform(h) for h in domain.holes]
            return PolygonalDomain(outer, holes, validate=False)
        if isinstance(domain, Disk) and isinstance(mapping, Similarity):
            return Disk(mapping.apply(domain.center), mapping.scale * domain.radius)
    if isinstance(mapping, RadialPower) and isinstance(domain, Disk):
        if as_point(mapping.center) == as_point(domain.center):
            return Disk(domain.center, domain.radius**mapping.alpha)
    raise DomainError("no closed-form image domain for this map/domain pair")


# ---------------------------------------------------------------------------
# pushing a discrete space through a map


def push_space(mapping, space, image_domain, on_outside="error"):
    """Image of a discrete space: same adjacency, recomputed geometry.

    Vertices move through the map, boundary distances are recomputed in the
    image domain, and both edge weights are rebuilt from image geometry.
    Vertices that land outside (numerically) either raise or, with
    ``on_outside='snap'`` on a disk image, are pulled just inside.
    """
    from .domain import _subdivided_qh_weights

    if space.positions is None:
        raise DomainError("only geometric spaces can be pushed through a map")
    pts = mapping.transform(space.positions)
    d = image_domain.boundary_distance_many(pts)
    bad = d <= 0.0
    if bad.any():
        if on_outside == "snap" and isinstance(image_domain, Disk):
            rel = pts[bad] - np.asarray(image_domain.center)
            r = np.hypot(rel[:, 0], rel[:, 1])
            pts[bad] = np.asarray(image_domain.center) + rel * (
                (image_domain.radius * (1.0 - 1e-9)) / np.maximum(r, 1e-300)
            )[:, None]
            d = image_domain.boundary_distance_many(pts)
        else:
            raise DomainError(f"{int(bad.sum())} image vertices land outside the image domain")
    pu = pts[space.edges_u]
    pv = pts[space.edges_v]
    lengths = np.hypot(pu[:, 0] - pv[:, 0], pu[:, 1] - pv[:, 1])
    qh = _subdivided_qh_weights(pu, pv, d[space.edges_u], d[space.edges_v], lengths, image_domain.boundary_distance_many)
    edges = list(zip(space.edges_u.tolist(), space.edges_v.tolist(), lengths.tolist(), qh.tolist()))
    # image edges have no single grid spacing; eps derives from edge pieces
    return DiscreteSpace("pushed", pts, d, edges, domain=image_domain, h=None)


def push_curve(mapping, curve, image_domain):
    """Image of a curve as a free polygonal curve in the image domain."""
    from .curves import curve_from_points

    if curve.points is None:
        raise DomainError("only geometric curves can be pushed through a map")
    return curve_from_points(image_domain, mapping.transform(curve.points))


# ---------------------------------------------------------------------------
# empirical control function


@dataclass(frozen=True)
class EtaEstimate:
    """Monotone envelope of sampled distortion ratios, binned by t.

    ``t_grid`` holds bin upper edges; ``eta_hat[i]`` is the envelope value on
    bin i; each bin supremum stores its witnessing triple so every recorded
    ratio is reproducible.
    """

    t_grid: object
    eta_hat: object
    n_samples: int
    witnesses: tuple

    def __call__(self, t):
        t = np.asarray(t, float)
        idx = np.clip(np.searchsorted(self.t_grid, t, side="left"), 0, len(self.t_grid) - 1)
        return self.eta_hat[idx] if t.ndim else float(self.eta_hat[int(idx)])

    def control(self, inflation=ETA_INFLATION):
        """Inflated copy of the envelope for use inside bounds."""
        hat = self.eta_hat * inflation

        def eta(t):
            t = np.asarray(t, float)
            idx = np.clip(np.searchsorted(self.t_grid, t, side="left"), 0, len(self.t_grid) - 1)
            return hat[idx] if t.ndim else float(hat[int(idx)])

        return eta

    def to_json(self):
        return {
            "t": [float(v) for v in self.t_grid],
            "eta": [float(v) for v in self.eta_hat],
            "n_samples": self.n_samples,
            "witnesses": [
                {"t": float(t), "ratio": float(r), "x": list(x), "a": list(a), "b": list(b)}
                for t, r, x, a, b in self.witnesses
            ],
        }


def estimate_eta(mapping, domain, n_triples=4000, bins=64, seed=0):
    """Empirical quasisymmetry control from sampled triples.

    Each sampled triple (x, a, b) contributes both orderings, so t = 1 always
    records a ratio >= 1 and forward/inverse estimates stay consistent.
    """
    if n_triples < 1000:
        raise ParameterError("need at least 1000 triples for a usable envelope")
    rng = np.random.default_rng(seed)
    pts = domain.sample_points(rng, 3 * n_triples)
    x, a, b = pts[0::3], pts[1::3], pts[2::3]
    sxa = np.hypot(*(x - a).T)
    sxb = np.hypot(*(x - b).T)
    keep = (sxa > 1e-12) & (sxb > 1e-12)
    x, a, b, sxa, sxb = x[keep], a[keep], b[keep], sxa[keep], sxb[keep]
    fx, fa, fb = mapping.transform(x), mapping.transform(a), mapping.transform(b)
    rxa = np.hypot(*(fx - fa).T)
    rxb = np.hypot(*(fx - fb).T)
    t = np.concatenate([sxa / sxb, sxb / sxa])
    ratio = np.concatenate([rxa / rxb, rxb / rxa])
    trip_x = np.concatenate([x, x])
    trip_a = np.concatenate([a, b])
    trip_b = np.concatenate([b, a])

    lo, hi = np.quantile(t, 0.001), np.quantile(t, 0.999)
    edges = np.logspace(math.log10(lo), math.log10(hi), bins)
    idx = np.clip(np.searchsorted(edges, t, side="left"), 0, bins - 1)
    sup = np.full(bins, np.nan)
    sup_at = np.full(bins, -1, dtype=int)
    for i in range(len(t)):
        j = idx[i]
        if not sup[j] >= ratio[i]:
            sup[j] = ratio[i]
            sup_at[j] = i
    filled = ~np.isnan(sup)
    envelope = np.where(filled, sup, -np.inf)
    envelope = np.maximum.accumulate(envelope)
    # leading empty bins inherit the first populated supremum
    first = envelope[np.argmax(np.isfinite(envelope))]
    envelope = np.where(np.isfinite(envelope), envelope, first)
    witnesses = tuple(
        (float(t[i]), float(ratio[i]), tuple(trip_x[i]), tuple(trip_a[i]), tuple(trip_b[i]))
        for i in sup_at
        if i >= 0
    )
    return EtaEstimate(t_grid=edges, eta_hat=envelope, n_samples=int(len(t)), witnesses=witnesses)


def eta_inverse_control(eta, t_min=1e-9, t_max=1e9):
    """Control of the inverse map: t -> 1 / eta^{-1}(1 / t), by bisection.

    Non-strictly-increasing handles (step envelopes) are strictified by a
    tiny +delta*t ramp first; a warning records the regularization.
    """
    probes = np.logspace(-6, 6, 49)
    vals = np.array([float(eta(t)) for t in probes])
    if np.any(np.diff(vals) <= 0.0):
        warnings.warn("eta handle is not strictly increasing; regularizing by +1e-12*t", RuntimeWarning, stacklevel=2)
        base = eta
        eta = lambda t: float(base(t)) + 1e-12 * t  # noqa: E731

    def inv(s):
        lo, hi = t_min, t_max
        flo, fhi = float(eta(lo)), float(eta(hi))
        if s <= flo:
            return lo
        if s >= fhi:
            return hi
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if float(eta(mid)) < s:
                lo = mid
            else:
                hi = mid
        return math.sqrt(lo * hi)

    def eta_prime(t):
        t = float(t)
        if t <= 0.0:
            raise ParameterError("inverse control is defined for t > 0")
        return 1.0 / inv(1.0 / t)

    return eta_prime


# ---------------------------------------------------------------------------
# distortion claims


def check_diameter_carrot_image(curve, mapping, image_domain, a, eta, eps=0.0):
    """Margin of the image curve against the diameter-carrot bound 2*eta(a).

    The source curve must be a diameter a-carrot; its image is checked at
    constant a' = 2*eta(a).
    """
    img = push_curve(mapping, curve, image_domain)
    a_prime = 2.0 * float(eta(a))
    diam = curve_prefix_diameters(img)
    margins = a_prime * np.asarray(img.d) + eps - diam
    return float(margins.min())


def relative_distance(curve_like):
    """diam(A) / dist(A, boundary) for a curve treated as a connected set."""
    pts = np.asarray(curve_like.points)
    diff = pts[:, None, :] - pts[None, :, :]
    diam = float(np.sqrt((diff * diff).sum(axis=2)).max())
    return diam / float(np.asarray(curve_like.d).min())


def check_relative_distance_claim(curve, mapping, image_domain, eta_prime, eps=0.0):
    """Margin of 6 * eta'(relative distance of the image) over the source's."""
    img = push_curve(mapping, curve, image_domain)
    lhs = relative_distance(curve)
    rhs = 6.0 * float(eta_prime(relative_distance(img)))
    return rhs + eps - lhs


@dataclass(frozen=True)
class CoarseDistortionResult:
    margins: object  # per-pair margin of c1*k + c2 - k'
    fitted_c1: float
    fitted_c2: float
    k_source: object
    k_image: object

    @property
    def worst_margin(self):
        return float(np.asarray(self.margins).min())


def _min_affine_majorant(k, kp):
    """Lexicographically minimal (c1, c2) with kp <= c1*k + c2 on the cloud.

    c1 is the final slope of the upper convex hull (clamped to >= 0), c2 the
    smallest intercept that still covers every point.
    """
    order = np.argsort(k, kind="stable")
    k, kp = np.asarray(k)[order], np.asarray(kp)[order]
    hull = []
    for p in zip(k, kp):
        # drop hull points at or below the chord: keep the upper hull
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    if len(hull) >= 2:
        (x1, y1), (x2, y2) = hull[-2], hull[-1]
        c1 = max(0.0, (y2 - y1) / (x2 - x1)) if x2 > x1 else 0.0
    else:
        c1 = 0.0
    c2 = float(np.max(kp - c1 * k))
    return float(c1), max(0.0, c2)


def check_coarse_qh_claim(pairs, space, image_space, c1, c2, eps=0.0):
    """Per-pair margins of c1*k + c2 over k', plus a fitted minimal pair."""
    pairs = [(int(u), int(v)) for u, v in pairs]
    k = pairwise_qh(space, pairs)
    kp = pairwise_qh(image_space, pairs)
    margins = c1 * k + c2 + eps - kp
    fc1, fc2 = _min_affine_majorant(k, kp)
    return CoarseDistortionResult(margins=margins, fitted_c1=fc1, fitted_c2=fc2, k_source=k, k_image=kp)


def small_scale_threshold(eta, lam, c):
    """t0 with 2 * eta(e^t0 - 1) = lam / (2c), found by bisection."""
    target = lam / (2.0 * c)
    lo, hi = 1e-12, 1.0
    while 2.0 * float(eta(math.expm1(hi))) < target:
        hi *= 2.0
        if hi > 1e6:
            raise ParameterError("eta never reaches the small-scale threshold")
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if 2.0 * float(eta(math.expm1(mid))) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def small_scale_bound(lam):
    """Image quasihyperbolic distance bound below the threshold."""
    return lam / (2.0 - lam)


# ---------------------------------------------------------------------------
# transfer verification


def assembled_transfer_bound(a, eta, eta_prime, c1, c2, lam, c):
    """Upper bound for the image John constant assembled from the pipeline.

    Composes: diameter-carrot image constant 2*eta(a); natural control
    phi'(t) = c1 * phi(6 * eta'(t)) + c2 with phi derived from a; then the
    doubling-step bound and the worst construction-case constant.  Loose by
    design; only achieved <= bound is ever asserted.
    """
    from .constructions import combined_case_constant, derive_c3_from_c5, derive_phi_from_c1

    a_diam = max(1.0, 2.0 * float(eta(a)))
    phi = derive_phi_from_c1(max(1.0, a))

    def phi_prime(t):
        return c1 * phi(6.0 * float(eta_prime(t))) + c2

    b = derive_c3_from_c5(a_diam, phi_prime)
    if 2.0 * b > 700.0:
        return math.inf
    return combined_case_constant(b, lam, c)


def quasisymmetric_transfer(
    space,
    image_space,
    mapping,
    x0,
    a,
    eta=None,
    lam=0.5,
    c=1.1,
    samples=200,
    n_pairs=400,
    seed=42,
):
    """Verify that the image of a John center is again a John center.

    Runs the carrot-arc search on the image space from the image center,
    reports the achieved constant, and compares it with the assembled
    pipeline bound built from the (estimated) control function.
    """
    x0 = int(x0)
    if eta is None:
        if space.domain is None:
            raise DomainError("eta must be supplied for spaces without a continuum domain")
        eta = estimate_eta(mapping, space.domain, seed=seed)
    eta_fn = eta.control() if isinstance(eta, EtaEstimate) else eta
    eta_prime = eta_inverse_control(eta_fn)

    # push_space preserves vertex order, so the image center shares the index
    _, profile_img = check_condition1(image_space, x0, samples=samples)
    a_image = profile_img.a

    rng = np.random.default_rng(seed)
    sources = rng.choice(space.n, size=min(8, space.n), replace=False)
    pairs = []
    for s in sorted(int(v) for v in sources):
        targets = rng.choice(space.n, size=min(max(1, n_pairs // max(1, len(sources))), space.n), replace=False)
        pairs.extend((s, int(t)) for t in targets if int(t) != s)
    coarse = check_coarse_qh_claim(pairs, space, image_space, 1.0, 0.0)
    c1, c2 = max(coarse.fitted_c1, 1e-9), coarse.fitted_c2
    bound = assembled_transfer_bound(a, eta_fn, eta_prime, c1, c2, lam, c)

    margin = math.inf if math.isinf(bound) and math.isfinite(a_image) else bound - a_image
    witness = Witness(basepoint=profile_img.worst_sample(), point=x0, value=a_image, detail="image carrot constant")
    return ConditionReport(
        condition="QS",
        constants={
            "a": a,
            "a_image": a_image,
            "bound": bound,
            "c1": c1,
            "c2": c2,
            "lambda": lam,
            "c": c,
        },
        worst_margin=margin,
        witness=witness,
        data={"profile": profile_img, "coarse": coarse},
    )
