"""Scikit-learn style estimators wrapping the functional core.

These facades follow the fit/predict/transform conventions (parameters in
``__init__``, learned state in trailing-underscore attributes, ``get_params``
through :class:`~sklearn.base.BaseEstimator`) so the analysis composes with
the wider ecosystem: pipelines, ``clone``, grid search over ``grid_h``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .constructions import ConstantLedger, derive_c2_from_c1, derive_c3_from_c2, derive_phi_from_c1
from .domain import DiscreteSpace, build_grid_space
from .errors import ParameterError
from .john import check_condition1, check_condition2, check_condition3, check_condition4, check_condition5
from .quasisym import QuasiMap, estimate_eta, eta_inverse_control
from .validation import as_point, as_points_array


class JohnAnalyzer(BaseEstimator):
    """Estimate the John constant of a domain and verify the five conditions.

    Parameters
    ----------
    center : (x, y) pair or int or None
        The distinguished center point.  Coordinates for continuum domains,
        a vertex index for prebuilt spaces; None picks the deepest vertex.
    grid_h : float
        Grid spacing used when fitting a continuum domain.
    samples : int
        Basepoint budget for the stratified sample.
    lam, c : float
        Local quasiconvexity data assumed for the space.
    a_max : float or None
        Carrot search ceiling; None derives it from the space.
    conditions : sequence of str
        Which of C1..C5 to evaluate during fit.

    Attributes
    ----------
    space_ : DiscreteSpace
    center_vertex_ : int
    profile_ : JohnProfile
    john_constant_ : float
    reports_ : dict of condition id to ConditionReport
    passed_ : bool
    """

    def __init__(
        self,
        center=None,
        grid_h=0.05,
        samples=200,
        lam=0.5,
        c=1.1,
        a_max=None,
        conditions=("C1", "C2", "C3", "C4", "C5"),
        seed=42,
    ):
        self.center = center
        self.grid_h = grid_h
        self.samples = samples
        self.lam = lam
        self.c = c
        self.a_max = a_max
        self.conditions = conditions
        self.seed = seed

    def fit(self, X, y=None):
        """Analyze a domain (continuum backend) or a prebuilt DiscreteSpace."""
        if isinstance(X, DiscreteSpace):
            space = X
        else:
            space = build_grid_space(X, self.grid_h)
        if self.center is None:
            x0 = int(np.argmax(space.d))
        elif isinstance(self.center, (int, np.integer)):
            x0 = int(self.center)
        else:
            x0 = space.nearest_vertex(as_point(self.center))
        report1, profile = check_condition1(space, x0, samples=self.samples, a_max=self.a_max)
        a = max(1.0, profile.a)
        reports = {"C1": report1}
        ledger = ConstantLedger()
        ledger = ledger.with_constant("lambda", self.lam, "assumed local quasiconvexity")
        ledger = ledger.with_constant("c", self.c, "assumed local quasiconvexity")
        ledger = ledger.with_constant("a", a, "measured carrot search (C1)")
        if math.isfinite(profile.a):
            b, b1, b2 = derive_c2_from_c1(a)
            ledger = ledger.with_constant("b", b, "derived C1 to C2")
            ledger = ledger.with_constant("b1", b1, "derived C1 to C2")
            ledger = ledger.with_constant("b2", b2, "derived C1 to C2")
            ledger = ledger.with_constant("b3", derive_c3_from_c2(b, b1, b2), "derived C2 to C3")
            curves = profile.curves
            if "C2" in self.conditions:
                reports["C2"] = check_condition2(space, x0, curves, b, b1, b2)
            if "C3" in self.conditions:
                reports["C3"] = check_condition3(space, x0, curves, ledger.get("b3"))
            if "C4" in self.conditions:
                # certify at the constant the stored curves actually achieve
                ratios = [
                    cv.length / space.metric(x1, x0) for x1, cv in curves.items() if x1 != x0
                ]
                a4 = max([a] + ratios)
                reports["C4"] = check_condition4(space, x0, curves, a4)
            if "C5" in self.conditions:
                reports["C5"] = check_condition5(space, x0, curves, a, derive_phi_from_c1(a))
        self.space_ = space
        self.center_vertex_ = x0
        self.profile_ = profile
        self.john_constant_ = profile.a
        self.reports_ = reports
        self.constants_ = ledger
        self.eps_ = space.eps_tolerance()
        self.passed_ = all(r.passed for r in reports.values())
        return self

    def predict(self, X):
        """Per-point minimal carrot constant toward the fitted center."""
        from .john import best_carrot_arc

        self._check_fitted()
        pts = as_points_array(X)
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            v = self.space_.nearest_vertex(p)
            _, out[i] = best_carrot_arc(self.space_, v, self.center_vertex_, a_max=self.a_max or None)
        return out

    def report_json(self):
        self._check_fitted()
        return {
            "center_vertex": self.center_vertex_,
            "a": float(self.john_constant_),
            "eps": float(self.eps_),
            "pass": bool(self.passed_),
            "constants": self.constants_.to_json(),
            "conditions": [r.to_json() for r in self.reports_.values()],
        }

    def _check_fitted(self):
        if not hasattr(self, "space_"):
            raise ParameterError("call fit before using the analyzer")


class EtaEstimator(BaseEstimator):
    """Fit an empirical quasisymmetry control function for a planar map.

    Parameters
    ----------
    mapping : QuasiMap
    n_triples : int
    bins : int
    seed : int
    inflation : float
        Multiplier applied before the control is used inside bounds.

    Attributes
    ----------
    estimate_ : EtaEstimate
    control_ : callable, the inflated monotone envelope
    inverse_control_ : callable, control of the inverse map
    """

    def __init__(self, mapping=None, n_triples=4000, bins=64, seed=0, inflation=1.1):
        self.mapping = mapping
        self.n_triples = n_triples
        self.bins = bins
        self.seed = seed
        self.inflation = inflation

    def fit(self, X, y=None):
        """Sample triples inside the domain X and build the envelope."""
        if self.mapping is None:
            raise ParameterError("EtaEstimator needs a mapping")
        self.estimate_ = estimate_eta(
            self.mapping, X, n_triples=self.n_triples, bins=self.bins, seed=self.seed
        )
        self.control_ = self.estimate_.control(self.inflation)
        self.inverse_control_ = eta_inverse_control(self.control_)
        return self

    def predict(self, t):
        """Envelope values at the requested distortion parameters."""
        if not hasattr(self, "estimate_"):
            raise ParameterError("call fit before predicting")
        return np.asarray([float(self.estimate_(v)) for v in np.atleast_1d(t)])


class QuasiMapTransformer(BaseEstimator, TransformerMixin):
    """Stateless transformer applying a gallery map to point arrays."""

    def __init__(self, mapping=None):
        self.mapping = mapping

    def fit(self, X=None, y=None):
        if not isinstance(self.mapping, QuasiMap):
            raise ParameterError("QuasiMapTransformer needs a QuasiMap")
        return self

    def transform(self, X):
        self.fit()
        return self.mapping.transform(as_points_array(X))

    def inverse_transform(self, X):
        self.fit()
        return self.mapping.inverse().transform(as_points_array(X))
