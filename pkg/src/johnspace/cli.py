"""Command-line front end: analysis runs, curve constructions, renderings.

Commands are batch only and deterministic for a fixed seed.  Exit codes:
0 all checks pass, 1 a property failed and the report carries a witness,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .constructions import construct_carrot_curve, empirical_condition3_bound, qh_geodesic_oracle
from .domain import GraphSpace, build_graph_space, build_grid_space, load_domain
from .errors import JohnspaceError
from .estimators import JohnAnalyzer
from .john import stratified_sample
from .quasisym import (
    estimate_eta,
    image_domain_of,
    load_map,
    push_space,
    quasisymmetric_transfer,
)
from .svg import render_report

MAX_EMBEDDED_CURVES = 32


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".johnspace-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _parse_center(text):
    try:
        x, y = (float(v) for v in text.split(","))
        return (x, y)
    except ValueError:
        raise JohnspaceError(f"bad --center value {text!r}, expected x,y") from None


def _load_domain_arg(path):
    if not os.path.exists(path):
        raise JohnspaceError(f"domain file not found: {path}")
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise JohnspaceError(f"malformed domain JSON: {exc}") from None
    if "vertices" in obj and "edges" in obj:
        return GraphSpace.from_json(obj), obj
    return load_domain(obj), obj


def _witness_points(space, reports):
    pts = []
    for rep in reports:
        if rep.passed or rep.witness is None or space.positions is None:
            continue
        v = rep.witness.basepoint
        if 0 <= v < space.n:
            pts.append([float(c) for c in space.positions[v]])
    return pts


def cmd_analyze(args):
    domain, domain_json = _load_domain_arg(args.domain)
    overrides = json.loads(args.constants) if args.constants else {}
    if isinstance(domain, GraphSpace):
        space = build_graph_space(domain)
        center = space.vertex_id(args.center_id) if args.center_id is not None else int(np.argmax(space.d))
    else:
        space = build_grid_space(domain, args.grid)
        if args.center is None:
            raise JohnspaceError("--center is required for continuum domains")
        p = _parse_center(args.center)
        if not domain.contains(p):
            raise JohnspaceError(f"center {p} lies outside the domain")
        center = space.nearest_vertex(p)
    analyzer = JohnAnalyzer(
        center=center,
        samples=args.samples,
        lam=overrides.get("lam", 0.5),
        c=overrides.get("c", 1.1),
        a_max=overrides.get("a_max"),
        seed=args.seed,
    )
    analyzer.fit(space)
    report = analyzer.report_json()
    report["domain"] = domain_json
    report["seed"] = args.seed
    if space.positions is not None:
        report["center"] = [float(c) for c in space.positions[center]]
        curves = []
        for x1 in sorted(analyzer.profile_.curves)[:MAX_EMBEDDED_CURVES]:
            curves.append(analyzer.profile_.curves[x1].to_json())
        report["curves"] = curves
        report["witness_points"] = _witness_points(space, analyzer.reports_.values())
    _atomic_write(args.out, _dump_json(report))
    return 0 if analyzer.passed_ else 1


def cmd_chain(args):
    domain, domain_json = _load_domain_arg(args.domain)
    if isinstance(domain, GraphSpace):
        raise JohnspaceError("chain rendering needs a continuum domain")
    space = build_grid_space(domain, args.grid)
    p0 = _parse_center(args.center)
    if not domain.contains(p0):
        raise JohnspaceError(f"center {p0} lies outside the domain")
    p1 = _parse_center(args.basepoint)
    if not domain.contains(p1):
        raise JohnspaceError(f"basepoint {p1} lies outside the domain")
    x0 = space.nearest_vertex(p0)
    x1 = space.nearest_vertex(p1)
    overrides = json.loads(args.constants) if args.constants else {}
    lam = overrides.get("lam", 0.5)
    c = overrides.get("c", 1.1)
    oracle = qh_geodesic_oracle(space, x0)
    b = overrides.get("b")
    if b is None:
        b = empirical_condition3_bound(space, x0, oracle, stratified_sample(space, args.samples))
    curve, case = construct_carrot_curve(space, x1, x0, b, lam, c, oracle)
    curve_json = curve.to_json()
    curve_json.setdefault("stages", [])
    report = {
        "kind": "chain",
        "domain": domain_json,
        "seed": args.seed,
        "case": case,
        "constants": {"b": b, "lam": lam, "c": c},
        "curve": curve_json,
    }
    _atomic_write(args.out, _dump_json(report))
    if args.svg:
        _atomic_write(args.svg, render_report(report))
    return 0


def cmd_qs(args):
    import warnings

    from .john import check_condition1, min_carrot_constant_for_curve
    from .quasisym import (
        check_diameter_carrot_image,
        check_relative_distance_claim,
        eta_inverse_control,
    )

    domain, domain_json = _load_domain_arg(args.domain)
    if isinstance(domain, GraphSpace):
        raise JohnspaceError("quasisymmetric transfer needs a continuum domain")
    mapping = load_map(args.map)
    space = build_grid_space(domain, args.grid)
    p0 = _parse_center(args.center)
    if not domain.contains(p0):
        raise JohnspaceError(f"center {p0} lies outside the domain")
    x0 = space.nearest_vertex(p0)
    image_domain = image_domain_of(mapping, domain)
    image_space = push_space(mapping, space, image_domain)

    _, profile = check_condition1(space, x0, samples=args.samples)
    eta = estimate_eta(mapping, domain, n_triples=max(1000, args.samples * 10), seed=args.seed)
    transfer = quasisymmetric_transfer(
        space, image_space, mapping, x0, max(1.0, profile.a), eta=eta, samples=args.samples, seed=args.seed
    )
    eta_fn = eta.control()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        eta_prime = eta_inverse_control(eta_fn)
    eps = space.eps_tolerance()
    dc_margin = math.inf
    rd_margin = math.inf
    for curve in profile.curves.values():
        if curve.n_vertices < 2:
            continue
        a_cv = max(1.0, min_carrot_constant_for_curve(curve))
        dc_margin = min(dc_margin, check_diameter_carrot_image(curve, mapping, image_domain, a_cv, eta_fn, eps=eps))
        rd_margin = min(rd_margin, check_relative_distance_claim(curve, mapping, image_domain, eta_prime, eps=eps))
    coarse = transfer.data["coarse"]
    coarse_margin = float(np.min(coarse.fitted_c1 * coarse.k_source + coarse.fitted_c2 + eps - coarse.k_image))
    claims_ok = dc_margin >= 0.0 and rd_margin >= 0.0 and coarse_margin >= 0.0
    ok = transfer.passed and math.isfinite(transfer.constants["a_image"]) and claims_ok
    report = {
        "kind": "qs",
        "domain": domain_json,
        "map": mapping.to_json(),
        "seed": args.seed,
        "a_source": float(profile.a),
        "a_image": float(transfer.constants["a_image"]),
        "transfer": transfer.to_json(),
        "claims": {
            "diameter_carrot_margin": float(dc_margin),
            "relative_distance_margin": float(rd_margin),
            "coarse": {
                "c1": float(coarse.fitted_c1),
                "c2": float(coarse.fitted_c2),
                "worst_margin": coarse_margin,
            },
        },
        "eta": eta.to_json(),
        "pass": bool(ok),
    }
    _atomic_write(args.out, _dump_json(report))
    return 0 if ok else 1


def cmd_render(args):
    if not os.path.exists(args.report):
        raise JohnspaceError(f"report file not found: {args.report}")
    with open(args.report) as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise JohnspaceError(f"malformed report JSON: {exc}") from None
    if not isinstance(report, dict):
        raise JohnspaceError("report JSON must be an object")
    _atomic_write(args.out, render_report(report))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="johnspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--domain", required=True, help="domain JSON path")
        p.add_argument("--center", help="center as x,y")
        p.add_argument("--grid", type=float, default=0.05, help="grid spacing h")
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--constants", help="JSON overrides, e.g. '{\"a_max\": 4}'")
        p.add_argument("--out", required=True, help="output report path")

    p = sub.add_parser("analyze", help="run the five condition checkers")
    common(p)
    p.add_argument("--center-id", help="center vertex id for graph domains")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chain", help="construct the case-routed carrot curve")
    common(p)
    p.add_argument("--basepoint", required=True, help="basepoint as x,y")
    p.add_argument("--svg", help="optional SVG overlay path")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("qs", help="verify quasisymmetric transfer")
    common(p)
    p.add_argument("--map", required=True, help="map JSON path")
    p.set_defaults(func=cmd_qs)

    p = sub.add_parser("render", help="render a report to SVG")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except JohnspaceError as exc:
        print(f"johnspace: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"johnspace: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
