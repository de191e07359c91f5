"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
repeated in the terminal summary.
"""

import json
import math
import time
import warnings

import numpy as np
import pytest

import johnspace as js
from johnspace import fixtures as fx
from johnspace.cli import main as cli_main

import oracles

RESULTS = []


def record(number, name, ok, detail):
    line = f"ACCEPTANCE {number} ({name}): {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def disk_001():
    return js.build_grid_space(fx.unit_disk(), 0.01)


@pytest.fixture(scope="module")
def slit_002():
    return js.build_grid_space(fx.slit_rectangle(), 0.02)


@pytest.fixture(scope="module")
def fixture_analyses(disk_001, slit_002):
    """Condition-1 profiles for the four standing fixtures (criterion 4/6/7)."""
    specs = {
        "disk": (js.build_grid_space(fx.unit_disk(), 0.05), (0.0, 0.0)),
        "square": (js.build_grid_space(fx.unit_square(), 0.05), (0.5, 0.5)),
        "l_shape": (js.build_grid_space(fx.l_shape(), 0.05), fx.L_SHAPE_CENTER),
        "slit": (slit_002, fx.SLIT_CENTER),
    }
    out = {}
    for name, (space, center) in specs.items():
        x0 = space.nearest_vertex(center)
        _, profile = js.check_condition1(space, x0, samples=200)
        out[name] = (space, x0, profile)
    return out


def test_criterion_1_qh_metric_disk(disk_001):
    sp = disk_001
    x = sp.nearest_vertex((0.0, 0.0))
    worst = 0.0
    slowest = 0.0
    for r in (0.3, 0.6, 0.9):
        y = sp.nearest_vertex((r, 0.0))
        t0 = time.perf_counter()
        got = js.qh_distance(sp, x, y).value
        elapsed = time.perf_counter() - t0
        expected = math.log(1.0 / (1.0 - r))
        worst = max(worst, abs(got - expected) / expected)
        slowest = max(slowest, elapsed)
    record(
        1,
        "quasihyperbolic metric",
        worst <= 0.03 and slowest < 30.0,
        f"max rel err {worst:.2e} (tol 3e-2), slowest query {slowest:.2f}s (cap 30s)",
    )


def test_criterion_2_graph_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_k = 0.0
    worst_a = 0.0
    for trial in range(50):
        g = fx.random_graph_space(seed=trial)
        sp = js.build_graph_space(g)
        for x, y in rng.integers(0, sp.n, size=(3, 2)):
            x, y = int(x), int(y)
            got = js.qh_distance(sp, x, y).value
            ref = 0.0 if x == y else oracles.exhaustive_shortest(sp.adj_qh, x, y)
            worst_k = max(worst_k, abs(got - ref))
            _, a = js.best_carrot_arc(sp, x, y)
            a_ref = oracles.exhaustive_best_carrot(sp, x, y)
            worst_a = max(worst_a, abs(a - a_ref) / a_ref)
    elapsed = time.perf_counter() - t0
    record(
        2,
        "small-graph oracle equivalence",
        worst_k <= 1e-12 and worst_a <= 1e-3 + 1e-9 and elapsed < 60.0,
        f"max |k - oracle| {worst_k:.1e}, max carrot gap {worst_a:.1e}, {elapsed:.1f}s (cap 60s)",
    )


def test_criterion_3_john_constants(disk_001):
    # coarse square first: the exact branch-and-bound oracle validates the
    # search from the four corner regions
    coarse = js.build_grid_space(fx.unit_square(), 0.1)
    x0c = coarse.nearest_vertex((0.5, 0.5))
    oracle_gap = 0.0
    for corner in ((0.1, 0.1), (0.9, 0.1), (0.1, 0.9), (0.9, 0.9)):
        v = coarse.nearest_vertex(corner)
        _, a_search = js.best_carrot_arc(coarse, v, x0c)
        a_exact = oracles.bb_min_carrot(coarse, v, x0c)
        oracle_gap = max(oracle_gap, abs(a_search - a_exact) / a_exact)
    # fine runs
    x0 = disk_001.nearest_vertex((0.0, 0.0))
    _, disk_profile = js.check_condition1(disk_001, x0, samples=200)
    square = js.build_grid_space(fx.unit_square(), 0.01)
    x0s = square.nearest_vertex((0.5, 0.5))
    _, square_profile = js.check_condition1(square, x0s, samples=200)
    disk_ok = abs(disk_profile.a - 1.0) <= 0.1
    square_ok = abs(square_profile.a - math.sqrt(2.0)) <= 0.15
    record(
        3,
        "John constants of analytic fixtures",
        oracle_gap <= 1e-3 + 1e-9 and disk_ok and square_ok,
        f"corner oracle gap {oracle_gap:.1e}, disk a {disk_profile.a:.4f} (1 +- 0.1), "
        f"square a {square_profile.a:.4f} (sqrt2 +- 0.15)",
    )


def test_criterion_4_implication_suite(fixture_analyses):
    worst = math.inf
    details = []
    for name, (space, x0, profile) in fixture_analyses.items():
        a = max(1.0, profile.a)
        eps = space.eps_tolerance()
        b, b1, b2 = js.derive_c2_from_c1(a)
        rep2 = js.check_condition2(space, x0, profile.curves, b, b1, b2, eps=eps)
        rep3 = js.check_condition3(space, x0, profile.curves, js.derive_c3_from_c2(b, b1, b2), eps=eps)
        rep5 = js.check_condition5(space, x0, profile.curves, a, js.derive_phi_from_c1(a), eps=eps, max_probes=6)
        # margins already fold in +eps, so pass means raw margin >= -eps
        fixture_worst = min(rep2.worst_margin, rep3.worst_margin, rep5.worst_margin)
        worst = min(worst, fixture_worst)
        details.append(f"{name} {fixture_worst:.3f}")
    record(4, "implication suite with derived constants", worst >= 0.0, "worst slack-adjusted margins: " + ", ".join(details))


def test_criterion_5_chain_bounds(slit_002):
    sp = slit_002
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = js.qh_geodesic_oracle(sp, x0)
    ids = js.stratified_sample(sp, 400)
    b = js.empirical_condition3_bound(sp, x0, oracle, ids)
    eps = sp.eps_tolerance()
    d0 = float(sp.d[x0])
    lam, c = 0.5, 1.1
    a_bound = 4.0 * math.exp(2.0 * b)
    len_factor = (4.0 * c / lam) * math.exp(2.0 * b)
    n_done = 0
    ok = True
    worst_carrot = math.inf
    for x1 in ids:
        if js.route_case(sp, int(x1), x0, lam, c) != "C":
            continue
        curve = js.chain_construction(sp, int(x1), x0, b, lam, c, oracle)
        n = len(curve.stages)
        slack = eps * n
        m = js.carrot_margin(curve, a_bound) + slack
        worst_carrot = min(worst_carrot, m)
        ok &= m >= 0.0
        ok &= curve.length <= len_factor * sp.metric(int(x1), x0) + slack
        ok &= n <= math.ceil(math.log2(d0 / float(sp.d[int(x1)]))) + 1
        n_done += 1
    record(
        5,
        "chain construction bounds",
        ok and n_done >= 100,
        f"{n_done} chain basepoints (need >= 100), empirical b {b:.3f}, worst carrot margin {worst_carrot:.3f}",
    )


def test_criterion_6_gp_invariants(fixture_analyses):
    rng = np.random.default_rng(99)
    worst = math.inf
    for name, (space, x0, profile) in fixture_analyses.items():
        eps = space.eps_tolerance()
        sources = sorted(int(v) for v in rng.choice(space.n, size=20, replace=False))
        pair_margin = math.inf
        curve_margin = math.inf
        n_pairs = 0
        for s in sources:
            dist, pred = js.shortest_path_tree(space, s, mode="qh")
            targets = rng.integers(0, space.n, size=50)
            for t in targets:
                t = int(t)
                if t == s or not math.isfinite(dist[t]):
                    continue
                pair_margin = min(pair_margin, js.check_gp_point_bound(space, s, t, dist[t]))
                n_pairs += 1
            # one geodesic curve per tree for the length bound
            far = int(np.argmax([d if math.isfinite(d) else -1.0 for d in dist]))
            ids = js.qhmetric.path_from_predecessors(pred, s, far)
            curve = js.curve_from_vertices(space, ids)
            curve_margin = min(curve_margin, js.check_gp_length_bound(curve))
        for x1, curve in profile.curves.items():
            curve_margin = min(curve_margin, js.check_gp_length_bound(curve))
        assert n_pairs >= 900
        worst = min(worst, pair_margin + eps, curve_margin + eps)
    record(6, "point and length lower bounds", worst >= 0.0, f"worst slack-adjusted margin {worst:.4f}")


def test_criterion_7_quasisymmetric_invariance(fixture_analyses):
    sp, x0, profile = fixture_analyses["disk"]
    disk = fx.unit_disk()
    a_source = max(1.0, profile.a)
    eps = sp.eps_tolerance()
    # identity: exact preservation
    ident_sp = js.push_space(js.identity_map(), sp, disk)
    _, ident_profile = js.check_condition1(ident_sp, x0, samples=200)
    ident_ok = ident_profile.a == profile.a
    # similarity: preservation to 1e-9
    sim = js.Similarity(3.0, 0.5, (2.0, 1.0))
    sim_sp = js.push_space(sim, sp, js.image_domain_of(sim, disk))
    _, sim_profile = js.check_condition1(sim_sp, x0, samples=200)
    sim_a_ok = abs(sim_profile.a - profile.a) <= 1e-9 * profile.a
    rng = np.random.default_rng(7)
    k_gap = 0.0
    for u, v in rng.integers(0, sp.n, size=(20, 2)):
        if u == v:
            continue
        k1 = js.qh_distance(sp, int(u), int(v)).value
        k2 = js.qh_distance(sim_sp, int(u), int(v)).value
        k_gap = max(k_gap, abs(k1 - k2) / max(k1, 1e-30))
    # radial power map
    m = js.RadialPower(0.5)
    img = js.image_domain_of(m, disk)
    img_sp = js.push_space(m, sp, img)
    eta = js.estimate_eta(m, disk, n_triples=50_000, seed=21)
    eta_fn = eta.control()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        eta_prime = js.eta_inverse_control(eta_fn)
        transfer = js.quasisymmetric_transfer(sp, img_sp, m, x0, a_source, eta=eta, samples=200, seed=22)
    a_image = transfer.constants["a_image"]
    radial_ok = math.isfinite(a_image) and a_image <= transfer.constants["bound"]
    # claims across 200 curves
    claim_margin = math.inf
    n_curves = 0
    for x1, cv in profile.curves.items():
        if cv.n_vertices < 2:
            continue
        a_cv = max(1.0, js.min_carrot_constant_for_curve(cv))
        claim_margin = min(claim_margin, js.check_diameter_carrot_image(cv, m, img, a_cv, eta_fn, eps=eps))
        claim_margin = min(claim_margin, js.check_relative_distance_claim(cv, m, img, eta_prime, eps=eps))
        n_curves += 1
    # coarse claim: fit on one cloud, verify margins on a fresh one
    fit_pairs = [(int(a_), int(b_)) for a_, b_ in rng.integers(0, sp.n, size=(500, 2)) if a_ != b_]
    fitted = js.check_coarse_qh_claim(fit_pairs, sp, img_sp, 1.0, 0.0)
    test_sources = sorted(int(v) for v in rng.choice(sp.n, size=20, replace=False))
    test_pairs = []
    for s in test_sources:
        test_pairs.extend((s, int(t)) for t in rng.integers(0, sp.n, size=50) if int(t) != s)
    coarse = js.check_coarse_qh_claim(test_pairs, sp, img_sp, max(1.0, fitted.fitted_c1), fitted.fitted_c2, eps=eps)
    record(
        7,
        "quasisymmetric invariance",
        ident_ok and sim_a_ok and k_gap <= 1e-9 and radial_ok and n_curves >= 199 and claim_margin >= 0.0
        and coarse.worst_margin >= 0.0 and len(test_pairs) >= 900,
        f"identity exact {ident_ok}, similarity a gap {abs(sim_profile.a - profile.a):.1e}, k gap {k_gap:.1e}, "
        f"image a {a_image:.3f} <= bound {transfer.constants['bound']:.2e}, "
        f"claim margin {claim_margin:.3f} over {n_curves} curves, coarse margin {coarse.worst_margin:.3f} over {len(test_pairs)} pairs",
    )


def test_criterion_8_eta_inverse_algebra():
    grid = np.logspace(-2.0, 2.0, 100)
    cases = [("t", lambda t: t, lambda t: t), ("2t", lambda t: 2.0 * t, lambda t: 2.0 * t), ("t^2", lambda t: t * t, math.sqrt)]
    worst = 0.0
    for _, eta, expected in cases:
        eta_prime = js.eta_inverse_control(eta)
        for t in grid:
            worst = max(worst, abs(eta_prime(t) - expected(t)) / max(expected(t), 1e-30))
    record(8, "inverse control algebra", worst <= 1e-9, f"max rel err {worst:.1e} on 100-point grid (tol 1e-9)")


def test_criterion_9_cli_matrix(tmp_path):
    sq = tmp_path / "square.json"
    sq.write_text(json.dumps({"outer": [[0, 0], [1, 0], [1, 1], [0, 1]]}))
    disk = tmp_path / "disk.json"
    disk.write_text(json.dumps({"disk": {"center": [0, 0], "radius": 1.0}}))
    slit = tmp_path / "slit.json"
    slit.write_text(json.dumps(fx.slit_rectangle().to_json()))
    ident = tmp_path / "ident.json"
    ident.write_text(json.dumps({"kind": "identity"}))
    bad_map = tmp_path / "bad.json"
    bad_map.write_text(json.dumps({"kind": "radial_power", "alpha": -1.0}))
    malformed = tmp_path / "malformed.json"
    malformed.write_text("{oops")

    def run(args):
        return cli_main([str(a) for a in args])

    results = []
    rep = tmp_path / "rep.json"
    rep2 = tmp_path / "rep2.json"
    base = ["analyze", "--domain", sq, "--center", "0.5,0.5", "--grid", "0.1", "--samples", "40", "--out"]
    results.append(("analyze pass", run(base + [rep]), 0))
    results.append(("analyze deterministic", run(base + [rep2]), 0))
    byte_equal = rep.read_bytes() == rep2.read_bytes()
    results.append(
        ("analyze not-John", run(["analyze", "--domain", sq, "--center", "0.5,0.5", "--grid", "0.1",
                                  "--samples", "40", "--constants", '{"a_max": 1.02}', "--out", tmp_path / "f.json"]), 1)
    )
    results.append(("analyze missing", run(["analyze", "--domain", tmp_path / "nope.json", "--center", "0,0", "--out", tmp_path / "x.json"]), 2))
    results.append(("analyze malformed", run(["analyze", "--domain", malformed, "--center", "0,0", "--out", tmp_path / "x.json"]), 2))
    results.append(("analyze outside", run(["analyze", "--domain", sq, "--center", "9,9", "--grid", "0.1", "--out", tmp_path / "x.json"]), 2))
    results.append(
        ("chain", run(["chain", "--domain", slit, "--center", "0.5,0.5", "--basepoint", "1.9,0.96",
                       "--grid", "0.04", "--samples", "100", "--out", tmp_path / "chain.json", "--svg", tmp_path / "chain.svg"]), 0)
    )
    results.append(
        ("qs identity", run(["qs", "--domain", disk, "--map", ident, "--center", "0,0", "--grid", "0.08",
                             "--samples", "40", "--out", tmp_path / "qs.json"]), 0)
    )
    results.append(("qs singular", run(["qs", "--domain", disk, "--map", bad_map, "--center", "0,0", "--out", tmp_path / "x.json"]), 2))
    results.append(("render", run(["render", "--report", rep, "--out", tmp_path / "r1.svg"]), 0))
    results.append(("render again", run(["render", "--report", rep, "--out", tmp_path / "r2.svg"]), 0))
    svg_equal = (tmp_path / "r1.svg").read_bytes() == (tmp_path / "r2.svg").read_bytes()
    results.append(("render malformed", run(["render", "--report", malformed, "--out", tmp_path / "x.svg"]), 2))
    bad = [name for name, got, want in results if got != want]
    record(
        9,
        "CLI determinism and exit codes",
        not bad and byte_equal and svg_equal and len(results) >= 9,
        f"{len(results)} cases, byte-identical reports {byte_equal}, byte-identical SVG {svg_equal}"
        + (f", failed: {bad}" if bad else ""),
    )
