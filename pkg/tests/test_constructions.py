import math

import numpy as np
import pytest

from johnspace import (
    CaseRoutingError,
    Disk,
    LogPhi,
    OracleContractError,
    ParameterError,
    build_graph_space,
    carrot_margin,
    chain_construction,
    check_condition4,
    combined_case_constant,
    construct_carrot_curve,
    construct_case_a,
    construct_case_b,
    derive_c2_from_c1,
    derive_c3_from_c2,
    derive_c3_from_c5,
    derive_phi_from_c1,
    empirical_condition3_bound,
    first_point_with_distance,
    min_carrot_constant_for_curve,
    qh_geodesic_oracle,
    route_case,
    sampled_segment_curve,
    stratified_sample,
)
from johnspace import fixtures as fx

import oracles

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# constant derivations


def test_derive_c2_values():
    assert derive_c2_from_c1(1.0) == pytest.approx((3.0, 1.0, 3.0 + LOG2))
    assert derive_c2_from_c1(2.0) == pytest.approx((6.0, 2.0, (3.0 + math.log(4.0)) * 2.0))


def test_derive_c2_monotone():
    triples = [derive_c2_from_c1(a) for a in (1.0, 1.5, 2.0, 4.0)]
    for i in range(3):
        assert all(x <= y for x, y in zip(triples[i], triples[i + 1]))


def test_derive_c2_rejects_small_a():
    with pytest.raises(ParameterError):
        derive_c2_from_c1(0.5)


def test_derive_c3_values():
    assert derive_c3_from_c2(3.0, 1.0, 3.0 + LOG2) == pytest.approx(math.log(6.0) + 3.0 + LOG2)
    assert derive_c3_from_c2(3.0, 0.0, 2.5) == 2.5
    chained = derive_c3_from_c2(*derive_c2_from_c1(1.0))
    assert chained == pytest.approx(5.4849, abs=1e-4)


def test_derive_phi_values():
    phi = derive_phi_from_c1(1.0)
    assert phi(0.0) == pytest.approx(3.6931, abs=1e-4)
    assert phi(9.0) == pytest.approx(5.9957, abs=1e-4)
    assert phi(math.e - 1.0) == pytest.approx(phi.b1 + phi.b2)
    ts = np.linspace(0.0, 30.0, 50)
    vals = [phi(t) for t in ts]
    assert vals == sorted(vals)


def test_derive_c3_from_c5_values():
    assert derive_c3_from_c5(1.0, LogPhi(1.0, 3.0 + LOG2)) == pytest.approx(10.605, abs=1e-3)
    assert derive_c3_from_c5(1.0, lambda t: 7.0) == 14.0


def test_c5_to_c3_checker_chain_on_disk(disk_space_005):
    # curves passing the natural condition at (a, phi) pass the doubling
    # bound at the constant derived from them
    from johnspace import check_condition3, check_condition5, check_condition1

    sp = disk_space_005
    x0 = sp.nearest_vertex((0.0, 0.0))
    _, profile = check_condition1(sp, x0, samples=40)
    a = max(1.0, profile.a)
    phi = derive_phi_from_c1(a)
    rep5 = check_condition5(sp, x0, profile.curves, a, phi, max_probes=6)
    assert rep5.passed
    b = derive_c3_from_c5(a, phi)
    rep3 = check_condition3(sp, x0, profile.curves, b)
    assert rep3.passed


def test_case_constants_formula():
    # with b = 0 the quasiconvexity part collapses to c / lam scale
    assert combined_case_constant(0.0, 0.5, 1.0) == pytest.approx(8.0)  # (4c/lam)e^0
    b = 1.3
    val = combined_case_constant(b, 0.5, 1.1)
    assert val == pytest.approx((4.0 * 1.1 / 0.5) * math.exp(2.0 * b))


# ---------------------------------------------------------------------------
# first_point_with_distance


def test_first_point_radial():
    disk = Disk()
    cv = sampled_segment_curve(disk, (0.9, 0.0), (0.0, 0.0), 900)
    j = first_point_with_distance(cv, 0.2)
    assert cv.points[j][0] == pytest.approx(0.8, abs=1e-3)


def test_first_point_at_start():
    disk = Disk()
    cv = sampled_segment_curve(disk, (0.5, 0.0), (0.0, 0.0), 50)
    assert first_point_with_distance(cv, 0.3) == 0


def test_first_point_absent():
    disk = Disk()
    cv = sampled_segment_curve(disk, (0.9, 0.0), (0.6, 0.0), 50)
    assert first_point_with_distance(cv, 0.9) is None


def test_first_point_monotone_scan_oracle():
    disk = Disk()
    cv = sampled_segment_curve(disk, (0.9, 0.0), (0.0, 0.0), 300)
    target = 0.37
    j = first_point_with_distance(cv, target)
    scan = next(i for i in range(cv.n_vertices) if cv.d[i] >= target)
    assert j == scan


# ---------------------------------------------------------------------------
# case routing and constructions


def test_routing_total_exclusive(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    rng = np.random.default_rng(37)
    lam, c = 0.5, 1.1
    for v in rng.integers(0, sp.n, size=200):
        case = route_case(sp, int(v), x0, lam, c)
        assert case in ("A", "B", "C")
    assert route_case(sp, x0, x0, lam, c) == "A"


def test_case_a_disk(disk_space_005):
    sp = disk_space_005
    x0 = sp.nearest_vertex((0.0, 0.0))
    x1 = sp.nearest_vertex((0.2, 0.0))
    curve = construct_case_a(sp, x1, x0, 0.5, 1.1)
    assert min_carrot_constant_for_curve(curve) <= 1.0 + sp.eps_tolerance()
    single = construct_case_a(sp, x0, x0, 0.5, 1.1)
    assert single.n_vertices == 1 and single.length == 0.0


def test_case_a_routing_error(disk_space_005):
    sp = disk_space_005
    x0 = sp.nearest_vertex((0.0, 0.0))
    far = sp.nearest_vertex((0.9, 0.0))
    with pytest.raises(CaseRoutingError):
        construct_case_a(sp, far, x0, 0.5, 1.1)


def test_case_a_matches_bruteforce_graph():
    sp = build_graph_space(fx.small_graph_space())
    # any pair close enough to route to case A follows the euclid geodesic
    x0 = int(np.argmax(sp.d))
    lam, c = 0.5, 1.1
    for x1 in range(sp.n):
        if route_case(sp, x1, x0, lam, c) != "A":
            continue
        curve = construct_case_a(sp, x1, x0, lam, c)
        ref = oracles.exhaustive_shortest(sp.adj_euclid, x1, x0) if x1 != x0 else 0.0
        assert curve.length == pytest.approx(ref, abs=1e-12)


def test_case_b_slit(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = qh_geodesic_oracle(sp, x0)
    b = empirical_condition3_bound(sp, x0, oracle, stratified_sample(sp, 200))
    x1 = sp.nearest_vertex((1.7, 0.5))  # right chamber, deep
    assert route_case(sp, x1, x0, 0.5, 1.1) == "B"
    curve = construct_case_b(sp, x1, x0, b, 0.5, 1.1, oracle)
    eps = sp.eps_tolerance()
    assert carrot_margin(curve, math.exp(2.0 * b)) >= -eps
    assert curve.length <= (1.1 * math.exp(b) / 0.5) * sp.metric(x1, x0) + eps


def test_case_b_oracle_contract_error(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = qh_geodesic_oracle(sp, x0)
    x1 = sp.nearest_vertex((1.7, 0.5))
    with pytest.raises(OracleContractError):
        construct_case_b(sp, x1, x0, 1e-6, 0.5, 1.1, oracle)


def test_chain_disk_radial_collapses(disk_space_005):
    sp = disk_space_005
    x0 = sp.nearest_vertex((0.0, 0.0))
    x1 = sp.nearest_vertex((0.9, 0.0))
    oracle = qh_geodesic_oracle(sp, x0)
    b = empirical_condition3_bound(sp, x0, oracle, stratified_sample(sp, 150))
    curve = chain_construction(sp, x1, x0, b, 0.5, 1.1, oracle)
    n_stages = len(curve.stages)
    assert 3 <= n_stages <= 5  # ceil(log2(1/0.1)) is 4
    eps = sp.eps_tolerance() * n_stages
    assert carrot_margin(curve, 4.0 * math.exp(2.0 * b)) >= -eps
    assert curve.length <= (4.0 * 1.1 / 0.5) * math.exp(2.0 * b) * sp.metric(x1, x0) + eps


def test_chain_stage_doubling_and_count(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = qh_geodesic_oracle(sp, x0)
    ids = stratified_sample(sp, 250)
    b = empirical_condition3_bound(sp, x0, oracle, ids)
    d0 = float(sp.d[x0])
    h_slack = 0.02 * math.sqrt(2.0)
    tested = 0
    for x1 in ids:
        if route_case(sp, int(x1), x0, 0.5, 1.1) != "C":
            continue
        curve = chain_construction(sp, int(x1), x0, b, 0.5, 1.1, oracle)
        stages = curve.stages
        tested += 1
        assert len(stages) <= math.ceil(math.log2(d0 / float(sp.d[int(x1)]))) + 1
        for st in stages[:-1]:
            d_from = float(sp.d[st["from"]])
            d_to = float(sp.d[st["to"]])
            assert 2.0 * d_from <= d_to <= 2.0 * d_from + h_slack
            # uniform stage-length form 2 e^b d(x_i)
            assert st["qh_len"] <= b + sp.eps_tolerance()
    assert tested >= 20


def test_chain_routing_error(disk_space_005):
    sp = disk_space_005
    x0 = sp.nearest_vertex((0.0, 0.0))
    deep = sp.nearest_vertex((0.2, 0.0))
    oracle = qh_geodesic_oracle(sp, x0)
    with pytest.raises(CaseRoutingError):
        chain_construction(sp, deep, x0, 2.0, 0.5, 1.1, oracle)


def test_chain_graph_vs_bruteforce_optimum():
    sp = build_graph_space(fx.small_graph_space())
    x0 = int(np.argmax(sp.d))
    oracle = qh_geodesic_oracle(sp, x0)
    b = empirical_condition3_bound(sp, x0, oracle, range(sp.n))
    for x1 in range(sp.n):
        curve, case = construct_carrot_curve(sp, x1, x0, b, 0.5, 1.1, oracle)
        a_curve = max(1.0, min_carrot_constant_for_curve(curve))
        a_star = oracles.exhaustive_best_carrot(sp, x1, x0)
        assert a_star <= a_curve + 1e-9
        if case == "C":
            assert a_curve <= 4.0 * math.exp(2.0 * b) + 1e-9


def test_end_to_end_constructed_curves_pass_condition4(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = qh_geodesic_oracle(sp, x0)
    ids = stratified_sample(sp, 80)
    b = empirical_condition3_bound(sp, x0, oracle, ids)
    curves = {}
    for x1 in ids:
        curve, _ = construct_carrot_curve(sp, int(x1), x0, b, 0.5, 1.1, oracle)
        curves[int(x1)] = curve
    a_all = combined_case_constant(b, 0.5, 1.1)
    rep = check_condition4(sp, x0, curves, a_all)
    assert rep.passed


def test_chain_determinism(slit_space):
    sp = slit_space
    x0 = sp.nearest_vertex(fx.SLIT_CENTER)
    oracle = qh_geodesic_oracle(sp, x0)
    x1 = sp.nearest_vertex((1.9, 0.96))
    one = chain_construction(sp, x1, x0, 4.0, 0.5, 1.1, oracle)
    two = chain_construction(sp, x1, x0, 4.0, 0.5, 1.1, oracle)
    assert one.vertex_ids == two.vertex_ids
    assert np.array_equal(one.prefix_qh, two.prefix_qh)
    assert one.stages == two.stages
