import numpy as np
import pytest

from persuade_ot import (
    MarketConfig,
    clip_halfplane,
    concave_bowl,
    monopolist_payoff,
    phi_eval,
    phi_grad,
    polygon_area,
    purchase_breakdown,
    revenue,
    tri_modal,
)
from persuade_ot.payoffs import TRI_MODES, UNIT_SQUARE


def test_clip_vertical_halfplane():
    out = clip_halfplane(UNIT_SQUARE, (1.0, 0.0), 0.5)
    assert abs(polygon_area(out) - 0.5) < 1e-12


def test_clip_containing_halfplane_identity():
    out = clip_halfplane(UNIT_SQUARE, (1.0, 1.0), 10.0)
    assert out == UNIT_SQUARE


def test_clip_diagonal_triangle():
    out = clip_halfplane(UNIT_SQUARE, (1.0, 1.0), 1.0)
    assert abs(polygon_area(out) - 0.5) < 1e-12


def test_clip_to_empty():
    assert clip_halfplane(UNIT_SQUARE, (1.0, 0.0), -0.5) == []


def test_area_trivials():
    assert polygon_area(UNIT_SQUARE) == 1.0
    assert polygon_area([]) == 0.0
    assert polygon_area([(0.0, 0.0), (1.0, 0.0)]) == 0.0
    assert abs(polygon_area([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]) - 0.5) < 1e-12


def test_unit_demand_dead_market():
    mkt = MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0)
    b = purchase_breakdown((1.0, 1.0), mkt)
    assert b.c0 == 1.0 and b.c1 == 0.0 and b.c2 == 0.0 and b.c3 == 0.0
    assert revenue((1.0, 1.0), mkt) == 0.0


def test_unit_demand_known_share():
    # q=(1.125, 1.125), p=(1, 1.25): only good 1 sells, to v1 > 8/9
    mkt = MarketConfig(p1=1.0, p2=1.25, q_min=0.25, q_max=2.0)
    b = purchase_breakdown((1.125, 1.125), mkt)
    assert abs(b.c1 - 1.0 / 9.0) < 1e-12
    assert b.c2 == 0.0
    assert abs(revenue((1.125, 1.125), mkt) - 1.0 / 9.0) < 1e-12


def test_additive_half_square_bundle():
    mkt = MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0, delta=-1.0, demand="additive")
    b = purchase_breakdown((1.0, 1.0), mkt)
    assert abs(b.c3 - 0.5) < 1e-12
    assert b.c1 == 0.0 and b.c2 == 0.0
    assert abs(revenue((1.0, 1.0), mkt) - 0.5) < 1e-12


def test_additive_discount_sweep_at_mean():
    # exact triangle areas: R(1,1) = p3 (2 - p3)^2 / 2 for p3 in [1, 2]
    for delta in (-1.0, -0.875, -0.75, -0.625, -0.5, -0.375, -0.25, -0.125):
        mkt = MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0, delta=delta, demand="additive")
        p3 = 2.0 + delta
        expected = p3 * (2.0 - p3) ** 2 / 2.0
        assert abs(revenue((1.0, 1.0), mkt) - expected) < 1e-12


def test_probabilities_partition():
    rng = np.random.default_rng(31)
    for demand in ("unit", "additive"):
        for _ in range(500):
            p1, p2 = rng.uniform(0.2, 2.0, size=2)
            delta = rng.uniform(-min(p1, p2) * 0.9, 1.0) if demand == "additive" else 0.0
            mkt = MarketConfig(p1=p1, p2=p2, q_min=0.0, q_max=2.0, delta=delta, demand=demand)
            q = rng.uniform(0.01, 2.0, size=2)
            b = purchase_breakdown(q, mkt)
            for c in (b.c0, b.c1, b.c2, b.c3):
                assert -1e-12 <= c <= 1.0 + 1e-12
            assert abs(b.c0 + b.c1 + b.c2 + b.c3 - 1.0) < 1e-12


def test_unit_demand_monotonicity():
    mkt0 = MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0)
    qs = np.linspace(0.2, 2.0, 8)
    for q2 in qs:
        shares = [purchase_breakdown((q1, q2), mkt0).c1 for q1 in qs]
        assert np.all(np.diff(shares) >= -1e-12)
    for q in ((1.5, 1.2), (0.8, 1.9)):
        shares = [
            purchase_breakdown(q, MarketConfig(p1=p1, p2=1.0, q_min=0.0, q_max=2.0)).c1
            for p1 in np.linspace(0.3, 1.8, 8)
        ]
        assert np.all(np.diff(shares) <= 1e-12)


def test_areas_agree_with_quadrature():
    rng = np.random.default_rng(33)
    u = (np.arange(512) + 0.5) / 512
    v1, v2 = np.meshgrid(u, u, indexing="ij")
    for _ in range(20):
        demand = "unit" if rng.random() < 0.5 else "additive"
        p1, p2 = rng.uniform(0.3, 1.8, size=2)
        delta = rng.uniform(-0.5, 0.5) if demand == "additive" else 0.0
        mkt = MarketConfig(p1=p1, p2=p2, q_min=0.0, q_max=2.0, delta=delta, demand=demand)
        q1, q2 = rng.uniform(0.1, 2.0, size=2)
        s1 = q1 * v1 - p1
        s2 = q2 * v2 - p2
        b = purchase_breakdown((q1, q2), mkt)
        if demand == "unit":
            c1 = np.mean((s1 >= 0) & (s1 >= s2))
            c2 = np.mean((s2 >= 0) & (s2 >= s1))
        else:
            s12 = s1 + s2 + p1 + p2 - mkt.p3
            c1 = np.mean((s1 >= 0) & (s1 >= s2) & (s1 >= s12))
            c2 = np.mean((s2 >= 0) & (s2 >= s1) & (s2 >= s12))
            c3 = np.mean((s12 >= 0) & (s12 >= s1) & (s12 >= s2))
            assert abs(b.c3 - c3) < 2e-3
        assert abs(b.c1 - c1) < 2e-3
        assert abs(b.c2 - c2) < 2e-3


def test_revenue_bounds():
    rng = np.random.default_rng(35)
    for _ in range(300):
        demand = "unit" if rng.random() < 0.5 else "additive"
        p1, p2 = rng.uniform(0.2, 2.0, size=2)
        delta = rng.uniform(-0.3, 0.8) if demand == "additive" else 0.0
        mkt = MarketConfig(p1=p1, p2=p2, q_min=0.0, q_max=2.0, delta=delta, demand=demand)
        q = rng.uniform(0.01, 2.0, size=2)
        r = revenue(q, mkt)
        assert 0.0 <= r <= max(p1, p2, mkt.p3) + 1e-12


def test_prohibitive_surcharge_matches_unit():
    # with the bundle priced out, additive demand reduces to unit demand
    rng = np.random.default_rng(37)
    for _ in range(50):
        p1, p2 = rng.uniform(0.5, 1.5, size=2)
        q = rng.uniform(0.1, 2.0, size=2)
        unit = MarketConfig(p1=p1, p2=p2, q_min=0.0, q_max=2.0)
        # delta > max attainable utility of the skipped good
        add = MarketConfig(p1=p1, p2=p2, q_min=0.0, q_max=2.0, delta=5.0, demand="additive")
        bu = purchase_breakdown(q, unit)
        ba = purchase_breakdown(q, add)
        assert ba.c3 == 0.0
        assert abs(bu.c1 - ba.c1) < 1e-12
        assert abs(bu.c2 - ba.c2) < 1e-12
        assert abs(revenue(q, unit) - revenue(q, add)) < 1e-12


def test_degenerate_quality_never_bought():
    mkt = MarketConfig(p1=0.5, p2=0.5, q_min=0.0, q_max=2.0)
    b = purchase_breakdown((0.0, 1.5), mkt)
    assert b.c1 == 0.0
    assert b.c2 > 0


def test_market_validation():
    with pytest.raises(ValueError):
        MarketConfig(p1=0.0, p2=1.0, q_min=0.0, q_max=2.0)
    with pytest.raises(ValueError):
        MarketConfig(p1=1.0, p2=1.0, q_min=1.0, q_max=1.0)
    with pytest.raises(ValueError):
        MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0, delta=-3.0, demand="additive")
    with pytest.raises(ValueError):
        MarketConfig(p1=1.0, p2=1.0, q_min=0.0, q_max=2.0, demand="both")


def test_bowl_peak():
    model = concave_bowl()
    assert phi_eval(model, (0.5, 0.5)) == 1.0
    assert np.allclose(phi_grad(model, (0.5, 0.5)), (0.0, 0.0))
    assert np.allclose(phi_grad(model, (0.75, 0.5)), (-0.5, 0.0))


def test_tri_modal_equal_heights():
    model = tri_modal()
    vals = phi_eval(model, TRI_MODES)
    assert np.max(np.abs(vals - 1.0)) < 1e-9
    # modes are near-stationary: the cross-mode pull is tiny at sigma=0.12
    grads = phi_grad(model, TRI_MODES)
    assert np.max(np.abs(grads)) < 1e-2


def test_revenue_gradient_richardson():
    # the measure-zero kink set aside, two different steps must agree
    mkt = MarketConfig(p1=1.0, p2=1.25, q_min=0.0, q_max=2.0)
    model = monopolist_payoff(mkt)
    rng = np.random.default_rng(39)
    checked = 0
    for _ in range(20):
        q = rng.uniform(0.8, 1.9, size=2)
        fine = phi_grad(model, q)
        coarse = np.array([
            (revenue(q + dq, mkt) - revenue(q - dq, mkt)) / (2e-3)
            for dq in (np.array([1e-3, 0.0]), np.array([0.0, 1e-3]))
        ])
        scale = max(np.max(np.abs(coarse)), 1e-6)
        if np.max(np.abs(fine - coarse)) / scale < 1e-3:
            checked += 1
    assert checked >= 15


def test_phi_batch_shapes():
    model = concave_bowl()
    pts = np.array([[0.1, 0.2], [0.5, 0.5], [0.9, 0.9]])
    vals = phi_eval(model, pts)
    assert vals.shape == (3,)
    grads = phi_grad(model, pts)
    assert grads.shape == (3, 2)
