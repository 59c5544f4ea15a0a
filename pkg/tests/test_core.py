import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besicovitch import Domain, Field, limsup_estimate, make_window, make_window_sweep
from besicovitch.core import geometric_schedule, loglog_slope


def test_cube_window_on_line():
    w = make_window(Domain.full(1), "cube", 1.0)
    assert w.lo == (-1.0,) and w.hi == (1.0,)
    assert w.measure == 2.0


def test_cube_window_on_orthant():
    w = make_window(Domain.orthant([0.0, 0.0]), "cube", 3.0)
    assert w.lo == (0.0, 0.0) and w.hi == (3.0, 3.0)
    assert w.measure == 9.0


def test_ball_window_area_matches_monte_carlo():
    w = make_window(Domain.full(2), "ball", 2.0)
    assert w.measure == pytest.approx(4 * math.pi, rel=1e-12)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(400_000, 2))
    mc = 16.0 * np.mean(np.hypot(*pts.T) <= 2.0)
    assert w.measure == pytest.approx(mc, rel=1e-2)
    # the quadrature rule integrates 1 exactly
    _, wt = w.rule()
    assert wt.sum() == pytest.approx(w.measure, rel=1e-10)


def test_quarter_disc_on_orthant():
    w = make_window(Domain.orthant([0.0, 0.0]), "ball", 2.0)
    assert w.measure == pytest.approx(math.pi, rel=1e-12)


def test_cube_and_ball_agree_in_one_dimension():
    for dom in (Domain.full(1), Domain.orthant([0.0])):
        a, b = make_window(dom, "cube", 5.0), make_window(dom, "ball", 5.0)
        assert (a.lo, a.hi, a.measure) == (b.lo, b.hi, b.measure)


def test_degenerate_window_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        make_window(Domain.box([10.0], [11.0]), "cube", 1.0)
    with pytest.raises(ValueError, match="degenerate"):
        make_window_sweep(Domain.box([10.0], [11.0]), "cube", [1.0, 2.0])


def test_schedule_validation():
    assert geometric_schedule(8, 2, 3) == (8.0, 16.0, 32.0)
    with pytest.raises(ValueError):
        make_window_sweep(Domain.full(1), "cube", [4.0, 2.0])
    with pytest.raises(ValueError):
        make_window_sweep(Domain.full(1), "cube", [])


def test_polyhedral_basis_must_be_independent():
    with pytest.raises(ValueError, match="dependent"):
        Domain.polyhedral([[1.0, 1.0], [2.0, 2.0]])


def test_domain_json_round_trip():
    for d in (Domain.full(2), Domain.orthant([0.0, -math.inf]), Domain.box([0.0], [2 * math.pi]),
              Domain.polyhedral([[1.0, 0.0], [1.0, 1.0]])):
        assert Domain.from_dict(d.to_dict()) == d


def test_window_monotonicity_random_points():
    rng = np.random.default_rng(1)
    dom = Domain.orthant([0.0, -math.inf])
    pts = rng.uniform(-40, 40, size=(10_000, 2))
    for t, t2 in [(4.0, 8.0), (8.0, 32.0)]:
        w, w2 = make_window(dom, "cube", t), make_window(dom, "cube", t2)
        inside = np.all((pts >= w.lo) & (pts <= w.hi), axis=1)
        inside2 = np.all((pts >= w2.lo) & (pts <= w2.hi), axis=1)
        assert not np.any(inside & ~inside2)


def test_translation_closure_on_orthant():
    rng = np.random.default_rng(2)
    dom = Domain.orthant([1.0, -math.inf])
    t = np.column_stack([rng.uniform(1, 50, 10_000), rng.uniform(-50, 50, 10_000)])
    tau = np.column_stack([rng.uniform(0, 50, 10_000), rng.uniform(-50, 50, 10_000)])
    assert dom.contains(t).all()
    assert all(dom.in_shift_cone(s) for s in tau[:200])
    assert dom.contains(t + tau).all()


def test_field_constant_and_scalar():
    F = Field.constant(3 - 4j)
    assert np.allclose(F.pnorm(np.linspace(-5, 5, 7)), 5.0)
    G = Field.scalar(lambda t: np.cos(t))
    assert np.allclose(G(np.array([0.0, np.pi]))[:, 0], [1.0, -1.0])


# limsup estimator ----------------------------------------------------------

TS = geometric_schedule(8, 2, 11)


def test_limsup_constant_is_bounded():
    e = limsup_estimate(TS, [5.0] * len(TS))
    assert e.estimate == 5.0 and e.trend == "bounded"


def test_limsup_inverse_converges():
    e = limsup_estimate(TS, [1 / t for t in TS])
    assert e.trend == "converging-to-zero"
    assert e.limit == 0.0


def test_limsup_quarter_power_diverges():
    e = limsup_estimate(TS, [t ** 0.25 for t in TS])
    assert e.trend == "diverging"
    assert e.slope == pytest.approx(0.25, abs=1e-12)


def test_limsup_rejects_nonfinite_and_short_input():
    with pytest.raises(ValueError):
        limsup_estimate(TS, [1.0] * (len(TS) - 1) + [math.nan])
    with pytest.raises(ValueError):
        limsup_estimate(TS[:5], [1.0] * 5)


def test_loglog_slope_exact():
    assert loglog_slope([1, 2, 4, 8], [3, 6, 12, 24]) == pytest.approx(1.0)


@given(st.floats(1e-3, 1e3), st.floats(-1.0, 1.0))
def test_limsup_scale_equivariance(c, s):
    vals = [t ** s for t in TS]
    a = limsup_estimate(TS, vals)
    b = limsup_estimate(TS, [c * v for v in vals])
    assert b.estimate == pytest.approx(c * a.estimate, rel=1e-9)
    assert a.trend == b.trend


@given(st.lists(st.floats(0.0, 1e6), min_size=6, max_size=15))
def test_limsup_estimate_dominates_tail(vals):
    ts = geometric_schedule(1, 2, len(vals))
    e = limsup_estimate(ts, vals)
    assert all(e.estimate >= v for v in vals[-e.tail:])
    assert e.trend in ("converging-to-zero", "bounded", "diverging", "inconclusive")
