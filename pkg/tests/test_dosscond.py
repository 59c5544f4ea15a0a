import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besicovitch import (Domain, Field, TrigPolynomial, WeightProfile, bohr_average_null_test,
                         condition_A_residual, condition_B_functional, gallery_get, make_window_sweep,
                         mean_value, periodic_component, periodize, shift_average, truncate_field)
from besicovitch.dosscond import K_SCHEDULE, L_SCHEDULE

from conftest import random_poly

R1 = Domain.full(1)
W = make_window_sweep(R1, "cube", {"t0": 8, "ratio": 2, "count": 7})
ID1 = WeightProfile.make(1, 1, 1)
T = np.linspace(-40, 40, 161)


def test_default_schedules():
    assert K_SCHEDULE == tuple(2 ** j for j in range(9))
    assert L_SCHEDULE == tuple(float(2 ** j) for j in range(7))


def test_shift_average_examples():
    cos = Field.scalar(np.cos)
    assert np.allclose(shift_average(cos, [2 * math.pi], 7)(T), cos(T))
    e = Field.scalar(lambda t: np.exp(1j * t))
    for k in (2, 4, 10):
        assert np.allclose(shift_average(e, [math.pi], k)(T), 0, atol=1e-12)
    for k in (1, 3, 9):
        assert np.allclose(shift_average(e, [math.pi], k)(T), e(T) / k)
    lin = Field.scalar(lambda t: t)
    for k in (1, 5, 12):
        assert np.allclose(shift_average(lin, [1.0], k)(T)[:, 0], T + (k - 1) / 2)


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.floats(0.1, 5), st.integers(1, 40), st.floats(-4, 4))
def test_shift_average_linear_and_modulation_phase(seed, a, k, lam):
    rng = np.random.default_rng(seed)
    F, G = random_poly(rng).as_field(), random_poly(rng).as_field()
    lhs = shift_average(F + G.map_values(lambda v: 2 * v), [a], k)(T)
    rhs = shift_average(F, [a], k)(T) + 2 * shift_average(G, [a], k)(T)
    assert np.allclose(lhs, rhs, atol=1e-10)
    # A_k(e^{i lam .} F)(t) = e^{i lam t} (1/k) sum_j e^{i lam j a} F(t + j a)
    direct = sum(np.exp(1j * lam * j * a) * F(T + j * a) for j in range(k)) / k
    assert np.allclose(shift_average(F.modulate([lam]), [a], k)(T), np.exp(1j * lam * T)[:, None] * direct,
                       atol=1e-10)


def test_truncate_examples():
    assert truncate_field(Field.constant(3.0), 2)(T[:3])[0, 0] == 2.0
    assert truncate_field(Field.constant(-3.0), 2)(T[:3])[0, 0] == pytest.approx(-2.0)
    e = Field.scalar(lambda t: np.exp(1j * t))
    assert np.array_equal(truncate_field(e, 5)(T), e(T))


def test_periodize_is_periodic():
    C = periodize(Field.scalar(lambda t: t ** 2), [1.5])
    assert np.allclose(C(T), C(T + 1.5)) and np.allclose(C(T), C(T - 4.5))


def test_condition_A_zero_field():
    rep = condition_A_residual(Field.constant(0.0), [1.0], ID1, W, ks=[1, 2, 4])
    assert np.all(rep.values == 0)


def test_condition_A_polynomial_slope_and_bound():
    rng = np.random.default_rng(3)
    P = TrigPolynomial([0.9, -2.2, 2 * math.pi, 1.7], rng.normal(size=4) + 1j * rng.normal(size=4))
    rep = condition_A_residual(P.as_field(), [1.0], ID1, W, ks=list(range(1, 129)))
    assert rep.candidate_kind == "periodic-component"
    assert rep.k_slope == pytest.approx(-1.0, abs=0.2)
    # residual per window <= Fw(t) m(Lambda_t) sum |c_l| 2 / (k |e^{i lam} - 1|) = 2 * bound / k
    bound = sum(2 * abs(c) / abs(np.exp(1j * lam) - 1)
                for lam, c in zip(P.freqs[:, 0], P.coefs[:, 0]) if abs(np.exp(1j * lam) - 1) > 1e-9)
    for k, est in zip(rep.ks, rep.estimates):
        assert est <= 2 * bound / k * (1 + 1e-9)


def test_condition_A_general_field_uses_periodized_candidate():
    hs = gallery_get("haraux-souplet", {"terms": 6}).field
    rep = condition_A_residual(hs, [2 * math.pi], ID1, W, ks=[1, 2, 4, 8])
    assert rep.candidate_kind == "periodized-average"
    assert all(np.isfinite(rep.estimates))
    rows = list(rep.csv_rows())
    assert len(rows) == 4 * len(W)


def test_condition_A_rejects_non_periodic_candidate():
    with pytest.raises(ValueError, match="periodic"):
        condition_A_residual(Field.scalar(np.cos), [1.0], ID1, W, ks=[1, 2],
                             candidate=Field.scalar(lambda t: t))


def test_periodic_candidate_checked_at_random_points():
    P = random_poly(np.random.default_rng(9))
    lam = np.concatenate([P.freqs[:, 0], [2 * math.pi / 3]])
    Q = TrigPolynomial(lam, np.concatenate([P.coefs[:, 0], [1.0]]))
    rep = condition_A_residual(Q.as_field(), [3.0], ID1, W, ks=[1, 2])
    C = rep.candidate.as_field()
    pts = np.random.default_rng(0).uniform(-1e3, 1e3, 1000)
    assert np.max(np.abs(C(pts + 3.0) - C(pts))) < 1e-9


def test_mean_of_periodic_component_is_zero_frequency_coefficient():
    P = TrigPolynomial([0.0, 2 * math.pi, 1.3], [0.75, 2.0, 1.0])
    C = periodic_component(P, [1.0])
    Wv = make_window_sweep(R1, "cube", [2.0 ** j for j in range(4, 10)])
    m = mean_value(C.as_field(), [0.0], Wv, "volume")
    assert abs(m.value - 0.75) < 2 / (2 * math.pi * Wv.ts[-1])
    # exact on windows that are whole multiples of the period
    assert abs(mean_value(C.as_field(), [0.0], make_window_sweep(R1, "cube", [float(j) for j in range(1, 7)]),
                          "volume").value - 0.75) < 1e-12


# condition (B) ---------------------------------------------------------------

def test_condition_B_polynomial_decays():
    P = TrigPolynomial([1.0, -math.sqrt(3)], [1.0, 0.5j])
    rep = condition_B_functional(P.as_field(), [0.0], ID1, W)
    assert rep.outer.trend == "converging-to-zero"
    assert np.all(rep.values >= 0)


def test_sign_flip_value_two_closed_form():
    e = gallery_get("sign-flip")
    lam0 = e.params["lam0"]
    Wl = make_window_sweep(R1, "cube", {"t0": 8, "ratio": 2, "count": 11})
    rep = condition_B_functional(e.field, [lam0], ID1, Wl)
    # (1/l)(1/t) int_{-t}^{t} |int_y^{y+l} sgn - int_0^l sgn| dy is 2 - l/t for l <= t, t/l beyond
    for i, l in enumerate(rep.ls):
        assert np.allclose(rep.values[i], [2 - l / t if l <= t else t / l for t in Wl.ts], rtol=1e-9)
    assert np.all(np.abs(rep.estimates - 2) <= 0.05)
    off = condition_B_functional(e.field, [lam0 + 1], ID1, Wl)
    assert off.estimates[-1] < 0.05
    assert off.outer.trend == "converging-to-zero"


def test_condition_B_two_dimensional_grid():
    P = TrigPolynomial([[1.0, 1.0]], [1.0])
    W2 = make_window_sweep(Domain.full(2), "cube", [4.0, 8.0, 16.0, 32.0, 64.0, 128.0])
    rep = condition_B_functional(P.as_field(), [0.0, 0.0], WeightProfile.make(1, 2, 1), W2, ls=[1.0, 4.0, 16.0])
    assert rep.estimates[-1] < rep.estimates[0]


# null test ---------------------------------------------------------------------

def test_null_test_examples():
    assert bohr_average_null_test(TrigPolynomial.zero(), [[1.0]], 10).verdict == "null"
    P = TrigPolynomial([[1.0, 1.0]], [1.0])
    # <(1,1), a> = pi kills the mean at even k; <(1,1), a> in 2 pi Z keeps F
    r = bohr_average_null_test(P, [[math.pi / 2, math.pi / 2]], 1000)
    assert r.sups[0] < 1e-12 and r.verdict == "forces-zero"
    r = bohr_average_null_test(P, [[math.pi / 2, math.pi / 2], [math.pi, math.pi]], 1000)
    assert r.verdict == "not-null" and r.sups[1] == pytest.approx(1.0)
    one = TrigPolynomial([[0.0]], [1.0])
    r = bohr_average_null_test(one, [[0.5], [1.0], [3.0]], 100)
    assert r.verdict == "not-null" and np.allclose(r.sups, 1.0)
    with pytest.raises(ValueError):
        bohr_average_null_test(one, [[0.0]], 10)


@settings(max_examples=10)
@given(st.integers(0, 1000))
def test_no_polynomial_forces_zero(seed):
    P = random_poly(np.random.default_rng(seed), n=2)
    grid = [[a, b] for a in (0.5, math.pi, 2 * math.pi) for b in (1.0, 2 * math.pi)]
    assert bohr_average_null_test(P, grid, 500).verdict != "forces-zero"
