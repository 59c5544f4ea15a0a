import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from besicovitch import (Domain, Field, TrigPolynomial, fejer_kernel, fit_polynomial, make_window,
                         make_window_sweep, mean_over_set, mean_value, periodic_component,
                         spectrum_scan)
from besicovitch.gallery import TWO_FREQ_A, brick_field, two_freq_poly

from conftest import random_poly

R1 = Domain.full(1)
W = make_window_sweep(R1, "cube", {"t0": 8, "ratio": 2, "count": 8})


def test_evaluate_examples():
    assert TrigPolynomial([0.0], [3.0])(np.array([1.234]))[0, 0] == 3.0
    assert TrigPolynomial([2.0], [1.0])(np.array([math.pi]))[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert two_freq_poly()(np.array([[0.0, 0.0]]))[0, 0] == 2.0


def test_merge_of_close_frequencies():
    P = TrigPolynomial([1.0, 1.0 + 1e-12, 2.0], [1.0, 2.0, 5.0])
    assert len(P) == 2
    assert P.coefs[0, 0] == 3.0


def test_json_round_trip():
    P = random_poly(np.random.default_rng(0), n=2)
    Q = TrigPolynomial.from_json(P.to_json())
    assert np.array_equal(P.freqs, Q.freqs) and np.array_equal(P.coefs, Q.coefs)
    assert set(P.to_list()[0]) == {"freq", "re", "im"}


def test_mean_value_examples():
    F = Field.scalar(lambda t: np.exp(3j * t))
    assert abs(mean_value(F, [3.0], W, "volume").value - 1.0) < 1e-12
    rep = mean_value(F, [0.0], W)
    oracle = [math.sin(3 * t) / (3 * t) for t in W.ts]
    assert np.allclose(np.real(rep.values), oracle, atol=1e-12)
    assert rep.estimate.trend == "converging-to-zero"


def test_mean_of_half_line_indicator_with_power_normalisation():
    chi = Field.scalar(lambda t: (t >= 0).astype(float), breaks=lambda ax, lo, hi: np.array([0.0]) if lo < 0 < hi else np.empty(0))
    rep = mean_value(chi, [0.0], W, normalization="power", p=1)
    assert np.allclose(np.real(rep.values), 1.0, atol=1e-12)


def test_nu_of_sets():
    assert mean_over_set(None, Field.constant(1.0), 1, W).estimate.estimate == pytest.approx(2.0)
    bounded = Field.scalar(lambda t: ((t >= 0) & (t <= 1)).astype(float),
                           breaks=lambda ax, lo, hi: np.array([v for v in (0.0, 1.0) if lo < v < hi]))
    assert mean_over_set(None, bounded, 1, W).estimate.trend == "converging-to-zero"
    bricks = brick_field(lambda m: np.ones_like(m))
    Wl = make_window_sweep(R1, "cube", {"t0": 64, "ratio": 2, "count": 10})
    rep = mean_over_set(None, bricks, 1, Wl)
    # oracle: sum_{m^2 < t} min(sqrt m, t - m^2) / t ~ t^{-1/4}
    ref = [sum(min(math.sqrt(m), t - m * m) for m in range(1, math.isqrt(int(t)) + 1) if m * m < t) / t
           for t in Wl.ts]
    assert np.allclose(np.real(rep.values), ref, rtol=1e-10)
    assert rep.estimate.trend == "converging-to-zero"
    assert rep.estimate.slope == pytest.approx(-0.25, abs=0.05)


def test_fejer_kernel():
    assert fejer_kernel(5, 2.0, 0.0) == 5.0
    assert fejer_kernel(5, 2.0, 4.0) == 5.0
    assert fejer_kernel(2, 1.0, 0.5) == pytest.approx(0.0, abs=1e-30)
    for m in range(1, 9):
        val = integrate.quad(lambda t: fejer_kernel(m, 3.0, t), 0, 3.0, limit=200)[0] / 3.0
        assert val == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ValueError):
        fejer_kernel(0, 1.0, 0.0)


@given(st.integers(1, 30), st.floats(0.1, 10), st.floats(-50, 50))
def test_fejer_nonnegative_and_matches_cesaro_series(m, c, t):
    k = float(fejer_kernel(m, c, t))
    assert k >= 0
    j = np.arange(-m + 1, m)
    series = np.sum((1 - np.abs(j) / m) * np.cos(2 * np.pi * j * t / c))
    assert k == pytest.approx(series, abs=1e-8 * m)


def test_fit_examples():
    F = Field.scalar(lambda t: 2 * np.exp(5j * t) + 7)
    P = fit_polynomial(F, [[0.0], [5.0]], make_window_sweep(R1, "cube", [2.0 ** 10]))
    got = dict(zip(P.freqs[:, 0].round(6), P.coefs[:, 0]))
    assert abs(got[0.0] - 7) < 1e-3 and abs(got[5.0] - 2) < 1e-3
    Q = fit_polynomial(Field.scalar(lambda t: np.exp(1j * t)), [[2.0]], W)
    assert abs(Q.coefs[0, 0]) < 1e-2
    Z = fit_polynomial(Field.constant(0.0), [[1.0], [2.0]], W)
    assert np.all(Z.coefs == 0)


def test_fit_lstsq_exact_on_polynomial():
    P = random_poly(np.random.default_rng(3))
    Q = fit_polynomial(P.as_field(), P.freqs, make_window_sweep(R1, "cube", [64.0]), method="lstsq")
    assert np.allclose(Q.coefs, P.coefs, atol=1e-10)


def test_projection_error_decays_like_inverse_t():
    rng = np.random.default_rng(4)
    P = random_poly(rng)
    ts = [2.0 ** j for j in range(6, 13)]
    err = [np.max(np.abs(fit_polynomial(P.as_field(), P.freqs, make_window(R1, "cube", t)).coefs - P.coefs))
           for t in ts]
    slope = np.polyfit(np.log(ts), np.log(err), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.2)


def test_spectrum_scan_finds_frequencies():
    P = TrigPolynomial([[1.0], [math.sqrt(2)], [-2.5]], [1.0, 0.5, 0.25j])
    sc = spectrum_scan(P.as_field(), make_window(R1, "cube", 512.0))
    found = np.sort(sc.detected[:3, 0])
    assert np.allclose(found, [-2.5, 1.0, math.sqrt(2)], atol=1e-3)
    assert sc.resolution == pytest.approx(2 * math.pi / 1024)


def test_spectrum_scan_lattice_mode():
    P = TrigPolynomial([[1.0], [3.0]], [1.0, 0.5])
    sc = spectrum_scan(P.as_field(), make_window(R1, "cube", 256.0), lattice=np.arange(-5, 6, 1.0), threshold=0.02)
    assert sc.detected[:, 0].tolist() == [1.0, 3.0]
    assert set(map(tuple, sc.detected)) <= set(map(tuple, sc.probed))


def test_periodic_component_examples():
    P = TrigPolynomial([2 * math.pi, 0.0], [2.0, 3.0])
    assert np.array_equal(periodic_component(P, [1.0]).coefs, P.coefs)
    assert len(periodic_component(TrigPolynomial([1.0], [1.0]), [1.0])) == 0
    Q = two_freq_poly()
    assert len(periodic_component(Q, TWO_FREQ_A, "vector")) == 2
    assert len(periodic_component(Q, TWO_FREQ_A, "per-axis")) == 0


def test_two_freq_inner_products():
    lam = two_freq_poly().freqs
    ip = lam @ np.asarray(TWO_FREQ_A)
    assert np.allclose(ip, [4 * math.pi, 6 * math.pi], atol=1e-12)


@given(st.integers(0, 10_000), st.floats(0.1, 5.0))
def test_periodic_component_is_a_projection(seed, a):
    rng = np.random.default_rng(seed)
    lam = np.concatenate([rng.uniform(-5, 5, 3), 2 * np.pi * rng.integers(-3, 4, 2) / a])
    P = TrigPolynomial(lam, rng.normal(size=5) + 0j)
    once = periodic_component(P, [a])
    twice = periodic_component(once, [a])
    assert np.array_equal(once.freqs, twice.freqs) and np.array_equal(once.coefs, twice.coefs)


def test_cesaro_average_converges_at_rate_one_over_k():
    rng = np.random.default_rng(8)
    P = TrigPolynomial([0.7, -1.9, 2 * math.pi], rng.normal(size=3) + 1j * rng.normal(size=3))
    C = periodic_component(P, [1.0])
    t = np.linspace(-50, 50, 401)
    bound = sum(2 * abs(c) / abs(np.exp(1j * lam) - 1) for lam, c in zip(P.freqs[:2, 0], P.coefs[:2, 0]))
    for k in (1, 3, 10, 100, 1000):
        err = np.max(np.abs(P.shift_average([1.0], k)(t) - C(t)))
        assert err <= bound / k + 1e-12
