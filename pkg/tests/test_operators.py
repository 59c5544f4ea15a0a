import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from besicovitch import (Domain, Field, GreenSpec, KernelSpec, convolve_on_grid,
                         gaussian_semigroup, green_solution, heat_evolution,
                         hypothesis_check_conv, infinite_convolution, semilinear_fixed_point)
from besicovitch.operators import semigroup_field

R1 = Domain.full(1)
EXP1 = KernelSpec.exponential(1, 1)


def expi(w, res=0.5):
    return Field.scalar(lambda t: np.exp(1j * w * t), R1, resolution=res)


# ---------------------------------------------------------------------------
# hypotheses
# ---------------------------------------------------------------------------

def test_hypotheses_interval_for_algebraic_kernel():
    rep = hypothesis_check_conv(KernelSpec.algebraic(1, 1, 2), 1, 1, 1)
    assert rep["ok"] and rep["failed"] == []
    assert rep["zeta_interval"] == (1.0, 2.0)


def test_hypotheses_beta_half_fails_when_alpha_p_is_one():
    rep = hypothesis_check_conv(KernelSpec.algebraic(1, 0.5, 2), 1, 1, 1)
    assert not rep["ok"]
    assert rep["failed"] == ["beta_condition"]


def test_hypotheses_boundary_of_beta_rule_fails():
    # alpha p = 2 with beta = 1/2 gives exactly -1
    rep = hypothesis_check_conv(KernelSpec.algebraic(1, 0.5, 2), 1, 1, 2)
    assert not rep["beta_condition"]
    rep = hypothesis_check_conv(KernelSpec.algebraic(1, 0.6, 2), 1, 1, 2)
    assert rep["ok"]


def test_exponential_interval_is_unbounded():
    assert hypothesis_check_conv(EXP1, 1, 1, 2)["zeta_interval"] == (0.5, math.inf)


def test_kernel_validation():
    with pytest.raises(ValueError):
        KernelSpec.algebraic(1, 1, 1)
    with pytest.raises(ValueError):
        KernelSpec.exponential(1, 0)
    with pytest.raises(ValueError):
        KernelSpec.algebraic(1, 1.5, 2)
    assert KernelSpec.algebraic(2, 0.5, 3).validate()


# ---------------------------------------------------------------------------
# infinite convolution
# ---------------------------------------------------------------------------

def test_exponential_kernel_on_constant():
    v = infinite_convolution(EXP1, Field.constant(1.0), np.array([0.0, 3.0, -7.0]))
    assert np.allclose(v, 1.0, rtol=1e-8)


@pytest.mark.parametrize("w", [0.5, 1.0, 3.0])
def test_exponential_kernel_on_character(w):
    t = np.array([0.0, 1.3, 10.0])
    v = infinite_convolution(EXP1, expi(w), t)
    np.testing.assert_allclose(v, np.exp(1j * w * t) / (1 + 1j * w), rtol=1e-6)


def test_refuses_failing_hypotheses():
    rep = hypothesis_check_conv(KernelSpec.algebraic(1, 0.5, 2), 1, 1, 1)
    with pytest.raises(ValueError):
        infinite_convolution(EXP1, Field.constant(1.0), 0.0, check=rep)


def test_singular_algebraic_kernel_against_quad():
    R = KernelSpec.algebraic(1, 0.5, 2)
    # int_0^inf u^{-1/2} / (1 + u^2) du = pi / sqrt 2
    assert infinite_convolution(R, Field.constant(1.0), 0.0).real == pytest.approx(math.pi / math.sqrt(2), rel=1e-5)
    # algebraic weight on [0, 1], Fourier weight on the tail
    def moment(trig, wt):
        head = integrate.quad(lambda u: trig(u) / (1 + u * u), 0, 1, weight="alg", wvar=(-0.5, 0))[0]
        tail = integrate.quad(lambda u: u ** -0.5 / (1 + u * u), 1, np.inf, weight=wt, wvar=1.0)[0]
        return head + tail
    A, B = moment(math.cos, "cos"), moment(math.sin, "sin")
    t = np.array([0.0, 2.0])
    ref = np.cos(t) * A + np.sin(t) * B
    got = infinite_convolution(R, Field.scalar(np.cos, R1, resolution=0.5), t).real
    np.testing.assert_allclose(got, ref, rtol=1e-5)


def test_grid_convolution_matches_pointwise():
    R = KernelSpec.algebraic(1, 0.5, 2)
    f = Field.scalar(lambda t: np.cos(t) + 0.5 * np.sin(math.sqrt(2) * t), R1, resolution=0.5)
    g = convolve_on_grid(R, f, -5, 5, h=0.01)
    t = np.array([-3.0, 0.0, 4.0])
    np.testing.assert_allclose(g(t.reshape(-1, 1))[:, 0], infinite_convolution(R, f, t), atol=2e-3)


@settings(max_examples=10)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 3.0))
def test_convolution_is_linear(a, b, w):
    f, g = expi(w), Field.scalar(np.cos, R1, resolution=0.5)
    h = Field.scalar(lambda t: a * np.exp(1j * w * t) + b * np.cos(t), R1, resolution=0.5)
    t = np.array([0.5, 2.0])
    lhs = infinite_convolution(EXP1, h, t)
    rhs = a * infinite_convolution(EXP1, f, t) + b * infinite_convolution(EXP1, g, t)
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_polynomial_growth_input():
    # int_0^inf e^{-u} (t - u) du = t - 1
    f = Field.scalar(lambda t: t + 0j, R1, resolution=1.0)
    v = infinite_convolution(EXP1, f, np.array([0.0, 5.0]), growth=(1.0, 1.0))
    np.testing.assert_allclose(v.real, [-1.0, 4.0], atol=1e-7)


# ---------------------------------------------------------------------------
# Green kernels
# ---------------------------------------------------------------------------

def test_green_solution_of_character():
    G = GreenSpec(lambda t, s: 0.5 * np.exp(-np.abs(t - s)), 0.5, 1.0)
    assert G.validate()
    t = np.array([0.0, 1.0, 4.0])
    u = green_solution(G, expi(1.0), t)
    np.testing.assert_allclose(u, np.exp(1j * t) / 2, rtol=1e-7)
    assert np.all(np.abs(u) <= G.bound(1.0) + 1e-12)


def test_green_bound_dominates_for_bounded_input():
    M = 3.0
    G = GreenSpec(lambda t, s: np.exp(-2.0 * np.abs(t - s)) * np.cos(t + s), 1.0, 2.0)
    f = Field.scalar(lambda t: M * np.sign(np.sin(t)) + 0j, R1, resolution=0.5)
    u = green_solution(G, f, np.linspace(-5, 5, 7))
    assert np.all(np.abs(u) <= G.bound(M))
    assert G.bound(M) == pytest.approx(M)


# ---------------------------------------------------------------------------
# heat semigroups
# ---------------------------------------------------------------------------

def test_gaussian_on_constant_and_character():
    assert gaussian_semigroup(Field.constant(1.0), 0.7, 0.0).real == pytest.approx(1.0, rel=1e-9)
    v = gaussian_semigroup(expi(1.0), 1.0, np.array([0.0, 2.0]))[:, 0]
    np.testing.assert_allclose(v, math.exp(-1) * np.exp(1j * np.array([0.0, 2.0])), rtol=1e-6)


def test_gaussian_on_absolute_value():
    f = Field.scalar(lambda t: np.abs(t) + 0j, R1, resolution=1.0,
                     breaks=lambda axis, lo, hi: np.array([0.0]) if lo < 0 < hi else np.empty(0))
    v = gaussian_semigroup(f, 1.0, 0.0, growth=(1.0, 1.0))
    assert v.real == pytest.approx(2 / math.sqrt(math.pi), rel=1e-7)


def test_gaussian_on_quadratic_growth():
    f = Field.scalar(lambda t: t ** 2 + 0j, R1, resolution=1.0)
    x = np.array([0.0, 3.0])
    v = gaussian_semigroup(f, 0.5, x, growth=(1.0, 2.0))[:, 0].real
    np.testing.assert_allclose(v, x ** 2 + 1.0, rtol=1e-8)


def test_gaussian_in_two_dimensions():
    f = Field.scalar(lambda a, b: np.exp(1j * (a + 2 * b)), Domain.full(2), resolution=0.5)
    v = gaussian_semigroup(f, 0.3, np.array([[0.0, 0.0], [1.0, -1.0]]))[:, 0]
    np.testing.assert_allclose(v, math.exp(-0.3 * 5) * np.exp(1j * np.array([0.0, -1.0])), rtol=1e-6)


def test_gaussian_semigroup_law():
    f = Field.scalar(lambda t: np.cos(t) + 0.3 * np.sin(2.5 * t), R1, resolution=0.5)
    x = np.array([0.2, 1.5])
    two_step = gaussian_semigroup(semigroup_field(f, 0.3), 0.2, x)
    np.testing.assert_allclose(two_step, gaussian_semigroup(f, 0.5, x), atol=1e-8)


def test_gaussian_commutes_with_translation():
    f = Field.scalar(lambda t: np.cos(t) * np.exp(-0.1 * t * t), R1, resolution=0.5)
    x = np.array([-1.0, 0.5])
    a = gaussian_semigroup(f.shift(1.7), 0.4, x)
    b = gaussian_semigroup(f, 0.4, x + 1.7)
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_heat_evolution_law():
    c = -0.4
    a = lambda r: c  # noqa: E731
    f = expi(2.0)
    u = np.array([0.0, 1.0])
    got = heat_evolution(f, a, 1.5, 0.5, u)[:, 0]
    np.testing.assert_allclose(got, math.exp((c - 4.0) * 1.0) * np.exp(2j * u), rtol=1e-6)
    with pytest.raises(ValueError):
        heat_evolution(f, a, 0.5, 1.5, u)


def test_heat_evolution_with_time_dependent_rate():
    a = lambda r: math.sin(r)  # noqa: E731
    v = heat_evolution(Field.constant(1.0), a, 2.0, 0.0, 0.0)
    assert v.real == pytest.approx(math.exp(1 - math.cos(2.0)), rel=1e-9)


# ---------------------------------------------------------------------------
# semilinear fixed point
# ---------------------------------------------------------------------------

def test_fixed_point_without_state_dependence_is_convolution():
    R = KernelSpec.exponential(1, 2)
    res = semilinear_fixed_point(R, lambda s, u: np.cos(s) + 0j, 0.0, -4, 4, h=0.01)
    t = np.array([-2.0, 0.0, 3.0])
    ref = infinite_convolution(R, Field.scalar(np.cos, R1, resolution=0.5), t)
    np.testing.assert_allclose(res.field(t.reshape(-1, 1))[:, 0], ref, atol=1e-4)
    assert res.iterations <= 3


def test_fixed_point_of_zero_forcing():
    res = semilinear_fixed_point(KernelSpec.exponential(1, 2), lambda s, u: 0.25 * np.sin(u), 0.25, -2, 2)
    assert res.iterations == 1
    assert np.max(np.abs(res.field(np.array([[0.0]])))) == 0.0


def test_fixed_point_contraction_ratio():
    R = KernelSpec.exponential(1, 2)
    res = semilinear_fixed_point(R, lambda s, u: 0.25 * np.sin(u) + np.cos(s), 0.25, -5, 5)
    assert res.contraction == pytest.approx(1 / 8, rel=1e-8)
    assert res.iterations <= 20
    assert all(0.0 <= r <= 0.2 for r in res.ratios[1:])


def test_fixed_point_refuses_non_contraction():
    with pytest.raises(ValueError, match="contraction"):
        semilinear_fixed_point(KernelSpec.exponential(1, 2), lambda s, u: 3 * u, 3.0, -1, 1)
