import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, optimize

from besicovitch import (Field, VariableExponent, embedding_constant_check, gallery_get,
                         holder_product_norm, luxemburg_norm, modular)
from besicovitch.luxemburg import norm_discrete, phi_p

from conftest import random_poly

UNIT = (0.0, 1.0)


def test_phi_p_branches():
    s = np.array([0.5, 1.0, 2.0])
    assert np.allclose(phi_p(s, 2.0), s ** 2)
    out = phi_p(s, math.inf)
    assert out[0] == 0.0 and out[1] == 0.0 and math.isinf(out[2])


def test_modular_examples():
    assert modular(Field.constant(1.0), 2, UNIT) == pytest.approx(1.0)
    assert math.isinf(modular(Field.constant(2.0), math.inf, UNIT))


def test_modular_of_bricks_with_variable_exponent():
    F = gallery_get("brick-unit").field
    p = VariableExponent.function(lambda t: 1 + t[:, 0] ** 2)
    # bricks [3, 4] and [8, 9] lie in [0, 9]; phi of the value 1 is 1
    assert modular(F, p, (0.0, 9.0)) == pytest.approx(2.0, rel=1e-6)


def test_norm_of_constants():
    assert luxemburg_norm(Field.constant(1.0), 2, UNIT) == pytest.approx(1.0, rel=1e-7)
    assert luxemburg_norm(Field.constant(2.0), 3, UNIT) == pytest.approx(2.0, rel=1e-7)
    assert luxemburg_norm(Field.constant(1.0), math.inf, (0.0, 3.0)) == pytest.approx(1.0, rel=1e-7)


def test_brick_norm_against_independent_root_find():
    # rho(F / lam) = sum_j int_{j^2-1}^{j^2} lam^{-(1+x^2)} dx, solved for rho = 1
    T = 36.0
    F = gallery_get("brick-unit").field
    p = VariableExponent.function(lambda t: 1 + t[:, 0] ** 2)
    got = luxemburg_norm(F, p, (0.0, T))

    def rho(lam):
        return sum(integrate.quad(lambda x: lam ** -(1 + x * x), j * j - 1, j * j, epsabs=0, epsrel=1e-12)[0]
                   for j in range(2, int(math.isqrt(int(T))) + 1)) - 1.0

    ref = optimize.brentq(rho, 1.0 + 1e-9, 2.0, xtol=1e-14)
    assert got == pytest.approx(ref, rel=1e-5)
    # the quoted closed-form sum stays within 5 %
    quoted = optimize.brentq(lambda lam: sum(lam ** (-j ** 4 + 2 * j * j - 2) for j in range(2, 7)) - 1,
                             1.0 + 1e-9, 2.0)
    assert got == pytest.approx(quoted, rel=0.05)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 5.0])
def test_constant_exponent_matches_lp(p):
    rng = np.random.default_rng(int(p))
    for _ in range(10):
        P = random_poly(rng, m=3)
        F = P.as_field()
        ref = integrate.quad(lambda x: abs(P(np.array([x]))[0, 0]) ** p, 0, 1, epsabs=0, epsrel=1e-12)[0] ** (1 / p)
        assert luxemburg_norm(F, p, UNIT) == pytest.approx(ref, rel=1e-6)


def test_holder_examples():
    one = Field.constant(1.0)
    assert holder_product_norm(one, one, 2, 2, 1, UNIT) == pytest.approx((1.0, 2.0), rel=1e-7)
    x = Field.scalar(lambda t: t)
    lhs, rhs = holder_product_norm(x, one, 2, 2, 1, UNIT)
    assert lhs == pytest.approx(0.5, rel=1e-7)
    assert rhs == pytest.approx(2 / math.sqrt(3), rel=1e-7)
    u, v = Field.scalar(lambda t: np.exp(1j * t)), Field.scalar(lambda t: np.exp(-1j * t))
    lhs, rhs = holder_product_norm(u, v, 4, 4, 2, (0.0, 2 * math.pi))
    assert lhs == pytest.approx(math.sqrt(2 * math.pi), rel=1e-7)
    assert rhs == pytest.approx(2 * math.sqrt(2 * math.pi), rel=1e-7)


def test_holder_rejects_bad_exponents():
    one = Field.constant(1.0)
    with pytest.raises(ValueError, match="1/q"):
        holder_product_norm(one, one, 2, 2, 2, UNIT)


def test_embedding_examples():
    one = Field.constant(1.0)
    assert embedding_constant_check(one, 4, 2, UNIT) == pytest.approx((1.0, 4.0), rel=1e-7)
    x = Field.scalar(lambda t: t)
    lhs, rhs = embedding_constant_check(x, 2, 1, UNIT)
    assert (lhs, rhs) == pytest.approx((0.5, 4 / math.sqrt(3)), rel=1e-7)
    assert embedding_constant_check(one, math.inf, 1, (0.0, 3.0)) == pytest.approx((3.0, 8.0), rel=1e-7)
    with pytest.raises(ValueError):
        embedding_constant_check(one, 1, 2, UNIT)


@given(st.integers(0, 10_000), st.floats(-20, 20).filter(lambda c: abs(c) > 1e-3),
       st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf]))
def test_homogeneity(seed, c, p):
    F = random_poly(np.random.default_rng(seed), m=3).as_field()
    a = luxemburg_norm(F, p, UNIT)
    b = luxemburg_norm(F.map_values(lambda v: c * v), p, UNIT)
    assert b == pytest.approx(abs(c) * a, rel=1e-6)


@given(st.integers(0, 10_000))
def test_monotone_in_modulus(seed):
    rng = np.random.default_rng(seed)
    s = rng.uniform(0, 3, 200)
    w = rng.uniform(0.001, 0.01, 200)
    pv = rng.uniform(1, 4, 200)
    g = s * rng.uniform(0, 1, 200)
    assert norm_discrete(g, w, pv) <= norm_discrete(s, w, pv) + 1e-7


def test_norm_discrete_variable_exponent_solves_modular():
    rng = np.random.default_rng(3)
    s, w, pv = rng.uniform(0, 5, 500), np.full(500, 0.01), rng.uniform(1, 3, 500)
    lam = norm_discrete(s, w, pv)
    assert np.sum(w * (s / lam) ** pv) == pytest.approx(1.0, abs=1e-6)
