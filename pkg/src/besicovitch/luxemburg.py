"""Variable-exponent Lebesgue machinery.

The modular is ``rho(f) = int phi_{p(x)}(||f(x)||) dx`` with
``phi_p(s) = s**p`` for finite ``p`` and, on the region where ``p = inf``,
``phi(s) = 0`` for ``s <= 1`` and ``inf`` otherwise.  The Luxemburg norm is
``inf{lam > 0 : rho(f / lam) <= 1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Domain, Field, QuadSpec, Window, as_points, vector_norm

BISECT_TOL = 1e-8
MAX_DOUBLINGS = 60


@dataclass(frozen=True, eq=False)
class VariableExponent:
    """Exponent ``p(.) >= 1``, constant or evaluable (``inf`` allowed).

    Parameters
    ----------
    value : float, optional
        Constant exponent.
    fn : callable, optional
        ``fn(t)`` with ``t`` of shape (N, n) returning (N,) exponents.
    quad : QuadSpec
        Integration hints for the exponent itself (a smoothly varying ``p``
        needs several nodes per panel even when the integrand is piecewise
        constant).
    """

    value: Optional[float] = None
    fn: Optional[Callable] = None
    quad: QuadSpec = field(default_factory=lambda: QuadSpec(resolution=np.inf, order=1))
    name: str = ""

    def __post_init__(self):
        if (self.value is None) == (self.fn is None):
            raise ValueError("give exactly one of a constant value or a function")
        if self.value is not None and not self.value >= 1:
            raise ValueError("exponent must be >= 1")

    @classmethod
    def constant(cls, p):
        return cls(value=float(p), name=f"{p}")

    @classmethod
    def function(cls, fn, resolution=0.5, order=8, name="p(x)"):
        return cls(fn=fn, quad=QuadSpec(resolution=resolution, order=order), name=name)

    @property
    def is_constant(self):
        return self.value is not None

    def __call__(self, t, n=None):
        t = np.asarray(t, dtype=float)
        if self.is_constant:
            N = t.shape[0] if t.ndim >= 1 else 1
            return np.full(N, self.value)
        p = np.asarray(self.fn(t), dtype=float).reshape(-1)
        if np.any(p < 1 - 1e-12) or np.any(np.isnan(p)):
            raise ValueError("exponent p(x) < 1 at a sampled point")
        return p

    def extremes(self, window: Window):
        """Sampled ``(p_minus, p_plus)`` on ``window``."""
        if self.is_constant:
            return self.value, self.value
        pts, _ = window.rule(QuadSpec(resolution=max(window.t / 200, 1e-3), order=4))
        p = self(pts)
        return float(p.min()), float(p.max())

    def p_minus(self, window):
        return self.extremes(window)[0]

    def p_plus(self, window):
        return self.extremes(window)[1]

    def to_dict(self):
        if self.is_constant:
            return {"kind": "constant", "value": "inf" if math.isinf(self.value) else self.value}
        return {"kind": "function", "name": self.name}


def as_exponent(p) -> VariableExponent:
    if isinstance(p, VariableExponent):
        return p
    if isinstance(p, str) and p in ("inf", "infinity"):
        return VariableExponent.constant(math.inf)
    return VariableExponent.constant(float(p))


def as_window(window, n=1) -> Window:
    """Accept a :class:`Window` or explicit bounds ``(lo, hi)``."""
    if isinstance(window, Window):
        return window
    lo, hi = window
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if np.any(hi <= lo):
        raise ValueError("degenerate window")
    dom = Domain.box(lo, hi)
    t = float(np.max(np.abs(np.concatenate([lo, hi]))))
    return Window(t, "cube", dom, tuple(lo), tuple(hi), float(np.prod(hi - lo)))


# ---------------------------------------------------------------------------
# discrete kernels
# ---------------------------------------------------------------------------

def phi_p(s, p):
    """``phi_{p}(s)`` elementwise, with the two-branch rule at ``p = inf``."""
    s = np.asarray(s, dtype=float)
    p = np.broadcast_to(np.asarray(p, dtype=float), s.shape)
    out = np.empty_like(s)
    fin = np.isfinite(p)
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        out[fin] = np.where(s[fin] > 0, np.exp(p[fin] * np.log(np.where(s[fin] > 0, s[fin], 1.0))), 0.0)
    out[~fin] = np.where(s[~fin] <= 1.0, 0.0, np.inf)
    return out


def modular_discrete(s, w, p, lam=1.0):
    """``sum_i w_i phi_{p_i}(s_i / lam)``; ``inf`` is a legitimate value."""
    vals = phi_p(np.asarray(s) / lam, p)
    pos = w > 0
    if np.any(np.isinf(vals[pos])):
        return math.inf
    return float(np.dot(w, np.where(pos, vals, 0.0)))


def norm_discrete(s, w, p, tol=BISECT_TOL, method="auto"):
    """Luxemburg norm of samples ``s`` with weights ``w`` and exponents ``p``.

    ``method='auto'`` uses the closed form for a constant exponent and
    bisection otherwise; ``'bisect'`` always bisects.
    """
    s = np.asarray(s, dtype=float)
    w = np.asarray(w, dtype=float)
    p = np.broadcast_to(np.asarray(p, dtype=float), s.shape)
    smax = float(np.max(s[w > 0])) if np.any(w > 0) else 0.0
    if smax == 0.0:
        return 0.0
    const = bool(np.all(p == p.flat[0]))
    if method == "auto" and const:
        p0 = float(p.flat[0])
        if math.isinf(p0):
            return smax
        return smax * float(np.dot(w, (s / smax) ** p0)) ** (1.0 / p0)
    return _bisect(s, w, p, smax, tol)


def _bisect(s, w, p, scale, tol):
    def rho(lam):
        return modular_discrete(s, w, p, lam)

    hi = scale
    k = 0
    while rho(hi) > 1.0:
        hi *= 2.0
        k += 1
        if k > MAX_DOUBLINGS:
            raise OverflowError("norm overflow")
    lo = hi
    k = 0
    while True:
        lo *= 0.5
        k += 1
        if rho(lo) > 1.0:
            break
        if k > MAX_DOUBLINGS:
            return 0.0
    # invariant: rho(lo) > 1 >= rho(hi)
    a, b = math.log(lo), math.log(hi)
    while b - a > tol:
        m = 0.5 * (a + b)
        if rho(math.exp(m)) > 1.0:
            a = m
        else:
            b = m
    return math.exp(b)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _samples(f: Field, p: VariableExponent, window: Window, refine=0):
    spec = f.quad.merge(p.quad)
    for _ in range(refine):
        if math.isfinite(spec.resolution):
            spec = QuadSpec(spec.resolution / 2, spec.order, spec.breaks, spec.singular, spec.grid)
        else:
            spec = QuadSpec(spec.resolution, spec.order * 2, spec.breaks, spec.singular, spec.grid)
    pts, w = window.rule(spec)
    s = np.stack([f.pnorm(pts, x) for x in f.samples])
    if not np.all(np.isfinite(s)):
        raise FloatingPointError("non-finite field values on the window")
    return pts, w, s, p(pts)


def modular(f: Field, p, window, rtol=1e-6, max_refine=8) -> float:
    """``rho(f)`` on ``window``; refines the rule until the relative change is below ``rtol``.

    For parameterised fields the largest modular over the sample set is returned.
    """
    p = as_exponent(p)
    window = as_window(window, f.n)
    prev = None
    for r in range(max_refine + 1):
        _, w, s, pv = _samples(f, p, window, refine=r)
        val = max(modular_discrete(si, w, pv) for si in s)
        if math.isinf(val):
            return math.inf
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        if f.quad.grid is not None:
            return val
        prev = val
    return val


def luxemburg_norm(f: Field, p, window, tol=BISECT_TOL, method="auto", rtol=1e-7,
                   max_refine=6) -> float:
    """Luxemburg norm ``inf{lam > 0 : rho(f / lam) <= 1}`` (sup over parameter samples).

    The rule is refined until two successive norms agree to ``rtol``
    (kinks of ``|f|`` at zeros slow the Gauss rules down).
    """
    p = as_exponent(p)
    window = as_window(window, f.n)
    prev = None
    for r in range(max_refine + 1):
        _, w, s, pv = _samples(f, p, window, refine=r)
        val = max(norm_discrete(si, w, pv, tol=tol, method=method) for si in s)
        if f.quad.grid is not None or (prev is not None and abs(val - prev) <= rtol * max(val, 1e-300)):
            return val
        prev = val
    return val


def _check_exponent_identity(pv, rv, qv, tol=1e-9):
    inv = lambda a: np.where(np.isinf(a), 0.0, 1.0 / a)  # noqa: E731
    err = np.abs(inv(qv) - inv(pv) - inv(rv))
    if np.any(err > tol):
        raise ValueError("exponents violate 1/q = 1/p + 1/r")


def holder_product_norm(u: Field, v: Field, p, r, q, window):
    """Both sides of ``||uv||_q <= 2 ||u||_p ||v||_r``.

    Returns
    -------
    (lhs, rhs) : tuple of float
    """
    p, r, q = as_exponent(p), as_exponent(r), as_exponent(q)
    window = as_window(window, u.n)
    spec = u.quad.merge(v.quad).merge(p.quad).merge(r.quad).merge(q.quad)
    pts, w = window.rule(spec)
    pv, rv, qv = p(pts), r(pts), q(pts)
    _check_exponent_identity(pv, rv, qv)
    su, sv = u.pnorm(pts), v.pnorm(pts)
    lhs = norm_discrete(su * sv, w, qv)
    rhs = 2.0 * norm_discrete(su, w, pv) * norm_discrete(sv, w, rv)
    return lhs, rhs


def embedding_constant_check(f: Field, p, q, window):
    """Both sides of ``||f||_q <= 2 (1 + m(Omega)) ||f||_p`` for ``q <= p``."""
    p, q = as_exponent(p), as_exponent(q)
    window = as_window(window, f.n)
    spec = f.quad.merge(p.quad).merge(q.quad)
    pts, w = window.rule(spec)
    pv, qv = p(pts), q(pts)
    if np.any(qv > pv + 1e-12):
        raise ValueError("embedding needs q <= p on the window")
    s = f.pnorm(pts)
    lhs = norm_discrete(s, w, qv)
    rhs = 2.0 * (1.0 + window.measure) * norm_discrete(s, w, pv)
    return lhs, rhs


__all__ = [
    "VariableExponent", "as_exponent", "as_window", "phi_p", "modular_discrete",
    "norm_discrete", "modular", "luxemburg_norm", "holder_product_norm",
    "embedding_constant_check", "vector_norm", "as_points",
]
