"""Catalogue of explicit example fields with their claimed classifications.

Every entry bundles a deterministic field constructor, a list of expected
properties (profile, expected verdict, short description) and a verification
recipe that runs the relevant engines at a resolution preset.  A second,
independent scalar implementation of each defining formula backs the
duplicate-evaluator check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .classify import classify_besicovitch, doss_residual, normality_check, ShiftSequenceSet
from .core import Domain, Field, QuadSpec, make_window, make_window_sweep
from .dosscond import condition_A_residual, condition_B_functional
from .luxemburg import VariableExponent, luxemburg_norm
from .seminorm import WeightProfile, WindowWeight, Gauge, besicovitch_bounded, m_p_seminorm, weighted_residual
from .trigpoly import TrigPolynomial

STATUSES = ("pass", "fail", "inconclusive")

PRESETS = {
    # 1-D schedules t0 * 2**j, 2-D schedules t0_2d * 2**j, and the longest 1-D sweep
    "fast": {"t0": 8.0, "count": 9, "t0_2d": 2.0, "count_2d": 6, "long": 17},
    "standard": {"t0": 8.0, "count": 11, "t0_2d": 4.0, "count_2d": 6, "long": 18},
    "deep": {"t0": 8.0, "count": 13, "t0_2d": 4.0, "count_2d": 7, "long": 20},
}


# ---------------------------------------------------------------------------
# entry types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    """One claimed property: a profile, the expected verdict and a short label."""

    name: str
    profile: dict
    expected: str
    citation: str

    def to_dict(self):
        return {"name": self.name, "profile": self.profile, "expected": self.expected,
                "citation": self.citation}


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    id: str
    params: dict
    field: Field
    expectations: tuple
    recipe: Callable
    reference: Callable  # scalar re-implementation: reference(point tuple) -> complex
    sample_box: tuple  # (lo, hi) per axis for random test points
    open_question: bool = False
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return {"id": self.id, "params": _jsonable(self.params),
                "expectations": [e.to_dict() for e in self.expectations],
                "open_question": self.open_question}


@dataclass
class PropertyResult:
    name: str
    status: str
    expected: str
    evidence: dict

    def to_dict(self):
        return {"name": self.name, "status": self.status, "expected": self.expected,
                "evidence": _jsonable(self.evidence)}


@dataclass
class VerificationReport:
    id: str
    preset: str
    results: list
    seconds: float

    @property
    def statuses(self):
        return [r.status for r in self.results]

    @property
    def ok(self):
        return "fail" not in self.statuses

    def to_dict(self):
        return {"id": self.id, "preset": self.preset, "seconds": self.seconds,
                "results": [r.to_dict() for r in self.results]}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def _status(ok):
    return "pass" if ok else "fail"


def _sched(preset, dim=1, count=None, t0=None):
    P = PRESETS[preset]
    if dim == 1:
        return {"t0": t0 or P["t0"], "ratio": 2.0, "count": count or P["count"]}
    return {"t0": t0 or P["t0_2d"], "ratio": 2.0, "count": count or P["count_2d"]}


def _profile_dict(alpha=1.0, beta=1.0, p=1.0):
    return {"phi": "id" if alpha == 1 else f"x^{alpha:g}", "weight": f"t^-{beta:g}", "p": p}


# ---------------------------------------------------------------------------
# brick helpers (piecewise-constant fields on [m^2, m^2 + sqrt(m)))
# ---------------------------------------------------------------------------

def _brick_values(s, height):
    """``height(m)`` on ``[m^2, m^2 + sqrt(m))`` for integers ``m >= 1``, else 0."""
    s = np.asarray(s, dtype=float)
    m = np.floor(np.sqrt(np.maximum(s, 0.0)))
    # guard against rounding in sqrt near perfect squares
    m = np.where((m + 1) ** 2 <= s, m + 1, m)
    m = np.where(m ** 2 > s, m - 1, m)
    inside = (m >= 1) & (s >= m ** 2) & (s < m ** 2 + np.sqrt(np.maximum(m, 1.0)))
    return np.where(inside, height(np.maximum(m, 1.0)), 0.0)


def _brick_breaks(axis, lo, hi):
    if hi <= 1:
        return np.empty(0)
    m = np.arange(1, int(math.isqrt(int(max(hi, 1)))) + 2, dtype=float)
    b = np.concatenate([m ** 2, m ** 2 + np.sqrt(m)])
    return b[(b > lo) & (b < hi)]


def _brick_ref(s, height):
    if s < 1:
        return 0.0
    m = math.isqrt(int(math.floor(s)))
    if m >= 1 and m * m <= s < m * m + math.sqrt(m):
        return height(m)
    return 0.0


def brick_field(height: Callable, name="brick") -> Field:
    """Scalar 1-D brick field on R with plateau heights ``height(m)``."""
    return Field.scalar(lambda s: _brick_values(s, height), Domain.full(1),
                        resolution=np.inf, order=1, breaks=_brick_breaks).replace(name=name)


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def _g_transport(y):
    return np.cos(y) + 0.5


def _transport_exp(p):
    a, c = p["a"], p["c"]
    dom = Domain.box([0.0, -math.inf], [math.inf, math.inf])
    F = Field.scalar(lambda x, y: _g_transport(y) * np.exp(-(c / a) * x), dom, resolution=2.0, order=8)
    ref = lambda z: (math.cos(z[1]) + 0.5) * math.exp(-c * z[0] / a)  # noqa: E731
    return F.replace(name="transport-exp"), ref, ((0.0, -50.0), (20.0, 50.0))


def _heat_coefs(K):
    k = np.arange(1, K + 1)
    return k, (-1.0) ** (k + 1) / k


def _heat_series(p):
    K = int(p["terms"])
    k, b = _heat_coefs(K)
    dom = Domain.box([0.0, 0.0], [2 * math.pi, math.inf])

    def f(x, s):
        out = np.zeros(np.broadcast(x, s).shape)
        for kk, bb in zip(k, b):
            out = out + bb * np.sin(kk * x / 2) * np.exp(-kk * kk * s / 4)
        return out

    def ref(z):
        return sum(((-1) ** (j + 1) / j) * math.sin(j * z[0] / 2) * math.exp(-j * j * z[1] / 4)
                   for j in range(1, K + 1))

    F = Field.scalar(f, dom, resolution=min(1.0, 6.0 / K), order=8)
    return F.replace(name="heat-series"), ref, ((0.0, 0.0), (2 * math.pi, 30.0))


def _unit_brick_values(s):
    s = np.asarray(s, dtype=float)
    j = np.ceil(np.sqrt(np.maximum(s, 0.0)))
    j = np.where((j - 1) ** 2 >= s, j - 1, j)
    j = np.where(j ** 2 < s, j + 1, j)
    return np.where((j >= 2) & (s >= j ** 2 - 1) & (s <= j ** 2), 1.0, 0.0)


def _unit_brick_breaks(axis, lo, hi):
    j = np.arange(2, int(math.sqrt(max(hi, 1.0))) + 3, dtype=float)
    b = np.concatenate([j ** 2 - 1, j ** 2])
    return b[(b > lo) & (b < hi)]


def _brick_unit(p):
    F = Field.scalar(_unit_brick_values, Domain.orthant([0.0]), resolution=np.inf, order=1,
                     breaks=_unit_brick_breaks)

    def ref(z):
        s = z[0]
        j = 2
        while j * j - 1 <= s:
            if s <= j * j:
                return 1.0
            j += 1
        return 0.0

    return F.replace(name="brick-unit"), ref, ((0.0,), (400.0,))


def _brick_power(p):
    zeta = p["zeta"]
    F = brick_field(lambda m: m ** zeta, "brick-power")
    return F, lambda z: _brick_ref(z[0], lambda m: m ** zeta), ((-20.0,), (400.0,))


def _brick_family(p):
    pj = tuple(float(v) for v in p["p"])
    facs = [brick_field(lambda m, q=q: m ** (1.0 / (2 * q)), f"brick-{q:g}") for q in pj]
    if len(pj) == 1:
        F = facs[0].replace(name="brick-family")
    else:
        F = Field.tensor(*facs, domain=Domain.full(len(pj))).replace(name="brick-family")

    def ref(z):
        out = 1.0
        for zz, q in zip(z, pj):
            out *= _brick_ref(zz, lambda m: m ** (1.0 / (2 * q)))
        return out

    n = len(pj)
    return F, ref, ((-10.0,) * n, (400.0,) * n)


def _haraux_souplet(p):
    N = int(p["terms"])
    n = np.arange(1, N + 1, dtype=float)
    scales = 2.0 ** -n

    def f(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for c, w in zip(1.0 / n, scales):
            out += c * np.sin(s * w) ** 2
        return out

    ref = lambda z: math.fsum(math.sin(z[0] / 2 ** j) ** 2 / j for j in range(1, N + 1))  # noqa: E731
    F = Field.scalar(f, Domain.full(1), resolution=2.0, order=8)
    return F.replace(name="haraux-souplet"), ref, ((-1e4,), (1e4,))


def _power_sigma(p):
    sig = p["sigma"]
    F = Field.scalar(lambda s: np.abs(s) ** sig, Domain.full(1), resolution=1.0, order=8,
                     singular=[(0, 0.0)])
    return F.replace(name="power-sigma"), lambda z: abs(z[0]) ** sig, ((-500.0,), (500.0,))


RAMP = 1.0 / 3.0


def rect_profile(v):
    """Continuous plateau profile along ``v = x - y`` (height ``2**|k|`` on each band)."""
    v = np.asarray(v, dtype=float)
    k = np.round((v + 1.0) / 8.0)  # band k is [8k - 4/3, 8k - 2/3], centred at 8k - 1
    d = np.abs(v - (8.0 * k - 1.0))
    h = 2.0 ** np.abs(k)
    return h * np.clip((1.0 / 3.0 + RAMP - d) / RAMP, 0.0, 1.0)


def _rect_2d(p):
    F = Field.scalar(lambda x, y: rect_profile(x - y), Domain.full(2), resolution=0.5, order=6)

    def ref(z):
        v = z[0] - z[1]
        best = 0.0
        for k in range(int(v // 8) - 2, int(v // 8) + 3):
            lo, hi = 8 * k - 4.0 / 3.0, 8 * k - 2.0 / 3.0
            if lo <= v <= hi:
                val = 1.0
            elif lo - RAMP < v < lo:
                val = (v - lo + RAMP) / RAMP
            elif hi < v < hi + RAMP:
                val = (hi + RAMP - v) / RAMP
            else:
                val = 0.0
            best = max(best, val * 2.0 ** abs(k))
        return best

    return F.replace(name="rect-2d"), ref, ((-30.0, -30.0), (30.0, 30.0))


TWO_FREQ_A = (math.pi * (2 + math.sqrt(2)), 2 * math.pi * (1 - math.sqrt(2)))


def two_freq_poly():
    return TrigPolynomial([[math.sqrt(2), 1.0], [2.0, 1.0]], [1.0, 1.0])


def _two_freq_2d(p):
    P = two_freq_poly()
    F = P.as_field(Domain.full(2)).replace(name="two-freq-2d")
    import cmath
    ref = lambda z: cmath.exp(1j * (math.sqrt(2) * z[0] + z[1])) + cmath.exp(1j * (2 * z[0] + z[1]))  # noqa: E731
    return F, ref, ((-50.0, -50.0), (50.0, 50.0))


def _sign_flip(p):
    lam0 = p["lam0"]
    F = Field.scalar(lambda s: np.where(s >= 0, 1.0, -1.0) * np.exp(-1j * lam0 * s), Domain.full(1),
                     resolution=min(1.0, 3.0 / max(abs(lam0), 1e-9)), order=8,
                     breaks=lambda axis, lo, hi: np.array([0.0]) if lo < 0 < hi else np.empty(0))
    import cmath
    ref = lambda z: (1.0 if z[0] >= 0 else -1.0) * cmath.exp(-1j * lam0 * z[0])  # noqa: E731
    return F.replace(name="sign-flip"), ref, ((-100.0,), (100.0,))


def _product_sep(p):
    dom = Domain.box([0.0, 0.0], [2 * math.pi, math.inf])
    F = Field.scalar(lambda x, y: np.exp(np.cos(x)) * np.cos(y), dom, resolution=1.0, order=8)
    ref = lambda z: math.exp(math.cos(z[0])) * math.cos(z[1])  # noqa: E731
    return F.replace(name="product-sep"), ref, ((0.0, 0.0), (2 * math.pi, 100.0))


def _dal_f(v):
    return np.cos(v) + 1.0 / (1.0 + v * v)


def _dal_g1(v):
    return np.sin(math.sqrt(2) * v)


def _dalembert(p):
    def u(x, s):
        return 0.5 * (_dal_f(x + s) + _dal_f(x - s)) + 0.5 * (_dal_g1(x + s) - _dal_g1(x - s))

    def ref(z):
        x, s = z
        f = lambda v: math.cos(v) + 1 / (1 + v * v)  # noqa: E731
        g = lambda v: math.sin(math.sqrt(2) * v)  # noqa: E731
        return (f(x + s) + f(x - s)) / 2 + (g(x + s) - g(x - s)) / 2

    F = Field.scalar(u, Domain.full(2), resolution=1.0, order=8)
    return F.replace(name="dalembert"), ref, ((-50.0, -50.0), (50.0, 50.0))


def _g_xy(v):
    return np.cos(v) + 0.5 * np.cos(math.sqrt(3) * v)


def _transport_xy(p):
    dom = Domain.box([-math.inf, -math.inf], [0.0, math.inf])
    F = Field.scalar(lambda x, y: _g_xy(y - x) * np.exp(x), dom, resolution=1.0, order=8)
    ref = lambda z: (math.cos(z[1] - z[0]) + 0.5 * math.cos(math.sqrt(3) * (z[1] - z[0]))) * math.exp(z[0])  # noqa: E731
    return F.replace(name="transport-xy"), ref, ((-30.0, -50.0), (0.0, 50.0))


def keckic_constants(A, B, C, D, E, F_):
    """Validate the coefficient constraints and return ``(k1, m1, k2, m2)``.

    Solutions are ``exp(k y) h(x + m y)`` with ``C m^2 + 2 B m + A = 0``,
    ``C k^2 + 2 E k + F = 0`` and the pairing fixed by the sign of ``BE - CD``.
    """
    checks = [("B > 0", B > 0), ("C > 0", C > 0), ("B^2 >= AC", B * B >= A * C),
              ("E^2 >= CF", E * E >= C * F_), ("B^2 > E^2 - CF", B * B > E * E - C * F_)]
    for label, ok in checks:
        if not ok:
            raise ValueError(f"coefficient constraint violated: {label}")
    lhs = (B * E - C * D) ** 2
    rhs = (B * B - A * C) * (E * E - C * F_)
    if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs), abs(rhs)):
        raise ValueError(f"coefficient constraint violated: (BE-CD)^2 = (B^2-AC)(E^2-CF) "
                         f"({lhs:.6g} != {rhs:.6g})")
    s1 = math.sqrt(E * E - C * F_)
    s2 = math.sqrt(B * B - A * C)
    sg = 1.0 if B * E - C * D >= 0 else -1.0
    k1, m1 = (-E + s1) / C, (-B + sg * s2) / C
    k2, m2 = (-E - s1) / C, (-B - sg * s2) / C
    return k1, m1, k2, m2


def _keckic(p):
    A, B, C, D, E, F_ = (float(p[k]) for k in ("A", "B", "C", "D", "E", "F"))
    k1, m1, k2, m2 = keckic_constants(A, B, C, D, E, F_)
    dom = Domain.box([-math.inf, 0.0], [math.inf, math.inf])

    def u(x, y):
        return np.exp(k1 * y) * np.cos(x + m1 * y) + np.exp(k2 * y) * np.cos(0.5 * (x + m2 * y))

    def ref(z):
        x, y = z
        return math.exp(k1 * y) * math.cos(x + m1 * y) + math.exp(k2 * y) * math.cos((x + m2 * y) / 2)

    F = Field.scalar(u, dom, resolution=1.0, order=8)
    F = F.replace(name="keckic", meta={"k1": k1, "m1": m1, "k2": k2, "m2": m2,
                                        "coefficients": (A, B, C, D, E, F_)})
    return F, ref, ((-30.0, 0.0), (30.0, 10.0))


# ---------------------------------------------------------------------------
# recipes
# ---------------------------------------------------------------------------

def _classify_prop(name, F, profile, windows, expected, **kw):
    rep = classify_besicovitch(F, profile, windows, **kw)
    if expected == "member-evidence":
        ok = rep.verdict == "member-evidence"
    else:
        ok = rep.verdict == "non-member-evidence"
    ev = {"verdict": rep.verdict, "best_k": rep.best_k, "final_residual": rep.final_residual,
          "trend": rep.curve[rep.best_k].trend, "slope": rep.curve[rep.best_k].slope,
          "scale": rep.scale}
    status = _status(ok) if rep.verdict != "inconclusive" else "inconclusive"
    return PropertyResult(name, status, expected, ev)


def _bounded_prop(name, F, profile, windows, expected):
    v = besicovitch_bounded(F, profile, windows)
    est = v.report.estimate
    ev = {"verdict": v.verdict, "trend": est.trend, "slope": est.slope, "estimate": est.estimate,
          "log_growth": getattr(est, "log_growth", False)}
    if v.verdict == "inconclusive":
        return PropertyResult(name, "inconclusive", expected, ev)
    return PropertyResult(name, _status(v.verdict == expected), expected, ev)


def _recipe_transport_exp(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2))
    out = [_classify_prop("pap0-membership", F, WeightProfile.make(1, 2, 1), W, "member-evidence",
                          budget=0, frequencies=[])]
    # the weight t^-1 alone leaves a bounded, non-vanishing residual
    b = besicovitch_bounded(F, WeightProfile.make(1, 1, 1), W)
    lim = b.report.estimate.limit
    out.append(PropertyResult("weight-1-bounded-not-vanishing",
                              _status(b.verdict == "bounded" and lim > 0), "bounded",
                              {"verdict": b.verdict, "limit": lim, "trend": b.report.estimate.trend}))
    # non-trivial solutions are unbounded on the whole plane
    Ffull = F.restrict(Domain.full(2))
    Wf = make_window_sweep(Ffull.domain, "cube", {"t0": 2.0, "ratio": 2.0, "count": 6})
    out.append(_bounded_prop("not-bounded-on-plane", Ffull, WeightProfile.make(1, 2, 1), Wf, "unbounded"))
    return out


def _recipe_heat_series(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2))
    z = E.params["zeta"]
    return [_classify_prop("pap0-membership", F, WeightProfile.make(1, z, 1), W, "member-evidence",
                           budget=0, frequencies=[])]


def brick_unit_sum_bound(t):
    """``inf{lam > 0 : sum_{2 <= j <= sqrt(t)} lam**(-(j^4 - 2j^2 + 2)) <= 1}``."""
    js = np.arange(2, int(math.floor(math.sqrt(t))) + 1, dtype=float)
    if len(js) == 0:
        return 0.0
    ex = js ** 4 - 2 * js ** 2 + 2

    def g(lam):
        return float(np.sum(np.exp(-ex * math.log(lam)))) - 1.0

    lo, hi = 1.0, 2.0
    while g(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if g(mid) > 0 else (lo, mid)
    return hi


def _recipe_brick_unit(E, preset):
    F = E.field
    pexp = VariableExponent.function(lambda t: 1.0 + t[:, 0] ** 2, resolution=0.25, order=8,
                                     name="1+x^2")
    prof = WeightProfile(Gauge.identity(), WindowWeight.power(1.0), pexp)
    W = make_window_sweep(F.domain, "cube", _sched(preset, 1))
    out = [_classify_prop("pap0-membership", F, prof, W, "member-evidence", budget=0, frequencies=[])]
    # Luxemburg norm on [0, t] never exceeds the left-endpoint sum bound
    rows = []
    ok = True
    for t in (10.0, 30.0, 100.0):
        w = make_window(F.domain, "cube", t)
        nv = luxemburg_norm(F, pexp, w)
        sb = brick_unit_sum_bound(t)
        rows.append({"t": t, "norm": nv, "sum_bound": sb})
        ok &= nv <= sb * (1 + 1e-6)
    out.append(PropertyResult("luxemburg-below-sum-bound", _status(ok), "norm <= bound", {"rows": rows}))
    return out


def _recipe_brick_power(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", _sched(preset, 1, count=PRESETS[preset]["long"]))
    z, a = E.params["zeta"], E.params["alpha"]
    out = [_bounded_prop("not-bounded-identity-gauge", F, WeightProfile.make(1, 1, 1), W, "unbounded")]
    out.append(_classify_prop("member-power-gauge", F, WeightProfile.make(a, 1, 1), W,
                              "member-evidence", budget=0, frequencies=[]))
    rep = weighted_residual(F, None, WeightProfile.make(1, 1, 1), W).estimate
    out[0].evidence["predicted_slope"] = (z - 0.5) / 2
    out[1].evidence["predicted_slope"] = (a * z - 0.5) / 2
    out[0].evidence["measured_slope"] = rep.slope
    return out


def _recipe_brick_family(E, preset):
    F = E.field
    pj = [float(v) for v in E.params["p"]]
    n = len(pj)
    if n == 1:
        W = make_window_sweep(F.domain, "cube", _sched(preset, 1, count=PRESETS[preset]["long"]))
        p = pj[0]
        q = p + 1
        out = [_classify_prop(f"member-at-p={p:g}", F, WeightProfile.make(1, 1 / p, p), W,
                              "member-evidence", budget=0, frequencies=[])]
        rp = weighted_residual(F, None, WeightProfile.make(1, 1 / p, p), W).estimate
        rq = weighted_residual(F, None, WeightProfile.make(1, 1 / q, q), W).estimate
        ratio = rq.estimate / rp.estimate if rp.estimate > 0 else math.inf
        out.append(PropertyResult(f"non-member-at-q={q:g}", _status(ratio >= 10), "ratio >= 10",
                                  {"residual_p": rp.estimate, "residual_q": rq.estimate,
                                   "trend_q": rq.trend, "ratio": ratio}))
        return out
    r = 1.0 / sum(1.0 / v for v in pj)
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2, t0=16.0))
    return [_classify_prop(f"product-member-at-r={r:g}", F, WeightProfile.make(1, n / r, r), W,
                           "member-evidence", budget=0, frequencies=[])]


def haraux_souplet_oracle(tau, t, terms=40, h=0.01):
    """Dense trapezoid value of ``(1/t) int_{-t}^{t} |f(s + tau) - f(s)| ds``."""
    s = np.arange(-t, t + h / 2, h)
    d = np.zeros_like(s)
    for j in range(1, terms + 1):
        d += (np.sin((s + tau) / 2 ** j) ** 2 - np.sin(s / 2 ** j) ** 2) / j
    return float(integrate.trapezoid(np.abs(d), s) / t)


def _recipe_haraux_souplet(E, preset):
    F = E.field
    prof = WeightProfile.make(1, 1, 1)
    Wl = make_window_sweep(F.domain, "cube", _sched(preset, 1, count=max(PRESETS[preset]["count"], 13)))
    out = [_bounded_prop("besicovitch-unbounded", F, prof, Wl, "unbounded")]
    W = make_window_sweep(F.domain, "cube", _sched(preset, 1))
    ks = (4, 6, 8)
    vals = [doss_residual(F, [2 ** k * math.pi], prof, W).estimate.values[-1] for k in ks]
    oracle = haraux_souplet_oracle(2 ** 8 * math.pi, W.ts[-1], int(E.params["terms"]))
    ok = all(vals[i + 1] < vals[i] for i in range(len(vals) - 1)) and abs(vals[-1] - oracle) < 0.02 * oracle
    out.append(PropertyResult("recurrence-along-2^k-pi", _status(ok), "decreasing in k, matches oracle",
                              {"k": list(ks), "residual_at_largest_window": vals, "oracle_k8": oracle,
                               "t": W.ts[-1]}))
    return out


def _recipe_power_sigma(E, preset):
    F = E.field
    sig, p = E.params["sigma"], E.params["p"]
    W = make_window_sweep(F.domain, "cube", _sched(preset, 1))
    out = [_bounded_prop("not-besicovitch-bounded", F, WeightProfile.make(1, 1 / p, p), W, "unbounded")]
    a = 1 - (1 - sig) * p + 0.25
    R = ShiftSequenceSet.make([np.arange(8.0).reshape(-1, 1), 0.5 * np.arange(8.0).reshape(-1, 1)])
    Wn = make_window_sweep(F.domain, "cube", _sched(preset, 1, count=8))
    rep = normality_check(F, R, WeightProfile.make(1, a / p, p), Wn)
    out.append(PropertyResult("normal-along-shift-sequences", _status(rep.verdict == "normal-evidence"),
                              "normal-evidence", {"verdict": rep.verdict, "a": a,
                                                  "max_entry": float(max(np.max(m) for m in rep.matrices))}))
    return out


def rect_cube_integral(t):
    """``int_{[-t,t]^2} f(x - y) dx dy = int f(v) (2t - |v|)_+ dv`` for the plateau profile."""
    _q = integrate.quad
    kmax = int((2 * t + 2) / 8) + 2
    edges = []
    for k in range(-kmax, kmax + 1):
        c = 8 * k - 1.0
        edges += [c - 1 / 3 - RAMP, c - 1 / 3, c + 1 / 3, c + 1 / 3 + RAMP]
    edges = sorted(e for e in edges if -2 * t < e < 2 * t)
    pts = [-2 * t] + edges + [0.0] + [2 * t]
    pts = sorted(set(pts))
    tot = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        tot += _q(lambda v: float(rect_profile(v)) * (2 * t - abs(v)), a, b, limit=50)[0]
    return tot


def _recipe_rect_2d(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", {"t0": 2.0, "ratio": 2.0, "count": 6})
    out = [_bounded_prop("seminorm-diverging", F, WeightProfile.make(1, 2, 1), W, "unbounded")]
    rows = []
    ok = True
    for k in (1, 2, 3):
        t = 8 * k * math.sqrt(2)
        val = rect_cube_integral(t)
        bound = 16 * k * math.sqrt(2) / 3 * (2 ** (4 * k + 1) - 1)
        rows.append({"k": k, "t": t, "integral": val, "bound": bound})
        ok &= val >= bound
    out.append(PropertyResult("lower-bound-8k-sqrt2", _status(ok), "integral >= bound for k = 1, 2, 3",
                              {"rows": rows}))
    return out


def two_freq_eps0(C, a=TWO_FREQ_A, m=400):
    """Grid minimum of ``|P - C|`` over ``[0, a1] x [0, |a2|]``."""
    P = two_freq_poly()
    x = np.linspace(0, a[0], m)
    y = np.linspace(0, abs(a[1]), m)
    X, Y = np.meshgrid(x, y)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    cv = np.zeros(len(pts)) if C is None else C(pts)[:, 0]
    return float(np.min(np.abs(P(pts)[:, 0] - cv)))


def _recipe_two_freq(E, preset, seed=0):
    P = two_freq_poly()
    a = np.array(TWO_FREQ_A)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-50, 50, size=(1000, 2))
    res_a = float(np.max(np.abs(P(pts + a) - P(pts))))
    res_axes = [float(np.max(np.abs(P(pts + a[j] * np.eye(2)[j]) - P(pts)))) for j in range(2)]
    out = [PropertyResult("a-periodic", _status(res_a < 1e-9), "residual < 1e-9", {"residual": res_a}),
           PropertyResult("not-axis-periodic", _status(min(res_axes) > 0.1), "residual > 0.1",
                          {"residuals": res_axes})]
    out.extend(two_freq_as_check(E.field))
    return out


def two_freq_as_check(F, ts=(2.0, 4.0, 8.0, 16.0, 32.0, 64.0), ks=(1, 8, 64)):
    """AS-mode residuals against the candidates 0 and P and the cell lower bound.

    Residuals are unweighted integrals over ``[-t, t]^2``; the bound is
    ``(2t)^2 eps0 / (floor(a1) floor(|a2|))``.
    """
    a = np.array(TWO_FREQ_A)
    W = make_window_sweep(Domain.full(2), "cube", list(ts))
    prof = WeightProfile.make(1, 0, 1)
    den = math.floor(a[0]) * math.floor(abs(a[1]))
    out = []
    for label, cand in (("zero", Field.constant(0.0, Domain.full(2))), ("P", two_freq_poly())):
        rep = condition_A_residual(F, a, prof, W, ks=ks, candidate=cand, mode="AS")
        eps0 = two_freq_eps0(None if label == "zero" else _periodized(rep))
        bounds = np.array([(2 * t) ** 2 * eps0 / den for t in ts])
        ok = bool(np.all(rep.values >= bounds[None, :] - 1e-12))
        out.append(PropertyResult(f"as-residual-above-bound[{label}]", _status(ok),
                                  "residual >= (2t)^2 eps0 / (floor(a1) floor(|a2|))",
                                  {"eps0": eps0, "bounds": bounds, "min_residual_over_area":
                                   float(np.min(rep.values / np.array([(2 * t) ** 2 for t in ts]))),
                                   "candidate_kind": rep.candidate_kind, "final": rep.values[:, -1]}))
    return out


def _periodized(rep):
    from .dosscond import periodize
    C = rep.candidate
    if isinstance(C, TrigPolynomial):
        C = C.as_field(Domain.full(2))
    return periodize(C, rep.a, "axis")


def _recipe_sign_flip(E, preset):
    F = E.field
    lam0 = E.params["lam0"]
    W = make_window_sweep(F.domain, "cube", _sched(preset, 1))
    prof = WeightProfile.make(1, 1, 1)
    r0 = condition_B_functional(F, [lam0], prof, W)
    e0 = r0.estimates
    r1 = condition_B_functional(F, [lam0 + 1], prof, W)
    e1 = r1.estimates
    return [PropertyResult("value-2-at-lam0", _status(bool(np.all(np.abs(e0 - 2) <= 0.05))), "2 +- 0.05",
                           {"ls": r0.ls, "estimates": e0}),
            PropertyResult("vanishes-off-lam0", _status(bool(e1[-1] < 0.05)), "< 0.05 at l = 64",
                           {"ls": r1.ls, "estimates": e1, "outer_trend": r1.outer.trend})]


def _recipe_product_sep(E, preset):
    F = E.field
    p = E.params["p"]
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2, t0=8.0))
    freqs = [[j, s] for j in range(-4, 5) for s in (1.0, -1.0)]
    r = _classify_prop("member-strip", F, WeightProfile.make(1, 1 / p, p), W, "member-evidence",
                       frequencies=freqs, coef_rule="lstsq")
    r.evidence["normalization"] = "window measure of the strip window"
    return [r]


def _recipe_dalembert(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2))
    r2 = math.sqrt(2)
    lat = [[1, 1], [-1, -1], [1, -1], [-1, 1], [r2, r2], [-r2, -r2], [r2, -r2], [-r2, r2],
           [1, 0], [0, 1], [2, 2]]
    return [_classify_prop("member-plane", F, WeightProfile.make(1, 2, 1), W, "member-evidence",
                           lattice=lat, coef_rule="lstsq")]


def _recipe_transport_xy(E, preset):
    F = E.field
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2))
    out = [_classify_prop("member-half-plane", F, WeightProfile.make(1, 2, 1), W, "member-evidence",
                          budget=0, frequencies=[])]
    # tensor lift: g(x - y) on the plane against g on the line
    g1 = Field.scalar(_g_xy, Domain.full(1), resolution=1.0, order=8)
    G2 = Field.scalar(lambda x, y: _g_xy(x - y), Domain.full(2), resolution=1.0, order=8)
    W1 = make_window_sweep(Domain.full(1), "cube", list(W.ts))
    W2 = make_window_sweep(Domain.full(2), "cube", list(W.ts))
    prof1, prof2 = WeightProfile.make(1, 1, 1), WeightProfile.make(1, 2, 1)
    P1 = TrigPolynomial([[1.0], [-1.0]], [0.5, 0.5])
    P2 = TrigPolynomial([[1.0, -1.0], [-1.0, 1.0]], [0.5, 0.5])
    rows = []
    ok = True
    for k, (c1, c2) in enumerate(((None, None), (P1, P2))):
        v1 = weighted_residual(g1, c1, prof1, W1).values
        v2 = weighted_residual(G2, c2, prof2, W2).values
        # both weights are t^-n; rescale by the window measures (2t)^n to compare means
        m1 = np.array(v1) / 2.0
        m2 = np.array(v2) / 4.0
        ratio = m2 / m1
        rows.append({"k": k, "ratio": ratio})
        ok &= bool(np.all((ratio >= 0.5) & (ratio <= 2.0)))
    out.append(PropertyResult("tensor-lift-within-factor-2", _status(ok), "0.5 <= ratio <= 2",
                              {"rows": rows, "ts": W.ts}))
    return out


def keckic_pde_residual(E, n=200, h=1e-3, seed=0):
    """Max central-difference residual of the second-order equation at random points."""
    A, B, C, D, Ee, F_ = E.field.meta["coefficients"]
    u = lambda x, y: E.field(np.stack([x, y], axis=1))[:, 0].real  # noqa: E731
    rng = np.random.default_rng(seed)
    x = rng.uniform(-20, 20, n)
    y = rng.uniform(0.5, 5, n)
    u0 = u(x, y)
    uxx = (u(x + h, y) - 2 * u0 + u(x - h, y)) / h ** 2
    uyy = (u(x, y + h) - 2 * u0 + u(x, y - h)) / h ** 2
    uxy = (u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h)) / (4 * h * h)
    ux = (u(x + h, y) - u(x - h, y)) / (2 * h)
    uy = (u(x, y + h) - u(x, y - h)) / (2 * h)
    r = A * uxx + 2 * B * uxy + C * uyy + 2 * D * ux + 2 * Ee * uy + F_ * u0
    return float(np.max(np.abs(r)))


def _recipe_keckic(E, preset):
    F = E.field
    res = keckic_pde_residual(E)
    out = [PropertyResult("pde-residual", _status(res < 1e-5), "< 1e-5", {"residual": res})]
    W = make_window_sweep(F.domain, "cube", _sched(preset, 2))
    m1 = F.meta["m1"]
    lat = [[1, m1], [-1, -m1], [1, 0], [0, 1], [0.5, 0.5]]
    out.append(_classify_prop("member-half-plane", F, WeightProfile.make(1, 2, 1), W, "member-evidence",
                              lattice=lat, coef_rule="lstsq"))
    return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Spec:
    build: Callable
    recipe: Callable
    defaults: dict
    schema: dict  # name -> documented range
    expectations: Callable  # params -> list of Expectation
    citation: str
    validate: Optional[Callable] = None
    open_question: bool = False


def _v_transport_exp(p):
    if p["a"] == 0 or p["c"] == 0:
        raise ValueError("a and c must be nonzero")
    if p["c"] / p["a"] <= 0:
        raise ValueError("need c / a > 0 for decay on the half-plane")


def _v_positive(*names, lower=0.0, strict=True):
    def v(p):
        for k in names:
            if (p[k] <= lower) if strict else (p[k] < lower):
                raise ValueError(f"parameter {k} must be {'>' if strict else '>='} {lower}")
    return v


def _v_brick_power(p):
    if not p["zeta"] > 0.5:
        raise ValueError("need zeta > 1/2")
    if not 0 < p["alpha"] * p["zeta"] < 0.5:
        raise ValueError("need 0 < alpha * zeta < 1/2")


def _v_brick_family(p):
    if len(p["p"]) < 1 or any(not 1 <= v < math.inf for v in p["p"]):
        raise ValueError("need 1 <= p_j < inf")


def _v_power_sigma(p):
    if not 0 < p["sigma"] < 1:
        raise ValueError("need 0 < sigma < 1")
    if not p["p"] >= 1:
        raise ValueError("need p >= 1")


def _v_terms(p):
    if int(p["terms"]) < 1:
        raise ValueError("need at least one term")


def _v_heat(p):
    _v_terms(p)
    if not p["zeta"] > 0:
        raise ValueError("need zeta > 0")


def _v_keckic(p):
    keckic_constants(*(float(p[k]) for k in ("A", "B", "C", "D", "E", "F")))


_REGISTRY = {
    "transport-exp": _Spec(
        _transport_exp, _recipe_transport_exp, {"a": 1.0, "c": 1.0},
        {"a": "nonzero", "c": "nonzero, c/a > 0"},
        lambda p: [Expectation("pap0-membership", _profile_dict(1, 2, 1), "member-evidence",
                               "first-order transport solution g(y) exp(-(c/a) x) on a half-plane"),
                   Expectation("weight-1-bounded-not-vanishing", _profile_dict(1, 1, 1), "bounded",
                               "same field, weight t^-1"),
                   Expectation("not-bounded-on-plane", _profile_dict(1, 2, 1), "unbounded",
                               "same formula on the whole plane")],
        "first-order transport equation with exponential damping", _v_transport_exp),
    "heat-series": _Spec(
        _heat_series, _recipe_heat_series, {"terms": 20, "zeta": 0.5},
        {"terms": "integer >= 1", "zeta": "> 0"},
        lambda p: [Expectation("pap0-membership", _profile_dict(1, p["zeta"], 1), "member-evidence",
                               "separated heat-equation series on [0, 2pi] x [0, inf)")],
        "Dirichlet heat equation solved by separation of variables", _v_heat),
    "brick-unit": _Spec(
        _brick_unit, _recipe_brick_unit, {}, {},
        lambda p: [Expectation("pap0-membership", {"phi": "id", "weight": "t^-1", "p": "1+x^2"},
                               "member-evidence", "unit bricks [j^2 - 1, j^2] with exponent 1 + x^2"),
                   Expectation("luxemburg-below-sum-bound", {"p": "1+x^2"}, "norm <= bound",
                               "left-endpoint bound on the modular")],
        "indicator of unit bricks at perfect squares"),
    "brick-power": _Spec(
        _brick_power, _recipe_brick_power, {"zeta": 1.0, "alpha": 0.25},
        {"zeta": "> 1/2", "alpha": "0 < alpha*zeta < 1/2"},
        lambda p: [Expectation("not-bounded-identity-gauge", _profile_dict(1, 1, 1), "unbounded",
                               "power-height bricks m^zeta on [m^2, m^2 + sqrt(m))"),
                   Expectation("member-power-gauge", _profile_dict(p["alpha"], 1, 1), "member-evidence",
                               "same field under the gauge x^alpha")],
        "power-height bricks", _v_brick_power),
    "brick-family": _Spec(
        _brick_family, _recipe_brick_family, {"p": [2.0]},
        {"p": "list of exponents 1 <= p_j < inf; length = dimension"},
        lambda p: ([Expectation(f"member-at-p={p['p'][0]:g}", _profile_dict(1, 1 / p["p"][0], p["p"][0]),
                                "member-evidence", "bricks of height m^(1/(2p))"),
                    Expectation(f"non-member-at-q={p['p'][0] + 1:g}", {"p": p["p"][0] + 1},
                                "ratio >= 10", "same field at a larger exponent")]
                   if len(p["p"]) == 1 else
                   [Expectation("product-member", {"p": "r with 1/r = sum 1/p_j"}, "member-evidence",
                                "tensor product of brick factors")]),
        "brick family with exponent-matched heights", _v_brick_family),
    "haraux-souplet": _Spec(
        _haraux_souplet, _recipe_haraux_souplet, {"terms": 40}, {"terms": "integer >= 1"},
        lambda p: [Expectation("besicovitch-unbounded", _profile_dict(1, 1, 1), "unbounded",
                               "uniformly recurrent series sum sin^2(t/2^n)/n"),
                   Expectation("recurrence-along-2^k-pi", _profile_dict(1, 1, 1),
                               "decreasing in k, matches oracle", "shifts 2^k pi")],
        "uniformly recurrent but Besicovitch-unbounded series", _v_terms),
    "power-sigma": _Spec(
        _power_sigma, _recipe_power_sigma, {"sigma": 0.5, "p": 1.0},
        {"sigma": "0 < sigma < 1", "p": ">= 1"},
        lambda p: [Expectation("not-besicovitch-bounded", _profile_dict(1, 1 / p["p"], p["p"]), "unbounded",
                               "|x|^sigma"),
                   Expectation("normal-along-shift-sequences",
                               {"weight": "t^-a/p", "a": "1-(1-sigma)p + 1/4"}, "normal-evidence",
                               "shift differences of |x|^sigma")],
        "power growth |x|^sigma", _v_power_sigma),
    "rect-2d": _Spec(
        _rect_2d, _recipe_rect_2d, {}, {},
        lambda p: [Expectation("seminorm-diverging", _profile_dict(1, 2, 1), "unbounded",
                               "(1,1)-periodic plateaus of height 2^|k| along x - y"),
                   Expectation("lower-bound-8k-sqrt2", {}, "integral >= bound for k = 1, 2, 3",
                               "stated lower bound on window integrals")],
        "doubly periodic plateau field with exponential levels"),
    "two-freq-2d": _Spec(
        _two_freq_2d, _recipe_two_freq, {}, {},
        lambda p: [Expectation("a-periodic", {}, "residual < 1e-9", "two-frequency exponential sum"),
                   Expectation("not-axis-periodic", {}, "residual > 0.1", "per-axis shifts"),
                   Expectation("as-residual-above-bound[zero]", {"weight": "1"}, "residual >= bound",
                               "per-axis averaging against 0"),
                   Expectation("as-residual-above-bound[P]", {"weight": "1"}, "residual >= bound",
                               "per-axis averaging against the polynomial")],
        "two-frequency polynomial periodic along a but not along the axes"),
    "sign-flip": _Spec(
        _sign_flip, _recipe_sign_flip, {"lam0": 1.5}, {"lam0": "real"},
        lambda p: [Expectation("value-2-at-lam0", _profile_dict(1, 1, 1), "2 +- 0.05",
                               "sliding-window functional at the resonant frequency"),
                   Expectation("vanishes-off-lam0", _profile_dict(1, 1, 1), "< 0.05 at l = 64",
                               "sliding-window functional off resonance")],
        "sign-flipped exponential"),
    "product-sep": _Spec(
        _product_sep, _recipe_product_sep, {"p": 1.0}, {"p": ">= 1"},
        lambda p: [Expectation("member-strip", _profile_dict(1, 1 / p["p"], p["p"]), "member-evidence",
                               "f(x) g(y) on a half-strip")],
        "separable product on a half-strip", _v_positive("p", lower=1.0, strict=False), True),
    "dalembert": _Spec(
        _dalembert, _recipe_dalembert, {}, {},
        lambda p: [Expectation("member-plane", _profile_dict(1, 2, 1), "member-evidence",
                               "d'Alembert composite of f = cos + 1/(1+v^2) and g1 = sin(sqrt2 v)")],
        "wave equation solution"),
    "transport-xy": _Spec(
        _transport_xy, _recipe_transport_xy, {}, {},
        lambda p: [Expectation("member-half-plane", _profile_dict(1, 2, 1), "member-evidence",
                               "g(y - x) e^x on the left half-plane"),
                   Expectation("tensor-lift-within-factor-2", {}, "0.5 <= ratio <= 2",
                               "g(x - y) in the plane against g on the line")],
        "transport equation u_x + u_y = u"),
    "keckic": _Spec(
        _keckic, _recipe_keckic, {"A": -3.0, "B": 1.0, "C": 1.0, "D": -0.5, "E": 0.5, "F": 0.0},
        {k: "real; B > 0, C > 0, B^2 >= AC, E^2 >= CF, B^2 > E^2 - CF, (BE-CD)^2 = (B^2-AC)(E^2-CF)"
         for k in "ABCDEF"},
        lambda p: [Expectation("pde-residual", {}, "< 1e-5", "second-order constant-coefficient equation"),
                   Expectation("member-half-plane", _profile_dict(1, 2, 1), "member-evidence",
                               "two-term exponential composite")],
        "second-order equation with a two-term exponential general solution", _v_keckic),
}

GALLERY_IDS = tuple(_REGISTRY)


def gallery_get(id: str, params: Optional[dict] = None) -> GalleryEntry:
    """Build the gallery entry ``id`` with ``params`` overriding the defaults."""
    if id not in _REGISTRY:
        raise KeyError(f"unknown gallery id {id!r}")
    spec = _REGISTRY[id]
    p = dict(spec.defaults)
    for k, v in (params or {}).items():
        if k not in p:
            raise ValueError(f"unknown parameter {k!r} for {id}")
        p[k] = v
    if spec.validate is not None:
        spec.validate(p)
    F, ref, box = spec.build(p)
    return GalleryEntry(id, p, F, tuple(spec.expectations(p)), spec.recipe, ref, box,
                        spec.open_question)


def duplicate_check(entry: GalleryEntry, n: int = 1000, seed: int = 0) -> float:
    """Max deviation between the field and its scalar re-implementation at random points."""
    rng = np.random.default_rng(seed)
    lo, hi = (np.asarray(v, dtype=float) for v in entry.sample_box)
    pts = rng.uniform(lo, hi, size=(n, len(lo)))
    fv = entry.field(pts)[:, 0]
    rv = np.array([complex(entry.reference(tuple(p))) for p in pts])
    scale = np.maximum(1.0, np.abs(rv))
    return float(np.max(np.abs(fv - rv) / scale))


def gallery_verify(id: str, preset: str = "standard", params: Optional[dict] = None) -> VerificationReport:
    """Run the duplicate-evaluator check and every expected-property recipe of ``id``."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    t0 = time.perf_counter()
    E = gallery_get(id, params)
    dev = duplicate_check(E)
    results = [PropertyResult("duplicate-evaluator", _status(dev < 1e-9), "< 1e-9", {"max_deviation": dev})]
    results.extend(E.recipe(E, preset))
    return VerificationReport(id, preset, results, time.perf_counter() - t0)


def gallery_manifest() -> dict:
    """``id -> {params schema, defaults, expectations, description}``."""
    out = {}
    for k, s in _REGISTRY.items():
        out[k] = {"params": {n: {"default": _jsonable(s.defaults[n]), "range": s.schema.get(n, "")}
                             for n in s.defaults},
                  "expectations": [e.to_dict() for e in s.expectations(dict(s.defaults))],
                  "description": s.citation,
                  "open_question": s.open_question}
    return out


__all__ = ["GALLERY_IDS", "PRESETS", "Expectation", "GalleryEntry", "PropertyResult",
           "VerificationReport", "gallery_get", "gallery_verify", "gallery_manifest",
           "duplicate_check", "keckic_constants", "brick_field", "rect_profile", "two_freq_poly",
           "haraux_souplet_oracle", "rect_cube_integral", "brick_unit_sum_bound",
           "two_freq_as_check", "keckic_pde_residual"]
