"""Weighted Besicovitch seminorms, class residuals and the pseudometric.

The central quantity is the per-window residual

    Fw(t) * sup_{x in B} [ phi(||F(.; x) - G(.; x)||) ]_{L^{p(.)}(Lambda_t)}

whose tail behaviour over a window schedule is summarised by a
:class:`~besicovitch.core.LimsupEstimate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (Field, LimsupEstimate, QuadSpec, WindowFamily, limsup_estimate,
                   make_window, vector_norm)
from .luxemburg import VariableExponent, as_exponent, norm_discrete


# ---------------------------------------------------------------------------
# gauges and window weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Gauge:
    """Gauge ``phi : [0, inf) -> [0, inf)`` applied to pointwise norms.

    Built-ins are the identity and ``x**alpha``.  A custom gauge may carry a
    companion ``varphi`` with ``phi(xy) <= phi(x) varphi(y)``.
    """

    kind: str = "identity"
    alpha: float = 1.0
    fn: Optional[Callable] = None
    companion: Optional[Callable] = None

    @classmethod
    def identity(cls):
        return cls("identity", 1.0)

    @classmethod
    def power(cls, alpha):
        if not alpha > 0:
            raise ValueError("gauge exponent must be positive")
        if alpha == 1:
            return cls.identity()
        return cls("power", float(alpha))

    @classmethod
    def custom(cls, fn, companion=None):
        return cls("custom", 1.0, fn, companion)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "identity":
            return s
        if self.kind == "power":
            return s ** self.alpha
        return np.asarray(self.fn(s), dtype=float)

    def companion_fn(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind in ("identity", "power"):
            return y ** self.alpha
        if self.companion is None:
            raise ValueError("custom gauge has no companion function")
        return np.asarray(self.companion(y), dtype=float)

    @property
    def c(self) -> float:
        """Smallest ``c`` with ``phi(x+y) <= c (phi(x) + phi(y))``."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "power":
            return max(1.0, 2.0 ** (self.alpha - 1.0))
        g = np.geomspace(1e-6, 1e6, 121)
        X, Y = np.meshgrid(g, g)
        den = self(X) + self(Y)
        return float(np.max(self(X + Y) / np.where(den > 0, den, np.inf)))

    @property
    def D(self) -> float:
        """``sup_m m * varphi(1/m)`` over the positive integers."""
        if self.kind in ("identity", "power"):
            return 1.0 if self.alpha >= 1 else math.inf
        m = np.geomspace(1, 1e8, 200).round()
        v = m * self.companion_fn(1.0 / m)
        if v[-1] > 1.01 * v[len(v) // 2]:
            return math.inf
        return float(v.max())

    def to_dict(self):
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        return {"kind": self.kind}


@dataclass(frozen=True, eq=False)
class WindowWeight:
    """Window weight ``Fw : (0, inf) -> (0, inf)``.

    ``power`` is ``t**(-beta)``; ``root`` is ``t**(-n/p)`` (a power with
    ``beta = n / p``, kept separately for reporting); ``custom`` wraps a callable.
    """

    kind: str = "power"
    beta: float = 1.0
    fn: Optional[Callable] = None

    @classmethod
    def power(cls, beta):
        return cls("power", float(beta))

    @classmethod
    def root(cls, n, p):
        return cls("root", float(n) / float(p))

    @classmethod
    def custom(cls, fn):
        return cls("custom", math.nan, fn)

    def __call__(self, t):
        if self.kind == "custom":
            return float(self.fn(t))
        return float(t) ** (-self.beta)

    def to_dict(self):
        if self.kind == "custom":
            return {"kind": "custom"}
        return {"kind": self.kind, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class WeightProfile:
    """The triple ``(phi, Fw, p(.))`` parametrising the generalised class."""

    gauge: Gauge = field(default_factory=Gauge.identity)
    weight: WindowWeight = field(default_factory=lambda: WindowWeight.power(1.0))
    p: VariableExponent = field(default_factory=lambda: VariableExponent.constant(1.0))

    @classmethod
    def make(cls, alpha=1.0, beta=1.0, p=1.0):
        """Profile ``(x**alpha, t**(-beta), p)``."""
        return cls(Gauge.power(alpha), WindowWeight.power(beta), as_exponent(p))

    def conditions(self, domain, shape="cube"):
        """Flags for the three standing hypotheses on ``(phi, Fw, p)``.

        Returns a dict with keys ``I``, ``II``, ``III`` (``None`` when not
        decidable, e.g. (III) for a variable exponent), ``c`` and ``D``.
        """
        g = self.gauge
        grid = np.linspace(0.0, 10.0, 2001)
        vals = g(grid)
        monotone = bool(np.all(np.diff(vals) >= -1e-12))
        cont0 = bool(abs(float(g(np.array([1e-12]))[0])) < 1e-3 and float(g(np.array([0.0]))[0]) == 0.0)
        p_const = self.p.is_constant and math.isfinite(self.p.value)
        c, D = g.c, g.D
        cond = {
            "I": monotone and cont0 and p_const,
            "II": bool(c <= 1.0 + 1e-12 and math.isfinite(D)),
            "III": None,
            "c": c,
            "D": D,
        }
        if p_const:
            ts = np.geomspace(1e2, 1e8, 13)
            m = np.array([make_window(domain, shape, t).measure for t in ts])
            h = np.array([self.weight(t) for t in ts]) * m ** (1.0 / self.p.value)
            growth = np.log(h[-1] / h[-4]) / np.log(ts[-1] / ts[-4])
            # limsup Fw(t)/Fw(t+a): probe far out, where power weights give 1 + O(a/t)
            t_big = 1e12
            ratios = [self.weight(t_big) / self.weight(t_big + a) for a in (0.5, 1.0, 10.0, 100.0)]
            cond["III"] = bool(growth <= 1e-6 and max(ratios) <= 1.0 + 1e-6)
        return cond

    def to_dict(self):
        return {"phi": self.gauge.to_dict(), "weight": self.weight.to_dict(),
                "p": self.p.to_dict()}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeminormReport:
    estimate: LimsupEstimate
    profile: Optional[WeightProfile]
    shape: str
    measures: tuple = ()

    @property
    def values(self):
        return self.estimate.values

    @property
    def ts(self):
        return self.estimate.ts

    def to_dict(self):
        return {"estimate": self.estimate.to_dict(),
                "profile": None if self.profile is None else self.profile.to_dict(),
                "shape": self.shape, "measures": list(self.measures)}


def _as_candidate(G, F: Field):
    if G is None:
        return None
    if isinstance(G, Field):
        return G
    if hasattr(G, "as_field"):
        return G.as_field(F.domain, dim=F.dim)
    raise TypeError("candidate must be a Field, a TrigPolynomial or None")


def residual_matrix(F: Field, candidates: Sequence, profile: WeightProfile,
                    windows: WindowFamily):
    """Per-window residuals of ``F`` against each candidate.

    All candidates share one quadrature rule per window and one evaluation of
    ``F``.  Returns an array of shape ``(len(candidates), len(windows))``.
    """
    cands = [_as_candidate(G, F) for G in candidates]
    spec = F.quad.merge(profile.p.quad)
    for G in cands:
        if G is not None:
            spec = spec.merge(G.quad)
    out = np.zeros((len(cands), len(windows)))
    for j, w in enumerate(windows):
        pts, wt = w.rule(spec)
        pv = profile.p(pts)
        fw = profile.weight(w.t)
        for x in F.samples:
            fv = F(pts, x)
            if not np.all(np.isfinite(fv)):
                raise FloatingPointError(f"non-finite field values on window t={w.t}")
            for i, G in enumerate(cands):
                diff = fv if G is None else fv - G(pts, x)
                s = profile.gauge(vector_norm(diff, F.norm))
                val = fw * norm_discrete(s, wt, pv)
                if val > out[i, j]:
                    out[i, j] = val
    return out


def weighted_residual(F: Field, G, profile: WeightProfile, windows: WindowFamily,
                      atol: float = 0.0, tail: int = 4) -> SeminormReport:
    """Class residual of ``F`` against ``G`` over the window schedule.

    ``G`` may be ``None`` (the zero function), a :class:`Field` or a
    :class:`~besicovitch.trigpoly.TrigPolynomial`.
    """
    vals = residual_matrix(F, [G], profile, windows)[0]
    est = limsup_estimate(windows.ts, vals, tail=tail, atol=atol)
    return SeminormReport(est, profile, windows.shape, tuple(w.measure for w in windows))


def m_p_seminorm(F: Field, p: float, windows: WindowFamily,
                 normalization: str = "measure") -> SeminormReport:
    """``((1/|Lambda_t|) int_{Lambda_t} ||F||**p)**(1/p)`` over the schedule.

    ``normalization='volume'`` divides by ``(2t)**n`` instead of the window
    measure; the two agree on the full space with cube windows.
    """
    p = float(p)
    if not (1 <= p < math.inf):
        raise ValueError("m_p_seminorm needs a finite constant exponent p >= 1")
    vals = []
    meas = []
    for w in windows:
        pts, wt = w.rule(F.quad)
        den = w.measure if normalization == "measure" else (2.0 * w.t) ** F.n
        best = 0.0
        for x in F.samples:
            s = F.pnorm(pts, x)
            if not np.all(np.isfinite(s)):
                raise FloatingPointError(f"singular field on window t={w.t}")
            best = max(best, (np.dot(wt, s ** p) / den) ** (1.0 / p))
        vals.append(best)
        meas.append(w.measure)
    est = limsup_estimate(windows.ts, vals)
    return SeminormReport(est, None, windows.shape, tuple(meas))


@dataclass(frozen=True)
class BoundednessVerdict:
    verdict: str  # bounded | unbounded | inconclusive
    M_B: Optional[float]
    report: SeminormReport

    def to_dict(self):
        return {"verdict": self.verdict, "M_B": self.M_B, "report": self.report.to_dict()}


def besicovitch_bounded(F: Field, profile: WeightProfile, windows: WindowFamily) -> BoundednessVerdict:
    """Three-valued boundedness verdict from the residual against zero."""
    rep = weighted_residual(F, None, profile, windows)
    tr = rep.estimate.trend
    if tr in ("bounded", "converging-to-zero"):
        return BoundednessVerdict("bounded", rep.estimate.estimate, rep)
    if tr == "diverging":
        return BoundednessVerdict("unbounded", None, rep)
    return BoundednessVerdict("inconclusive", None, rep)


def pseudometric_d(F: Field, G, profile: WeightProfile, windows: WindowFamily,
                   check_bounded: bool = True) -> float:
    """``d_B(F, G)``: the tail estimate of the residual of ``F`` against ``G``."""
    if check_bounded:
        Gf = _as_candidate(G, F)
        for H in (F, Gf):
            if besicovitch_bounded(H, profile, windows).verdict != "bounded":
                raise ValueError("outside pseudometric space")
    return weighted_residual(F, G, profile, windows).estimate.estimate
