"""Shift averages, periodic components and the two averaging conditions.

Condition (A) compares the Cesaro means ``(1/k) sum_{j<k} F(. + j a)`` with an
``a``-periodic candidate; condition (B) measures how the sliding box integrals
``int_{y + l Omega} exp(i lambda s) F(s) ds`` differ from the one at ``y = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (Domain, Field, LimsupEstimate, QuadSpec, WindowFamily, as_points,
                   limsup_estimate, loglog_slope, vector_norm)
from .luxemburg import norm_discrete
from .quadrature import panel_edges, rule_from_edges, gauss_legendre
from .seminorm import WeightProfile, residual_matrix
from .trigpoly import TrigPolynomial, periodic_component

K_SCHEDULE = tuple(2 ** j for j in range(9))
L_SCHEDULE = tuple(float(2 ** j) for j in range(7))


def _poly_of(F: Field) -> Optional[TrigPolynomial]:
    P = F.meta.get("poly") if isinstance(F, Field) else None
    return P if isinstance(P, TrigPolynomial) else None


# ---------------------------------------------------------------------------
# shift averages and truncation
# ---------------------------------------------------------------------------

def shift_average(F: Field, a, k: int) -> Field:
    """The Cesaro mean ``(1/k) sum_{j<k} F(. + j a)``.

    Polynomial fields are averaged exactly in coefficient space.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if a.shape != (F.n,) or np.all(a == 0):
        raise ValueError("a must be a nonzero vector of the field dimension")
    if not F.domain.in_shift_cone(a):
        raise ValueError("a is outside the shift cone of the domain")
    P = _poly_of(F)
    if P is not None:
        return P.shift_average(a, k).as_field(F.domain, dim=F.dim)
    shifts = [F.shift(j * a) for j in range(k)]
    fns = [s.fn for s in shifts]
    d = F.dim
    q = shifts[0].quad
    for s in shifts[1:]:
        q = q.merge(s.quad)

    def fn(t, x):
        acc = np.zeros((t.shape[0], d), dtype=complex)
        for f in fns:
            v = np.asarray(f(t, x), dtype=complex)
            acc += v.reshape(t.shape[0], -1)
        return acc / k

    return F.replace(fn=fn, quad=q, name=f"A_{k}{F.name}", meta={})


def truncate_field(F: Field, N: float) -> Field:
    """Clamp the modulus at ``N`` keeping the argument (vectors keep their direction)."""
    if not N > 0:
        raise ValueError("N must be positive")
    f, d, kind = F.fn, F.dim, F.norm

    def fn(t, x):
        v = np.asarray(f(t, x), dtype=complex).reshape(t.shape[0], -1)
        v = np.broadcast_to(v, (t.shape[0], d))
        r = vector_norm(v, kind)
        fac = np.where(r > N, N / np.where(r > 0, r, 1.0), 1.0)
        return v * fac[:, None]

    return F.replace(fn=fn, name=f"T_{N}{F.name}", meta={})


def periodize(C: Field, a, mode="vector", origin=None) -> Field:
    """Periodic extension of ``C`` from a fundamental cell.

    ``mode='axis'`` folds every coordinate into ``[o_j, o_j + |a_j|)``.
    ``mode='vector'`` folds the component along ``a`` into ``[0, 1) a``
    (relative to ``origin``) and leaves the transverse part unchanged.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    o = np.zeros_like(a) if origin is None else np.atleast_1d(np.asarray(origin, float))
    f = C.fn
    if mode in ("axis", "AS"):
        if np.any(a == 0):
            raise ValueError("per-axis periodisation needs nonzero a_j")
        per = np.abs(a)

        def fold(t):
            return o + np.mod(t - o, per)
    else:
        aa = float(a @ a)

        def fold(t):
            s = (t - o) @ a / aa
            return t - np.floor(s)[:, None] * a[None, :]

    return C.replace(fn=lambda t, x: f(fold(t), x), meta={}, name=f"per({C.name})",
                     quad=QuadSpec(C.quad.resolution, C.quad.order))


def _is_periodic(C: Field, a, mode, rng, n_pts=1000, tol=1e-9, box=50.0):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    t = rng.uniform(-box, box, size=(n_pts, C.n))
    t = t[C.domain.contains(t)] if C.domain.kind != "full" else t
    shifts = [a] if mode in ("vector", "A", "Ainf") else [a[j] * np.eye(C.n)[j] for j in range(C.n)]
    for x in C.samples:
        base = C(t, x)
        scale = max(1.0, float(np.max(np.abs(base)))) if base.size else 1.0
        for s in shifts:
            ok = C.domain.contains(t + s) if C.domain.kind != "full" else np.ones(len(t), bool)
            if np.any(np.abs(C(t[ok] + s, x) - base[ok]) > tol * scale):
                return False
    return True


# ---------------------------------------------------------------------------
# condition (A)
# ---------------------------------------------------------------------------

@dataclass
class AveragingResult:
    """Condition-(A) residuals per Cesaro length ``k``."""

    a: tuple
    mode: str
    ks: tuple
    residuals: list  # LimsupEstimate per k
    values: np.ndarray  # (len(ks), len(ts))
    ts: tuple
    candidate: object
    candidate_kind: str
    k_slope: float

    @property
    def estimates(self):
        return np.array([r.estimate for r in self.residuals])

    def to_dict(self):
        cand = self.candidate.to_list() if isinstance(self.candidate, TrigPolynomial) else self.candidate_kind
        return {"a": list(self.a), "mode": self.mode, "ks": list(self.ks), "ts": list(self.ts),
                "residuals": [r.to_dict() for r in self.residuals],
                "candidate": cand, "candidate_kind": self.candidate_kind,
                "k_slope": None if not math.isfinite(self.k_slope) else self.k_slope}

    def csv_rows(self):
        for i, k in enumerate(self.ks):
            for j, t in enumerate(self.ts):
                yield k, t, float(self.values[i, j])


def condition_A_residual(F: Field, a, profile: WeightProfile, windows: WindowFamily,
                         ks: Sequence[int] = K_SCHEDULE, candidate=None, mode: str = "A",
                         cell_origin=None, seed: int = 0) -> AveragingResult:
    """Residual of the Cesaro means of ``F`` against an ``a``-periodic candidate.

    Parameters
    ----------
    mode : {'A', 'Ainf', 'AS'}
        ``A``/``Ainf`` use vector periodicity along ``a``; ``AS`` requires
        periodicity along every ``a_j e_j``.
    candidate : Field, TrigPolynomial or None
        ``None`` selects the periodic component of a polynomial field, or for
        general fields the Cesaro mean at the largest ``k`` periodised over
        the fundamental cell.  In ``AS`` mode a supplied candidate that is not
        per-axis periodic is periodised over ``prod_j [0, |a_j|)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if mode not in ("A", "Ainf", "AS"):
        raise ValueError(f"unknown mode {mode!r}")
    pmode = "axis" if mode == "AS" else "vector"
    rng = np.random.default_rng(seed)
    P = _poly_of(F)
    if candidate is None:
        if P is not None:
            cpoly = periodic_component(P, a, pmode)
            C, kind = cpoly.as_field(F.domain, dim=F.dim), "periodic-component"
            candidate = cpoly
        else:
            C = periodize(shift_average(F, a, max(ks)), a, pmode, cell_origin)
            kind = "periodized-average"
    else:
        kind = "user"
        C = candidate.as_field(F.domain, dim=F.dim) if isinstance(candidate, TrigPolynomial) else candidate
    if not _is_periodic(C, a, pmode, rng):
        if mode == "AS":
            C = periodize(C, a, "axis", cell_origin)
            kind += "+periodized"
        if not _is_periodic(C, a, pmode, rng):
            raise ValueError("candidate is not periodic for the requested mode")
    avgs = [shift_average(F, a, k) for k in ks]
    vals = np.vstack([residual_matrix(S, [C], profile, windows)[0] for S in avgs])
    scale = max(1e-300, float(np.max(vals)))
    ests = [limsup_estimate(windows.ts, v, atol=1e-12 * scale) for v in vals]
    e = np.array([r.estimate for r in ests])
    pos = e > 1e-12 * scale
    slope = loglog_slope(np.asarray(ks, float)[pos], e[pos]) if pos.sum() >= 2 else -math.inf
    return AveragingResult(tuple(a.tolist()), mode, tuple(int(k) for k in ks), ests, vals,
                           tuple(windows.ts), candidate, kind, slope)


# ---------------------------------------------------------------------------
# condition (B)
# ---------------------------------------------------------------------------

@dataclass
class ConditionBReport:
    lam: tuple
    ls: tuple
    ts: tuple
    values: np.ndarray  # (len(ls), len(ts)), F1(l) * Fw(t) * norm
    per_l: list  # LimsupEstimate per l
    outer: LimsupEstimate

    @property
    def estimates(self):
        return np.array([r.estimate for r in self.per_l])

    def to_dict(self):
        return {"lam": list(self.lam), "ls": list(self.ls), "ts": list(self.ts),
                "per_l": [r.to_dict() for r in self.per_l], "outer": self.outer.to_dict()}

    def csv_rows(self):
        for i, l in enumerate(self.ls):
            for j, t in enumerate(self.ts):
                yield l, t, float(self.values[i, j])


class _Antiderivative:
    """``A(s) = int_0^s g(u) du`` for a 1-D integrand on a fixed range."""

    def __init__(self, g: Field, lo, hi, x):
        spec = g.quad
        self.g, self.x = g, x
        self.order = spec.order
        self.edges = panel_edges(min(lo, 0.0), max(hi, 0.0), spec.resolution,
                                 spec.breaks_on(0, min(lo, 0.0), max(hi, 0.0)), spec.singular_on(0))
        nodes, w = rule_from_edges(self.edges, spec.order)
        v = g(nodes.reshape(-1, 1), x) * w[:, None]
        per_panel = v.reshape(len(self.edges) - 1, spec.order, -1).sum(axis=1)
        self.cum = np.vstack([np.zeros((1, per_panel.shape[1])), np.cumsum(per_panel, axis=0)])
        self.zero = self._raw(np.array([0.0]))[0]

    def _raw(self, s):
        e = self.edges
        i = np.clip(np.searchsorted(e, s, side="right") - 1, 0, len(e) - 2)
        xg, wg = gauss_legendre(self.order)
        a = e[i]
        half = 0.5 * (s - a)
        nodes = (a + half)[:, None] + half[:, None] * xg[None, :]
        vals = self.g(nodes.reshape(-1, 1), self.x).reshape(len(s), self.order, -1)
        part = np.einsum("nkd,k->nd", vals, wg) * half[:, None]
        return self.cum[i] + part

    def __call__(self, s):
        s = np.asarray(s, dtype=float).ravel()
        return self._raw(s) - self.zero


def _cond_b_1d(Fm: Field, l, window, pv_fn, x, spec):
    lo, hi = window.lo[0], window.hi[0]
    A = _Antiderivative(Fm, lo, hi + l, x)
    y, wy = window.rule(spec)
    ys = y[:, 0]
    diff = A(ys + l) - A(ys) - (A(np.array([l])) - A(np.array([0.0])))
    return norm_discrete(vector_norm(diff, Fm.norm), wy, pv_fn(y))


def _cond_b_grid(Fm: Field, l, window, p_obj, x, h0):
    """Summed-area evaluation of the box integrals on a uniform grid (cube windows)."""
    n = Fm.n
    m = max(1, int(math.ceil(l / h0)))
    h = l / m
    axes = []
    for j in range(n):
        lo, hi = window.lo[j], window.hi[j]
        i0 = int(math.floor(min(lo, 0.0) / h))
        i1 = int(math.ceil((max(hi, 0.0) + l) / h))
        axes.append(h * np.arange(i0, i1 + 1))
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    vals = Fm(pts, x).reshape(*[len(ax) for ax in axes], -1)
    # cumulative trapezoid along every axis: A[i] = int_{axis[0]}^{axis[i]}
    S = vals
    for j in range(n):
        mid = 0.5 * (np.take(S, range(1, S.shape[j]), axis=j) + np.take(S, range(0, S.shape[j] - 1), axis=j)) * h
        z = np.zeros_like(np.take(S, [0], axis=j))
        S = np.concatenate([z, np.cumsum(mid, axis=j)], axis=j)
    idx0 = [int(round(-ax[0] / h)) for ax in axes]
    ylo = [int(round((window.lo[j] - axes[j][0]) / h)) for j in range(n)]
    yhi = [int(round((window.hi[j] - axes[j][0]) / h)) for j in range(n)]

    def box(starts):
        # integral over prod [start_j, start_j + m] in index units
        tot = 0.0
        for corner in range(2 ** n):
            sl, sign = [], 1.0
            for j in range(n):
                up = (corner >> j) & 1
                st = starts[j]
                if isinstance(st, slice):
                    sl.append(slice(st.start + m * up, st.stop + m * up))
                else:
                    sl.append(st + m * up)
                if not up:
                    sign = -sign
            tot = tot + sign * S[tuple(sl)]
        return tot

    ysl = [slice(ylo[j], yhi[j] + 1) for j in range(n)]
    Iy = box(ysl)
    I0 = box(idx0)
    diff = (Iy - I0).reshape(-1, vals.shape[-1])
    # trapezoid weights in y
    wy = np.ones(1)
    for j in range(n):
        k = yhi[j] - ylo[j] + 1
        w1 = np.full(k, h)
        w1[0] = w1[-1] = h / 2
        wy = np.multiply.outer(wy, w1).ravel()
    yg = np.meshgrid(*[axes[j][ylo[j]:yhi[j] + 1] for j in range(n)], indexing="ij")
    ypts = np.stack([g.ravel() for g in yg], axis=-1)
    return norm_discrete(vector_norm(diff, Fm.norm), wy, p_obj(ypts))


def condition_B_functional(F: Field, lam, profile: WeightProfile, windows: WindowFamily,
                           ls: Sequence[float] = L_SCHEDULE,
                           F1: Optional[Callable] = None, grid_step: float = 0.25) -> ConditionBReport:
    """``F1(l) Fw(t) || int_{y + l Omega} - int_{l Omega} exp(i<lam,s>) F(s) ds ||`` over ``t`` and ``l``.

    The norm is the Luxemburg norm in ``y`` over ``Lambda_t`` with the
    profile's exponent; the profile's gauge is not used.  ``Omega = [0, 1]^n``
    and ``F1`` defaults to ``l**(-n)``.  One-dimensional fields use exact
    antiderivatives; higher dimensions use summed-area tables on a grid of
    step about ``grid_step`` (cube windows only).
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    n = F.n
    F1 = F1 or (lambda l: l ** (-n))
    Fm = F.modulate(lam)
    vals = np.zeros((len(ls), len(windows)))
    for j, w in enumerate(windows):
        fw = profile.weight(w.t)
        spec = Fm.quad.merge(profile.p.quad)
        for i, l in enumerate(ls):
            best = 0.0
            for x in F.samples:
                if n == 1:
                    v = _cond_b_1d(Fm, l, w, profile.p, x, spec)
                else:
                    if w.shape != "cube":
                        raise NotImplementedError("condition (B) in n >= 2 needs cube windows")
                    v = _cond_b_grid(Fm, l, w, profile.p, x, grid_step)
                best = max(best, v)
            vals[i, j] = F1(l) * fw * best
    scale = max(1e-300, float(np.max(vals)))
    per_l = [limsup_estimate(windows.ts, v, atol=1e-12 * scale) for v in vals]
    est = [r.estimate for r in per_l]
    if len(ls) >= 6:
        outer = limsup_estimate(ls, est, atol=1e-12 * scale)
    else:
        outer = LimsupEstimate(tuple(ls), tuple(est), float(max(est[-2:])), "inconclusive", math.nan)
    return ConditionBReport(tuple(lam.tolist()), tuple(float(l) for l in ls), tuple(windows.ts),
                            vals, per_l, outer)


# ---------------------------------------------------------------------------
# null test for Cesaro means of polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NullTestReport:
    verdict: str  # null | forces-zero | not-null
    sups: tuple  # sup of the Cesaro mean per grid vector a
    f_sup: float
    a_grid: tuple

    def to_dict(self):
        return {"verdict": self.verdict, "sups": list(self.sups), "f_sup": self.f_sup,
                "a_grid": [list(a) for a in self.a_grid]}


def bohr_average_null_test(F, a_grid, k_max: int, test_points=None, tol: float = 1e-2,
                           seed: int = 0) -> NullTestReport:
    """Check whether Cesaro means at ``k_max`` vanish for every grid vector ``a``.

    ``F`` is a :class:`TrigPolynomial` (exact averages) or a polynomial field.
    The verdict is ``null`` when ``F`` itself is below ``tol`` on the test
    points, ``forces-zero`` when every mean is below ``tol`` while ``F`` is
    not (a contradiction with uniqueness of mean values), and ``not-null``
    otherwise.
    """
    P = F if isinstance(F, TrigPolynomial) else _poly_of(F)
    if P is None:
        raise ValueError("the null test needs a trigonometric polynomial input")
    rng = np.random.default_rng(seed)
    pts = test_points if test_points is not None else rng.uniform(-20, 20, size=(512, P.n))
    pts = as_points(pts, P.n)
    f_sup = float(np.max(vector_norm(P(pts)))) if len(P) else 0.0
    grid = [tuple(np.atleast_1d(np.asarray(a, float)).tolist()) for a in a_grid]
    sups = []
    for a in grid:
        if np.any(np.asarray(a) == 0):
            raise ValueError("grid vectors need nonzero coordinates")
        S = P.shift_average(a, k_max)
        sups.append(float(np.max(vector_norm(S(pts)))) if len(S) else 0.0)
    if f_sup < tol:
        verdict = "null"
    elif all(s < tol for s in sups):
        verdict = "forces-zero"
    else:
        verdict = "not-null"
    return NullTestReport(verdict, tuple(sups), f_sup, tuple(grid))


__all__ = [
    "shift_average", "truncate_field", "periodize", "AveragingResult", "condition_A_residual",
    "ConditionBReport", "condition_B_functional", "NullTestReport", "bohr_average_null_test",
]
