"""Class-membership engines.

Membership in the weighted Besicovitch class is probed by fitting
trigonometric polynomials with growing frequency budgets and tracking the
class residual of each fit over the window schedule.  The module also provides
Doss residuals, an almost-period search, Besicovitch continuity, normality
along shift sequences, the Nemytskii composition and a few classical
reference residuals (Bohr, Stepanov, Weyl) for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (Domain, Field, LimsupEstimate, QuadSpec, Window, WindowFamily,
                   as_points, limsup_estimate, loglog_slope, make_window, vector_norm)
from .seminorm import (SeminormReport, WeightProfile, residual_matrix, weighted_residual)
from .trigpoly import (TrigPolynomial, _design, _weighted_lstsq, fit_polynomial,
                       lattice_amplitudes, spectrum_scan)

VERDICTS = ("member-evidence", "non-member-evidence", "inconclusive")


# ---------------------------------------------------------------------------
# class membership
# ---------------------------------------------------------------------------

@dataclass
class ClassReport:
    """Verdict plus residual-versus-budget curve.

    ``curve[k]`` is the residual sweep of the best ``k``-frequency polynomial;
    ``k = 0`` is the zero polynomial, so the curve has ``budget + 1`` entries.
    """

    verdict: str
    curve: list
    polynomials: list
    frequencies: np.ndarray
    best_k: int
    scale: float
    thresholds: dict
    decrease_ok: Optional[bool]
    profile: WeightProfile

    @property
    def residuals(self):
        return [c.estimate for c in self.curve]

    @property
    def final_residual(self):
        return self.curve[self.best_k].estimate

    def to_dict(self):
        def poly_ref(p):
            if isinstance(p, TrigPolynomial):
                return p.to_list()
            return [q.to_list() for q in p]
        return {
            "verdict": self.verdict,
            "best_k": self.best_k,
            "scale": self.scale,
            "thresholds": self.thresholds,
            "decrease_ok": self.decrease_ok,
            "frequencies": np.asarray(self.frequencies).tolist(),
            "curve": [{"k": k, **c.to_dict()} for k, c in enumerate(self.curve)],
            "witness": poly_ref(self.polynomials[self.best_k]),
            "profile": self.profile.to_dict(),
        }


def _param_candidate(F: Field, polys) -> Field:
    """Field evaluating ``polys[i]`` at the ``i``-th parameter sample of ``F``."""
    if not F.params:
        return polys[0].as_field(F.domain, dim=F.dim)
    samples = F.samples

    def fn(t, x):
        for s, P in zip(samples, polys):
            if s is x:
                return P(t)
        raise KeyError("unknown parameter sample")

    lam = max((float(np.max(np.linalg.norm(P.freqs, axis=1))) for P in polys if len(P)), default=0.0)
    res = 1.0 if lam == 0 else min(1.0, 3.0 / lam)
    return Field(fn, F.domain, dim=F.dim, params=F.params, quad=QuadSpec(res, 8), name="P")


def _rank_frequencies(F, windows, frequencies, lattice, scan_threshold, n_peaks):
    w = windows.windows[-1]
    if frequencies is not None:
        freqs = np.asarray(frequencies, dtype=float).reshape(-1, F.n)
        if len(freqs) == 0:
            return freqs, np.zeros(0)
        amps = np.max([lattice_amplitudes(F, freqs, w, x) for x in F.samples], axis=0)
    elif lattice is not None:
        lat = np.asarray(lattice, dtype=float).reshape(-1, F.n)
        amps = np.max([lattice_amplitudes(F, lat, w, x) for x in F.samples], axis=0)
        keep = amps > scan_threshold
        freqs, amps = lat[keep], amps[keep]
    else:
        found = []
        for x in F.samples:
            sc = spectrum_scan(F, w, threshold=scan_threshold, n_peaks=n_peaks, x=x)
            found.extend(sc.detected.tolist())
        uniq = []
        res = 2 * np.pi / (w.hi[0] - w.lo[0])
        for lam in found:
            if all(np.linalg.norm(np.subtract(lam, u)) > res / 2 for u in uniq):
                uniq.append(lam)
        freqs = np.asarray(uniq, dtype=float).reshape(-1, F.n)
        if len(freqs) == 0:
            return freqs, np.zeros(0)
        amps = np.max([lattice_amplitudes(F, freqs, w, x) for x in F.samples], axis=0)
    order = np.argsort(-amps, kind="stable")
    return freqs[order], amps[order]


def fit_functional(F: Field, freqs, window: Window, profile: WeightProfile, x=None,
                   iters=60, init=None) -> TrigPolynomial:
    """Coefficients minimising ``int phi(|F - P|)**p`` on one window.

    Iteratively reweighted least squares for the power gauge ``x**alpha``
    with constant exponent ``p`` (objective ``int |F - P|**(alpha p)``).  The
    smoothing parameter shrinks geometrically, which lets the iteration reach
    the sparse-residual minimisers of concave objectives (``alpha p < 1``).
    """
    freqs = np.asarray(freqs, dtype=float).reshape(-1, F.n)
    if len(freqs) == 0:
        return TrigPolynomial.zero(F.n, F.dim)
    if not profile.p.is_constant or profile.gauge.kind == "custom":
        return fit_polynomial(F, freqs, window, method="lstsq", x=x)
    q = profile.gauge.alpha * profile.p.value
    lam = float(np.max(np.linalg.norm(freqs, axis=1)))
    res = F.quad.resolution if lam == 0 else min(F.quad.resolution, 3.0 / lam)
    pts, wt = window.rule(F.quad.merge(QuadSpec(resolution=res, order=8)))
    E = _design(pts, freqs)
    fv = F(pts, x)
    c = (fit_polynomial(F, freqs, window, method="lstsq", x=x).coefs
         if init is None else np.asarray(init, complex).reshape(len(freqs), -1))
    r = vector_norm(fv - E @ c, F.norm)
    eps = max(float(np.max(r)), 1e-300)
    floor = 1e-12 * max(float(np.max(np.abs(fv))), 1e-300)
    for _ in range(iters):
        ww = (r ** 2 + eps ** 2) ** ((q - 2.0) / 2.0)
        c = _weighted_lstsq(E, fv, wt * ww)
        r = vector_norm(fv - E @ c, F.norm)
        eps = max(eps / 2.0, floor)
    return TrigPolynomial(freqs, c)


def classify_besicovitch(F: Field, profile: WeightProfile, windows: WindowFamily,
                         budget: Optional[int] = None, frequencies=None, lattice=None,
                         coef_rule: str = "projection", eps_class: float = 1e-2,
                         decrease_factor: float = 1.5, scan_threshold: float = 1e-3,
                         n_peaks: int = 10) -> ClassReport:
    """Residual-versus-budget classification of ``F``.

    For ``k = 0 .. budget`` the ``k`` frequencies with the largest mean values
    are fitted (``coef_rule`` in ``projection``, ``lstsq``, ``functional``)
    and the class residual of each fit is swept over ``windows``.

    The verdict is ``member-evidence`` when the best curve converges to zero
    or its tail estimate is below ``eps_class`` times the scale (the zero-fit
    residual on the first window); ``non-member-evidence`` when the best curve
    is bounded or diverging and above that threshold; ``inconclusive``
    otherwise.  The decrease-factor test is reported, not enforced.
    """
    freqs, amps = _rank_frequencies(F, windows, frequencies, lattice, scan_threshold, n_peaks)
    if budget is None:
        budget = len(freqs)
    budget = min(int(budget), len(freqs))
    wbig = windows.windows[-1]
    polys = [[TrigPolynomial.zero(F.n, F.dim) for _ in F.samples]]
    for k in range(1, budget + 1):
        fk = freqs[:k]
        row = []
        for x in F.samples:
            if coef_rule == "functional":
                row.append(fit_functional(F, fk, wbig, profile, x=x))
            else:
                row.append(fit_polynomial(F, fk, wbig, method=coef_rule, x=x))
        polys.append(row)
    cands = [None] + [_param_candidate(F, row) for row in polys[1:]]
    vals = residual_matrix(F, cands, profile, windows)
    scale = float(vals[0, 0]) if vals[0, 0] > 0 else float(np.max(vals[0]))
    atol = 1e-10 * scale
    curve = [limsup_estimate(windows.ts, v, atol=atol) for v in vals]
    best = int(np.argmin([c.estimate for c in curve]))
    bc = curve[best]
    thr = eps_class * scale
    if bc.limit == 0.0 or bc.estimate < thr:
        verdict = "member-evidence"
    elif bc.trend in ("bounded", "diverging"):
        verdict = "non-member-evidence"
    else:
        verdict = "inconclusive"
    dec = None
    if budget >= 1 and curve[budget].estimate > 0:
        dec = bool(curve[1].estimate / curve[budget].estimate >= decrease_factor)
    elif budget >= 1:
        dec = True
    out_polys = [row[0] if not F.params else row for row in polys]
    return ClassReport(verdict, curve, out_polys, freqs[:budget], best, scale,
                       {"eps_class": eps_class, "decrease_factor": decrease_factor,
                        "scan_threshold": scan_threshold, "atol": atol},
                       dec, profile)


# ---------------------------------------------------------------------------
# Doss residuals and almost periods
# ---------------------------------------------------------------------------

def doss_residual(F: Field, tau, profile: WeightProfile, windows: WindowFamily,
                  c: complex = 1.0) -> SeminormReport:
    """Residual of ``F(. + tau)`` against ``c F`` over the schedule.

    ``c = 1`` is the Doss quantity; other nonzero ``c`` give the
    ``||F(. + tau) - c F||`` functional of the Besicovitch-(p, c) discussion.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if not F.domain.in_shift_cone(tau):
        raise ValueError("shift is outside the shift cone of the domain")
    if c == 0:
        raise ValueError("c must be nonzero")
    H = F.shift(tau)
    G = F if c == 1 else F * c
    scale = max(1.0, float(np.max(np.abs(F(np.zeros((1, F.n)), F.samples[0])))))
    return weighted_residual(H, G, profile, windows, atol=1e-13 * scale)


@dataclass(frozen=True)
class AlmostPeriodReport:
    taus: np.ndarray
    residuals: np.ndarray
    hits: np.ndarray
    l: Optional[float]
    eps: float

    def to_dict(self):
        return {"taus": self.taus.tolist(), "residuals": self.residuals.tolist(),
                "hits": self.hits.tolist(), "l": self.l, "eps": self.eps}


def almost_period_search(F: Field, eps: float, profile: WeightProfile, windows: WindowFamily,
                         L: float, h: float, direction=None) -> AlmostPeriodReport:
    """Grid search for ``eps``-almost periods ``tau = s * direction``, ``s in [0, L]``.

    ``l`` is the largest gap between consecutive hits (``h`` when every grid
    point is a hit, ``None`` when there are no hits).
    """
    if not (h > 0 and L >= 10 * h):
        raise ValueError("need h > 0 and L >= 10 h")
    direction = np.ones(F.n) if direction is None else np.atleast_1d(np.asarray(direction, float))
    s = np.arange(0.0, L + 0.5 * h, h)
    res = np.array([doss_residual(F, si * direction, profile, windows).estimate.limit
                    if si > 0 else 0.0 for si in s])
    hits = s[res < eps]
    if len(hits) == 0:
        l = None
    elif len(hits) == 1:
        l = float(L)
    else:
        l = float(max(np.max(np.diff(hits)), h))
    return AlmostPeriodReport(s, res, hits, l, eps)


@dataclass(frozen=True)
class ContinuityReport:
    taus: tuple
    residuals: tuple  # LimsupEstimate per tau
    trend: LimsupEstimate  # residual estimate against 1/tau

    def to_dict(self):
        return {"taus": list(self.taus), "residuals": [r.to_dict() for r in self.residuals],
                "trend": self.trend.to_dict()}


def besicovitch_continuity(F: Field, profile: WeightProfile, windows: WindowFamily,
                           taus) -> ContinuityReport:
    """Doss residuals along a schedule ``tau_j -> 0`` and their trend.

    The trend is classified on the variable ``1 / |tau_j|``, so
    ``converging-to-zero`` means the residual vanishes as ``tau -> 0``.
    """
    taus = [np.atleast_1d(np.asarray(t, dtype=float)) for t in taus]
    size = np.array([np.linalg.norm(t) for t in taus])
    if np.any(size <= 0) or np.any(np.diff(size) >= 0):
        raise ValueError("tau schedule must decrease strictly towards 0")
    reps = [doss_residual(F, t, profile, windows).estimate for t in taus]
    vals = [r.estimate for r in reps]
    trend = limsup_estimate(1.0 / size, vals)
    return ContinuityReport(tuple(t.tolist() for t in taus), tuple(reps), trend)


# ---------------------------------------------------------------------------
# normality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftSequenceSet:
    """Finite truncations of shift sequences ``(b_k)`` in the shift cone."""

    sequences: tuple
    closed_under_subsequence: bool = True

    @classmethod
    def make(cls, sequences, closed=True):
        seqs = tuple(np.atleast_2d(np.asarray(s, dtype=float)).reshape(len(s), -1) for s in sequences)
        return cls(seqs, closed)

    def validate(self, domain: Domain, min_len=8):
        for s in self.sequences:
            if len(s) < min_len:
                raise ValueError(f"shift sequences need length >= {min_len}")
            for b in s:
                if not domain.in_shift_cone(b):
                    raise ValueError("shift outside the shift cone")


@dataclass(frozen=True)
class NormalityReport:
    verdict: str  # normal-evidence | non-normal-evidence
    matrices: tuple
    chains: tuple  # per sequence: dict eps -> chain indices

    def to_dict(self):
        return {"verdict": self.verdict,
                "matrices": [np.where(np.isfinite(m), m, -1.0).tolist() for m in self.matrices],
                "chains": [{str(e): list(c) for e, c in ch.items()} for ch in self.chains]}


def _greedy_chain(M, eps):
    K = len(M)
    best = []
    for s in range(K):
        chain = [s]
        for j in range(K):
            if j != s and all(M[j, c] < eps for c in chain):
                chain.append(j)
        if len(chain) > len(best):
            best = chain
    return sorted(best)


def normality_check(F: Field, R: ShiftSequenceSet, profile: WeightProfile,
                    windows: WindowFamily, eps_ladder=(1.0, 0.3, 0.1)) -> NormalityReport:
    """Pairwise residual matrices along each shift sequence and greedy chains.

    Entry ``M[k, k']`` is the limit estimate of the residual of
    ``F(. + b_k)`` against ``F(. + b_k')``.  The verdict is normal-evidence
    when, for every sequence, a chain of length at least ``K / 2`` with
    pairwise residuals below the smallest ``eps`` exists.
    """
    R.validate(F.domain)
    mats, chains = [], []
    ok = True
    for seq in R.sequences:
        K = len(seq)
        shifted = [F.shift(b) for b in seq]
        M = np.zeros((K, K))
        for i in range(K):
            for j in range(i + 1, K):
                v = weighted_residual(shifted[i], shifted[j], profile, windows, atol=1e-13).estimate.limit
                M[i, j] = M[j, i] = v
        ch = {e: _greedy_chain(M, e) for e in eps_ladder}
        if len(ch[min(eps_ladder)]) < K / 2:
            ok = False
        mats.append(M)
        chains.append(ch)
    return NormalityReport("normal-evidence" if ok else "non-normal-evidence", tuple(mats), tuple(chains))


# ---------------------------------------------------------------------------
# Nemytskii composition
# ---------------------------------------------------------------------------

def nemytskii(F: Field, G: Callable, dim: Optional[int] = None, lipschitz: Optional[float] = None,
              holder: Optional[tuple] = None, y_bound: Optional[float] = None,
              check_points=None) -> Field:
    """``W(t; x) = G(t, F(t; x))`` with ``G(t, y)`` vectorised over rows.

    ``lipschitz`` (constant ``a``) or ``holder`` (``(a, alpha)``) records the
    declared modulus ``||G(t, y) - G(t, y')|| <= a ||y - y'||**alpha``.  When
    ``y_bound`` is given, the range of ``F`` is sampled at ``check_points``
    and must lie in the ball of that radius.
    """
    if y_bound is not None:
        pts = check_points if check_points is not None else np.linspace(-50, 50, 1001)
        pts = as_points(pts, F.n)
        pts = pts[F.domain.contains(pts)]
        for x in F.samples:
            if np.max(F.pnorm(pts, x)) > y_bound:
                raise ValueError("range of F leaves the declared domain of G")
    f, d = F.fn, F.dim

    def fn(t, x):
        y = np.asarray(f(t, x), dtype=complex)
        if y.ndim == 1:
            y = y.reshape(-1, 1)
        y = np.broadcast_to(y, (t.shape[0], d))
        return G(t, y)

    mod = {}
    if lipschitz is not None:
        mod = {"a": float(lipschitz), "alpha": 1.0}
    if holder is not None:
        mod = {"a": float(holder[0]), "alpha": float(holder[1])}
    return F.replace(fn=fn, dim=dim or d, name=f"G(.,{F.name})", meta={**{k: v for k, v in F.meta.items() if k != "poly"}, "modulus": mod})


# ---------------------------------------------------------------------------
# classical reference residuals (one-dimensional)
# ---------------------------------------------------------------------------

def bohr_residual(F: Field, tau, window: Window, x=None) -> float:
    """``sup |F(t + tau) - F(t)|`` over the quadrature nodes of ``window``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    pts, _ = window.rule(F.quad)
    return float(np.max(vector_norm(F(pts + tau, x) - F(pts, x), F.norm)))


def stepanov_residual(F: Field, tau, l: float, p: float, window: Window, x=None) -> float:
    """``sup_s ((1/l) int_s^{s+l} |F(u + tau) - F(u)|**p du)**(1/p)`` for ``s`` in the window.

    Starting points run over a grid of step ``l / 4``; one-dimensional fields only.
    """
    if F.n != 1:
        raise NotImplementedError("Stepanov residuals are implemented for n = 1")
    tau = float(np.atleast_1d(tau)[0])
    D = F.shift([tau]) - F
    best = 0.0
    for s in np.arange(window.lo[0], window.hi[0] - l + 1e-12, l / 4):
        W = make_window(Domain.box([s], [s + l]), "cube", max(abs(s), abs(s + l)) + 1)
        pts, w = W.rule(D.quad)
        v = (np.dot(w, D.pnorm(pts, x) ** p) / l) ** (1.0 / p)
        best = max(best, float(v))
    return best


def weyl_residual(F: Field, tau, ls, p: float, window: Window, x=None):
    """Stepanov residuals for a growing list of lengths ``l`` (equi-Weyl surrogate)."""
    return [stepanov_residual(F, tau, l, p, window, x) for l in ls]


__all__ = [
    "ClassReport", "classify_besicovitch", "fit_functional", "doss_residual",
    "AlmostPeriodReport", "almost_period_search", "ContinuityReport",
    "besicovitch_continuity", "ShiftSequenceSet", "NormalityReport", "normality_check",
    "nemytskii", "bohr_residual", "stepanov_residual", "weyl_residual",
]
