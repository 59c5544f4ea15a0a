"""Trigonometric polynomials, generalised mean values and spectrum scans.

A polynomial is a finite sum ``P(t) = sum_l c_l exp(i <lambda_l, t>)`` with
``lambda_l`` in R^n and ``c_l`` in C^d.  Coefficients of a general field are
estimated by window mean values (Bohr-Fourier projection) or, optionally, by
weighted least squares.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (Domain, Field, LimsupEstimate, QuadSpec, Window, WindowFamily,
                   as_points, limsup_estimate, make_window, vector_norm)

MERGE_TOL = 1e-9
_CHUNK = 200_000


def mod2pi_distance(theta):
    """Distance from ``theta`` to the lattice ``2 pi Z``."""
    theta = np.asarray(theta, dtype=float)
    return np.abs(theta - 2 * np.pi * np.round(theta / (2 * np.pi)))


class TrigPolynomial:
    """Finite exponential sum with frequencies in R^n and coefficients in C^d.

    Frequencies closer than ``MERGE_TOL`` are merged (coefficients added).
    """

    def __init__(self, freqs, coefs, n=None, d=None):
        freqs = np.asarray(freqs, dtype=float)
        coefs = np.asarray(coefs, dtype=complex)
        if freqs.size == 0:
            n = n or 1
            d = d or 1
            freqs = np.zeros((0, n))
            coefs = np.zeros((0, d), dtype=complex)
        if freqs.ndim == 1:
            freqs = freqs.reshape(-1, 1) if (n or 1) == 1 else freqs.reshape(1, -1)
        if coefs.ndim == 1:
            coefs = coefs.reshape(-1, 1)
        if len(freqs) != len(coefs):
            raise ValueError("need one coefficient per frequency")
        # merge near-duplicate frequencies, keep first-seen order
        keep_f, keep_c = [], []
        for lam, c in zip(freqs, coefs):
            for j, mu in enumerate(keep_f):
                if np.linalg.norm(lam - mu) < MERGE_TOL:
                    keep_c[j] = keep_c[j] + c
                    break
            else:
                keep_f.append(lam.copy())
                keep_c.append(c.copy())
        nn = freqs.shape[1]
        dd = coefs.shape[1]
        self.freqs = np.array(keep_f).reshape(-1, nn)
        self.coefs = np.array(keep_c, dtype=complex).reshape(-1, dd)
        self.freqs.setflags(write=False)
        self.coefs.setflags(write=False)

    # basic properties ------------------------------------------------------
    @classmethod
    def zero(cls, n=1, d=1):
        return cls(np.zeros((0, n)), np.zeros((0, d)), n=n, d=d)

    @property
    def n(self):
        return self.freqs.shape[1]

    @property
    def d(self):
        return self.coefs.shape[1]

    def __len__(self):
        return len(self.freqs)

    def __repr__(self):
        return f"TrigPolynomial(n={self.n}, d={self.d}, terms={len(self)})"

    def __call__(self, t):
        """Values at points ``t`` (shape (N, n)), returned as (N, d)."""
        t = as_points(t, self.n)
        out = np.zeros((t.shape[0], self.d), dtype=complex)
        if len(self) == 0:
            return out
        for s in range(0, t.shape[0], _CHUNK):
            E = np.exp(1j * (t[s:s + _CHUNK] @ self.freqs.T))
            out[s:s + _CHUNK] = E @ self.coefs
        return out

    evaluate = __call__

    def __add__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return TrigPolynomial(np.vstack([self.freqs, other.freqs]),
                              np.vstack([self.coefs, other.coefs]))

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        return TrigPolynomial(self.freqs, self.coefs * c, n=self.n, d=self.d)

    def __mul__(self, other):
        """Pointwise product (frequencies add)."""
        if not isinstance(other, TrigPolynomial):
            return self.scale(other)
        if len(self) == 0 or len(other) == 0:
            return TrigPolynomial.zero(self.n, max(self.d, other.d))
        f = (self.freqs[:, None, :] + other.freqs[None, :, :]).reshape(-1, self.n)
        c = (self.coefs[:, None, :] * other.coefs[None, :, :]).reshape(len(f), -1)
        return TrigPolynomial(f, c)

    __rmul__ = scale

    def modulate(self, lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return TrigPolynomial(self.freqs + lam, self.coefs)

    def shift(self, tau):
        """``t -> P(t + tau)``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return TrigPolynomial(self.freqs, self.coefs * np.exp(1j * (self.freqs @ tau))[:, None],
                              n=self.n, d=self.d)

    def shift_average(self, a, k):
        """Exact Cesaro mean ``(1/k) sum_{j<k} P(t + j a)``."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        th = self.freqs @ a
        j = np.arange(int(k))
        fac = np.exp(1j * np.outer(th, j)).mean(axis=1)
        return TrigPolynomial(self.freqs, self.coefs * fac[:, None], n=self.n, d=self.d)

    def sup_bound(self):
        """``sum_l ||c_l||``, an upper bound for ``sup |P|``."""
        return float(np.sum(np.linalg.norm(self.coefs, axis=1)))

    def as_field(self, domain: Optional[Domain] = None, dim=None) -> Field:
        domain = domain if domain is not None else Domain.full(self.n)
        if domain.n != self.n:
            raise ValueError("polynomial and domain dimensions differ")
        lam = float(np.max(np.linalg.norm(self.freqs, axis=1))) if len(self) else 0.0
        res = 1.0 if lam == 0 else min(1.0, 3.0 / lam)
        P = self
        dd = self.d if dim is None else max(dim, self.d)
        return Field(lambda t, x: P(t), domain, dim=dd,
                     quad=QuadSpec(resolution=res, order=8),
                     name="P", meta={"poly": self})

    # serialisation ----------------------------------------------------------
    def to_list(self):
        return [{"freq": [float(v) for v in lam], "re": [float(v) for v in c.real],
                 "im": [float(v) for v in c.imag]} for lam, c in zip(self.freqs, self.coefs)]

    def to_json(self):
        return json.dumps(self.to_list(), sort_keys=True)

    @classmethod
    def from_list(cls, items, n=None, d=None):
        if not items:
            return cls.zero(n or 1, d or 1)
        f = [it["freq"] for it in items]
        c = [np.asarray(it["re"], float) + 1j * np.asarray(it.get("im", [0.0] * len(it["re"])), float)
             for it in items]
        return cls(f, c)

    @classmethod
    def from_json(cls, s):
        return cls.from_list(json.loads(s))


def periodic_component(P: TrigPolynomial, a, mode: str = "vector", tol: float = MERGE_TOL) -> TrigPolynomial:
    """Terms of ``P`` with ``exp(i <lambda_l, a>) = 1``.

    ``mode='vector'`` tests ``<lambda_l, a>`` against ``2 pi Z``; ``mode='axis'``
    requires ``lambda_{l,j} a_j`` in ``2 pi Z`` for every coordinate ``j``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.all(a == 0):
        raise ValueError("a must be nonzero")
    if len(P) == 0:
        return P
    if mode in ("vector", "A", "Ainf"):
        keep = mod2pi_distance(P.freqs @ a) < tol
    elif mode in ("axis", "per-axis", "AS"):
        keep = np.all(mod2pi_distance(P.freqs * a[None, :]) < tol, axis=1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return TrigPolynomial(P.freqs[keep], P.coefs[keep], n=P.n, d=P.d)


# ---------------------------------------------------------------------------
# mean values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanValueReport:
    """Window mean values of ``exp(-i<lambda, .>) F`` and their trend."""

    lam: tuple
    values: tuple  # complex (or complex vectors) per window
    estimate: LimsupEstimate  # of the moduli
    normalization: str

    @property
    def value(self):
        """Mean value at the largest window."""
        return self.values[-1]

    def to_dict(self):
        v = np.asarray(self.values[-1])
        return {"lam": list(self.lam), "re": np.real(v).tolist(), "im": np.imag(v).tolist(),
                "normalization": self.normalization, "estimate": self.estimate.to_dict()}


def _normalizer(window: Window, normalization, n, p=1.0):
    if normalization == "measure":
        return window.measure
    if normalization == "volume":
        return (2.0 * window.t) ** n
    if normalization == "power":
        return window.t ** (n / p)
    raise ValueError(f"unknown normalization {normalization!r}")


def window_mean(F: Field, lam, window: Window, normalization="measure", p=1.0, x=None):
    """Normalised window integral of ``exp(-i <lam, s>) F(s; x)``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    G = F.modulate(-lam)
    pts, w = window.rule(G.quad)
    v = w @ G(pts, x)
    return v / _normalizer(window, normalization, F.n, p)


def mean_value(F: Field, lam, windows: WindowFamily, normalization="measure", p=1.0,
               x=None, atol=1e-12) -> MeanValueReport:
    """Generalised mean value of ``exp(-i<lam,.>) F`` over the schedule.

    ``normalization`` is ``'measure'`` (divide by the window measure),
    ``'volume'`` (divide by ``(2t)**n``) or ``'power'`` (divide by
    ``t**(n/p)``, meant for ball windows).
    """
    vals = [window_mean(F, lam, w, normalization, p, x) for w in windows]
    mods = [float(np.linalg.norm(v)) for v in vals]
    est = limsup_estimate(windows.ts, mods, atol=atol)
    out = [complex(v[0]) if len(v) == 1 else v for v in vals]
    return MeanValueReport(tuple(np.atleast_1d(lam).tolist()), tuple(out), est, normalization)


def mean_over_set(F: Optional[Field], E: Field, p, windows: WindowFamily) -> MeanValueReport:
    """``t**(-n/p) int_{Lambda_t} chi_E F`` over the schedule; ``nu(E)`` for ``F = None``."""
    G = E if F is None else F * E
    return mean_value(G, np.zeros(E.n), windows, normalization="power", p=float(p))


def fejer_kernel(m, c, t):
    """``K_m(t) = sin(m pi t / c)**2 / (m sin(pi t / c)**2)``, equal to ``m`` on ``c Z``."""
    if m < 1 or c <= 0:
        raise ValueError("need m >= 1 and c > 0")
    t = np.asarray(t, dtype=float)
    s = np.sin(np.pi * t / c)
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    out = np.sin(m * np.pi * t / c) ** 2 / (m * safe ** 2)
    return np.where(small, float(m), out)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def _largest_window(windows):
    if isinstance(windows, Window):
        return windows
    if isinstance(windows, WindowFamily):
        return windows.windows[-1]
    raise TypeError("expected a Window or a WindowFamily")


def _design(pts, freqs):
    return np.exp(1j * (pts @ np.asarray(freqs, float).T))


def fit_polynomial(F: Field, frequencies, windows, method="projection", x=None,
                   damping: Optional[int] = None, base=None, weights=None) -> TrigPolynomial:
    """Polynomial with the given frequencies approximating ``F(.; x)``.

    Parameters
    ----------
    method : {'projection', 'lstsq'}
        Mean-value projection at the largest window (measure normalisation)
        or weighted least squares on the same quadrature nodes.
    damping : int, optional
        Fejer order ``m``; with ``base`` declared, the coefficient of
        frequency ``j * base`` is multiplied by ``max(0, 1 - |j| / m)``.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.size == 0:
        return TrigPolynomial.zero(F.n, F.dim)
    freqs = freqs.reshape(-1, F.n)
    if len(TrigPolynomial(freqs, np.zeros((len(freqs), 1)))) != len(freqs):
        raise ValueError("frequencies must be distinct")
    w = _largest_window(windows)
    lam_max = float(np.max(np.linalg.norm(freqs, axis=1)))
    res = F.quad.resolution if lam_max == 0 else min(F.quad.resolution, 3.0 / lam_max)
    spec = F.quad.merge(QuadSpec(resolution=res, order=8))
    pts, wt = w.rule(spec)
    fv = F(pts, x)
    if method == "projection":
        coefs = np.empty((len(freqs), F.dim), dtype=complex)
        for s in range(0, len(freqs), 32):
            E = _design(pts, freqs[s:s + 32])
            coefs[s:s + 32] = (np.conj(E) * wt[:, None]).T @ fv / w.measure
    elif method == "lstsq":
        ww = wt if weights is None else wt * weights
        coefs = _weighted_lstsq(_design(pts, freqs), fv, ww)
    else:
        raise ValueError(f"unknown method {method!r}")
    if damping is not None and base is not None:
        base = np.atleast_1d(np.asarray(base, dtype=float))
        j = freqs @ base / float(base @ base)
        coefs = coefs * np.maximum(0.0, 1.0 - np.abs(j) / damping)[:, None]
    return TrigPolynomial(freqs, coefs)


def _weighted_lstsq(E, fv, w):
    sw = np.sqrt(np.maximum(w, 0))
    A = E * sw[:, None]
    b = fv * sw[:, None]
    G = A.conj().T @ A
    r = A.conj().T @ b
    try:
        return np.linalg.solve(G, r)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(A, b, rcond=None)[0]


# ---------------------------------------------------------------------------
# spectrum scanning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumScan:
    probed: np.ndarray  # (m, n)
    amplitudes: np.ndarray  # (m,)
    threshold: float
    resolution: float

    @property
    def detected(self):
        keep = self.amplitudes > self.threshold
        order = np.argsort(-self.amplitudes[keep], kind="stable")
        return self.probed[keep][order]

    @property
    def detected_amplitudes(self):
        a = self.amplitudes[self.amplitudes > self.threshold]
        return np.sort(a)[::-1]

    def to_dict(self):
        return {"probed": self.probed.tolist(), "amplitudes": self.amplitudes.tolist(),
                "threshold": self.threshold, "resolution": self.resolution,
                "detected": self.detected.tolist()}


def lattice_amplitudes(F: Field, lattice, window: Window, x=None):
    """``|mean value|`` of ``F`` at each lattice frequency on one window."""
    lattice = np.asarray(lattice, dtype=float).reshape(-1, F.n)
    lam_max = float(np.max(np.linalg.norm(lattice, axis=1))) if len(lattice) else 0.0
    res = F.quad.resolution if lam_max == 0 else min(F.quad.resolution, 3.0 / lam_max)
    pts, wt = window.rule(F.quad.merge(QuadSpec(resolution=res, order=8)))
    fv = F(pts, x) * wt[:, None]
    amp = np.empty(len(lattice))
    for s in range(0, len(lattice), 64):
        c = np.conj(_design(pts, lattice[s:s + 64])).T @ fv / window.measure
        amp[s:s + 64] = vector_norm(c, F.norm)
    return amp


def spectrum_scan(F: Field, window, lattice=None, threshold=1e-3, n_peaks=10,
                  x=None, step=None, polish=3) -> SpectrumScan:
    """Probe the Bohr spectrum of ``F`` on one window.

    With a ``lattice`` every lattice frequency is probed.  Otherwise (n = 1) the
    field is sampled on a uniform grid, the ``n_peaks`` largest FFT bins are
    taken as candidates and each is refined by maximising ``|mean value|``
    within one bin.  ``polish`` deflation rounds then re-refine every peak
    with the other fitted components subtracted, which removes most of the
    leakage bias between nearby peaks.  The reported resolution is ``2 pi / L`` for window length
    ``L``.
    """
    w = _largest_window(window) if not isinstance(window, Window) else window
    L = float(np.min(np.asarray(w.hi) - np.asarray(w.lo)))
    res = 2 * np.pi / L
    if lattice is not None:
        lat = np.asarray(lattice, dtype=float).reshape(-1, F.n)
        return SpectrumScan(lat, lattice_amplitudes(F, lat, w, x), threshold, res)
    if F.n != 1:
        raise NotImplementedError("lattice-free spectrum scans are one-dimensional; pass a lattice")
    lo, hi = w.lo[0], w.hi[0]
    h = step if step is not None else min(F.quad.resolution / 4.0, 0.1)
    N = int(2 ** math.ceil(math.log2(max(16, (hi - lo) / h))))
    s = lo + (hi - lo) * (np.arange(N) + 0.5) / N
    fv = F(s.reshape(-1, 1), x)
    spec = np.fft.fft(fv, axis=0) / N
    amp = vector_norm(spec, F.norm)
    freqs = 2 * np.pi * np.fft.fftfreq(N, d=(hi - lo) / N)
    # keep local maxima of the bin amplitudes
    idx = [i for i in np.argsort(-amp) if amp[i] >= amp[(i - 1) % N] and amp[i] >= amp[(i + 1) % N]]
    cands = []
    for i in idx:
        if len(cands) >= n_peaks or amp[i] < threshold / 4:
            break
        f0 = freqs[i]
        # optimise the offset from the bin centre: Brent's tolerance is relative to |x|
        obj = lambda u: -float(np.ravel(vector_norm(window_mean(F, [f0 + u], w, x=x), F.norm))[0])  # noqa: E731
        r = minimize_scalar(obj, bounds=(-res, res), method="bounded",
                            options={"xatol": res * 1e-9})
        lam = float(f0 + r.x)
        if abs(lam) < 1e-3 * res:
            lam = 0.0
        if all(abs(lam - c) > res / 2 for c in cands):
            cands.append(lam)
    cands = _polish(F, w, cands, res, x, rounds=polish)
    probed = np.array(cands, dtype=float).reshape(-1, 1)
    amps = np.array([float(np.ravel(vector_norm(window_mean(F, lam, w, x=x), F.norm))[0]) for lam in probed])
    return SpectrumScan(probed, amps, threshold, res)



def _polish(F, w, cands, res, x, rounds):
    lams = list(cands)
    if len(lams) < 2 or rounds <= 0:
        return lams
    pts, wt = w.rule(F.quad.merge(QuadSpec(resolution=min(1.0, 3.0 / max(1.0, max(map(abs, lams)))), order=8)))
    fv = F(pts, x)
    t = pts[:, 0]

    def coef(g, lam):
        return (wt * np.exp(-1j * lam * t)) @ g / w.measure

    cs = [coef(fv, lam) for lam in lams]
    for _ in range(rounds):
        for j in range(len(lams)):
            g = fv - sum(np.exp(1j * lams[i] * t)[:, None] * cs[i][None, :]
                         for i in range(len(lams)) if i != j)
            lam0 = lams[j]
            obj = lambda u: -float(vector_norm(coef(g, lam0 + u)[None, :], F.norm)[0])  # noqa: E731
            r = minimize_scalar(obj, bounds=(-res / 4, res / 4), method="bounded",
                                options={"xatol": res * 1e-10})
            lams[j] = 0.0 if abs(lam0 + r.x) < 1e-3 * res else float(lam0 + r.x)
            cs[j] = coef(g, lams[j])
    return lams


__all__ = [
    "TrigPolynomial", "periodic_component", "mod2pi_distance", "MeanValueReport",
    "window_mean", "mean_value", "mean_over_set", "fejer_kernel", "fit_polynomial",
    "SpectrumScan", "lattice_amplitudes", "spectrum_scan",
]
