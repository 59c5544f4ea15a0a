"""Domains, window families, evaluable fields and the limsup estimator.

A :class:`Field` is a vectorised map ``t -> F(t; x)`` from points of a
:class:`Domain` in R^n into C^d, optionally indexed by a finite sample set of
parameters ``x``.  Windows ``Lambda_t`` are cubes ``[-t, t]^n`` or balls
``|s| <= t`` intersected with the domain, and every ``limsup_{t -> inf}`` is
replaced by :func:`limsup_estimate` over a geometric schedule of windows.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import quadrature as quad

_TOL = 1e-12


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """A subset of R^n on which fields live.

    Use the constructors :meth:`full`, :meth:`orthant`, :meth:`box` and
    :meth:`polyhedral` rather than the raw initialiser.

    Attributes
    ----------
    n : int
        Dimension.
    kind : {'full', 'orthant', 'box', 'polyhedral'}
    lower, upper : tuple of float
        Per-axis bounds (``-inf``/``inf`` allowed).  Unused for polyhedral.
    basis : tuple of tuple, optional
        Rows are the generating vectors of a convex polyhedral cone
        ``{sum c_i v_i : c_i >= 0}``.
    """

    n: int
    kind: str = "full"
    lower: tuple = ()
    upper: tuple = ()
    basis: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.kind not in ("full", "orthant", "box", "polyhedral"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "polyhedral":
            V = np.asarray(self.basis, dtype=float)
            if V.shape != (self.n, self.n):
                raise ValueError("polyhedral basis must be n x n")
            if abs(np.linalg.det(V)) < 1e-10:
                raise ValueError("polyhedral basis is linearly dependent")
        else:
            lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
            if lo.shape != (self.n,) or hi.shape != (self.n,):
                raise ValueError("bounds must have length n")
            if np.any(lo > hi) or np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
                raise ValueError("empty domain")

    # constructors ---------------------------------------------------------
    @classmethod
    def full(cls, n=1):
        return cls(n, "full", (-math.inf,) * n, (math.inf,) * n)

    @classmethod
    def orthant(cls, lower):
        lower = tuple(float(v) for v in np.atleast_1d(lower))
        if any(v == math.inf for v in lower):
            raise ValueError("orthant lower bounds must be finite or -inf")
        return cls(len(lower), "orthant", lower, (math.inf,) * len(lower))

    @classmethod
    def box(cls, lower, upper):
        lower = tuple(float(v) for v in np.atleast_1d(lower))
        upper = tuple(float(v) for v in np.atleast_1d(upper))
        return cls(len(lower), "box", lower, upper)

    @classmethod
    def polyhedral(cls, basis):
        V = np.atleast_2d(np.asarray(basis, dtype=float))
        return cls(V.shape[0], "polyhedral", (), (), tuple(map(tuple, V)))

    # queries --------------------------------------------------------------
    @property
    def lo(self):
        if self.kind == "polyhedral":
            return np.full(self.n, -np.inf)
        return np.asarray(self.lower, dtype=float)

    @property
    def hi(self):
        if self.kind == "polyhedral":
            return np.full(self.n, np.inf)
        return np.asarray(self.upper, dtype=float)

    def contains(self, t):
        """Boolean membership of each row of ``t`` (shape (N, n) or (n,))."""
        t = np.asarray(t, dtype=float)
        single = t.ndim == 1 and self.n > 1 or t.ndim == 0
        t = as_points(t, self.n)
        if self.kind == "polyhedral":
            V = np.asarray(self.basis, dtype=float)
            c = np.linalg.solve(V.T, t.T).T
            ok = np.all(c >= -_TOL, axis=1)
        else:
            ok = np.all((t >= self.lo - _TOL) & (t <= self.hi + _TOL), axis=1)
        return bool(ok[0]) if single else ok

    def shift_cone(self) -> "Domain":
        """The cone of shifts tau with ``Lambda + tau`` inside ``Lambda``."""
        if self.kind == "full":
            return self
        if self.kind == "polyhedral":
            return self
        lo, hi = [], []
        for a, b in zip(self.lower, self.upper):
            fa, fb = math.isfinite(a), math.isfinite(b)
            if fa and fb:
                lo.append(0.0), hi.append(0.0)
            elif fa:
                lo.append(0.0), hi.append(math.inf)
            elif fb:
                lo.append(-math.inf), hi.append(0.0)
            else:
                lo.append(-math.inf), hi.append(math.inf)
        return Domain.box(lo, hi)

    def in_shift_cone(self, tau) -> bool:
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return bool(self.shift_cone().contains(tau.reshape(1, -1))[0])

    def to_dict(self):
        d = {"n": self.n, "kind": self.kind}
        if self.kind == "polyhedral":
            d["basis"] = [list(v) for v in self.basis]
        else:
            d["lower"] = [_json_float(v) for v in self.lower]
            d["upper"] = [_json_float(v) for v in self.upper]
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind", "full")
        n = int(d.get("n", 1))
        if kind == "full":
            return cls.full(n)
        if kind == "orthant":
            return cls.orthant([_parse_float(v) for v in d["lower"]])
        if kind == "box":
            return cls.box([_parse_float(v) for v in d["lower"]],
                           [_parse_float(v) for v in d["upper"]])
        if kind == "polyhedral":
            return cls.polyhedral(d["basis"])
        raise ValueError(f"unknown domain kind {kind!r}")


def _json_float(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _parse_float(v):
    return float(v) if not isinstance(v, str) else float(v.replace("infinity", "inf"))


def as_points(t, n):
    """Coerce ``t`` to an (N, n) float array."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        t = t.reshape(1, 1)
    if t.ndim == 1:
        t = t.reshape(-1, 1) if n == 1 else t.reshape(1, -1)
    if t.shape[-1] != n:
        raise ValueError(f"points have dimension {t.shape[-1]}, expected {n}")
    return t


# ---------------------------------------------------------------------------
# Quadrature specification carried by fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadSpec:
    """How a field wants to be integrated.

    ``resolution`` is the largest admissible panel width, ``order`` the number
    of Gauss-Legendre nodes per panel, ``breaks`` a callable
    ``(axis, lo, hi) -> array`` of discontinuities, ``singular`` a tuple of
    ``(axis, point)`` pairs and ``grid`` a 1-D node array for grid-backed
    fields (integrated by the trapezoid rule on their own nodes).
    """

    resolution: float = 1.0
    order: int = 8
    breaks: tuple = ()
    singular: tuple = ()
    grid: Optional[np.ndarray] = None

    def merge(self, other: "QuadSpec") -> "QuadSpec":
        grid = self.grid if self.grid is not None else other.grid
        if self.grid is not None and other.grid is not None and self.grid is not other.grid:
            if len(self.grid) != len(other.grid) or not np.allclose(self.grid, other.grid):
                grid = np.union1d(self.grid, other.grid)
        return QuadSpec(
            resolution=min(self.resolution, other.resolution),
            order=max(self.order, other.order),
            breaks=self.breaks + other.breaks,
            singular=tuple(dict.fromkeys(self.singular + other.singular)),
            grid=grid,
        )

    def breaks_on(self, axis, lo, hi):
        if not self.breaks:
            return None
        parts = [np.asarray(b(axis, lo, hi), dtype=float).ravel() for b in self.breaks]
        parts = [p for p in parts if p.size]
        return np.concatenate(parts) if parts else None

    def singular_on(self, axis):
        return [p for a, p in self.singular if a == axis]

    def shifted(self, tau):
        tau = np.asarray(tau, dtype=float)

        def mk(b):
            return lambda axis, lo, hi: np.asarray(
                b(axis, lo + tau[axis], hi + tau[axis]), dtype=float) - tau[axis]

        return QuadSpec(
            resolution=self.resolution,
            order=self.order,
            breaks=tuple(mk(b) for b in self.breaks),
            singular=tuple((a, p - tau[a]) for a, p in self.singular),
            grid=None if self.grid is None else self.grid - tau[0],
        )


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """One window ``Lambda_t`` with a closed-form measure and a quadrature rule."""

    t: float
    shape: str
    domain: Domain
    lo: tuple
    hi: tuple
    measure: float
    theta: Optional[tuple] = None

    @property
    def n(self):
        return self.domain.n

    def rule(self, spec: QuadSpec = QuadSpec()):
        """Quadrature ``(points (N, n), weights (N,))`` on the window."""
        n = self.n
        if self.shape == "cube" or (self.shape == "ball" and n == 1):
            if self.domain.kind == "polyhedral":
                return self._parallelepiped_rule(spec)
            rules = []
            for ax in range(n):
                lo, hi = self.lo[ax], self.hi[ax]
                if spec.grid is not None and n == 1:
                    rules.append(quad.grid_rule_1d(lo, hi, spec.grid))
                else:
                    rules.append(quad.rule_1d(lo, hi, spec.resolution, spec.order,
                                              spec.breaks_on(ax, lo, hi),
                                              spec.singular_on(ax)))
            return quad.tensor_rule(rules)
        if self.shape == "ball" and n == 2:
            width = min(spec.resolution, self.t)
            return quad.sector_rule(self.t, self.theta[0], self.theta[1], width, spec.order)
        raise NotImplementedError(f"no quadrature for {self.shape} windows in dimension {n}")

    def _parallelepiped_rule(self, spec):
        V = np.asarray(self.domain.basis, dtype=float)
        rules = [quad.rule_1d(0.0, self.t, spec.resolution, spec.order) for _ in range(self.n)]
        c, w = quad.tensor_rule(rules)
        return c @ V, w * abs(np.linalg.det(V))


_QUADRANT_MIDS = np.array([np.pi / 4, 3 * np.pi / 4, 5 * np.pi / 4, 7 * np.pi / 4])


def _sector(domain):
    """Angular range of ``disc ∩ domain`` for 2-D domains bounded at 0."""
    lo, hi = domain.lo, domain.hi
    for v in np.concatenate([lo, hi]):
        if math.isfinite(v) and v != 0.0:
            raise ValueError("ball windows need domain bounds at 0 or infinity")
    u = np.stack([np.cos(_QUADRANT_MIDS), np.sin(_QUADRANT_MIDS)], axis=1)
    ok = np.all((u >= lo - _TOL) & (u <= hi + _TOL), axis=1)
    if not ok.any():
        raise ValueError("degenerate window")
    if ok.all():
        return 0.0, 2 * np.pi
    # rotate so that the allowed quadrants form a contiguous run
    start = next(q for q in range(4) if ok[q] and not ok[q - 1])
    count = 0
    while ok[(start + count) % 4] and count < 4:
        count += 1
    if ok.sum() != count:
        raise ValueError("non-convex ball window")
    return start * np.pi / 2, (start + count) * np.pi / 2


def make_window(domain: Domain, shape: str, t: float) -> Window:
    """The window ``Lambda_t`` of the given shape.

    Raises ``ValueError('degenerate window')`` if the intersection has zero
    measure.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("window size must be positive")
    n = domain.n
    if shape not in ("cube", "ball"):
        raise ValueError(f"unknown window shape {shape!r}")
    if domain.kind == "polyhedral":
        if shape != "cube":
            raise NotImplementedError("polyhedral domains use parallelepiped windows")
        V = np.asarray(domain.basis, dtype=float)
        box = np.abs(V).sum(axis=0) * t
        return Window(t, shape, domain, tuple(-box), tuple(box),
                      t ** n * abs(np.linalg.det(V)))
    lo = np.maximum(-t, domain.lo)
    hi = np.minimum(t, domain.hi)
    if np.any(hi - lo <= 0):
        raise ValueError("degenerate window")
    if shape == "cube" or n == 1:
        return Window(t, shape, domain, tuple(lo), tuple(hi), float(np.prod(hi - lo)))
    if n == 2:
        th0, th1 = _sector(domain)
        return Window(t, shape, domain, tuple(lo), tuple(hi),
                      0.5 * t * t * (th1 - th0), (th0, th1))
    if domain.kind == "full":
        vol = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * t ** n
        return Window(t, shape, domain, tuple(lo), tuple(hi), vol)
    raise NotImplementedError("ball windows in dimension >= 3 need the full space")


def geometric_schedule(t0=8.0, ratio=2.0, count=11):
    """``t_j = t0 * ratio**j`` for ``j = 0 .. count-1``."""
    if t0 <= 0 or ratio <= 1 or count < 1:
        raise ValueError("schedule needs t0 > 0, ratio > 1, count >= 1")
    return tuple(float(t0 * ratio ** j) for j in range(count))


@dataclass(frozen=True)
class WindowFamily:
    """Windows ``Lambda_{t_j}`` of one shape over a strictly increasing schedule."""

    domain: Domain
    shape: str
    ts: tuple

    def __post_init__(self):
        if len(self.ts) == 0:
            raise ValueError("schedule is empty")
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("schedule must be strictly increasing")

    @property
    def windows(self):
        return [make_window(self.domain, self.shape, t) for t in self.ts]

    def __iter__(self):
        return iter(self.windows)

    def __len__(self):
        return len(self.ts)

    def with_domain(self, domain):
        return WindowFamily(domain, self.shape, self.ts)

    def to_dict(self):
        return {"shape": self.shape, "ts": list(self.ts)}


def make_window_sweep(domain: Domain, shape: str = "cube", schedule=None) -> WindowFamily:
    """Window family over ``schedule``.

    ``schedule`` is a sequence of sizes, a ``(t0, ratio, count)`` triple, or
    ``None`` for the default ``t_j = 8 * 2**j, j = 0..10``.
    """
    if schedule is None:
        ts = geometric_schedule()
    elif isinstance(schedule, dict):
        ts = geometric_schedule(**schedule)
    else:
        ts = tuple(float(v) for v in schedule)
    fam = WindowFamily(domain, shape, ts)
    for w in fam.windows:  # validate every window eagerly
        if w.measure <= 0:
            raise ValueError("degenerate window")
    return fam


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

def _as_values(v, N, dim):
    v = np.asarray(v)
    if v.ndim == 0:
        v = np.full((N,), v)
    if v.ndim == 1:
        v = v.reshape(N, 1)
    if v.shape != (N, dim):
        v = np.broadcast_to(v, (N, dim))
    return np.asarray(v, dtype=complex)


@dataclass(frozen=True, eq=False)
class Field:
    """An evaluable map ``F : Lambda x B -> C^d``.

    Parameters
    ----------
    fn : callable
        ``fn(t, x)`` with ``t`` of shape (N, n) and ``x`` a parameter sample
        (``None`` when ``params`` is empty).  May return (N,), (N, d) or a
        scalar.
    domain : Domain
    dim : int
        Codomain dimension ``d``.
    params : tuple
        Finite parameter sample set ``B``; empty means no parameter.
    norm : {'euclidean', 'max'}
        Norm on C^d.
    quad : QuadSpec
        Integration hints (panel width, breaks, singular points, grid).
    name : str
    """

    fn: Callable
    domain: Domain
    dim: int = 1
    params: tuple = ()
    norm: str = "euclidean"
    quad: QuadSpec = field(default_factory=QuadSpec)
    name: str = "field"
    meta: dict = field(default_factory=dict)

    # construction helpers ------------------------------------------------
    @classmethod
    def scalar(cls, f, domain=None, params=(), **kw):
        """Field from ``f(*coords)`` or ``f(*coords, x)`` with 1-D coordinate arrays."""
        domain = domain if domain is not None else Domain.full(1)
        if params:
            fn = lambda t, x: f(*t.T, x)  # noqa: E731
        else:
            fn = lambda t, x: f(*t.T)  # noqa: E731
        return cls(fn, domain, params=tuple(params), **_quad_kw(kw))

    @classmethod
    def constant(cls, c, domain=None, dim=None):
        domain = domain if domain is not None else Domain.full(1)
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        d = dim or c.size
        return cls(lambda t, x: np.broadcast_to(c, (t.shape[0], d)), domain, dim=d,
                   quad=QuadSpec(resolution=np.inf, order=1), name="constant")

    @property
    def n(self):
        return self.domain.n

    @property
    def samples(self):
        return list(self.params) if self.params else [None]

    def replace(self, **changes):
        # a new evaluator invalidates the exact-polynomial shortcut unless meta is given
        if "fn" in changes and "meta" not in changes and "poly" in self.meta:
            changes["meta"] = {k: v for k, v in self.meta.items() if k != "poly"}
        return dataclasses.replace(self, **changes)

    def _with_poly(self, out, transform):
        P = self.meta.get("poly")
        if P is None:
            return out
        return dataclasses.replace(out, meta={**out.meta, "poly": transform(P)})

    # evaluation -----------------------------------------------------------
    def __call__(self, t, x=None):
        t = as_points(t, self.n)
        return _as_values(self.fn(t, x), t.shape[0], self.dim)

    def pnorm(self, t, x=None):
        """Pointwise norm ``||F(t; x)||`` on C^d."""
        return vector_norm(self(t, x), self.norm)

    # algebra ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Field):
            return other
        if hasattr(other, "as_field"):
            return other.as_field(self.domain, dim=self.dim)
        return None

    def _combine(self, other, op, name):
        g = self._coerce(other)
        if g is None:
            c = complex(other)
            return self.replace(fn=lambda t, x, f=self.fn: op(_as_values(f(t, x), t.shape[0], self.dim), c),
                                name=f"({self.name}{name}{other})")
        if g.n != self.n:
            raise ValueError("fields live in different dimensions")
        if self.params and g.params and len(self.params) != len(g.params):
            raise ValueError("fields have different parameter sets")
        dim = max(self.dim, g.dim)
        if self.dim != g.dim and min(self.dim, g.dim) != 1:
            raise ValueError("codomain dimensions do not match")
        f1, f2, d1, d2 = self.fn, g.fn, self.dim, g.dim
        p2 = bool(g.params)
        p1 = bool(self.params)

        def fn(t, x):
            a = _as_values(f1(t, x if p1 else None), t.shape[0], d1)
            b = _as_values(f2(t, x if p2 else None), t.shape[0], d2)
            return op(a, b)

        return Field(fn, self.domain, dim=dim, params=self.params or g.params,
                     norm=self.norm, quad=self.quad.merge(g.quad),
                     name=f"({self.name}{name}{g.name})")

    def __add__(self, other):
        return self._combine(other, np.add, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract, "-")

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        return self._combine(other, np.multiply, "*")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, np.divide, "/")

    def __neg__(self):
        return self * -1.0

    def shift(self, tau) -> "Field":
        """``t -> F(t + tau; x)``.  Breaks and singular points move with it."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if tau.shape != (self.n,):
            raise ValueError("shift has wrong dimension")
        f = self.fn
        out = self.replace(fn=lambda t, x: f(t + tau, x), quad=self.quad.shifted(tau),
                           name=f"{self.name}(.+tau)")
        return self._with_poly(out, lambda P: P.shift(tau))

    def modulate(self, lam) -> "Field":
        """``t -> exp(i <lam, t>) F(t; x)``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        f, d = self.fn, self.dim
        nrm = float(np.linalg.norm(lam))
        res = self.quad.resolution if nrm == 0 else min(self.quad.resolution, 3.0 / nrm)
        q = dataclasses.replace(self.quad, resolution=res, order=max(self.quad.order, 8))
        out = self.replace(
            fn=lambda t, x: np.exp(1j * (t @ lam))[:, None] * _as_values(f(t, x), t.shape[0], d),
            quad=q, name=f"e^(i<lam,.>){self.name}")
        return self._with_poly(out, lambda P: P.modulate(lam))

    def map_values(self, g, dim=None, name=None) -> "Field":
        """Pointwise post-composition ``t -> g(F(t; x))`` on (N, d) arrays."""
        f, d = self.fn, self.dim
        return self.replace(fn=lambda t, x: g(_as_values(f(t, x), t.shape[0], d)),
                            dim=dim or self.dim, name=name or f"g({self.name})")

    def restrict(self, domain: Domain) -> "Field":
        if domain.n != self.n:
            raise ValueError("dimension mismatch")
        return self.replace(domain=domain)

    @staticmethod
    def tensor(*factors: "Field", domain=None) -> "Field":
        """``F(t_1, ..., t_k) = f_1(t_1) ... f_k(t_k)`` for 1-D scalar factors."""
        for f in factors:
            if f.n != 1 or f.dim != 1 or f.params:
                raise ValueError("tensor factors must be scalar 1-D fields without parameters")
        k = len(factors)
        if domain is None:
            domain = Domain.box([f.domain.lo[0] for f in factors],
                                [f.domain.hi[0] for f in factors])
        fns = [f.fn for f in factors]

        def fn(t, x):
            out = np.ones(t.shape[0], dtype=complex)
            for j, g in enumerate(fns):
                out = out * _as_values(g(t[:, j:j + 1], None), t.shape[0], 1)[:, 0]
            return out

        breaks = []
        for j, f in enumerate(factors):
            if f.quad.breaks:
                breaks.append(_axis_breaks(j, f.quad))
        q = QuadSpec(
            resolution=min(f.quad.resolution for f in factors),
            order=max(f.quad.order for f in factors),
            breaks=tuple(breaks),
            singular=tuple((j, p) for j, f in enumerate(factors) for a, p in f.quad.singular),
        )
        return Field(fn, domain, quad=q, name="x".join(f.name for f in factors))


def _axis_breaks(j, q):
    def b(axis, lo, hi):
        if axis != j:
            return np.empty(0)
        r = q.breaks_on(0, lo, hi)
        return np.empty(0) if r is None else r
    return b


def _quad_kw(kw):
    """Split convenience keywords (resolution, order, breaks, singular) into a QuadSpec."""
    q = kw.pop("quad", None) or QuadSpec()
    res = kw.pop("resolution", q.resolution)
    order = kw.pop("order", q.order)
    br = kw.pop("breaks", None)
    sing = kw.pop("singular", None)
    q = QuadSpec(resolution=res, order=order,
                 breaks=q.breaks + ((br,) if br is not None else ()),
                 singular=q.singular + (tuple(sing) if sing else ()),
                 grid=q.grid)
    kw["quad"] = q
    return kw


def vector_norm(v, kind="euclidean"):
    v = np.asarray(v)
    if v.ndim == 1:
        return np.abs(v)
    if kind == "max":
        return np.max(np.abs(v), axis=-1)
    if v.shape[-1] == 1:
        return np.abs(v[..., 0])
    return np.sqrt(np.sum(np.abs(v) ** 2, axis=-1))


def grid_field(grid, values, domain=None, name="grid") -> Field:
    """Piecewise-linear field on a sorted 1-D grid.

    Window integrals of grid fields use the trapezoid rule on the grid nodes,
    so quantities computed from them are exact functionals of the samples.
    Values outside the grid are held constant at the end values.
    """
    g = np.asarray(grid, dtype=float)
    v = np.asarray(values)
    if v.ndim == 1:
        v = v[:, None]
    v = v.astype(complex)
    if g.ndim != 1 or len(g) != v.shape[0] or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing and match the values")
    d = v.shape[1]
    re, im = v.real.copy(), v.imag.copy()

    def fn(t, x):
        s = t[:, 0]
        out = np.empty((len(s), d), dtype=complex)
        for j in range(d):
            out[:, j] = np.interp(s, g, re[:, j]) + 1j * np.interp(s, g, im[:, j])
        return out

    domain = domain if domain is not None else Domain.full(1)
    return Field(fn, domain, dim=d,
                 quad=QuadSpec(resolution=np.inf, order=1, grid=g),
                 name=name, meta={"grid": g, "values": v})


# ---------------------------------------------------------------------------
# Window integrals
# ---------------------------------------------------------------------------

def window_samples(F: Field, window: Window, extra: Optional[QuadSpec] = None):
    """Quadrature points, weights and pointwise norms of ``F`` on ``window``.

    Returns ``(points, weights, norms)`` where ``norms`` has one row per
    parameter sample.
    """
    spec = F.quad if extra is None else F.quad.merge(extra)
    pts, w = window.rule(spec)
    norms = np.stack([F.pnorm(pts, x) for x in F.samples])
    if not np.all(np.isfinite(norms)):
        raise FloatingPointError(f"non-finite field values on window t={window.t}")
    return pts, w, norms


# ---------------------------------------------------------------------------
# limsup estimator
# ---------------------------------------------------------------------------

TRENDS = ("converging-to-zero", "bounded", "diverging", "inconclusive")


@dataclass(frozen=True)
class LimsupEstimate:
    """Tail-supremum surrogate for ``limsup_{t -> inf} value(t)``.

    Attributes
    ----------
    ts, values : tuple of float
        The samples.
    estimate : float
        ``max`` of the tail ``values[J-K:]``.
    trend : str
        One of ``converging-to-zero``, ``bounded``, ``diverging``,
        ``inconclusive``.
    slope : float
        Least-squares log-log slope over the tail (``-inf`` if the tail is 0).
    tail : int
        Tail length ``K``.
    log_growth : bool
        Set when growth slower than any power was detected.
    """

    ts: tuple
    values: tuple
    estimate: float
    trend: str
    slope: float
    tail: int = 4
    log_growth: bool = False

    @property
    def limit(self) -> float:
        """Best guess of the limit: 0, ``inf``, or the tail supremum."""
        if self.trend == "converging-to-zero":
            return 0.0
        if self.trend == "diverging":
            return math.inf
        return self.estimate

    @property
    def last(self) -> float:
        return self.values[-1]

    def to_dict(self):
        return {"ts": list(self.ts), "values": list(self.values),
                "estimate": self.estimate, "trend": self.trend,
                "slope": None if not math.isfinite(self.slope) else self.slope,
                "tail": self.tail, "log_growth": self.log_growth}


def loglog_slope(ts, values):
    """Least-squares slope of ``log(values)`` against ``log(ts)``."""
    x, y = np.log(np.asarray(ts, float)), np.log(np.asarray(values, float))
    A = np.vstack([x, np.ones_like(x)]).T
    return float(np.linalg.lstsq(A, y, rcond=None)[0][0])


def limsup_estimate(ts, values=None, tail: int = 4, atol: float = 0.0,
                    slope_diverging: float = 0.1) -> LimsupEstimate:
    """Classify the tail of a sampled curve ``t_j -> value_j``.

    Parameters
    ----------
    ts : sequence of float or sequence of (t, value) pairs
    values : sequence of float, optional
    tail : int
        Tail length ``K``; the tail is ``j >= J - K``.
    atol : float
        Values ``<= atol`` count as exact zeros.

    Notes
    -----
    ``diverging`` needs a tail log-log slope above ``slope_diverging`` or
    sustained logarithmic growth (strictly increasing tail whose increments
    decay no faster than ``1 / log(t)**1.3``).  ``converging-to-zero`` is
    reported for a tail that is monotone within a factor 1.2 and either drops
    by a factor 10 or follows a power law with slope <= -0.05.
    """
    if values is None:
        pairs = list(ts)
        ts = [p[0] for p in pairs]
        values = [p[1] for p in pairs]
    ts = np.asarray(ts, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) < 6 or len(ts) != len(v):
        raise ValueError("limsup_estimate needs at least 6 samples")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(ts))):
        raise ValueError("non-finite sample")
    if np.any(v < 0):
        raise ValueError("samples must be nonnegative")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("sample abscissae must increase")
    K = min(tail, len(v) - 2)
    tv, tt = v[-(K + 1):], ts[-(K + 1):]
    est = float(tv.max())
    out = dict(ts=tuple(ts.tolist()), values=tuple(v.tolist()), estimate=est, tail=K)

    zero = tv <= atol
    if zero.all():
        return LimsupEstimate(trend="converging-to-zero", slope=-math.inf, **out)
    if zero.any():
        # partly exact zeros: treat as a vanishing tail when it ends at zero
        if zero[-1]:
            return LimsupEstimate(trend="converging-to-zero", slope=-math.inf, **out)
        return LimsupEstimate(trend="inconclusive", slope=math.nan, **out)

    slope = loglog_slope(tt, tv)
    monotone_dec = bool(np.all(tv[1:] <= 1.2 * tv[:-1]))
    if monotone_dec and (tv[-1] < 0.1 * tv[0] or slope <= -0.05):
        return LimsupEstimate(trend="converging-to-zero", slope=slope, **out)
    if slope > slope_diverging:
        return LimsupEstimate(trend="diverging", slope=slope, **out)
    if 0 < slope <= slope_diverging and _log_growth(ts, v, K):
        return LimsupEstimate(trend="diverging", slope=slope, log_growth=True, **out)
    spread = tv.max() / tv.min()
    if spread <= 3.0:
        return LimsupEstimate(trend="bounded", slope=slope, **out)
    return LimsupEstimate(trend="inconclusive", slope=slope, **out)


def _log_growth(ts, v, K):
    m = min(len(v), 2 * K + 1)
    tt, vv = ts[-m:], v[-m:]
    d = np.diff(vv)
    if np.any(d <= 0):
        return False
    if vv[-1] - vv[0] < 0.05 * vv[-1]:
        return False
    lt = np.log(tt[1:])
    if np.any(lt <= 0):
        return False
    e = -loglog_slope(lt, d)  # d ~ (log t)^(-e)
    return e <= 1.3
