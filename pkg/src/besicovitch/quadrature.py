"""Composite Gauss-Legendre rules on intervals, boxes, sectors and grids.

Every window integral in the package goes through the helpers here.  The
rules are deterministic: panel edges depend only on the interval, the
requested panel width, declared discontinuities and declared singular points.
"""

from functools import lru_cache

import numpy as np

MAX_NODES = 30_000_000


@lru_cache(maxsize=64)
def gauss_legendre(order):
    """Nodes and weights of the ``order``-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(order))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_edges(lo, hi, width=np.inf, breaks=None, singular=()):
    """Sorted panel edges covering [lo, hi].

    Parameters
    ----------
    lo, hi : float
        Finite interval endpoints, ``lo < hi``.
    width : float
        Maximal panel width; ``inf`` means breaks alone define the panels.
    breaks : array_like, optional
        Discontinuity locations; those strictly inside (lo, hi) become edges.
    singular : sequence of float
        Points where the integrand may blow up or lose smoothness.  Panels are
        graded geometrically towards each of them.
    """
    lo, hi = float(lo), float(hi)
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ValueError(f"bad interval [{lo}, {hi}]")
    if np.isfinite(width) and width > 0:
        n = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
        e = np.linspace(lo, hi, n + 1)
    else:
        e = np.array([lo, hi])
    parts = [e]
    if breaks is not None:
        b = np.asarray(breaks, dtype=float).ravel()
        parts.append(b[(b > lo) & (b < hi)])
    base = min(width, hi - lo) if np.isfinite(width) else hi - lo
    for s in singular:
        if lo <= s <= hi:
            g = s + np.concatenate([-base * 2.0 ** -np.arange(1, 30), [0.0],
                                    base * 2.0 ** -np.arange(1, 30)])
            parts.append(g[(g > lo) & (g < hi)])
    e = np.unique(np.concatenate(parts))
    # drop slivers created by nearly coincident breaks
    tol = 1e-13 * max(1.0, abs(lo), abs(hi))
    keep = np.concatenate([[True], np.diff(e) > tol])
    e = e[keep]
    e[-1] = hi
    return e


def rule_from_edges(edges, order):
    x, w = gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def rule_1d(lo, hi, width=np.inf, order=8, breaks=None, singular=()):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    return rule_from_edges(panel_edges(lo, hi, width, breaks, singular), order)


def grid_rule_1d(lo, hi, grid):
    """Trapezoid rule on the nodes of a sorted grid restricted to [lo, hi].

    The endpoints are added as nodes, so a piecewise-linear interpolant on
    ``grid`` is integrated exactly.
    """
    g = np.asarray(grid, dtype=float)
    inner = g[(g > lo) & (g < hi)]
    nodes = np.concatenate([[lo], inner, [hi]])
    h = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return nodes, w


def tensor_rule(rules):
    """Tensor product of 1-D ``(nodes, weights)`` pairs -> (points, weights)."""
    sizes = [len(r[0]) for r in rules]
    total = int(np.prod(sizes, dtype=float))
    if total > MAX_NODES:
        raise MemoryError(f"quadrature needs {total} nodes (limit {MAX_NODES})")
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wg = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    w = np.ones(total)
    for g in wg:
        w = w * g.ravel()
    return pts, w


def sector_rule(radius, theta0, theta1, width=1.0, order=8):
    """Polar rule on the disc sector {r <= radius, theta0 <= arg <= theta1}."""
    rn, rw = rule_1d(0.0, radius, width, order)
    arc = radius * (theta1 - theta0)
    n_th = max(4, int(np.ceil(arc / width)))
    tn, tw = rule_1d(theta0, theta1, (theta1 - theta0) / n_th, order)
    R, T = np.meshgrid(rn, tn, indexing="ij")
    WR, WT = np.meshgrid(rw * rn, tw, indexing="ij")
    if R.size > MAX_NODES:
        raise MemoryError(f"quadrature needs {R.size} nodes (limit {MAX_NODES})")
    pts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=-1)
    return pts, (WR * WT).ravel()
