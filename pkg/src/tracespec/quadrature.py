"""Composite Gauss-Legendre quadrature helpers and sphere rules.

Integrands are callables taking a float64 array of abscissae and returning a
(possibly complex) array of the same shape.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(a: float, b: float, n: int):
    x, w = gauss_legendre(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def integrate_panels(f, edges, n_nodes: int = 20):
    """Composite Gauss over the panels defined by the sorted edge list."""
    edges = np.asarray(edges, dtype=float)
    xs = []
    ws = []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = panel_nodes(float(a), float(b), n_nodes)
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    return np.sum(f(x) * w)


def integrate_with_estimate(f, edges, n_nodes: int = 20):
    """Composite Gauss plus an error estimate from node doubling."""
    coarse = integrate_panels(f, edges, n_nodes)
    fine = integrate_panels(f, edges, 2 * n_nodes)
    return fine, abs(fine - coarse)


def uniform_edges(a: float, b: float, max_width: float):
    n = max(1, int(math.ceil((b - a) / max_width)))
    return np.linspace(a, b, n + 1)


def geometric_edges(a: float, b: float, levels: int):
    """Edges b·2^-levels, ..., b/2, b prefixed with a (a may be 0)."""
    pts = [b * 2.0 ** (-ell) for ell in range(levels, -1, -1)]
    return np.array([a] + pts) if a < pts[0] else np.array(pts)


def integrate_log_singular(f, b: float, n_nodes: int = 16, levels: int = 54,
                           smooth_width: float = 0.5):
    """integral_0^b ln(r) f(r) dr with f smooth on (0, b].

    Geometric halving toward 0 keeps ln r analytic on every panel; the level
    count caps the neglected tail near r = 0 below ~1e-16·sup|f|.
    """
    if b <= 0:
        raise ValueError("upper limit must be positive")
    split = min(1.0, b)
    edges = geometric_edges(0.0, split, levels)[1:]  # drop the 0 endpoint

    def g(r):
        return np.log(r) * f(r)

    val = integrate_panels(g, edges, n_nodes)
    if b > split:
        val += integrate_panels(g, uniform_edges(split, b, smooth_width), n_nodes)
    return val


def circle_rule(m_nodes: int):
    """Equal-weight trapezoid rule on S^1; spectrally accurate for smooth f."""
    th = 2.0 * np.pi * np.arange(m_nodes) / m_nodes
    omegas = np.stack([np.cos(th), np.sin(th)], axis=1)
    weights = np.full(m_nodes, 2.0 * np.pi / m_nodes)
    return omegas, weights


def sphere_rule(n_polar: int, n_azimuth: int):
    """Gauss-Legendre in cos(theta) x trapezoid in azimuth on S^2."""
    ct, wt = gauss_legendre(n_polar)
    st = np.sqrt(1.0 - ct**2)
    ph = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    wp = 2.0 * np.pi / n_azimuth
    omegas = np.empty((n_polar * n_azimuth, 3))
    weights = np.empty(n_polar * n_azimuth)
    idx = 0
    for i in range(n_polar):
        omegas[idx:idx + n_azimuth, 0] = st[i] * np.cos(ph)
        omegas[idx:idx + n_azimuth, 1] = st[i] * np.sin(ph)
        omegas[idx:idx + n_azimuth, 2] = ct[i]
        weights[idx:idx + n_azimuth] = wt[i] * wp
        idx += n_azimuth
    return omegas, weights


def unit_sphere_quadrature(n: int, resolution: int = 48):
    """Quadrature (omegas, weights) on S^{n-1} for n in {2, 3}."""
    if n == 2:
        return circle_rule(max(8, 2 * resolution))
    if n == 3:
        return sphere_rule(resolution, 2 * resolution)
    raise ValueError("sphere quadrature implemented for n in {2, 3}")
