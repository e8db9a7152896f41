"""Smooth rapidly-decaying test functions with exact analytic derivatives.

The working family is polynomial x Gaussian, closed under differentiation
(Hermite-style ladder), which keeps every derivative used by the regularized
distribution machinery free of finite-difference noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial


class TestFunction1D:
    """Protocol-ish base: value(r), deriv(q, r), decay bookkeeping."""

    max_order: int = 64

    def value(self, r):
        raise NotImplementedError

    def deriv(self, q: int, r):
        raise NotImplementedError

    def support_radius(self, tol: float = 1e-14) -> float:
        raise NotImplementedError

    def __call__(self, r):
        return self.value(r)


class GaussianPoly1D(TestFunction1D):
    """P(r) * exp(-a (r - c)^2), with the exact derivative ladder
    P_{q+1} = P' - 2a(r - c) P."""

    def __init__(self, poly=(1.0,), a: float = 1.0, center: float = 0.0):
        if a <= 0:
            raise ValueError("Gaussian width parameter must be positive")
        self.poly = poly if isinstance(poly, Polynomial) else Polynomial(list(poly))
        self.a = float(a)
        self.center = float(center)
        self._ladder = [self.poly]

    def _poly_at(self, q: int) -> Polynomial:
        shifted = Polynomial([-self.center, 1.0])
        while len(self._ladder) <= q:
            p = self._ladder[-1]
            self._ladder.append(p.deriv() - 2.0 * self.a * shifted * p)
        return self._ladder[q]

    def _gauss(self, r):
        return np.exp(-self.a * (r - self.center) ** 2)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self._poly_at(0)(r) * self._gauss(r)

    def deriv(self, q: int, r):
        r = np.asarray(r, dtype=float)
        return self._poly_at(q)(r) * self._gauss(r)

    def support_radius(self, tol: float = 1e-14) -> float:
        # outward scan: smallest radius past which |P| e^{-a(r-c)^2} <= tol
        r = abs(self.center) + 1.0
        while True:
            probe = np.linspace(r, r + 1.0, 8)
            if np.all(np.abs(self.value(probe)) <= tol) and \
               np.all(np.abs(self.value(-probe)) <= tol):
                return r + 1.0
            r += 1.0
            if r > 1e4:
                raise RuntimeError("support scan did not terminate")


class Shifted1D(TestFunction1D):
    """phi(. + b)"""

    def __init__(self, base: TestFunction1D, b: float):
        self.base = base
        self.b = float(b)
        self.max_order = base.max_order

    def value(self, r):
        return self.base.value(np.asarray(r, dtype=float) + self.b)

    def deriv(self, q, r):
        return self.base.deriv(q, np.asarray(r, dtype=float) + self.b)

    def support_radius(self, tol: float = 1e-14) -> float:
        return self.base.support_radius(tol) + abs(self.b)


class Reflected1D(TestFunction1D):
    """phi(-.)"""

    def __init__(self, base: TestFunction1D):
        self.base = base
        self.max_order = base.max_order

    def value(self, r):
        return self.base.value(-np.asarray(r, dtype=float))

    def deriv(self, q, r):
        return (-1.0) ** q * self.base.deriv(q, -np.asarray(r, dtype=float))

    def support_radius(self, tol: float = 1e-14) -> float:
        return self.base.support_radius(tol)


# ----------------------------------------------------------------------
# multivariate polynomials (dense enough for our low degrees)
# ----------------------------------------------------------------------

class MultiPoly:
    """Polynomial over R^n as {exponent tuple: coefficient}."""

    def __init__(self, n: int, coeffs: dict | None = None):
        self.n = n
        self.coeffs = {tuple(k): float(v) for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def constant(cls, n: int, c: float = 1.0):
        return cls(n, {tuple([0] * n): c})

    @classmethod
    def coordinate(cls, n: int, j: int):
        e = [0] * n
        e[j] = 1
        return cls(n, {tuple(e): 1.0})

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return MultiPoly(self.n, out)

    def __sub__(self, other):
        return self + other * (-1.0)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            out = {}
            for k1, v1 in self.coeffs.items():
                for k2, v2 in other.coeffs.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    out[k] = out.get(k, 0.0) + v1 * v2
            return MultiPoly(self.n, out)
        return MultiPoly(self.n, {k: v * other for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def partial(self, j: int):
        out = {}
        for k, v in self.coeffs.items():
            if k[j] > 0:
                kk = list(k)
                kk[j] -= 1
                out[tuple(kk)] = out.get(tuple(kk), 0.0) + v * k[j]
        return MultiPoly(self.n, out)

    def eval(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(points.shape[0])
        for k, v in self.coeffs.items():
            term = np.full(points.shape[0], v)
            for j, e in enumerate(k):
                if e:
                    term = term * points[:, j] ** e
            out += term
        return out

    def restrict_ray(self, omega) -> Polynomial:
        """P(r * omega) as a univariate polynomial in r."""
        omega = np.asarray(omega, dtype=float)
        deg = max((sum(k) for k in self.coeffs), default=0)
        c = np.zeros(deg + 1)
        for k, v in self.coeffs.items():
            w = v
            for j, e in enumerate(k):
                if e:
                    w *= omega[j] ** e
            c[sum(k)] += w
        return Polynomial(c)

    def affine_image(self, A, b) -> "MultiPoly":
        """P(A u + b) as a polynomial in u."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        lines = []
        for i in range(self.n):
            coeffs = {tuple([0] * self.n): float(b[i])}
            for j in range(self.n):
                if A[i, j] != 0.0:
                    coeffs[_unit(self.n, j)] = float(A[i, j])
            lines.append(MultiPoly(self.n, coeffs))
        out = MultiPoly(self.n, {})
        for k, v in self.coeffs.items():
            term = MultiPoly.constant(self.n, v)
            for i, e in enumerate(k):
                for _ in range(e):
                    term = term * lines[i]
            out = out + term
        return out

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)


class GaussianPolyND:
    """P(x) * exp(-(x-c)^T M (x-c)) with M symmetric positive definite."""

    max_order: int = 64

    def __init__(self, n: int, poly: MultiPoly | None = None, quad=None, center=None):
        self.n = n
        self.poly = poly if poly is not None else MultiPoly.constant(n)
        self.quad = np.eye(n) if quad is None else np.asarray(quad, dtype=float)
        self.center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        if self.quad.shape != (n, n):
            raise ValueError("quadratic form shape mismatch")
        if not np.allclose(self.quad, self.quad.T):
            raise ValueError("quadratic form must be symmetric")
        np.linalg.cholesky(self.quad)  # SPD check
        self.radial = bool(np.allclose(self.quad, self.quad[0, 0] * np.eye(n))
                           and np.allclose(self.center, 0.0)
                           and len(self.poly.coeffs) <= 1)

    def _expo(self, points):
        d = points - self.center[None, :]
        return np.exp(-np.einsum("ij,jk,ik->i", d, self.quad, d))

    def value(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.poly.eval(points) * self._expo(points)

    def laplacian_plus(self, k2: float) -> "GaussianPolyND":
        """(Delta + k2) applied to this function, same family."""
        n = self.n
        grads_q = []
        for j in range(n):
            # d/dx_j of (x-c)^T M (x-c) = 2 (M (x-c))_j
            p = MultiPoly.constant(n, 0.0)
            for i in range(n):
                p = p + MultiPoly(n, {_unit(n, i): 2.0 * self.quad[j, i]})
            p = p + MultiPoly.constant(n, -2.0 * float(self.quad[j] @ self.center))
            grads_q.append(p)
        lap_p = MultiPoly.constant(n, 0.0)
        for j in range(n):
            lap_p = lap_p + self.poly.partial(j).partial(j)
        cross = MultiPoly.constant(n, 0.0)
        for j in range(n):
            cross = cross + self.poly.partial(j) * grads_q[j]
        gradq_sq = MultiPoly.constant(n, 0.0)
        for j in range(n):
            gradq_sq = gradq_sq + grads_q[j] * grads_q[j]
        trace_q = 2.0 * float(np.trace(self.quad))
        # Delta(P e^{-q}) = (Delta P - 2 grad P . grad q - P Delta q + P |grad q|^2) e^{-q}
        new_poly = (lap_p - 2.0 * cross + self.poly * (gradq_sq)
                    + self.poly * (k2 - trace_q))
        return GaussianPolyND(n, new_poly, self.quad, self.center)

    def restrict_ray(self, omega) -> GaussianPoly1D:
        """The restriction r -> phi(r omega) is again polynomial x Gaussian."""
        omega = np.asarray(omega, dtype=float)
        a = float(omega @ self.quad @ omega)
        b = float(omega @ self.quad @ self.center)
        c0 = float(self.center @ self.quad @ self.center)
        # exponent: -(a r^2 - 2 b r + c0) = -a (r - b/a)^2 - (c0 - b^2/a)
        mu = b / a
        scale = math.exp(-(c0 - b * b / a))
        poly_r = self.poly.restrict_ray(omega) * scale
        return GaussianPoly1D(poly_r, a, mu)

    def support_radius(self, tol: float = 1e-14) -> float:
        evmin = float(np.linalg.eigvalsh(self.quad)[0])
        # coarse but safe: |P| grows polynomially, Gaussian kills it
        r = float(np.linalg.norm(self.center)) + 1.0
        while True:
            # sample a shell
            rng = np.random.default_rng(12345)
            dirs = rng.normal(size=(32, self.n))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            if np.all(np.abs(self.value(r * dirs)) <= tol):
                return r + 0.5
            r += 0.5
            if r > 1e4:
                raise RuntimeError("support scan did not terminate")

    def integral(self) -> float:
        """Exact integral over R^n by diagonalizing the quadratic form and
        reading off one-dimensional Gaussian moments."""
        lam, Q = np.linalg.eigh(self.quad)
        A = Q @ np.diag(lam ** -0.5)
        composed = self.poly.affine_image(A, self.center)
        total = 0.0
        for k, v in composed.coeffs.items():
            term = v
            for e in k:
                if e % 2 == 1:
                    term = 0.0
                    break
                term *= math.gamma((e + 1) / 2.0)
            total += term
        return total / math.sqrt(float(np.prod(lam))) * 1.0

    def integral_oracle(self, n_nodes: int = 80) -> float:
        """integral over R^n by tensor Gauss on the decay box (test helper)."""
        from .quadrature import panel_nodes
        r = self.support_radius(1e-16)
        lo = self.center - r
        hi = self.center + r
        axes = [panel_nodes(float(lo[j]), float(hi[j]), n_nodes) for j in range(self.n)]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        w = axes[0][1]
        for a in axes[1:]:
            w = np.multiply.outer(w, a[1]).ravel()
        return float(np.sum(self.value(pts) * w))


def _unit(n: int, j: int):
    e = [0] * n
    e[j] = 1
    return tuple(e)
