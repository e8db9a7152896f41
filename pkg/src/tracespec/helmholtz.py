"""Outgoing fundamental solution of Delta + k^2 in R^n, its Cartesian
derivatives, and fields radiated by piecewise-constant volume sources.

The radial profile is kept in closed Laurent form: for odd n a Laurent
polynomial against e^{ikr}, for even n a Laurent pair against
(H_0^(1)(kr), H_1^(1)(kr)).  Dimension lifting applies the operator
(-2 pi r)^{-1} d/dr to the n=1 seed e^{ikr}/(2ik) or the n=2 seed
H_0^(1)(kr)/(4i); this reproduces repeated symbolic differentiation and stays
exact for every derivative order needed downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import geometric_edges, integrate_panels, uniform_edges, unit_sphere_quadrature
from .specfun import hankel1


class SingularityError(ValueError):
    """Field evaluated at (or numerically on top of) the source point."""


class ProximityError(ValueError):
    """Field point too close to a source cell for the cell quadrature."""


# ----------------------------------------------------------------------
# radial profiles
# ----------------------------------------------------------------------

class _OddProfile:
    """sum_b coeff_b r^{-b} * e^{ikr}"""

    def __init__(self, k: float, coeffs: dict):
        self.k = k
        self.coeffs = {b: c for b, c in coeffs.items() if c != 0}

    def deriv(self) -> "_OddProfile":
        new: dict = {}
        for b, c in self.coeffs.items():
            new[b] = new.get(b, 0.0) + 1j * self.k * c
            new[b + 1] = new.get(b + 1, 0.0) - b * c
        return _OddProfile(self.k, new)

    def lift(self) -> "_OddProfile":
        d = self.deriv()
        return _OddProfile(self.k, {b + 1: c / (-2.0 * math.pi)
                                    for b, c in d.coeffs.items()})

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        acc = np.zeros(r.shape, dtype=complex)
        for b, c in self.coeffs.items():
            acc += c * r ** (-float(b))
        return np.exp(1j * self.k * r) * acc

    def laurent(self):
        return dict(self.coeffs)


class _EvenProfile:
    """sum_b a_b r^{-b} H_0^(1)(kr) + sum_b b_b r^{-b} H_1^(1)(kr)"""

    def __init__(self, k: float, c0: dict, c1: dict):
        self.k = k
        self.c0 = {b: c for b, c in c0.items() if c != 0}
        self.c1 = {b: c for b, c in c1.items() if c != 0}

    def deriv(self) -> "_EvenProfile":
        # d/dr H_0(kr) = -k H_1(kr);  d/dr H_1(kr) = k H_0(kr) - H_1(kr)/r
        n0: dict = {}
        n1: dict = {}
        for b, c in self.c0.items():
            n0[b + 1] = n0.get(b + 1, 0.0) - b * c
            n1[b] = n1.get(b, 0.0) - self.k * c
        for b, c in self.c1.items():
            n1[b + 1] = n1.get(b + 1, 0.0) - b * c
            n0[b] = n0.get(b, 0.0) + self.k * c
            n1[b + 1] = n1.get(b + 1, 0.0) - c
        return _EvenProfile(self.k, n0, n1)

    def lift(self) -> "_EvenProfile":
        d = self.deriv()
        return _EvenProfile(self.k,
                            {b + 1: c / (-2.0 * math.pi) for b, c in d.c0.items()},
                            {b + 1: c / (-2.0 * math.pi) for b, c in d.c1.items()})

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        h0 = hankel1(0, self.k * r)
        h1 = hankel1(1, self.k * r)
        s0 = np.zeros(r.shape, dtype=complex)
        s1 = np.zeros(r.shape, dtype=complex)
        for b, c in self.c0.items():
            s0 += c * r ** (-float(b))
        for b, c in self.c1.items():
            s1 += c * r ** (-float(b))
        return h0 * s0 + h1 * s1

    def laurent(self):
        return dict(self.c0), dict(self.c1)


@dataclass(frozen=True)
class RadialProfile:
    """Radial factor G with Phi_n(x) = G(|x|), plus its derivative chain."""

    n: int
    k: float
    rep: object

    def derivative_chain(self, depth: int):
        return _profile_chain(self.n, self.k, depth)

    def __call__(self, r):
        return self.rep(r)


@lru_cache(maxsize=None)
def radial_profile(n: int, k: float) -> RadialProfile:
    """Fundamental-solution radial profile for dimension n >= 1."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    if n % 2 == 1:
        rep: object = _OddProfile(k, {0: 1.0 / (2j * k)})
        for _ in range((n - 1) // 2):
            rep = rep.lift()
    else:
        rep = _EvenProfile(k, {0: 1.0 / 4j}, {})
        for _ in range((n - 2) // 2):
            rep = rep.lift()
    return RadialProfile(n=n, k=k, rep=rep)


@lru_cache(maxsize=None)
def _profile_chain(n: int, k: float, depth: int):
    base = radial_profile(n, k).rep
    chain = [base]
    for _ in range(depth):
        chain.append(chain[-1].deriv())
    return chain


def phi_radial(n: int, k: float, r):
    """Phi_n(x) for |x| = r > 0 (scalar or array)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("phi_radial requires r > 0")
    out = radial_profile(n, k)(arr)
    return complex(out) if np.ndim(r) == 0 else out


# ----------------------------------------------------------------------
# Cartesian derivatives as term sums
# ----------------------------------------------------------------------

DERIV_ORDER_CAP = 8


@dataclass(frozen=True)
class RadialTermSum:
    """Finite sum coeff * x_j^a * r^{-b} * G^{(c)}(r) closed under d/dx_j."""

    nu: int
    terms: tuple  # ((a, b, c), coeff) pairs, deduplicated

    @classmethod
    def build(cls, nu: int) -> "RadialTermSum":
        if nu < 0:
            raise ValueError("derivative order must be >= 0")
        if nu > DERIV_ORDER_CAP:
            raise ValueError(f"derivative order {nu} beyond cap {DERIV_ORDER_CAP}")
        terms = {(0, 0, 0): 1.0}
        for _ in range(nu):
            new: dict = {}
            for (a, b, c), co in terms.items():
                # d/dx_j [x^a r^-b G^(c)] = a x^{a-1} r^-b G^(c)
                #   - b x^{a+1} r^{-b-2} G^(c) + x^{a+1} r^{-b-1} G^(c+1)
                if a > 0:
                    key = (a - 1, b, c)
                    new[key] = new.get(key, 0.0) + a * co
                if b > 0:
                    key = (a + 1, b + 2, c)
                    new[key] = new.get(key, 0.0) - b * co
                key = (a + 1, b + 1, c + 1)
                new[key] = new.get(key, 0.0) + co
            terms = {key: co for key, co in new.items() if co != 0.0}
        return cls(nu=nu, terms=tuple(sorted(terms.items())))

    @property
    def max_radial_derivative(self) -> int:
        return max((c for (_, _, c), _ in self.terms), default=0)

    def evaluate(self, n: int, k: float, z, axis: int):
        """Sum the terms at displacement z (shape (N, n) or (n,))."""
        Z = np.atleast_2d(np.asarray(z, dtype=float))
        r = np.linalg.norm(Z, axis=1)
        if np.any(r == 0.0):
            raise SingularityError("evaluation point coincides with the source")
        zj = Z[:, axis]
        chain = _profile_chain(n, k, self.max_radial_derivative)
        gvals = [prof(r) for prof in chain]
        out = np.zeros(len(r), dtype=complex)
        for (a, b, c), co in self.terms:
            out += co * zj ** a * r ** (-float(b)) * gvals[c]
        return out


def point_source_field(n: int, k: float, y, j: int, nu: int, x):
    """Field of the nu-th x_j-derivative point source at y, evaluated at x.

    x may be a single point (shape (n,)) or a batch (N, n); j is 0-based.
    """
    y = np.asarray(y, dtype=float)
    if not 0 <= j < n:
        raise ValueError("axis out of range")
    ts = RadialTermSum.build(nu)
    single = np.asarray(x).ndim == 1
    z = np.atleast_2d(np.asarray(x, dtype=float)) - y[None, :]
    vals = (-1.0) ** nu * ts.evaluate(n, k, z, j)
    return complex(vals[0]) if single else vals


# ----------------------------------------------------------------------
# piecewise-constant volume sources
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    center: tuple
    half_widths: tuple
    amplitude: complex

    def __post_init__(self):
        if len(self.center) != len(self.half_widths):
            raise ValueError("center/half_widths dimension mismatch")
        if any(h <= 0 for h in self.half_widths):
            raise ValueError("half widths must be positive")

    @property
    def corner_radius(self) -> float:
        return math.sqrt(sum((abs(c) + h) ** 2
                             for c, h in zip(self.center, self.half_widths)))

    def distance_to(self, x) -> float:
        d = 0.0
        for xi, c, h in zip(x, self.center, self.half_widths):
            gap = abs(xi - c) - h
            if gap > 0:
                d += gap * gap
        return math.sqrt(d)

    def overlaps(self, other: "Cell") -> bool:
        return all(abs(a - b) < ha + hb for a, b, ha, hb in
                   zip(self.center, other.center, self.half_widths, other.half_widths))


@dataclass(frozen=True)
class VolumeSource:
    """Disjoint axis-aligned cells of constant amplitude in R^n, n in {2, 3}."""

    n: int
    cells: tuple
    support_radius: float

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("volume sources implemented for n in {2, 3}")
        for cell in self.cells:
            if len(cell.center) != self.n:
                raise ValueError("cell dimension mismatch")
            if cell.corner_radius > self.support_radius + 1e-12:
                raise ValueError("support radius does not cover all cells")
        for i, a in enumerate(self.cells):
            for b in self.cells[i + 1:]:
                if a.overlaps(b):
                    raise ValueError("cells must be pairwise non-overlapping")

    @classmethod
    def from_cells(cls, n: int, cells, support_radius: float | None = None):
        cells = tuple(Cell(tuple(c), tuple(h), complex(a)) for c, h, a in cells)
        if support_radius is None:
            support_radius = max((c.corner_radius for c in cells), default=0.0)
        return cls(n=n, cells=cells, support_radius=support_radius)


def _cell_quadrature(cell: Cell, order: int):
    from .quadrature import panel_nodes
    axes = [panel_nodes(c - h, c + h, order)
            for c, h in zip(cell.center, cell.half_widths)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = axes[0][1]
    for a in axes[1:]:
        w = np.multiply.outer(w, a[1]).ravel()
    return pts, w


def volume_source_field(src: VolumeSource, k: float, x, rel_tol: float = 1e-8,
                        start_order: int = 8, max_order: int = 64):
    """f * Phi_n at points outside the support, by per-cell tensor Gauss.

    The per-axis order doubles until two successive levels agree to rel_tol.
    """
    single = np.asarray(x).ndim == 1
    X = np.atleast_2d(np.asarray(x, dtype=float))
    for cell in src.cells:
        min_size = min(cell.half_widths)
        for pt in X:
            d = cell.distance_to(pt)
            if d < 1e-6 * min_size:
                raise ProximityError(
                    f"field point {pt} inside or adjacent to a source cell")
    profile = radial_profile(src.n, k)
    out = np.zeros(len(X), dtype=complex)
    for cell in src.cells:
        prev = None
        order = start_order
        while True:
            pts, w = _cell_quadrature(cell, order)
            r = np.linalg.norm(X[:, None, :] - pts[None, :, :], axis=2)
            val = cell.amplitude * (profile(r) @ w)
            if prev is not None:
                scale = np.max(np.abs(val)) + 1e-300
                if np.max(np.abs(val - prev)) <= rel_tol * scale:
                    break
            if order >= max_order:
                break
            prev = val
            order *= 2
        out += val
    return complex(out[0]) if single else out


# ----------------------------------------------------------------------
# distributional identity oracle: integral Phi_n (Delta + k^2) phi = s phi(0)
# ----------------------------------------------------------------------

def pde_residual(n: int, k: float, phi, sphere_resolution: int = 48,
                 base_panel: float = 0.2) -> complex:
    """Quadrature of Phi_n(x) (Delta + k^2) phi(x) over R^n, n in {2, 3}.

    phi is a GaussianPolyND-style object (laplacian_plus, restrict_ray,
    support_radius).  The radial integrand r^{n-1} Phi_n is integrable at 0;
    geometric panel refinement toward the origin handles the log/1-over-r
    behavior and uniform panels resolve the e^{ikr} oscillation outward.
    """
    if n not in (2, 3):
        raise ValueError("pde_residual implemented for n in {2, 3}")
    source = phi.laplacian_plus(k * k)
    omegas, wts = unit_sphere_quadrature(n, sphere_resolution)
    profile = radial_profile(n, k)
    r_max = phi.support_radius(1e-16) + 1.0

    def integrand(r):
        pts = r[:, None, None] * omegas[None, :, :]
        flat = pts.reshape(-1, n)
        vals = source.value(flat).reshape(len(r), len(omegas))
        ang = vals @ wts
        return r ** (n - 1) * profile(r) * ang

    inner = geometric_edges(0.0, min(1.0, r_max), 40)[1:]
    value = integrate_panels(integrand, inner, n_nodes=16)
    if r_max > 1.0:
        # panel width tied to the radial wavelength of Phi_n
        width = min(base_panel, math.pi / (2.0 * k))
        value += integrate_panels(integrand, uniform_edges(1.0, r_max, width),
                                  n_nodes=16)
    return value
