"""Radial-zero-set symbols, their partial-fraction weights, quadratic-symbol
pullback reduction, and the spectral-width bound curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .specfun import bessel_j


class IllConditionedRootsError(ValueError):
    """Roots too close for a stable partial-fraction split."""


class NoPositiveRootError(ValueError):
    """Quadratic-symbol reduction found no positive real root."""


class RadialFactor:
    """Smooth factor g of the symbol; must stay away from zero.

    value/derivs take the radius and optionally the direction; radially
    symmetric implementations ignore the direction.
    """

    g_min: float = 1.0
    growth_degree: int = 0

    def value(self, r, omega=None):
        raise NotImplementedError

    def derivs(self, r: float, q: int, omega=None) -> list:
        """[g(r), g'(r), ..., g^(q)(r)] along the radius."""
        raise NotImplementedError


class PolynomialFactor(RadialFactor):
    """g(r omega) = p(r) for a polynomial p with no zeros on r >= 0."""

    def __init__(self, coeffs: Sequence[float], g_min: float | None = None,
                 scan_to: float = 100.0):
        self.poly = Polynomial(list(coeffs))
        self.growth_degree = int(self.poly.degree())
        if g_min is None:
            rs = np.linspace(0.0, scan_to, 4001)
            g_min = float(np.abs(self.poly(rs)).min())
        if g_min <= 0:
            raise ValueError("factor must be bounded away from zero on r >= 0")
        self.g_min = g_min

    def value(self, r, omega=None):
        return self.poly(np.asarray(r, dtype=float))

    def derivs(self, r, q, omega=None):
        out = [self.poly]
        for _ in range(q):
            out.append(out[-1].deriv())
        r = np.asarray(r, dtype=float)
        return [p(r) for p in out]


@dataclass(frozen=True)
class SymbolSpec:
    """Symbol g(xi) * prod_j (|xi| - r_j)^{q_j} with 0 < r_1 < ... < r_N."""

    roots: tuple
    mults: tuple
    g: RadialFactor

    def __post_init__(self):
        roots = tuple(float(r) for r in self.roots)
        mults = tuple(int(q) for q in self.mults)
        if len(roots) != len(mults) or not roots:
            raise ValueError("roots and mults must be nonempty, same length")
        if any(r <= 0 for r in roots):
            raise ValueError("roots must be positive")
        if any(a >= b for a, b in zip(roots, roots[1:])):
            raise ValueError("roots must be strictly increasing")
        if any(q < 1 for q in mults):
            raise ValueError("multiplicities must be >= 1")
        if self.g.g_min <= 0:
            raise ValueError("g must have a positive lower bound")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "mults", mults)

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @property
    def max_mult(self) -> int:
        return max(self.mults)

    def radial_zero_poly(self) -> Polynomial:
        """prod_j (r - r_j)^{q_j} as a polynomial."""
        p = Polynomial([1.0])
        for r, q in zip(self.roots, self.mults):
            p *= Polynomial([-r, 1.0]) ** q
        return p

    def symbol_value(self, r, omega=None):
        r = np.asarray(r, dtype=float)
        out = self.g.value(r, omega) * np.ones_like(r)
        for root, q in zip(self.roots, self.mults):
            out = out * (r - root) ** q
        return out


def helmholtz_symbol(k: float) -> SymbolSpec:
    """k^2 - |xi|^2 = g(|xi|) (|xi| - k) with g(r) = -(r + k)."""
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    return SymbolSpec(roots=(k,), mults=(1,),
                      g=PolynomialFactor([-k, -1.0], g_min=k, scan_to=10 * k))


# ----------------------------------------------------------------------
# partial fractions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PartialFractions:
    """Coefficients c[j][k-1] of sum_{j,k} c_jk (r - r_j)^{-k}, with the probe
    residual of the reconstruction against the product form."""

    roots: tuple
    mults: tuple
    c: tuple          # c[j] is a tuple of length q_j, index k-1
    residual: float

    def coefficient(self, j: int, k: int) -> float:
        return self.c[j][k - 1]

    def reconstruct(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for j, root in enumerate(self.roots):
            for k in range(1, self.mults[j] + 1):
                out = out + self.c[j][k - 1] * (r - root) ** (-float(k))
        return out


def partial_fractions(spec: SymbolSpec, n_probes: int = 100,
                      seed: int = 20111) -> PartialFractions:
    """Taylor-coefficient recursion per root.

    With f_j(r) = prod_{l != j} (r - r_l)^{-q_l} and u = f_j'/f_j the Taylor
    coefficients F_t of f_j at r_j obey (t+1) F_{t+1} = sum_i U_i F_{t-i},
    and c_{j, q_j - s} = F_s.
    """
    roots, mults = spec.roots, spec.mults
    scale = max(abs(r) for r in roots)
    gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]
    if gaps and min(gaps) < 1e-8 * scale:
        raise IllConditionedRootsError(
            f"root gap {min(gaps):.3e} below 1e-8 * scale; refusing")
    coeffs = []
    for j, rj in enumerate(roots):
        others = [(rl, ql) for i, (rl, ql) in enumerate(zip(roots, mults)) if i != j]
        f0 = 1.0
        for rl, ql in others:
            f0 *= (rj - rl) ** (-ql)
        qj = mults[j]
        # U_i = -sum_l q_l (-1)^i / (r_j - r_l)^{i+1}
        U = [-sum(ql * (-1.0) ** i / (rj - rl) ** (i + 1) for rl, ql in others)
             for i in range(qj)]
        F = [f0]
        for t in range(qj - 1):
            F.append(sum(U[i] * F[t - i] for i in range(t + 1)) / (t + 1))
        cj = [0.0] * qj
        for s in range(qj):
            cj[qj - s - 1] = F[s]
        coeffs.append(tuple(cj))
    pf = PartialFractions(roots=roots, mults=mults, c=tuple(coeffs), residual=0.0)
    # probe the reconstruction near the root cluster, avoiding the roots;
    # far away the split form cancels catastrophically by construction, so a
    # far probe would measure conditioning of the representation, not of c
    rng = np.random.default_rng(seed)
    spread = max(1.0, roots[-1] - roots[0])
    lo, hi = roots[0] - spread, roots[-1] + spread
    min_gap = min(gaps) if gaps else spread
    exclusion = 0.1 * min(min_gap, 1.0)
    probes = []
    while len(probes) < n_probes:
        r = float(rng.uniform(lo, hi))
        if min(abs(r - root) for root in roots) > exclusion:
            probes.append(r)
    probes = np.array(probes)
    target = np.ones_like(probes)
    for root, q in zip(roots, mults):
        target = target * (probes - root) ** (-float(q))
    rec = pf.reconstruct(probes)
    residual = float(np.max(np.abs(rec - target) / np.abs(target)))
    if residual > 1e-10:
        raise IllConditionedRootsError(
            f"partial-fraction probe residual {residual:.2e} exceeds 1e-10")
    return PartialFractions(roots=roots, mults=mults, c=tuple(coeffs),
                            residual=residual)


# ----------------------------------------------------------------------
# quadratic-symbol pullback
# ----------------------------------------------------------------------

def reduce_quadratic_symbol(A, b, c, coeffs) -> SymbolSpec:
    """Reduce the symbol sum_j coeffs[j] (xi.A xi + b.xi + c)^j by pullback.

    The pullback turns the symbol into Q(r^2) with
    Q(t) = sum_j coeffs[j] (t - b.A^{-1}b/4 + c)^j; positive real roots of Q
    give the radial zeros, with multiplicities from companion-matrix root
    clustering.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=1e-12, atol=1e-12):
        raise ValueError("A must be symmetric")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("A must be positive definite") from exc
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    gamma = 0.25 * float(b @ np.linalg.solve(A, b)) - c
    # Q(t) = sum_j coeffs[j] (t - gamma)^j
    shifted = Polynomial([-gamma, 1.0])
    Q = Polynomial([0.0])
    power = Polynomial([1.0])
    for cj in coeffs:
        Q = Q + cj * power
        power = power * shifted
    qc = Q.coef
    if np.max(np.abs(qc)) == 0:
        raise NoPositiveRootError("zero polynomial has no positive root")
    troots = np.roots(qc[::-1])  # companion-matrix eigenvalues
    clusters = _cluster_roots(troots, _CLUSTER_REL_TOL)
    scale = max(1.0, max(abs(t) for t, _ in clusters))
    real_tol = _CLUSTER_REL_TOL * scale
    pos = [(t.real, q) for t, q in clusters
           if abs(t.imag) <= real_tol and t.real > real_tol]
    if not pos:
        listing = ", ".join(f"{t:.6g} (x{q})" for t, q in clusters)
        raise NoPositiveRootError(
            f"reduced polynomial has no positive real root; roots in t: {listing}")
    pos.sort()
    radial = [(math.sqrt(t), q) for t, q in pos]
    # remaining factor: lead * prod_pos (r + sqrt(t))^q * prod_rest (r^2 - t)^q
    lead = float(np.real(qc[-1]))
    gpoly = Polynomial([lead])
    for t, q in radial:
        gpoly *= Polynomial([t, 1.0]) ** q
    for t, q in clusters:
        if abs(t.imag) <= real_tol and t.real > real_tol:
            continue
        factor = Polynomial([float(-t.real), 0.0, 1.0])
        if abs(t.imag) > real_tol:
            # conjugate pairs enter once with the real quartic (r^2-t)(r^2-conj t)
            if t.imag < 0:
                continue
            factor = Polynomial([float(abs(t) ** 2), 0.0, -2.0 * float(t.real), 0.0, 1.0])
        gpoly *= factor ** q
    roots = tuple(r for r, _ in radial)
    mults = tuple(q for _, q in radial)
    g = PolynomialFactor(list(gpoly.coef), scan_to=5.0 * (roots[-1] + 1.0))
    return SymbolSpec(roots=roots, mults=mults, g=g)


# companion eigenvalues of a q-fold root scatter by ~eps^(1/q); 3e-5 covers
# multiplicities up to 4 at double precision (distinct roots closer than this
# are merged -- out of scope for desk-scale symbols)
_CLUSTER_REL_TOL = 3e-5


def _cluster_roots(roots, rel_tol: float):
    scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
    remaining = sorted(roots, key=lambda z: (z.real, z.imag))
    clusters = []
    for z in remaining:
        for i, (center, count) in enumerate(clusters):
            if abs(z - center) <= rel_tol * scale:
                clusters[i] = ((center * count + z) / (count + 1), count + 1)
                break
        else:
            clusters.append((z, 1))
    return clusters


# ----------------------------------------------------------------------
# bound curves
# ----------------------------------------------------------------------

MODE_INHOMOGENEOUS = "inhomogeneous"
MODE_PARTICULAR = "particular"
MODE_HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True)
class BoundParams:
    """Circle radius, tempered order and the bound flavor to evaluate."""

    R: float
    d: int
    mode: str = MODE_INHOMOGENEOUS
    cprime: float = 0.0   # additive constant; only the knee shape matters
    crho: float = 1.0     # multiplicative constant

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.d < 0:
            raise ValueError("tempered order must be >= 0")
        if self.mode not in (MODE_INHOMOGENEOUS, MODE_PARTICULAR, MODE_HOMOGENEOUS):
            raise ValueError(f"unknown mode {self.mode!r}")


def _pow(m: int, e: int) -> float:
    if e < 0:
        return 0.0
    if e == 0:
        return 1.0
    return float(abs(m)) ** e


def _factors(m: int, q: int, d: int, mode: str):
    if mode == MODE_INHOMOGENEOUS:
        f1 = max(1.0, _pow(m, q), _pow(m, d))
        branches = [1.0, _pow(m, q - 1)]
        if d >= 1:
            branches.append(_pow(m, d - 1))
        f2 = max(branches)
    elif mode == MODE_PARTICULAR:
        f1 = max(1.0, _pow(m, q))
        f2 = max(1.0, _pow(m, q - 1))
    else:  # homogeneous: no multiplicity dependence
        f1 = max(1.0, _pow(m, d))
        f2 = max(1.0, _pow(m, d - 1)) if d >= 1 else 0.0
    return f1, f2


def bound_curve(spec: SymbolSpec, params: BoundParams, m_range) -> dict[int, float]:
    """Spectral-width bound values over the integer range (inclusive ends).

    Even in m by construction; the selected mode fixes the polynomial factors
    multiplying |J_m(R r_j)| and |J_{m+1}(R r_j)|.
    """
    if isinstance(m_range, tuple):
        ms = range(m_range[0], m_range[1] + 1)
    else:
        ms = m_range
    out: dict[int, float] = {}
    for m in ms:
        total = 0.0
        for root, q in zip(spec.roots, spec.mults):
            f1, f2 = _factors(m, q, params.d, params.mode)
            total += (f1 * abs(bessel_j(abs(m), params.R * root))
                      + f2 * abs(bessel_j(abs(m) + 1, params.R * root)))
        out[m] = params.cprime + params.crho * total
    return out


def helmholtz_bound_exponents(n: int, nu: int = 0) -> int:
    """Tempered order d of the nu-th derivative point-source solution."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if nu < 0:
        raise ValueError("derivative order must be >= 0")
    if n % 2 == 1:
        d = (n + 3) // 2
    elif n == 2:
        d = 2
    elif n == 4:
        d = 3
    else:
        d = 4
    return d + nu
