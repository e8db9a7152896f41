"""Regularized one-dimensional distributions and the explicit
fundamental-solution functional of a radial-zero-set symbol.

The kernel pieces are the analytically-continued power integrals
I_{a,rho}(phi) = int_0^rho r^a phi(r) dr, the finite-cutoff distributions
r_{+-,rho}^{-k} built from their pole structure, their translates, and the
functional that combines them with the partial-fraction weights of the
symbol.  Acting that functional on p*phi must reproduce int phi; the
residual of that identity is the module's end-to-end check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .multiplier import SymbolSpec, partial_fractions
from .quadrature import integrate_log_singular, integrate_panels, uniform_edges, \
    geometric_edges, unit_sphere_quadrature
from .testfun import GaussianPoly1D, Reflected1D, Shifted1D, TestFunction1D

TAYLOR_TERMS = 12


class PoleError(ValueError):
    """The exponent sits on a pole of a -> I_{a,rho}; carries the residue."""

    def __init__(self, a, residue):
        super().__init__(f"a={a} is a pole; residue {residue}")
        self.a = a
        self.residue = residue


class DerivativeOrderError(ValueError):
    """Test function does not expose enough derivatives."""


@dataclass
class DistributionAction:
    """Action value with a quadrature error estimate and a per-term breakdown."""

    value: complex
    error_estimate: float
    parts: dict = field(default_factory=dict)


class _DerivShift(TestFunction1D):
    """phi^{(base_order)} as a test function in its own right."""

    def __init__(self, base: TestFunction1D, base_order: int):
        self.base = base
        self.base_order = base_order
        self.max_order = base.max_order - base_order

    def value(self, r):
        return self.base.deriv(self.base_order, r)

    def deriv(self, q, r):
        return self.base.deriv(self.base_order + q, r)

    def support_radius(self, tol: float = 1e-14) -> float:
        return self.base.support_radius(tol)


def _upper_limit(phi: TestFunction1D, rho: float) -> float:
    if math.isinf(rho):
        return phi.support_radius(1e-15)
    return min(rho, phi.support_radius(1e-15))


def i_a_rho(a: complex, rho: float, phi: TestFunction1D, k: int = 0) -> complex:
    """I_{a,rho}(phi) = int_0^rho r^a phi(r) dr, continued k integrations by
    parts to the left of Re a = -1.

    Requires Re a > -1 - k and a off the poles {-1, ..., -k}; at a pole the
    raised error carries the residue phi^{(k-1)}(0)/(k-1)!.
    """
    a = complex(a)
    if k < 0:
        raise ValueError("continuation depth must be >= 0")
    for pole in range(1, k + 1):
        if a == -pole:
            residue = complex(phi.deriv(pole - 1, 0.0)) / math.factorial(pole - 1)
            raise PoleError(a, residue)
    if a.real <= -1.0 - k:
        raise ValueError(f"Re a = {a.real} needs continuation depth > {k}")
    if k == 0:
        if a.real <= -1.0:
            raise ValueError("Re a <= -1 requires a positive continuation depth")
        return _i_direct(a, rho, phi)
    # requested depth is honored even on the overlap strip Re a > -1, where
    # the continued and direct routes must agree
    if getattr(phi, "max_order", 0) < k:
        raise DerivativeOrderError(f"need {k} derivatives of the test function")
    # I_{a,rho}(phi) = (-1)^k I_{a+k,rho}(phi^{(k)}) / prod_{l=0}^{k-1}(a+k-l)
    #   + sum_{j=0}^{k-1} (-1)^j phi^{(j)}(rho) rho^{a+j+1}
    #                     / prod_{l=k-j-1}^{k-1}(a+k-l)
    denom = 1.0 + 0.0j
    for ell in range(0, k):
        denom *= (a + k - ell)
    val = (-1.0) ** k * _i_direct(a + k, rho, _DerivShift(phi, k)) / denom
    if not math.isinf(rho):
        for j in range(0, k):
            prod = 1.0 + 0.0j
            for ell in range(k - j - 1, k):
                prod *= (a + k - ell)
            val += (-1.0) ** j * complex(phi.deriv(j, rho)) \
                * rho ** (a + j + 1) / prod
    return val


def _i_direct(a: complex, rho: float, phi: TestFunction1D) -> complex:
    """Direct integral for Re a > -1: exact Taylor part at 0 + smooth rest."""
    upper = _upper_limit(phi, rho)
    delta = min(1.0, upper)
    # analytic piece: sum phi^(t)(0)/t! * delta^{a+t+1} / (a+t+1)
    val = 0.0 + 0.0j
    tcoef = []
    for t in range(TAYLOR_TERMS):
        c = complex(phi.deriv(t, 0.0)) / math.factorial(t)
        tcoef.append(c)
        val += c * delta ** (a + t + 1) / (a + t + 1)

    def remainder(r):
        arr = np.asarray(phi.value(r), dtype=complex).copy()
        for t, c in enumerate(tcoef):
            arr -= c * r ** t
        return r ** a * arr

    # remainder vanishes like r^{Re a + TAYLOR_TERMS}; geometric panels to 0
    edges = geometric_edges(0.0, delta, 40)[1:]
    val += integrate_panels(remainder, edges, n_nodes=12)
    if upper > delta:
        def smooth(r):
            return r ** a * np.asarray(phi.value(r), dtype=complex)
        val += integrate_panels(smooth, uniform_edges(delta, upper, 0.5), n_nodes=20)
    return val


def _harmonic(k: int) -> float:
    return sum(1.0 / nu for nu in range(1, k))


def r_plus_action(k: int, rho: float, phi: TestFunction1D,
                  n_nodes: int = 16) -> DistributionAction:
    """Action of r_{+,rho}^{-k}: log-weighted integral of phi^{(k)}, the
    harmonic-number multiple of phi^{(k-1)}(0), and (for finite rho) the
    boundary sum; at rho = inf the boundary sum vanishes identically."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if getattr(phi, "max_order", 0) < k:
        raise DerivativeOrderError(f"need {k} derivatives of the test function")
    fact = math.factorial(k - 1)
    upper = _upper_limit(phi, rho)

    def dk(r):
        return np.asarray(phi.deriv(k, r), dtype=complex)

    log_part = -integrate_log_singular(dk, upper, n_nodes=n_nodes) / fact
    log_part_fine = -integrate_log_singular(dk, upper, n_nodes=2 * n_nodes) / fact
    harm_part = complex(phi.deriv(k - 1, 0.0)) * _harmonic(k) / fact
    boundary = 0.0 + 0.0j
    if not math.isinf(rho):
        for j in range(0, k - 1):
            boundary -= complex(phi.deriv(j, rho)) * rho ** (-k + j + 1) \
                * math.factorial(k - j - 2) / fact
    value = log_part_fine + harm_part + boundary
    return DistributionAction(
        value=value,
        error_estimate=abs(log_part_fine - log_part),
        parts={"log_integral": log_part_fine, "harmonic_term": harm_part,
               "boundary_sum": boundary, "delta_part": 0.0 + 0.0j})


def r_minus_action(k: int, rho: float, phi: TestFunction1D,
                   n_nodes: int = 16) -> DistributionAction:
    """r_{-,rho}^{-k}(phi) = r_{+,rho}^{-k}(phi(-.)) exactly."""
    return r_plus_action(k, rho, Reflected1D(phi), n_nodes=n_nodes)


def translated_action(k: int, rho: float, b: float, sign: str,
                      phi: TestFunction1D, n_nodes: int = 16) -> DistributionAction:
    """Action of (r - b)_{+-,rho}^{-k} on phi, i.e. the untranslated
    distribution acting on phi(. + b)."""
    shifted = Shifted1D(phi, b)
    if sign in ("+", "plus"):
        return r_plus_action(k, rho, shifted, n_nodes=n_nodes)
    if sign in ("-", "minus"):
        return r_minus_action(k, rho, shifted, n_nodes=n_nodes)
    raise ValueError("sign must be '+' or '-'")


# ----------------------------------------------------------------------
# sphere reduction and the fundamental-solution functional
# ----------------------------------------------------------------------

def _reciprocal_derivs(gd):
    """Derivatives of 1/g from derivatives of g (arrays ok):
    h_m = -(sum_{i=1}^m C(m,i) g_i h_{m-i}) / g_0."""
    h = [1.0 / np.asarray(gd[0], dtype=float)]
    for m in range(1, len(gd)):
        acc = np.zeros_like(h[0])
        for i in range(1, m + 1):
            acc = acc + math.comb(m, i) * np.asarray(gd[i], dtype=float) * h[m - i]
        h.append(-acc / np.asarray(gd[0], dtype=float))
    return h


class SphereReduced1D(TestFunction1D):
    """r -> sum_i w_i r^{p} phi(r omega_i) / g(r omega_i) with p = n-1 or 0.

    Restrictions of a Gaussian-polynomial test function along rays are exact
    1D Gaussians, so all r-derivatives pass through the quadrature sign
    analytically; only the 1/g factor needs the Leibniz split.
    """

    def __init__(self, phi_nd, gfactor, n: int, radial_power: int,
                 resolution: int = 48):
        omegas, weights = unit_sphere_quadrature(n, resolution)
        self.gfactor = gfactor
        self.omegas = omegas
        self.weights = weights
        rays = []
        for omega in omegas:
            ray = phi_nd.restrict_ray(omega)
            if radial_power:
                ray = GaussianPoly1D(ray.poly * _monomial(radial_power),
                                     ray.a, ray.center)
            rays.append(ray)
        self.rays = rays
        self.max_order = min(getattr(phi_nd, "max_order", 64), 64)
        self._phi_nd = phi_nd

    def value(self, r):
        return self.deriv(0, r)

    def deriv(self, q, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        rr = np.atleast_1d(r)
        out = np.zeros(rr.shape, dtype=complex)
        for omega, w, ray in zip(self.omegas, self.weights, self.rays):
            gd = self.gfactor.derivs(rr, q, omega)
            hd = _reciprocal_derivs(gd)
            acc = np.zeros(rr.shape, dtype=complex)
            for t in range(q + 1):
                acc += math.comb(q, t) * ray.deriv(t, rr) * hd[q - t]
            out += w * acc
        return complex(out[0]) if scalar else out

    def support_radius(self, tol: float = 1e-14) -> float:
        return self._phi_nd.support_radius(tol)


def _monomial(p: int):
    from numpy.polynomial import Polynomial
    return Polynomial([0.0] * p + [1.0])


class SymbolScaledND:
    """(p phi)(x) for the radial-zero-set symbol p; stays in the
    polynomial x Gaussian family along every ray."""

    def __init__(self, phi_nd, spec: SymbolSpec):
        self.phi_nd = phi_nd
        self.spec = spec
        self.max_order = getattr(phi_nd, "max_order", 64)

    def restrict_ray(self, omega) -> GaussianPoly1D:
        ray = self.phi_nd.restrict_ray(omega)
        zero_poly = self.spec.radial_zero_poly()
        gpoly = getattr(self.spec.g, "poly", None)
        if gpoly is None:
            raise DerivativeOrderError(
                "symbol factor must be polynomial to scale a test function")
        return GaussianPoly1D(ray.poly * zero_poly * gpoly, ray.a, ray.center)

    def support_radius(self, tol: float = 1e-14) -> float:
        return self.phi_nd.support_radius(tol)


def frak_p_inverse_action(spec: SymbolSpec, n: int, phi_nd,
                          resolution: int = 48,
                          n_nodes: int = 16) -> DistributionAction:
    """The fundamental-solution functional: translated one-sided actions with
    partial-fraction weights plus the delta correction for q_j >= n."""
    if n not in (2, 3):
        raise ValueError("verification scale covers n in {2, 3}")
    need = spec.max_mult + n
    if getattr(phi_nd, "max_order", 0) < need:
        raise DerivativeOrderError(
            f"test function must expose at least {need} derivatives")
    pf = partial_fractions(spec)
    psi = SphereReduced1D(phi_nd, spec.g, n, radial_power=n - 1,
                          resolution=resolution)
    value = 0.0 + 0.0j
    est = 0.0
    onesided = 0.0 + 0.0j
    for j, (root, qj) in enumerate(zip(spec.roots, spec.mults)):
        for k in range(1, qj + 1):
            cjk = pf.coefficient(j, k)
            plus = translated_action(k, math.inf, root, "+", psi, n_nodes)
            minus = translated_action(k, root, root, "-", psi, n_nodes)
            onesided += cjk * (plus.value + (-1.0) ** k * minus.value)
            est += abs(cjk) * (plus.error_estimate + minus.error_estimate)
    value += onesided
    delta_part = 0.0 + 0.0j
    if spec.max_mult >= n:
        psi0 = SphereReduced1D(phi_nd, spec.g, n, radial_power=0,
                               resolution=resolution)
        for j, (root, qj) in enumerate(zip(spec.roots, spec.mults)):
            for k in range(n, qj + 1):
                cjk = pf.coefficient(j, k)
                # delta_0^{(k-n)} brings (-1)^{k-n} d^{k-n}, cancelling the
                # alternating factor in the weight
                delta_part -= cjk * math.log(root) / math.factorial(k - n) \
                    * complex(psi0.deriv(k - n, 0.0))
    value += delta_part
    return DistributionAction(
        value=value, error_estimate=est,
        parts={"one_sided_sum": onesided, "delta_part": delta_part})


def verify_multiplier_identity(spec: SymbolSpec, n: int, phi_nd,
                               resolution: int = 48) -> float:
    """|functional(p phi) - int phi|; the identity makes this pure quadrature
    noise for admissible symbols."""
    action = frak_p_inverse_action(spec, n, SymbolScaledND(phi_nd, spec),
                                   resolution=resolution)
    rhs = complex(phi_nd.integral())
    return abs(action.value - rhs)
