"""Great-circle traces and their discrete Fourier spectra."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .helmholtz import VolumeSource, point_source_field, volume_source_field

M_START_FLOOR = 256
M_CAP = 2 ** 20
CONVERGENCE_REL_TOL = 1e-8


class TraceSamplingError(RuntimeError):
    """Field evaluation failed at a specific circle angle."""

    def __init__(self, theta: float, original: Exception):
        super().__init__(f"field evaluation failed at theta={theta!r}: {original}")
        self.theta = theta
        self.original = original


@dataclass(frozen=True)
class CircleSpec:
    """Origin-centered circle R(e1 cos t + e2 sin t) with M equal samples."""

    radius: float
    e1: np.ndarray
    e2: np.ndarray
    samples: int

    def __post_init__(self):
        e1 = np.asarray(self.e1, dtype=float)
        e2 = np.asarray(self.e2, dtype=float)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if e1.shape != e2.shape or e1.ndim != 1:
            raise ValueError("e1 and e2 must be equal-length vectors")
        if abs(np.linalg.norm(e1) - 1.0) > 1e-12 or abs(np.linalg.norm(e2) - 1.0) > 1e-12:
            raise ValueError("e1 and e2 must be unit vectors")
        if abs(float(e1 @ e2)) > 1e-12:
            raise ValueError("e1 and e2 must be orthogonal to 1e-12")
        if self.samples < 4 or self.samples % 2 != 0:
            raise ValueError("sample count must be even and >= 4")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def dimension(self) -> int:
        return len(self.e1)

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.samples) / self.samples

    def points(self) -> np.ndarray:
        th = self.angles()
        return (self.radius * np.cos(th)[:, None] * self.e1[None, :]
                + self.radius * np.sin(th)[:, None] * self.e2[None, :])

    def with_samples(self, m: int) -> "CircleSpec":
        return CircleSpec(self.radius, self.e1, self.e2, m)


def sample_trace(field, circle: CircleSpec) -> np.ndarray:
    """Field samples u(x(theta_i)); the field takes an (M, n) point batch."""
    pts = circle.points()
    try:
        vals = np.asarray(field(pts), dtype=complex)
    except Exception:
        # fall back to pointwise evaluation so the failing angle is reported
        th = circle.angles()
        vals = np.empty(circle.samples, dtype=complex)
        for i in range(circle.samples):
            try:
                vals[i] = field(pts[i:i + 1])[0]
            except Exception as exc:
                raise TraceSamplingError(float(th[i]), exc) from exc
    if vals.shape != (circle.samples,):
        raise ValueError("field returned wrong sample shape")
    return vals


@dataclass
class Spectrum:
    """Trace Fourier coefficients for m in [-m_max, m_max] with metadata."""

    ms: np.ndarray
    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)
    converged: bool = False

    @property
    def m_max(self) -> int:
        return int(self.ms[-1])

    def coefficient(self, m: int) -> complex:
        return complex(self.coeffs[m + self.m_max])

    def magnitudes(self) -> dict[int, float]:
        """|U_m| over m >= 0, the side the knee detector consumes."""
        return {int(m): float(abs(self.coefficient(int(m))))
                for m in range(0, self.m_max + 1)}

    def conjugate_symmetry_defect(self) -> float:
        defect = 0.0
        for m in range(1, self.m_max + 1):
            defect = max(defect, abs(self.coefficient(-m)
                                     - np.conj(self.coefficient(m))))
        return defect

    def write_csv(self, path, sidecar_path=None) -> None:
        """Rows m,re,im,abs for m in [0, m_max]; metadata goes to a JSON sidecar."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "re", "im", "abs"])
            for m in range(0, self.m_max + 1):
                c = self.coefficient(m)
                w.writerow([m, repr(c.real), repr(c.imag), repr(abs(c))])
        side = dict(self.meta)
        side["negative_m_by_conjugate_symmetry"] = True
        side["converged"] = self.converged
        side["m_max"] = self.m_max
        if sidecar_path is None:
            sidecar_path = str(path) + ".meta.json"
        with open(sidecar_path, "w") as fh:
            json.dump(side, fh, indent=2, sort_keys=True)
            fh.write("\n")


def fourier_coeffs(samples, m_max: int, meta: dict | None = None) -> Spectrum:
    """U_m = (2 pi / M) sum_i e^{-i m theta_i} u_i (trapezoid; spectral for
    smooth periodic traces)."""
    samples = np.asarray(samples, dtype=complex)
    M = len(samples)
    if M < 4 * m_max:
        raise ValueError(f"need M >= 4 m_max, got M={M}, m_max={m_max}")
    th = 2.0 * np.pi * np.arange(M) / M
    ms = np.arange(-m_max, m_max + 1)
    phases = np.exp(-1j * np.outer(ms, th))
    coeffs = (2.0 * np.pi / M) * (phases @ samples)
    return Spectrum(ms=ms, coeffs=coeffs, meta=dict(meta or {}))


def _auto_spectrum(field, circle_radius, e1, e2, m_max, meta,
                   m_start=None) -> Spectrum:
    M = int(m_start) if m_start else max(M_START_FLOOR, 8 * m_max)
    if M % 2:
        M += 1
    prev = None
    while True:
        circle = CircleSpec(circle_radius, e1, e2, M)
        spec = fourier_coeffs(sample_trace(field, circle), m_max, meta)
        if prev is not None:
            peak = float(np.max(np.abs(spec.coeffs)))
            if np.max(np.abs(spec.coeffs - prev.coeffs)) <= CONVERGENCE_REL_TOL * peak:
                spec.converged = True
                spec.meta["samples"] = M
                return spec
        if 2 * M > M_CAP:
            spec.converged = False
            spec.meta["samples"] = M
            return spec
        prev = spec
        M *= 2


def spectrum_point_source(n: int, k: float, y, j: int, nu: int,
                          circle_radius: float, e1, e2, m_max: int,
                          m_start: int | None = None) -> Spectrum:
    """Trace spectrum of the nu-th derivative point source; doubles the
    sample count until the retained coefficients settle."""
    y = np.asarray(y, dtype=float)
    meta = {
        "n": n, "k": k, "R": circle_radius, "m_max": m_max,
        "source": {"kind": "point", "y": [float(v) for v in y],
                   "axis": int(j), "order": int(nu)},
    }

    def field(pts):
        return point_source_field(n, k, y, j, nu, pts)

    return _auto_spectrum(field, circle_radius, e1, e2, m_max, meta, m_start)


def spectrum_volume_source(src: VolumeSource, k: float, circle_radius: float,
                           e1, e2, m_max: int,
                           m_start: int | None = None) -> Spectrum:
    """Trace spectrum of a piecewise-constant volume source."""
    meta = {
        "n": src.n, "k": k, "R": circle_radius, "m_max": m_max,
        "source": {"kind": "volume",
                   "cells": [{"center": list(c.center),
                              "half_widths": list(c.half_widths),
                              "amplitude": [c.amplitude.real, c.amplitude.imag]}
                             for c in src.cells]},
    }
    if not src.cells:
        ms = np.arange(-m_max, m_max + 1)
        return Spectrum(ms=ms, coeffs=np.zeros(len(ms), dtype=complex),
                        meta=meta, converged=True)

    def field(pts):
        return volume_source_field(src, k, pts)

    return _auto_spectrum(field, circle_radius, e1, e2, m_max, meta, m_start)


def plane_wave_field(a: float, direction):
    """x -> e^{i a x.e}; the closed-form spectrum oracle lives in the tests."""
    direction = np.asarray(direction, dtype=float)

    def field(pts):
        return np.exp(1j * a * (np.atleast_2d(pts) @ direction))

    return field
