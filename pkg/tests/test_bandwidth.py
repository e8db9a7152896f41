"""Normalization, knee detection, zero brackets, and comparison reports."""

import math

import numpy as np
import pytest

from tracespec.bandwidth import (
    DegenerateCurveError,
    DetectorConfig,
    bessel_zero_bracket,
    compare,
    detect_onset,
    is_pathological,
    normalize,
    predicted_bandwidth,
    write_reports_csv,
)
from tracespec.multiplier import BoundParams, helmholtz_bound_exponents, helmholtz_symbol


def test_normalize_two_point():
    nc = normalize({0: 1.0, 1: 10.0})
    assert nc.values[0] == pytest.approx(-1.0)
    assert nc.values[1] == pytest.approx(1.0)
    assert nc.span_decades == pytest.approx(1.0)


def test_normalize_constant_curve_degenerate():
    nc = normalize({m: 3.7 for m in range(10)})
    assert nc.degenerate
    assert np.all(nc.values == 0.0)


def test_normalize_all_zero_raises():
    with pytest.raises(DegenerateCurveError):
        normalize({m: 0.0 for m in range(10)})


def test_normalize_preserves_argmax_and_order():
    rng = np.random.default_rng(2)
    vals = 10.0 ** rng.uniform(-5, 3, 40)
    nc = normalize({m: v for m, v in enumerate(vals)})
    assert int(np.argmax(nc.values)) == int(np.argmax(vals))
    order_before = np.argsort(vals)
    order_after = np.argsort(nc.values)
    assert np.array_equal(order_before, order_after)


def test_normalize_floor_clipping():
    nc = normalize({0: 1.0, 1: 1e-30, 2: 0.5})
    assert nc.span_decades == pytest.approx(16.0)


def test_detector_synthetic_step():
    # flat at 1 for m <= 30 then one decade per mode down; the window starting
    # just before the corner already sees the drop, so the detected onset sits
    # within the usual +-2 reading slack of the corner itself
    curve = {m: 1.0 for m in range(31)}
    for m in range(31, 60):
        curve[m] = 10.0 ** (-(m - 30))
    onset = detect_onset(normalize(curve))
    assert onset.found
    assert abs(onset.m_star - 30) <= 2


def test_detector_flat_curve_not_found():
    vals = {m: 1.0 + 1e-6 * math.sin(m) for m in range(40)}
    onset = detect_onset(normalize(vals))
    assert not onset.found
    assert onset.m_star == 39


def test_detector_decaying_from_zero():
    curve = {m: 10.0 ** (-0.5 * m) for m in range(30)}
    onset = detect_onset(normalize(curve))
    assert onset.found
    assert onset.m_star == 0


def test_detector_hash_stable():
    assert DetectorConfig().config_hash() == DetectorConfig().config_hash()
    assert (DetectorConfig(slope_threshold=0.1).config_hash()
            != DetectorConfig().config_hash())


# ----------------------------------------------------------------------
# brackets
# ----------------------------------------------------------------------

def test_bracket_paper_integer_case():
    assert bessel_zero_bracket(2 * math.pi * 5.01) == (26, 29)


def test_bracket_paper_half_integer_case():
    assert bessel_zero_bracket(2 * math.pi * 1.01, half_integer=True) == (3, 5)


def test_bracket_small_kR():
    assert bessel_zero_bracket(0.5) == (0, 0)


def test_bracket_monotone_in_kR():
    prev = (0, 0)
    for kR in (0.5, 2.0, 5.0, 12.0, 20.0, 31.5):
        cur = bessel_zero_bracket(kR)
        assert cur[0] >= prev[0] and cur[1] >= prev[1]
        assert cur[0] <= cur[1] + 0  # J-based index first; lo <= hi holds here
        prev = cur


# ----------------------------------------------------------------------
# predicted bandwidths for the documented parameter sets
# ----------------------------------------------------------------------

@pytest.mark.parametrize("n,expected", [(2, 29), (3, 30), (4, 30), (5, 30)])
def test_predicted_near_field_set(n, expected):
    spec = helmholtz_symbol(2 * math.pi)
    params = BoundParams(R=5.01, d=helmholtz_bound_exponents(n, 0))
    onset = predicted_bandwidth(spec, params, 100)
    assert onset.found
    assert onset.m_star == expected


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_predicted_enveloping_set(n):
    spec = helmholtz_symbol(2 * math.pi)
    params = BoundParams(R=5.0, d=helmholtz_bound_exponents(n, 0))
    onset = predicted_bandwidth(spec, params, 100)
    assert onset.found
    assert onset.m_star == 30


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_predicted_high_order_set(n):
    spec = helmholtz_symbol(2 * math.pi)
    params = BoundParams(R=5.0, d=helmholtz_bound_exponents(n, 5))
    onset = predicted_bandwidth(spec, params, 100)
    assert onset.found
    assert onset.m_star == 31


def test_predicted_r3_volume_bound():
    spec = helmholtz_symbol(2 * math.pi)
    params = BoundParams(R=1.01, d=helmholtz_bound_exponents(3, 0))
    onset = predicted_bandwidth(spec, params, 30)
    assert onset.found
    assert onset.m_star == 6


# ----------------------------------------------------------------------
# comparison plumbing
# ----------------------------------------------------------------------

def test_pathological_flag_rule():
    assert is_pathological(7, 0, 5.01, 5.0)
    assert is_pathological(3, 5, 5.0, 5.01)
    assert not is_pathological(7, 0, 10.0, 5.0)
    assert not is_pathological(3, 0, 5.0, 5.01)
    assert not is_pathological(2, 0, None, 5.01)


def test_compare_collects_errors_and_continues(tmp_path):
    from tracespec.bandwidth import Scenario
    from tracespec.trace import spectrum_point_source
    import numpy as np

    def good_spectrum():
        return spectrum_point_source(2, 2.0, np.array([0.4, 0.0]), 0, 0,
                                     1.5, np.array([1.0, 0]), np.array([0, 1.0]), 12)

    def bad_spectrum():
        raise RuntimeError("boom")

    spec = helmholtz_symbol(2.0)
    sc = [
        Scenario(label="ok", n=2, k=2.0, R=1.5, nu=0, source_kind="point",
                 spectrum_fn=good_spectrum, symbol=spec,
                 bound=BoundParams(R=1.5, d=2), m_max=12,
                 bracket_kR=3.0, source_distance=0.4),
        Scenario(label="bad", n=2, k=2.0, R=1.5, nu=0, source_kind="point",
                 spectrum_fn=bad_spectrum, symbol=spec,
                 bound=BoundParams(R=1.5, d=2), m_max=12),
    ]
    reports = compare(sc)
    assert len(reports) == 2
    assert reports[0].error is None
    assert reports[0].bracket is not None
    assert reports[1].error is not None and "boom" in reports[1].error
    # identical detector config on both sides
    assert reports[0].detector_hash == DetectorConfig().config_hash()
    path = tmp_path / "reports.csv"
    write_reports_csv(reports, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "n,k,R,nu,source,predicted,measured,bracket_lo,bracket_hi,flagged"
    assert len(rows) == 3
