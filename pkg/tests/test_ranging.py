import math

import numpy as np
import pytest

from modes_saa import aoa, ranging
from modes_saa.channel import ArrayGeometry
from modes_saa.exceptions import GeometryError
from modes_saa.ranging import RangeMethod

T_S = 0.1625e-6
LAM = 3e8 / 1090e6


def test_triangular_examples():
    assert ranging.range_triangular(1500.0, 1000.0, 30.0) == pytest.approx(1000.0)
    assert ranging.range_triangular(1500.0, 1000.0, 90.0) == pytest.approx(500.0)
    assert ranging.range_triangular(500.0, 1000.0, -30.0) == pytest.approx(1000.0)


def test_triangular_errors():
    with pytest.raises(GeometryError):
        ranging.range_triangular(1500.0, 1000.0, 0.0)
    with pytest.raises(GeometryError):
        ranging.range_triangular(1500.0, 1000.0, -10.0)
    with pytest.raises(GeometryError):
        ranging.range_triangular(1000.0, 1000.0, 10.0)


def test_rtt_examples():
    assert ranging.range_rtt(41, T_S) == pytest.approx(999.375)
    assert ranging.range_rtt(0, T_S) == 0
    r = [ranging.range_rtt(n, T_S) for n in range(0, 500, 37)]
    assert np.allclose(np.diff(r), 3e8 * T_S * 37 / 2)
    assert ranging.range_rtt(1687, T_S, 270e-6, True) == pytest.approx(3e8 * (1687 * T_S - 270e-6) / 2)
    with pytest.raises(ValueError):
        ranging.range_rtt(-1, T_S)


@pytest.mark.parametrize(
    "crc_ok,theta,h_a,expected",
    [
        (True, 30.0, 1500.0, RangeMethod.TRIANGULAR),
        (False, 30.0, 1500.0, RangeMethod.RTT),
        (True, 0.5, 1500.0, RangeMethod.RTT),
        (True, 1.0, 1500.0, RangeMethod.RTT),
        (True, 30.0, None, RangeMethod.RTT),
        (True, -30.0, 1500.0, RangeMethod.RTT),
    ],
)
def test_select_range_method(crc_ok, theta, h_a, expected):
    est = ranging.select_range(crc_ok, theta, 1.0, 1000.0, h_a, 41, T_S)
    assert est.method is expected
    if expected is RangeMethod.RTT:
        assert est.R_hat == pytest.approx(999.375)
    else:
        assert est.R_hat == pytest.approx(1000.0)


def test_select_range_symmetric_in_elevation_sign():
    up = ranging.select_range(True, 25.0, 1.0, 1000.0, 1400.0, 41, T_S)
    down = ranging.select_range(True, -25.0, 1.0, 1000.0, 600.0, 41, T_S)
    assert up.R_hat == pytest.approx(down.R_hat)


def _theory(theta, h_diff):
    x = aoa.xi(10**0.8, 1.0, 1.0, 4 * math.pi * 2000 / LAM, np.array([1.9e-4, 4.1e-4, 4.1e-4]))
    return ranging.range_rmse_theoretical(theta, 60.0, h_diff, ArrayGeometry(), LAM, x, 2.4e-21, 3)


def test_rmse_scaling():
    assert _theory(20.0, 400.0) == pytest.approx(2 * _theory(20.0, 200.0))
    assert _theory(40.0, 400.0) < _theory(20.0, 400.0)
    with pytest.raises(GeometryError):
        _theory(0.0, 100.0)
