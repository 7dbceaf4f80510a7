import math

import mpmath
import pytest

from hotspots.constants import (
    ball_volume,
    dimension_constants,
    log_ball_volume,
    rayleigh_upper_check,
    sw_dimensionless_limit,
    sw_sequence,
)
from hotspots.errors import DomainError


@pytest.mark.parametrize("d, expected", [(2, math.pi), (3, 4 * math.pi / 3), (4, math.pi**2 / 2)])
def test_ball_volume_examples(d, expected):
    assert ball_volume(d) == pytest.approx(expected, rel=1e-12)


def test_ball_volume_against_mpmath():
    for d in [5, 17, 60, 200, 400]:
        ref = mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
        assert ball_volume(d) == pytest.approx(float(ref), rel=1e-12)
        assert log_ball_volume(d) == pytest.approx(float(mpmath.log(ref)), rel=1e-13)


@pytest.mark.parametrize("d", [1, 501, 3.5])
def test_dimension_range(d):
    with pytest.raises(DomainError):
        ball_volume(d)


@pytest.mark.parametrize("d, expected, tol", [(2, 0.5862, 5e-4), (3, 0.439, 1e-3), (4, 0.3602, 1e-3)])
def test_alpha_examples(d, expected, tol):
    assert dimension_constants(d).alpha_d == pytest.approx(expected, abs=tol)


def test_dimension_constants_fields():
    c = dimension_constants(2)
    assert c.alpha_d == pytest.approx(c.p_sq / c.j_first**2, rel=1e-15)
    assert c.sw_coeff == pytest.approx(math.pi * c.p_sq, rel=1e-14)
    assert c.alpha_d_closed_form == 0.587


def test_sw_limit():
    assert sw_dimensionless_limit() == pytest.approx(float(2 * mpmath.e * mpmath.pi), abs=1e-12)
    assert sw_dimensionless_limit() == pytest.approx(17.07947, abs=1e-4)
    assert sw_sequence(2) == pytest.approx(4 * math.pi, rel=1e-14)
    assert sw_sequence(10) < sw_sequence(100) < sw_dimensionless_limit()


def test_constants_invariants_up_to_60():
    prev = None
    for d in range(2, 61):
        c = dimension_constants(d)
        assert 0 < c.alpha_d < 1
        assert c.alpha_d < min(0.587 + 1e-3, c.alpha_d_closed_form)
        assert d + 8 / (d + 6) < c.p_sq < d + 2
        assert c.sw_coeff <= sw_sequence(d) < sw_dimensionless_limit()
        if prev is not None:
            assert c.alpha_d < prev.alpha_d
        prev = c


@pytest.mark.slow
def test_sw_coeff_increasing_to_500():
    values = [dimension_constants(d).sw_coeff for d in range(2, 501)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] < sw_dimensionless_limit()


@pytest.mark.parametrize("d", [2, 3, 5, 10, 50, 200])
def test_rayleigh_identity(d):
    assert rayleigh_upper_check(d) == pytest.approx(d + 2, rel=1e-8)


def test_rayleigh_bounds_root():
    for d in [2, 3, 8, 40]:
        assert dimension_constants(d).p_sq <= rayleigh_upper_check(d)
