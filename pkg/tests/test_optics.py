import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vlsvitals.errors import DomainError, FieldOfViewError, ValidationError
from vlsvitals.optics import (
    LambertianChannel,
    lambertian_order,
    received_power_at_position,
    received_power_from_distance,
    received_power_geometric,
)

# mpmath at 50 digits: -ln 2 / ln cos(pi/6)
ORDER_AT_30_DEG = 4.818841679306418
# mpmath at 50 digits: 10**(-11.12) * 0.4**(-3.238)
POWER_AT_40_CM = 1.4741095103107816e-10


class TestLambertianOrder:
    def test_sixty_degrees_is_one(self):
        assert lambertian_order(math.pi / 3) == pytest.approx(1.0, rel=1e-15)

    def test_forty_five_degrees_is_two(self):
        assert lambertian_order(math.pi / 4) == pytest.approx(2.0, rel=1e-15)

    def test_thirty_degrees(self):
        assert lambertian_order(math.pi / 6) == pytest.approx(ORDER_AT_30_DEG, rel=1e-14)

    @pytest.mark.parametrize("angle", [0.0, -0.1, math.pi / 2, 2.0])
    def test_rejects_out_of_range(self, angle):
        with pytest.raises(DomainError):
            lambertian_order(angle)

    @given(st.floats(0.01, 1.5), st.floats(0.01, 1.5))
    def test_grows_as_angle_narrows(self, a1, a2):
        if a1 < a2:
            assert lambertian_order(a1) > lambertian_order(a2) > 0

    def test_channel_caches_order(self):
        ch = LambertianChannel(half_power_semi_angle=0.7)
        assert ch.lambertian_order == pytest.approx(-math.log(2) / math.log(math.cos(0.7)), rel=1e-12)


def unit_channel():
    # n = 1, A_R = pi, P_t = 1, gamma = 2 makes every factor cancel at 1 m.
    return LambertianChannel(
        half_power_semi_angle=math.pi / 3, path_loss_exponent=2.0, detector_area=math.pi, transmit_power=1.0
    )


class TestGeometric:
    def test_unit_at_one_meter(self):
        assert received_power_geometric(unit_channel(), 1.0, 0.0, 0.0) == pytest.approx(1.0, rel=1e-15)

    def test_inverse_square(self):
        assert received_power_geometric(unit_channel(), 2.0, 0.0, 0.0) == pytest.approx(0.25, rel=1e-15)

    def test_fov_boundary_excluded(self):
        ch = unit_channel()
        with pytest.raises(FieldOfViewError):
            received_power_geometric(ch, 1.0, 0.0, ch.half_power_semi_angle)
        assert received_power_geometric(ch, 1.0, 0.0, np.nextafter(ch.half_power_semi_angle, 0)) > 0

    @given(st.floats(0.0, 1.5))
    def test_fov_cutoff(self, theta):
        ch = unit_channel()
        if theta >= ch.half_power_semi_angle:
            with pytest.raises(FieldOfViewError):
                received_power_geometric(ch, 1.0, 0.0, theta)
        else:
            assert received_power_geometric(ch, 1.0, 0.0, theta) > 0

    @pytest.mark.parametrize("d", [0.0, -1.0, math.inf])
    def test_bad_distance(self, d):
        with pytest.raises(DomainError):
            received_power_geometric(unit_channel(), d)

    def test_maximal_on_boresight(self):
        ch = LambertianChannel()
        on = received_power_geometric(ch, 0.5)
        for phi, theta in [(0.2, 0.0), (0.0, 0.2), (0.3, 0.3)]:
            assert received_power_geometric(ch, 0.5, phi, theta) < on

    def test_matches_fitted_law_on_boresight(self):
        ch = LambertianChannel()
        d = np.linspace(0.2, 3.0, 25)
        ratio = received_power_geometric(ch, d) * d**ch.path_loss_exponent
        assert np.allclose(ratio, ratio[0], rtol=1e-12, atol=0)
        assert np.allclose(received_power_geometric(ch, d), received_power_from_distance(ch, d), rtol=1e-12)


class TestFittedLaw:
    def test_one_meter(self):
        assert received_power_from_distance(LambertianChannel(), 1.0) == pytest.approx(10**-11.12, rel=1e-14)

    def test_forty_centimeters(self):
        assert received_power_from_distance(LambertianChannel(), 0.4) == pytest.approx(POWER_AT_40_CM, rel=1e-13)

    def test_unit_constant_inverse_square(self):
        ch = LambertianChannel(path_loss_exponent=2.0, system_constant_db=0.0)
        assert received_power_from_distance(ch, 2.0) == pytest.approx(0.25, rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            received_power_from_distance(LambertianChannel(), np.array([0.5, 0.0]))

    @given(st.floats(1e-3, 100.0), st.floats(1e-3, 100.0), st.floats(1.0, 5.0))
    def test_monotone(self, d1, d2, gamma):
        ch = LambertianChannel(path_loss_exponent=gamma)
        if d1 < d2:
            assert received_power_from_distance(ch, d1) > received_power_from_distance(ch, d2)

    def test_log_log_slope(self):
        ch = LambertianChannel()
        d = np.logspace(-1, 1, 10)
        logp = np.log10(received_power_from_distance(ch, d))
        coef, residual, *_ = np.polyfit(np.log10(d), logp, 1, full=True)
        assert coef[0] == pytest.approx(-ch.path_loss_exponent, rel=1e-12)
        fit = np.polyval(coef, np.log10(d))
        assert np.max(np.abs(fit - logp)) < 1e-10


class TestChannelValidation:
    @pytest.mark.parametrize("kwargs", [
        {"half_power_semi_angle": 0.0},
        {"half_power_semi_angle": math.pi / 2},
        {"path_loss_exponent": 0.0},
        {"detector_area": -1.0},
        {"transmit_power": 0.0},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            LambertianChannel(**kwargs)


def test_position_power_peaks_on_boresight():
    ch = LambertianChannel()
    assert received_power_at_position(ch, 0.0, 0.4) > received_power_at_position(ch, 0.1, 0.4)
    assert received_power_at_position(ch, 0.0, 0.4) > received_power_at_position(ch, 0.0, 0.5)
    with pytest.raises(FieldOfViewError):
        received_power_at_position(ch, 1.0, 0.2)
