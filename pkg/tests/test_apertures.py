import numpy as np
import pytest

from sarlab.apertures import (ApertureError, aperture_extent, check_sampling,
                              circular_aperture, cylindrical_aperture,
                              irregular_aperture, linear_aperture,
                              planar_aperture, regenerate)
from sarlab.constants import C

LAM_435 = C / 435e9


class TestLinear:
    def test_extent_fig5_config(self):
        a = linear_aperture(128, LAM_435 / 4, 0.1)
        _, dy = aperture_extent(a)
        assert dy == pytest.approx(21.88e-3, rel=1e-3)
        assert dy == pytest.approx(127 * LAM_435 / 4, rel=1e-12)

    def test_single_element(self):
        a = linear_aperture(1, 1e-3, 0.3)
        assert a.n_elements == 1
        assert np.allclose(a.positions[0], [0, 0, 0.3])

    def test_zero_elements_rejected(self):
        with pytest.raises(ApertureError):
            linear_aperture(0, 1e-3, 0.3)
        with pytest.raises(ApertureError):
            linear_aperture(4, -1e-3, 0.3)

    def test_centered(self):
        a = linear_aperture(64, 1e-3, 0.1)
        assert abs(a.positions[:, 1].mean()) < 1e-12 * 63e-3


class TestPlanar:
    def test_two_by_two(self):
        a = planar_aperture(2, 2, 1e-3, 1e-3, 0.2)
        got = {tuple(np.round(p, 9)) for p in a.positions}
        d = 0.5e-3
        want = {(sx * d, sy * d, 0.2) for sx in (-1, 1) for sy in (-1, 1)}
        assert got == want

    def test_nx1_matches_linear(self):
        p = planar_aperture(1, 8, 1e-3, 1e-3, 0.2)
        ln = linear_aperture(8, 1e-3, 0.2)
        assert np.allclose(p.positions, ln.positions)

    def test_extent_256(self):
        a = planar_aperture(256, 256, LAM_435 / 4, LAM_435 / 4, 0.1)
        dx, dy = aperture_extent(a)
        assert dx == pytest.approx(43.94e-3, rel=1e-3)
        assert dy == pytest.approx(dx)

    def test_element_count_and_ordering(self):
        a = planar_aperture(3, 2, 1e-3, 2e-3, 0.1)
        assert a.n_elements == 6
        # x varies fastest within a y row
        assert a.positions[1, 0] > a.positions[0, 0]
        assert a.positions[0, 1] == a.positions[2, 1]


class TestCircular:
    def test_four_points_unit_circle(self):
        a = circular_aperture(4, 1.0)
        # ring lives in the y-z plane
        want = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        for pos, (cy, cz) in zip(a.positions, want):
            assert pos[0] == 0.0
            assert pos[1] == pytest.approx(cy, abs=1e-12)
            assert pos[2] == pytest.approx(cz, abs=1e-12)

    def test_radius_invariant(self):
        a = circular_aperture(257, 0.123)
        r = np.sqrt(a.positions[:, 1] ** 2 + a.positions[:, 2] ** 2)
        assert np.max(np.abs(r - 0.123)) < 1e-9

    def test_angular_step(self):
        a = circular_aperture(1024, 1.0)
        ang = np.arctan2(a.positions[:, 2], a.positions[:, 1])
        step = np.diff(np.unwrap(ang))
        assert np.allclose(step, 2 * np.pi / 1024)


class TestCylindrical:
    def test_count_52_2_example(self):
        a = cylindrical_aperture(1024, 128, 1e-3, 0.2)
        assert a.n_elements == 128 * 1024

    def test_single_ring_angle_reduces_to_vertical_line(self):
        a = cylindrical_aperture(1, 16, 1e-3, 0.25)
        assert np.allclose(a.positions[:, 0], 0.25)
        assert np.allclose(a.positions[:, 2], 0.0)
        assert np.unique(a.positions[:, 1]).size == 16

    def test_radius_invariant(self):
        a = cylindrical_aperture(64, 8, 1e-3, 0.15)
        r = np.sqrt(a.positions[:, 0] ** 2 + a.positions[:, 2] ** 2)
        assert np.max(np.abs(r - 0.15)) < 1e-9

    def test_theta_major_ordering(self):
        a = cylindrical_aperture(4, 3, 1e-3, 0.1)
        # first Ny entries share theta=0 (x=R0, z=0)
        assert np.allclose(a.positions[:3, 0], 0.1)


class TestIrregular:
    def test_order_preserved(self):
        pts = [[0.0, 0.1, 0.2], [-0.3, 0.0, 0.5], [0.2, -0.1, 0.4]]
        a = irregular_aperture(pts)
        assert a.kind == "irregular"
        assert np.array_equal(a.positions, np.asarray(pts))
        assert a.meta == {}

    def test_duplicates_warn(self):
        pts = [[0.0, 0.0, 0.1], [0.0, 0.0, 0.1]]
        with pytest.warns(UserWarning, match="duplicate"):
            a = irregular_aperture(pts)
        assert a.n_elements == 2

    def test_empty_and_nan_rejected(self):
        with pytest.raises(ApertureError):
            irregular_aperture([])
        with pytest.raises(ApertureError):
            irregular_aperture([[np.nan, 0, 0]])


def test_extent_of_single_element():
    assert aperture_extent(linear_aperture(1, 1e-3, 0.1)) == (0.0, 0.0)


@pytest.mark.parametrize("make", [
    lambda: linear_aperture(37, 3.1e-4, 0.21),
    lambda: planar_aperture(9, 11, 2.3e-4, 3.7e-4, 0.15),
    lambda: circular_aperture(101, 0.37),
    lambda: cylindrical_aperture(33, 7, 4.2e-4, 0.29),
])
def test_meta_regenerates_bit_identical(make):
    a = make()
    b = regenerate(a)
    assert a.positions.tobytes() == b.positions.tobytes()


def test_sampling_warning_on_coarse_spacing():
    a = linear_aperture(8, 1e-2, 0.1)
    with pytest.warns(UserWarning, match="exceeds"):
        msgs = check_sampling(a, LAM_435)
    assert msgs
    fine = linear_aperture(8, LAM_435 / 4, 0.1)
    assert check_sampling(fine, LAM_435) == []
