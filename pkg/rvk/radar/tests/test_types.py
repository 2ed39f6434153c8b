import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rvk.radar.exceptions import InvalidFrame, InvalidPoint
from rvk.radar.tests.factories import RadarPointFactory, frame_from_xy
from rvk.radar.types import (
    Cluster,
    Diagnostic,
    InlierMask,
    RadarPoint,
    VelocityEstimate,
    radial_projection,
    wrap_azimuth,
)

speeds = st.floats(min_value=-100, max_value=100)
angles = st.floats(min_value=-math.pi, max_value=math.pi, exclude_min=True)


class TestWrapAzimuth:
    def test_minus_pi_maps_to_pi(self):
        assert wrap_azimuth(-math.pi) == math.pi

    def test_inside_range_is_unchanged(self):
        assert wrap_azimuth(0.5) == 0.5

    @pytest.mark.parametrize("theta", [3 * math.pi, -2.5 * math.pi, 7.0, -100.0])
    def test_result_in_half_open_range(self, theta: float):
        wrapped = wrap_azimuth(theta)
        assert -math.pi < wrapped <= math.pi
        assert math.cos(wrapped) == pytest.approx(math.cos(theta), abs=1e-9)
        assert math.sin(wrapped) == pytest.approx(math.sin(theta), abs=1e-9)


class TestRadialProjection:
    def test_longitudinal_motion_seen_head_on(self):
        assert radial_projection(10.0, 0.0, 0.0) == 10.0

    def test_lateral_motion_seen_sideways(self):
        assert radial_projection(0.0, 5.0, math.pi / 2) == pytest.approx(5.0)

    def test_works_on_arrays(self):
        azimuths = np.array([0.0, math.pi / 2, math.pi])
        np.testing.assert_allclose(radial_projection(2.0, 0.0, azimuths), [2.0, 0.0, -2.0], atol=1e-12)

    @given(
        v=st.tuples(speeds, speeds),
        w=st.tuples(speeds, speeds),
        a=st.floats(min_value=-10, max_value=10),
        b=st.floats(min_value=-10, max_value=10),
        theta=angles,
    )
    def test_linear_in_velocity(self, v, w, a, b, theta):
        combined = radial_projection(a * v[0] + b * w[0], a * v[1] + b * w[1], theta)
        separate = a * radial_projection(*v, theta) + b * radial_projection(*w, theta)
        assert combined == pytest.approx(separate, abs=1e-9)

    @given(v=st.tuples(speeds, speeds), theta=angles)
    def test_bounded_by_speed(self, v, theta):
        assert abs(radial_projection(*v, theta)) <= math.hypot(*v) * (1 + 1e-12) + 1e-300


class TestRadarPoint:
    def test_factory_builds_valid_points(self):
        point = RadarPointFactory()
        assert point.azimuth == math.atan2(point.y, point.x)

    @pytest.mark.parametrize("field", ["x", "y", "z", "doppler", "azimuth"])
    def test_rejects_non_finite(self, field: str):
        values = {"x": 1.0, "y": 0.0, "z": 0.0, "doppler": 0.0, "azimuth": 0.0, field: math.nan}
        with pytest.raises(InvalidPoint):
            RadarPoint(**values)

    def test_azimuth_half_open_range(self):
        RadarPoint(x=-1.0, y=0.0, z=0.0, doppler=0.0, azimuth=math.pi)
        with pytest.raises(InvalidPoint):
            RadarPoint(x=-1.0, y=0.0, z=0.0, doppler=0.0, azimuth=-math.pi)

    def test_invalid_point_is_a_value_error(self):
        with pytest.raises(ValueError):
            RadarPoint(x=math.inf, y=0.0, z=0.0, doppler=0.0, azimuth=0.0)


class TestCluster:
    def test_len(self):
        assert len(Cluster(0, (1, 4, 9))) == 3

    @pytest.mark.parametrize("indices", [(), (3, 3), (4, 2), (-1, 2)])
    def test_rejects_bad_indices(self, indices: tuple[int, ...]):
        with pytest.raises(InvalidFrame):
            Cluster(0, indices)


class TestFrame:
    def test_arrays_follow_point_order(self):
        frame = frame_from_xy([(1.0, 0.0), (0.0, 2.0)], dopplers=[3.0, 4.0])
        np.testing.assert_array_equal(frame.dopplers, [3.0, 4.0])
        np.testing.assert_allclose(frame.azimuths, [0.0, math.pi / 2])
        assert frame.xy.shape == (2, 2)

    def test_arrays_are_read_only(self):
        frame = frame_from_xy([(1.0, 0.0)])
        with pytest.raises(ValueError):
            frame.dopplers[0] = 1.0

    def test_labels_must_match_point_count(self):
        frame = frame_from_xy([(1.0, 0.0), (2.0, 0.0)])
        with pytest.raises(InvalidFrame):
            frame.with_labels([0])

    def test_cluster_ids_must_be_contiguous(self):
        frame = frame_from_xy([(1.0, 0.0), (2.0, 0.0)])
        with pytest.raises(InvalidFrame):
            frame.with_labels([0, 2])

    def test_n_clusters(self):
        frame = frame_from_xy([(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])
        assert frame.n_clusters == 0
        assert frame.with_labels([1, -1, 0]).n_clusters == 2

    def test_label_array_requires_clustering(self):
        with pytest.raises(InvalidFrame):
            frame_from_xy([(1.0, 0.0)]).label_array

    def test_cluster_points(self):
        frame = frame_from_xy([(1.0, 0.0), (2.0, 0.0), (0.0, 3.0)], dopplers=[1.0, 2.0, 3.0])
        points = frame.cluster_points(Cluster(0, (0, 2)))
        np.testing.assert_array_equal(points.dopplers, [1.0, 3.0])
        assert len(points) == 2

    def test_cluster_points_out_of_range(self):
        with pytest.raises(InvalidFrame):
            frame_from_xy([(1.0, 0.0)]).cluster_points(Cluster(0, (0, 1)))


class TestInlierMask:
    def test_count_must_match_mask(self):
        with pytest.raises(ValueError):
            InlierMask(0, np.array([True, False]), 2, 0)

    def test_equality_compares_mask_contents(self):
        a = InlierMask(0, np.array([True, False, True]), 2, 5)
        assert a == InlierMask(0, [True, False, True], 2, 5)
        assert a != InlierMask(0, [True, True, False], 2, 5)
        assert a != InlierMask(0, [True, False, True], 2, 6)


def test_velocity_estimate_speed():
    estimate = VelocityEstimate(0, 3.0, 4.0, math.atan2(4.0, 3.0), 10, True)
    assert estimate.speed == 5.0
    assert estimate.diagnostic is Diagnostic.OK
