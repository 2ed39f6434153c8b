import math

import numpy as np
import pytest

from rvk.radar.exceptions import InvalidSpec
from rvk.radar.synth import SceneSpec, generate_frame, generate_sequence, random_scene
from rvk.radar.tests.factories import ObjectSpecFactory, SceneSpecFactory
from rvk.radar.types import radial_projection


class TestObjectSpec:
    @pytest.mark.parametrize(
        "kwargs, field",
        [
            ({"outlier_fraction": 0.5}, "outlier_fraction"),
            ({"outlier_fraction": 0.9}, "outlier_fraction"),
            ({"n_points": 2}, "n_points"),
            ({"extent": (0.0, 2.0)}, "extent"),
            ({"doppler_noise_sigma": -0.1}, "doppler_noise_sigma"),
            ({"outlier_offset_range": (5.0, 2.0)}, "outlier_offset_range"),
            ({"v_x": math.inf}, "non_field_errors"),
        ],
    )
    def test_invalid(self, kwargs, field):
        with pytest.raises(InvalidSpec) as excinfo:
            ObjectSpecFactory(**kwargs)
        assert field in excinfo.value.errors

    def test_outlier_count_is_floored(self):
        assert ObjectSpecFactory(n_points=100, outlier_fraction=0.3).n_outliers == 30
        assert ObjectSpecFactory(n_points=7, outlier_fraction=0.3).n_outliers == 2

    def test_box_moves_with_velocity(self):
        spec = ObjectSpecFactory(center=(10.0, 0.0), extent=(2.0, 4.0), v_x=5.0, v_y=-10.0)
        assert spec.box(0.5) == (11.5, 13.5, -7.0, -3.0)


class TestSceneSpec:
    def test_objects_closer_than_min_gap(self):
        objects = (ObjectSpecFactory(center=(10.0, 0.0)), ObjectSpecFactory(center=(10.0, 4.0)))
        with pytest.raises(InvalidSpec):
            SceneSpec(objects=objects, min_gap=1.5)

    def test_objects_converging_over_the_sequence(self):
        objects = (
            ObjectSpecFactory(center=(10.0, -4.0), v_x=0.0, v_y=10.0),
            ObjectSpecFactory(center=(10.0, 4.0), v_x=0.0, v_y=-10.0),
        )
        SceneSpec(objects=objects, n_frames=1)
        with pytest.raises(InvalidSpec):
            SceneSpec(objects=objects, n_frames=3, frame_interval=0.1)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"field_of_view": (1.0, -1.0)},
            {"field_of_view": (-4.0, 0.0)},
            {"n_noise_points": -1},
            {"n_frames": 0},
            {"frame_interval": 0.0},
            {"max_range": 0.5},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSpec):
            SceneSpecFactory(**kwargs)


class TestGenerateFrame:
    def test_noiseless_dopplers_follow_the_forward_model(self):
        spec = SceneSpec(objects=(ObjectSpecFactory(v_x=7.5, v_y=-3.0, n_points=50),))

        frame, _ = generate_frame(spec)

        np.testing.assert_allclose(frame.dopplers, radial_projection(7.5, -3.0, frame.azimuths), rtol=0, atol=1e-12)

    def test_head_on_point(self):
        assert radial_projection(10.0, 0.0, 0.0) == 10.0

    def test_azimuth_matches_position(self, scene):
        frame, _ = generate_frame(scene)
        np.testing.assert_allclose(frame.azimuths, np.arctan2(frame.xy[:, 1], frame.xy[:, 0]))

    def test_points_fall_inside_their_box(self, scene):
        frame, truth = generate_frame(scene)
        for obj, record in zip(scene.objects, truth):
            x0, x1, y0, y1 = obj.box()
            xy = frame.xy[list(record.point_indices)]
            assert ((xy[:, 0] >= x0) & (xy[:, 0] <= x1) & (xy[:, 1] >= y0) & (xy[:, 1] <= y1)).all()
            z = frame.xyz[list(record.point_indices), 2]
            assert ((z >= 0) & (z <= obj.height)).all()

    def test_outliers_match_recorded_indices(self):
        spec = SceneSpec(objects=(ObjectSpecFactory(n_points=100, outlier_fraction=0.3),), rng_seed=5)

        frame, [record] = generate_frame(spec)

        offsets = frame.dopplers - radial_projection(spec.objects[0].v_x, spec.objects[0].v_y, frame.azimuths)
        assert len(record.outlier_indices) == 30
        assert np.flatnonzero(np.abs(offsets) > 1e-9).tolist() == list(record.outlier_indices)
        assert ((np.abs(offsets[list(record.outlier_indices)]) >= 2.0 - 1e-9)).all()
        assert ((np.abs(offsets[list(record.outlier_indices)]) <= 5.0 + 1e-9)).all()

    def test_outlier_signs_are_mixed(self):
        spec = SceneSpec(objects=(ObjectSpecFactory(n_points=200, outlier_fraction=0.4),), rng_seed=1)
        frame, [record] = generate_frame(spec)
        offsets = frame.dopplers - radial_projection(10.0, -2.0, frame.azimuths)
        signs = np.sign(offsets[list(record.outlier_indices)])
        assert (signs > 0).any() and (signs < 0).any()

    def test_truth_table(self, scene):
        frame, truth = generate_frame(scene)

        assert [record.object_id for record in truth] == [0, 1]
        assert truth[0].point_indices == tuple(range(100))
        assert truth[1].point_indices == tuple(range(100, 200))
        assert (truth[1].v_x, truth[1].v_y) == (-6.0, 3.0)
        assert truth[1].heading == pytest.approx(math.atan2(3.0, -6.0))
        assert len(frame) == 200

    def test_zero_velocity_object_has_no_heading(self):
        spec = SceneSpec(objects=(ObjectSpecFactory(v_x=0.0, v_y=0.0),))
        _, [record] = generate_frame(spec)
        assert record.heading is None

    def test_noise_points_follow_objects(self):
        spec = SceneSpecFactory(n_noise_points=25, field_of_view=(-0.5, 0.5), noise_doppler_limit=3.0)

        frame, truth = generate_frame(spec)

        assert len(frame) == 225
        noise = np.arange(200, 225)
        assert (np.abs(frame.azimuths[noise]) <= 0.5 + 1e-12).all()
        assert (np.abs(frame.dopplers[noise]) <= 3.0).all()
        ranges = np.hypot(frame.xy[noise, 0], frame.xy[noise, 1])
        assert ((ranges >= 1.0 - 1e-9) & (ranges <= spec.max_range + 1e-9)).all()

    def test_deterministic(self, scene):
        first, _ = generate_frame(scene)
        second, _ = generate_frame(scene)
        assert first == second

    def test_seed_changes_the_frame(self):
        assert generate_frame(SceneSpecFactory(rng_seed=1))[0] != generate_frame(SceneSpecFactory(rng_seed=2))[0]


class TestGenerateSequence:
    def test_frames_advance_in_time(self):
        spec = SceneSpecFactory(n_frames=3, frame_interval=0.2)

        sequence = generate_sequence(spec)

        assert [frame.frame_id for frame, _ in sequence] == [0, 1, 2]
        assert [frame.timestamp for frame, _ in sequence] == pytest.approx([0.0, 0.2, 0.4])
        assert all(record.frame_id == 2 for record in sequence[2][1])

    def test_objects_move_by_velocity(self):
        spec = SceneSpecFactory(n_frames=2, frame_interval=0.5)

        (_, _), (frame, truth) = generate_sequence(spec)

        for obj, record in zip(spec.objects, truth):
            x0, x1, y0, y1 = obj.box(0.5)
            xy = frame.xy[list(record.point_indices)]
            assert ((xy[:, 0] >= x0) & (xy[:, 0] <= x1) & (xy[:, 1] >= y0) & (xy[:, 1] <= y1)).all()

    def test_frames_use_distinct_streams(self):
        (first, _), (second, _) = generate_sequence(SceneSpecFactory(n_frames=2, frame_interval=0.1))
        assert first.dopplers.tolist() != second.dopplers.tolist()

    def test_single_frame(self, scene):
        [(frame, truth)] = generate_sequence(scene)
        assert frame == generate_frame(scene)[0]


class TestRandomScene:
    def test_builds_valid_separated_scenes(self, rng):
        for n_objects in range(1, 9):
            spec = random_scene(rng, n_objects=n_objects, outlier_fraction=0.3, doppler_noise_sigma=0.05)
            assert len(spec.objects) == n_objects
            assert all(120 <= obj.n_points <= 200 for obj in spec.objects)
            assert all(8.0 <= math.hypot(obj.v_x, obj.v_y) <= 15.0 for obj in spec.objects)

    def test_too_many_objects(self, rng):
        with pytest.raises(InvalidSpec):
            random_scene(rng, n_objects=9)
