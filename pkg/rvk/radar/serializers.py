"""
Validation of declarative scene configs (TOML, schema version 1).
"""
from __future__ import annotations

import math
import tomllib
from pathlib import Path
from typing import Any

from django.conf import settings
from rest_framework import serializers

from .clustering import MIN_CLUSTER_SIZE
from .exceptions import InvalidSpec
from .synth import ObjectSpec, SceneSpec

SCHEMA_VERSION = 1


def _pair(**kwargs: Any) -> serializers.ListField:
    return serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2, **kwargs)


class ObjectSpecSerializer(serializers.Serializer):
    center = _pair()
    extent = _pair()
    velocity = _pair()
    n_points = serializers.IntegerField(min_value=MIN_CLUSTER_SIZE)
    outlier_fraction = serializers.FloatField(min_value=0.0, default=0.0)
    doppler_noise_sigma = serializers.FloatField(min_value=0.0, default=0.0)
    outlier_offset_range = _pair(default=[2.0, 5.0])
    height = serializers.FloatField(min_value=0.0, default=1.5)

    def validate_extent(self, value: list[float]) -> list[float]:
        if not all(v > 0 for v in value):
            raise serializers.ValidationError("extent must be positive along both axes")
        return value

    def validate_outlier_fraction(self, value: float) -> float:
        # RANSAC relies on the clean points being the majority.
        if value >= 0.5:
            raise serializers.ValidationError("outlier_fraction must be below 0.5")
        return value

    def validate_outlier_offset_range(self, value: list[float]) -> list[float]:
        low, high = value
        if not 0 <= low <= high:
            raise serializers.ValidationError("expected 0 <= min <= max")
        return value

    def to_spec(self, data: dict[str, Any]) -> ObjectSpec:
        return ObjectSpec(
            center=tuple(data["center"]),
            extent=tuple(data["extent"]),
            v_x=data["velocity"][0],
            v_y=data["velocity"][1],
            n_points=data["n_points"],
            outlier_fraction=data["outlier_fraction"],
            doppler_noise_sigma=data["doppler_noise_sigma"],
            outlier_offset_range=tuple(data["outlier_offset_range"]),
            height=data["height"],
        )


class SceneSpecSerializer(serializers.Serializer):
    version = serializers.IntegerField()
    rng_seed = serializers.IntegerField(default=0)
    n_noise_points = serializers.IntegerField(min_value=0, default=0)
    field_of_view = _pair(default=[-math.pi / 2, math.pi / 2])
    max_range = serializers.FloatField(default=60.0)
    noise_doppler_limit = serializers.FloatField(min_value=0.0, default=10.0)
    min_gap = serializers.FloatField(min_value=0.0, required=False)
    n_frames = serializers.IntegerField(min_value=1, default=1)
    frame_interval = serializers.FloatField(default=0.1)
    objects = ObjectSpecSerializer(many=True)

    def validate_version(self, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"unsupported schema version {value}, expected {SCHEMA_VERSION}")
        return value

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        try:
            attrs["spec"] = self._build(attrs)
        except InvalidSpec as exc:
            raise serializers.ValidationError(exc.errors) from exc
        return attrs

    def _build(self, attrs: dict[str, Any]) -> SceneSpec:
        object_serializer = ObjectSpecSerializer()
        return SceneSpec(
            objects=tuple(object_serializer.to_spec(obj) for obj in attrs["objects"]),
            n_noise_points=attrs["n_noise_points"],
            field_of_view=tuple(attrs["field_of_view"]),
            rng_seed=attrs["rng_seed"],
            max_range=attrs["max_range"],
            noise_doppler_limit=attrs["noise_doppler_limit"],
            min_gap=attrs.get("min_gap", settings.RVK_CLUSTER_EPS),
            n_frames=attrs["n_frames"],
            frame_interval=attrs["frame_interval"],
            version=attrs["version"],
        )

    def create(self, validated_data: dict[str, Any]) -> SceneSpec:
        return validated_data["spec"]


def load_scene_config(path: Path | str) -> SceneSpec:
    """Parse and validate a scene config file; every problem surfaces as InvalidSpec."""
    try:
        with Path(path).open("rb") as handle:
            document = tomllib.load(handle)
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise InvalidSpec({"non_field_errors": [f"{path}: {exc}"]}) from exc
    serializer = SceneSpecSerializer(data=document)
    if not serializer.is_valid():
        raise InvalidSpec(serializer.errors)
    return serializer.save()
