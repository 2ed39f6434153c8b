from __future__ import annotations

from typing import Any


class RadarError(Exception):
    """Base class for every error raised by the radar pipeline."""


class InvalidPoint(RadarError, ValueError):
    pass


class InvalidFrame(RadarError, ValueError):
    pass


class MalformedHeader(RadarError, ValueError):
    def __init__(self, found: str, expected: str) -> None:
        super().__init__(f"line 1: expected header {expected!r}, found {found!r}")
        self.found = found
        self.expected = expected


class MalformedRow(RadarError, ValueError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptyFile(RadarError, ValueError):
    pass


class DegenerateSeeds(RadarError):
    """The two seeds share an azimuth; the trial cannot define a line."""


class ClusterTooSmall(RadarError, ValueError):
    def __init__(self, cluster_id: int, size: int, minimum: int) -> None:
        super().__init__(f"cluster {cluster_id} has {size} points, at least {minimum} are required")
        self.cluster_id = cluster_id
        self.size = size
        self.minimum = minimum


class TooFewPoints(RadarError, ValueError):
    pass


class RankDeficient(RadarError):
    """The azimuth spread is too small for the lateral velocity to be observable."""


class ZeroVelocity(RadarError):
    """Heading is undefined for a velocity vector of (numerically) zero length."""


class InvalidSpec(RadarError, ValueError):
    def __init__(self, errors: Any) -> None:
        super().__init__(f"invalid scene spec: {errors}")
        self.errors = errors


class InvalidConfig(RadarError, ValueError):
    """A pipeline config file or override carries an unknown key or a bad value."""
