from pathlib import Path

from django.core.management import CommandError
from django.core.management.base import BaseCommand, CommandParser

from rvk.radar.exceptions import RadarError
from rvk.radar.frame_io import read_frames, write_estimates, write_inliers
from rvk.radar.pipeline import estimate_frames

from ._pipeline import add_pipeline_arguments, pipeline_config


class Command(BaseCommand):
    help = "Cluster radar frames and estimate the velocity and heading of every cluster."
    requires_system_checks = []

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("frames", type=Path, help="frame CSV")
        parser.add_argument("-o", "--output", type=Path, required=True, help="estimates CSV to write")
        parser.add_argument("--inliers", type=Path, help="also write the per-point inlier subset here")
        add_pipeline_arguments(parser)

    def handle(self, *args, **options) -> None:
        config = pipeline_config(options)
        path = options["frames"]
        try:
            frames = read_frames(path)
        except FileNotFoundError as exc:
            raise CommandError(f"{path}: no such file", returncode=2) from exc
        except (RadarError, OSError) as exc:
            raise CommandError(f"{path}: {exc}", returncode=2) from exc

        results = estimate_frames(frames, config)
        estimates = [estimate for result in results for estimate in result.estimates]
        try:
            write_estimates(estimates, options["output"])
            if options["inliers"]:
                write_inliers(((result.frame, result.inlier_subset) for result in results), options["inliers"])
        except OSError as exc:
            raise CommandError(f"cannot write results: {exc}", returncode=3) from exc

        if len(results) < len(frames):
            self.stderr.write(self.style.WARNING(f"{len(frames) - len(results)} frame(s) skipped, see the log"))
        self.stdout.write(
            self.style.SUCCESS(
                f"{len(estimates)} estimate(s) from {len(results)} frame(s) written to {options['output']}"
            )
        )
