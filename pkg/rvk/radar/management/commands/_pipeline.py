from pathlib import Path

from django.core.management import CommandError
from django.core.management.base import CommandParser

from rvk.radar.exceptions import InvalidConfig
from rvk.radar.pipeline import EstimationMode, PipelineConfig


def add_pipeline_arguments(parser: CommandParser) -> None:
    parser.add_argument("--config", type=Path, help="dotenv-style file with pipeline parameters")
    parser.add_argument("--mode", choices=[mode.value for mode in EstimationMode])
    parser.add_argument("--seed", type=int, dest="rng_seed", help="key of the RANSAC seed generator")
    parser.add_argument("--workers", type=int, help="worker threads, 0 for one per CPU")
    parser.add_argument("--eps", type=float, help="clustering radius in meters")
    parser.add_argument("--min-pts", type=int)
    parser.add_argument("--max-trials", type=int)
    parser.add_argument("--threshold-scale", type=float)


def pipeline_config(options: dict) -> PipelineConfig:
    """Settings, then the --config file, then explicit flags."""
    try:
        config = PipelineConfig.from_settings()
        if options["config"]:
            config = config.with_file(options["config"])
        return config.override(
            mode=options["mode"],
            rng_seed=options["rng_seed"],
            workers=options["workers"],
            eps=options["eps"],
            min_pts=options["min_pts"],
            max_trials=options["max_trials"],
            threshold_scale=options["threshold_scale"],
        )
    except (InvalidConfig, FileNotFoundError) as exc:
        raise CommandError(str(exc), returncode=2) from exc
