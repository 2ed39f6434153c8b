from pathlib import Path

from django.conf import settings
from django.core.management import CommandError
from django.core.management.base import BaseCommand, CommandParser

from rvk.radar.bench import run_robustness, summarize_robustness, write_robustness_csv
from rvk.radar.exceptions import InvalidSpec

from ._pipeline import add_pipeline_arguments, pipeline_config


class Command(BaseCommand):
    help = "Compare RANSAC + least squares with least squares alone on randomized scenes with outliers."
    requires_system_checks = []

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("-o", "--output", type=Path, required=True, help="per-object CSV to write")
        parser.add_argument("--scenes", type=int, default=50)
        parser.add_argument("--scene-seed", type=int, default=settings.RVK_RNG_SEED)
        parser.add_argument("--outlier-fraction", type=float, default=0.3)
        parser.add_argument("--noise-sigma", type=float, default=0.05, help="doppler noise in m/s")
        add_pipeline_arguments(parser)

    def handle(self, *args, **options) -> None:
        config = pipeline_config(options)
        if options["scenes"] < 1:
            raise CommandError("--scenes must be at least 1", returncode=2)
        try:
            rows = run_robustness(
                options["scenes"],
                config,
                seed=options["scene_seed"],
                outlier_fraction=options["outlier_fraction"],
                doppler_noise_sigma=options["noise_sigma"],
            )
        except InvalidSpec as exc:
            raise CommandError(str(exc), returncode=2) from exc
        try:
            write_robustness_csv(rows, options["output"])
        except OSError as exc:
            raise CommandError(f"cannot write {options['output']}: {exc}", returncode=3) from exc

        summary = summarize_robustness(rows)
        self.stdout.write(
            f"objects: {summary.n_objects}\n"
            f"median speed error, RANSAC + LSQ: {summary.ransac_median_speed_err:.4f} m/s\n"
            f"median speed error, LSQ only:     {summary.lsq_median_speed_err:.4f} m/s\n"
            f"within tolerance (RANSAC + LSQ):  {100 * summary.ransac_pass_rate:.1f}%"
        )
        self.stdout.write(self.style.SUCCESS(f"{len(rows)} row(s) written to {options['output']}"))
