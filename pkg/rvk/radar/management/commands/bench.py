from pathlib import Path

from django.conf import settings
from django.core.management import CommandError
from django.core.management.base import BaseCommand, CommandParser

from rvk.radar.bench import format_table, parse_grid, run_bench, write_bench_csv
from rvk.radar.ransac import RansacParams


class Command(BaseCommand):
    help = "Time the parallel kernels against the sequential baselines over a grid of cluster counts."
    requires_system_checks = []

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("-o", "--output", type=Path, required=True, help="bench CSV to write")
        parser.add_argument("--grid", default="default", help='"default" or cells like 8x100,64x150')
        parser.add_argument("--repeats", type=int, default=settings.RVK_BENCH_REPEATS)
        parser.add_argument("--warmup", type=int, default=settings.RVK_BENCH_WARMUP)
        parser.add_argument("--workers", type=int, default=settings.RVK_WORKERS)
        parser.add_argument("--max-trials", type=int, default=settings.RVK_RANSAC_MAX_TRIALS)
        parser.add_argument("--seed", type=int, default=settings.RVK_RNG_SEED)

    def handle(self, *args, **options) -> None:
        try:
            grid = parse_grid(options["grid"])
            params = RansacParams(
                max_trials=options["max_trials"],
                threshold_scale=settings.RVK_RANSAC_THRESHOLD_SCALE,
                rng_seed=options["seed"],
            )
            if options["repeats"] < 1 or options["warmup"] < 0 or options["workers"] < 0:
                raise ValueError("repeats must be >= 1, warmup and workers >= 0")
        except ValueError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        rows = run_bench(
            grid, params, repeats=options["repeats"], warmup=options["warmup"], workers=options["workers"]
        )
        try:
            write_bench_csv(rows, options["output"])
        except OSError as exc:
            raise CommandError(f"cannot write {options['output']}: {exc}", returncode=3) from exc

        self.stdout.write(format_table(rows))
        self.stdout.write(self.style.SUCCESS(f"{len(rows)} grid cell(s) written to {options['output']}"))
