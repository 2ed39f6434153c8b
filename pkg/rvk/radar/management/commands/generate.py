from pathlib import Path

from django.core.management import CommandError
from django.core.management.base import BaseCommand, CommandParser

from rvk.radar.exceptions import InvalidSpec
from rvk.radar.frame_io import write_frames, write_truth
from rvk.radar.serializers import load_scene_config
from rvk.radar.synth import generate_sequence

FRAMES_FILE = "frames.csv"
TRUTH_FILE = "truth.csv"


class Command(BaseCommand):
    help = "Generate synthetic radar frames and their ground truth from a TOML scene config."
    requires_system_checks = []

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("scene", type=Path, help="scene config (TOML, schema version 1)")
        parser.add_argument("-o", "--output", type=Path, required=True, help="output directory")

    def handle(self, *args, **options) -> None:
        scene, output = options["scene"], options["output"]
        try:
            spec = load_scene_config(scene)
        except FileNotFoundError as exc:
            raise CommandError(f"{scene}: no such file", returncode=2) from exc
        except InvalidSpec as exc:
            raise CommandError(f"{scene}: {exc}", returncode=2) from exc

        sequence = generate_sequence(spec)
        try:
            output.mkdir(parents=True, exist_ok=True)
            write_frames((frame for frame, _ in sequence), output / FRAMES_FILE)
            write_truth((record for _, truth in sequence for record in truth), output / TRUTH_FILE)
        except OSError as exc:
            raise CommandError(f"cannot write to {output}: {exc}", returncode=3) from exc

        n_points = sum(len(frame) for frame, _ in sequence)
        self.stdout.write(
            self.style.SUCCESS(f"Wrote {len(sequence)} frame(s), {n_points} points, to {output / FRAMES_FILE}")
        )
