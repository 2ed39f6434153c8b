import os
import sys


def main() -> None:
    """Entry point of the ``rvk`` console script: ``rvk generate|estimate|bench|robustness ...``."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.production")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError("Couldn't import Django. Install the requirements with `pip install -e .` first.") from exc

    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
