#!/usr/bin/env python
"""Development entry point: the ``rvk`` commands with ``config.settings.local``."""
import os

if __name__ == "__main__":
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")

    from rvk.cli import main

    main()
