"""Optimal valve-closure scheduling for water-hammer suppression."""

import os
import subprocess
import sys

from ._hammerflow import *  # noqa: F401,F403
from ._hammerflow import __doc__  # noqa: F401


def main():
    """Entry point delegating to the native CLI binary."""
    exe = os.path.join(os.path.dirname(__file__), "hammerflow")
    raise SystemExit(subprocess.call([exe] + sys.argv[1:]))
