#!/usr/bin/env python3
"""Run the bundled corpus and print the per-case table.

Equivalent to: patcheq corpus corpus/ --jobs 4
"""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patcheq.cli import main  # noqa: E402

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--jobs", "4"]
    sys.exit(main(["corpus", str(REPO / "corpus")] + argv))
