#!/usr/bin/env python3
"""Run the acceptance gate and show the per-criterion pass/fail lines."""

import subprocess
import sys
from pathlib import Path

if __name__ == "__main__":
    root = Path(__file__).resolve().parent.parent
    cmd = [sys.executable, "-m", "pytest", str(root / "tests" / "test_acceptance.py"),
           "-q", "-s", *sys.argv[1:]]
    raise SystemExit(subprocess.call(cmd, cwd=root))
