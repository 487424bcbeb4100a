#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest, one PASS/FAIL line each."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from tests.test_acceptance import main

if __name__ == "__main__":
    raise SystemExit(main())
