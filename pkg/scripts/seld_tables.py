"""Recompute the aggregated SELD error for every reported result row."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from spatial_mixup.metrics import SeldComponents, seld_error  # noqa: E402
from test_acceptance import REPORTED_ROWS  # noqa: E402

print(f"{'row':28s} {'reported':>8s} {'computed':>8s} {'diff':>8s}")
for name, (er, f, le, lr, reported) in REPORTED_ROWS.items():
    value = seld_error(SeldComponents.from_reported(er, f, le, lr))
    print(f"{name:28s} {reported:8.3f} {value:8.4f} {value - reported:+8.4f}")
