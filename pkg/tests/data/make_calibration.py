"""Freeze unit-Gaussian round-trip peaks for a few grids (run from the repo root)."""
import json
from pathlib import Path

from gftlab.core import GridFunction
from gftlab.radon import calibrate, tangent_chart

CASES = [
    {"n": 2, "dims": [64, 64], "half_width": 4.0, "count": 180},
    {"n": 2, "dims": [128, 128], "half_width": 4.0, "count": 180},
    {"n": 3, "dims": [32, 32, 32], "half_width": 4.0, "count": [16, 32]},
]

out = []
for case in CASES:
    g = GridFunction.zeros(tuple(case["dims"]), case["half_width"])
    count = case["count"] if case["n"] == 2 else tuple(case["count"])
    out.append({**case, "peak": calibrate(g, tangent_chart(case["n"], count))})
Path(__file__).with_name("calibration.json").write_text(json.dumps(out, indent=1) + "\n")
print(out)
