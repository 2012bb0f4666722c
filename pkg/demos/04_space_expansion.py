"""
Walking further than the platform is wide
=========================================

A circle of 1.5 m radius and a 2 m square, both at 0.5 m/s. The walker never
leaves the 0.575 m active radius, yet the virtual path covers several
platform diameters. The CSV written here can be plotted with any tool.
"""

import tempfile
from pathlib import Path

from odtsim.engine import compute_metrics, run
from odtsim.harness.export import export_trace
from odtsim.harness.presets import preset_scenarios

out = Path(tempfile.mkdtemp(prefix="odt-demo-"))
for name in ("circle", "square"):
    trace = run(preset_scenarios(name)[name])
    m = compute_metrics(trace)
    path = export_trace(trace, out / f"{name}.csv")
    print(f"{name}: max local radius {m['max_local_radius']:.3f} m, "
          f"virtual path {m['ve_path_length']:.2f} m, ends at "
          f"({m['final_ve'][0]:+.3f}, {m['final_ve'][2]:+.3f}) -> {path}")
