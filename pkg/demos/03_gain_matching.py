"""
Why the two gains must match
============================

Physical distance is reconstructed as beta2 * D_rm - beta1 * D_ovf. During the
carry-back after a stop, the body moves with the surface, so D_rm and D_ovf
change by the same amount. Only with beta1 == beta2 does the scene stay still.
"""

from odtsim.engine import measure_ve_drift
from odtsim.harness.presets import run_preset

result = run_preset("gain-sweep")
for key, trace in sorted(result.runs.items()):
    drift = measure_ve_drift(trace)
    if abs(drift) <= 1e-3:
        verdict = "scene stops with the walker"
    elif drift > 0:
        verdict = "scene keeps sliding forward"
    else:
        verdict = "scene slides backward"
    print(f"{key:>10}: drift {drift * 1e3:+8.2f} mm  ({verdict})")
