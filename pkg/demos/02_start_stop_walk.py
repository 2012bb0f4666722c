"""
A start-stop walk through the closed loop
=========================================

The walker accelerates to 0.5 m/s along X, keeps walking for a while, then
stops. The controller keeps them near the center by moving the surface
against them. Afterwards the surface carries them back into the dead zone.
"""

from odtsim.engine import (
    compute_metrics,
    measure_scene_latency,
    measure_working_delay,
    run,
    stage_boundaries,
)
from odtsim.harness.presets import startstop_scenario

scenario = startstop_scenario("x")
trace = run(scenario)

# While walking steadily, the offset settles where the controller's command
# matches the walking speed: D_th + v / K_p.
rec = next(r for r in trace.records if abs(r.t - 4.0) < 1e-9)
print(f"steady offset {rec.D_rm.norm():.4f} m, field velocity {rec.ovf_velocity.x:+.4f} m/s")

# The reconstructed distance trails the walker's own by the sensing latency.
print(f"scene latency {measure_scene_latency(trace) * 1e3:.1f} ms")
print(f"working delay {measure_working_delay(trace):.2f} s")

for b in stage_boundaries(trace):
    print(f"{b['stage']:>16}  {b['start']:5.2f} .. {b['end']:5.2f} s")

m = compute_metrics(trace)
print("largest distance from center:", round(m["max_local_radius"], 4), "m")
