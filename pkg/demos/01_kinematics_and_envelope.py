"""
Roller kinematics and the drive envelope
========================================

Two roller groups with free wheels at +45 and -45 degrees can move the walking
surface in any planar direction. This script walks through the forward and
inverse kinematics and prints the speed and acceleration envelope.
"""

import math

from odtsim.geom import Vec3
from odtsim.kinematics import (
    RigConfig,
    RollerSpeeds,
    VelocityCommand,
    acceleration_envelope,
    forward_kinematics,
    inverse_kinematics,
    max_speed_envelope,
    retained_velocity,
    surface_velocity,
)

cfg = RigConfig()

# A roller spinning at -58.48 rad/s about Z moves its surface at 1 m/s along +X.
v = surface_velocity(Vec3(0, 0, -58.48), cfg)
print("roller surface velocity:", v)

# The free wheels only pass on the part of that velocity along their own axis.
print("retained by a +45 deg wheel:", retained_velocity(v, math.pi / 4))
print("retained by a -45 deg wheel:", retained_velocity(v, -math.pi / 4))

# Both rollers at the same speed: the Z parts cancel and X adds up.
print("field:", forward_kinematics(RollerSpeeds.from_scalars(-58.48, -58.48), cfg))

# Going the other way: which roller speeds give 0.8 m/s at 30 degrees?
cmd = VelocityCommand(math.radians(30), 0.8)
speeds = inverse_kinematics(cmd, cfg)
print("roller speeds (rad/s):", speeds.w_r1.z, speeds.w_r2.z)
print("field check:", forward_kinematics(speeds, cfg), "want", cmd.vector())

# The reachable speed set is a square with vertices on the axes.
for deg in (0, 15, 30, 45, 90):
    print(f"max speed at {deg:2d} deg: {max_speed_envelope(cfg, math.radians(deg)):.3f} m/s")

theo = cfg.replace(eta=0.90, tau_fric=0.0)
print("theoretical acceleration:", acceleration_envelope(theo)["unloaded_start"])
print("with a 100 kg walker:", acceleration_envelope(theo, 100.0)["loaded"])
print("with losses:", acceleration_envelope(cfg))
