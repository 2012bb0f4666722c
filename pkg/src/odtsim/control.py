"""Centering controller and command conditioning.

The shipped controller is proportional with a deadzone: inside ``D_th`` of the
reference point the field is idle, outside it points at the reference with an
amplitude growing linearly in the excess distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol

from .geom import Vec3
from .kinematics import RigConfig, RollerSpeeds, VelocityCommand, inverse_kinematics


@dataclass(frozen=True)
class ControllerInput:
    t: float
    p_ug: Vec3
    p_ref: Vec3


@dataclass(frozen=True)
class ControllerOutput:
    cmd: VelocityCommand
    accel_limit: float  # m/s^2 at the field surface, axis direction


class Controller(Protocol):
    def step(self, inp: ControllerInput, cfg: RigConfig) -> ControllerOutput: ...


def offset_vector(p_ref: Vec3, p_ug: Vec3) -> Vec3:
    """Planar offset from the user to the reference point."""
    return Vec3(p_ref.x - p_ug.x, 0.0, p_ref.z - p_ug.z)


def amplitude(p_off: Vec3, K_p: float, D_th: float) -> float:
    d = p_off.norm()
    if d < D_th:
        return 0.0
    return K_p * (d - D_th)


def control_step(inp: ControllerInput, cfg: RigConfig,
                 accel_limit: float = 12.0) -> ControllerOutput:
    p_off = offset_vector(inp.p_ref, inp.p_ug)
    a = amplitude(p_off, cfg.K_p, cfg.D_th)
    if a <= 0.0:
        # zero command; direction fixed at 0 to avoid 0/0
        return ControllerOutput(VelocityCommand(0.0, 0.0), accel_limit)
    return ControllerOutput(VelocityCommand(math.atan2(p_off.z, p_off.x), a), accel_limit)


class ProportionalDeadzoneController:
    def __init__(self, accel_limit: float = 12.0):
        self.accel_limit = accel_limit

    def step(self, inp: ControllerInput, cfg: RigConfig) -> ControllerOutput:
        return control_step(inp, cfg, self.accel_limit)


CONTROLLERS = {"proportional": ProportionalDeadzoneController}


class SaturationFlags(NamedTuple):
    speed: bool = False
    slew: bool = False


def condition_command(out: ControllerOutput, prev_motor_speeds: RollerSpeeds,
                      cfg: RigConfig, dt: float) -> tuple[RollerSpeeds, SaturationFlags]:
    """Motor shaft speed targets for one control period.

    Each motor is clamped to its rated speed and its change per period to the
    acceleration limit. The clamps act per motor, so a saturated command can
    leave the field direction slightly off; the returned flags record it.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    lam = cfg.gear_ratio
    target = inverse_kinematics(out.cmd, cfg).scaled(lam)
    rated = cfg.rated_shaft_speed
    max_step = lam * out.accel_limit / cfg.roller_radius * dt
    speed_sat = slew_sat = False
    result = []
    for w, prev in ((target.w_r1.z, prev_motor_speeds.w_r1.z),
                    (target.w_r2.z, prev_motor_speeds.w_r2.z)):
        if abs(w) > rated:
            w = math.copysign(rated, w)
            speed_sat = True
        dw = w - prev
        if abs(dw) > max_step:
            w = prev + math.copysign(max_step, dw)
            slew_sat = True
        result.append(w)
    return RollerSpeeds.from_scalars(*result), SaturationFlags(speed_sat, slew_sat)
