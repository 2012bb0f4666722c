"""Velocity-field kinematics of the mirror-symmetric 45 degree spiral rollers.

Each roller type turns about Z; its surface velocity is the cross product of
the angular velocity with the contact radius. The free wheels on the roller
surface only pass on the component along their own axis, and the two retained
components add up to the velocity field felt by the walker.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

from .geom import Vec3

RPM_TO_RAD_S = 2.0 * math.pi / 60.0

# Encoder counts run positive for shaft rotation about -Z. With that sign the
# revolution-to-distance matrix below yields +X travel for equal positive
# counts, the same direction the inverse kinematics produces for negative w.
ENCODER_SIGN = -1.0

# Efficiency assumed for the headline (theoretical) acceleration figure.
THEORETICAL_EFFICIENCY = 0.90


class KinematicsError(ValueError):
    pass


@dataclass(frozen=True)
class RigConfig:
    """Mechanical, electrical and controller constants of the platform."""

    d_r: float = 0.0342
    theta_r1: float = math.pi / 4
    theta_r2: float = -math.pi / 4
    gear_ratio: float = 3.0
    motor_rated_speed: float = 3000.0  # rev/min at the motor shaft
    motor_rated_torque: float = 1.9  # N*m per motor
    motors_per_axis: int = 1
    I_rot: float = 0.007  # kg*m^2, all rotating parts, referred to the rollers
    eta: float = 0.88
    tau_fric: float = 2.5  # N*m at the rollers, total over both roller groups
    active_radius: float = 0.575
    D_th: float = 0.08
    K_p: float = 2.0
    T: float = 0.05

    def __post_init__(self):
        if not self.d_r > 0:
            raise KinematicsError("d_r must be positive")
        if not 0 < self.eta <= 1:
            raise KinematicsError("eta must be in (0, 1]")
        if not self.gear_ratio >= 1:
            raise KinematicsError("gear ratio must be >= 1")
        if abs(abs(self.theta_r1 - self.theta_r2) - math.pi / 2) > 1e-9:
            raise KinematicsError("wheel angles must be mirror symmetric (90 deg apart)")
        if not self.K_p > 0:
            raise KinematicsError("K_p must be positive")
        if not self.D_th >= 0:
            raise KinematicsError("D_th must be non-negative")
        if not self.T > 0:
            raise KinematicsError("control period must be positive")
        if self.motors_per_axis < 1 or self.I_rot <= 0 or self.tau_fric < 0:
            raise KinematicsError("invalid drive train parameters")

    @property
    def roller_radius(self) -> float:
        return self.d_r / 2.0

    @property
    def rated_roller_speed(self) -> float:
        """Largest roller angular speed in rad/s."""
        return self.motor_rated_speed / self.gear_ratio * RPM_TO_RAD_S

    @property
    def rated_shaft_speed(self) -> float:
        return self.motor_rated_speed * RPM_TO_RAD_S

    def replace(self, **changes) -> "RigConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class RollerSpeeds:
    """Angular velocities of the two roller groups, each of the form (0, 0, w)."""

    w_r1: Vec3
    w_r2: Vec3

    def __post_init__(self):
        for w in (self.w_r1, self.w_r2):
            if w.x != 0.0 or w.y != 0.0:
                raise KinematicsError("roller axis violation")

    @classmethod
    def from_scalars(cls, w1: float, w2: float) -> "RollerSpeeds":
        return cls(Vec3(0.0, 0.0, w1), Vec3(0.0, 0.0, w2))

    def scaled(self, factor: float) -> "RollerSpeeds":
        return RollerSpeeds.from_scalars(self.w_r1.z * factor, self.w_r2.z * factor)


@dataclass(frozen=True)
class VelocityCommand:
    theta_star: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise KinematicsError("amplitude must be non-negative")

    @classmethod
    def from_vector(cls, v: Vec3) -> "VelocityCommand":
        a = math.hypot(v.x, v.z)
        if a == 0.0:
            return cls(0.0, 0.0)
        return cls(math.atan2(v.z, v.x), a)

    def vector(self) -> Vec3:
        return Vec3(self.alpha * math.cos(self.theta_star), 0.0,
                    self.alpha * math.sin(self.theta_star))


def _wheel_axis(theta: float) -> Vec3:
    return Vec3(math.cos(theta), 0.0, math.sin(theta))


def surface_velocity(w: Vec3, cfg: RigConfig) -> Vec3:
    """Linear velocity of the roller surface: ``w x (0, d_r/2, 0)``."""
    if w.x != 0.0 or w.y != 0.0:
        raise KinematicsError("roller axis violation")
    return w.cross(Vec3(0.0, cfg.d_r / 2.0, 0.0))


def retained_velocity(v: Vec3, theta: float) -> Vec3:
    """Component of ``v`` along the free wheel axis at angle ``theta``."""
    u = _wheel_axis(theta)
    return u * u.dot(v)


def compose_ovf(v1: Vec3, v2: Vec3) -> Vec3:
    return v1 + v2


def forward_kinematics(speeds: RollerSpeeds, cfg: RigConfig) -> Vec3:
    """Velocity field produced by the two roller groups."""
    v1 = retained_velocity(surface_velocity(speeds.w_r1, cfg), cfg.theta_r1)
    v2 = retained_velocity(surface_velocity(speeds.w_r2, cfg), cfg.theta_r2)
    return compose_ovf(v1, v2)


def inverse_kinematics(cmd: VelocityCommand, cfg: RigConfig) -> RollerSpeeds:
    """Roller angular velocities realizing the commanded field velocity."""
    t1 = math.tan(cfg.theta_r1)
    t2 = math.tan(cfg.theta_r2)
    if not (math.isfinite(t1) and math.isfinite(t2)) or abs(t1) > 1e12 or abs(t2) > 1e12:
        raise KinematicsError("degenerate wheel angle")
    k = 2.0 * cmd.alpha / cfg.d_r
    c = math.cos(cmd.theta_star)
    s = math.sin(cmd.theta_star)
    return RollerSpeeds.from_scalars(-k * c - k * s * t1, -k * c - k * s * t2)


@lru_cache(maxsize=64)
def _revs_matrix(cfg: RigConfig):
    k = cfg.d_r * math.pi / cfg.gear_ratio
    c1, s1 = math.cos(cfg.theta_r1), math.sin(cfg.theta_r1)
    c2, s2 = math.cos(cfg.theta_r2), math.sin(cfg.theta_r2)
    return (k * c1 * c1, k * c2 * c2, k * c1 * s1, k * c2 * s2)


def ovf_distance_from_revs(n1: float, n2: float, cfg: RigConfig) -> Vec3:
    """Surface travel of the velocity field from motor revolution counts."""
    a, b, c, d = _revs_matrix(cfg)
    return Vec3(a * n1 + b * n2, 0.0, c * n1 + d * n2)


def shaft_speed_to_encoder_rate(shaft_speed: float) -> float:
    """Encoder revolutions per second for a shaft angular velocity about +Z."""
    return ENCODER_SIGN * shaft_speed / (2.0 * math.pi)


def max_speed_envelope(cfg: RigConfig, theta_star: float) -> float:
    """Largest field speed in direction ``theta_star`` with both rollers within rating.

    The reachable set is a square with its vertices on the X and Z axes, so the
    diagonal directions top out at 1/sqrt(2) of the axis value.
    """
    unit = inverse_kinematics(VelocityCommand(theta_star, 1.0), cfg)
    worst = max(abs(unit.w_r1.z), abs(unit.w_r2.z))
    return cfg.rated_roller_speed / worst


def group_torque(cfg: RigConfig) -> float:
    """Motor torque available at one roller group's shaft, before losses."""
    return cfg.motors_per_axis * cfg.motor_rated_torque * cfg.gear_ratio


def acceleration_envelope(cfg: RigConfig, user_mass: float = 0.0) -> dict[str, float]:
    """Surface accelerations achievable with rated torque.

    ``loaded`` treats the user as extra mass riding on the surface and ignores
    friction; the unloaded figures include the constant friction torque, which
    slows a start and helps a brake.
    """
    if user_mass < 0:
        raise KinematicsError("user mass must be non-negative")
    r = cfg.roller_radius
    n_groups = 2
    torque = cfg.eta * n_groups * group_torque(cfg)
    force = torque / r
    m_eff = cfg.I_rot / r ** 2
    return {
        "unloaded_start": (torque - cfg.tau_fric) * r / cfg.I_rot,
        "unloaded_brake": (torque + cfg.tau_fric) * r / cfg.I_rot,
        "loaded": force / (m_eff + user_mass),
    }


def back_calculate_losses(start_accel: float, brake_accel: float,
                          cfg: RigConfig) -> dict[str, float]:
    """Efficiency and friction torque implied by measured start/brake accelerations."""
    r = cfg.roller_radius
    drive = (start_accel + brake_accel) / 2.0 * cfg.I_rot / r
    fric = (brake_accel - start_accel) / 2.0 * cfg.I_rot / r
    return {"eta": drive / (2 * group_torque(cfg)), "tau_fric": fric}


def surface_accel_to_motor_rpm_per_s(accel: float, cfg: RigConfig) -> float:
    """Axis-direction surface acceleration expressed at the motor shaft, (r/min)/s."""
    return accel / cfg.roller_radius * cfg.gear_ratio / RPM_TO_RAD_S


def motor_rpm_per_s_to_surface_accel(rate: float, cfg: RigConfig) -> float:
    return rate * RPM_TO_RAD_S / cfg.gear_ratio * cfg.roller_radius
