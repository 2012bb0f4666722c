"""Ground-truth physics of walker, drives and body.

The walker is a velocity source relative to the belt surface. The drives are
speed-controlled servos whose acceleration is capped by both the drive's slew
setting and the torque available after transmission losses and a constant
friction torque. With no slip, the body moves in the world by the sum of the
walker's own displacement and the surface displacement of the velocity field.
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geom import Vec3
from .kinematics import (
    RigConfig,
    RollerSpeeds,
    VelocityCommand,
    forward_kinematics,
    group_torque,
    inverse_kinematics,
    ovf_distance_from_revs,
    shaft_speed_to_encoder_rate,
)

REFERENCE_COG_HEIGHT = 1.0  # m
PLANT_DT = 1e-3


class BoundaryFault(RuntimeError):
    """The body left the active area; the controller failed to re-center it."""

    def __init__(self, t: float, position: Vec3, radius: float):
        super().__init__(f"body left active radius {radius} m at t={t:.3f} s")
        self.t = t
        self.position = position


# --------------------------------------------------------------------------
# walker


@dataclass(frozen=True)
class Segment:
    duration: float
    target: Vec3
    ramp: float = 1.0

    def __post_init__(self):
        if not self.ramp > 0:
            raise ValueError("segment ramp must be positive")
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")
        if self.target.y != 0.0:
            raise ValueError("walker velocities must lie in the X-Z plane")


@dataclass(frozen=True)
class SwayParams:
    """Linear spring-damper sway of the body center, driven by field acceleration.

    The body center is a base-excited oscillator riding on the feet. Forcing
    scales with ``cog_height`` relative to a 1 m reference, so at a constant
    field acceleration ``a`` the offset settles at ``-(h / 1 m) a / wn^2``.
    """

    enabled: bool = False
    natural_frequency: float = 1.5
    damping_ratio: float = 0.3
    cog_height: float = 1.0


@dataclass(frozen=True)
class RippleParams:
    """Sinusoidal speed fluctuation from individual steps; off by default."""

    amplitude: float = 0.0
    frequency: float = 1.8


@dataclass(frozen=True)
class WalkerProfile:
    segments: tuple[Segment, ...] = ()
    sway: SwayParams = field(default_factory=SwayParams)
    ripple: RippleParams = field(default_factory=RippleParams)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        starts, v0s = [], []
        t, v = 0.0, Vec3()
        for seg in self.segments:
            starts.append(t)
            v0s.append(v)
            v = _ramp_velocity(v, seg, seg.duration)
            t += seg.duration
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_v0s", v0s)

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def _locate(self, t: float):
        i = bisect.bisect_right(self._starts, t) - 1
        return i, t - self._starts[i]

    def stop_time(self) -> float | None:
        """Time the profile's velocity finally reaches zero, if it does."""
        segs = self.segments
        if not segs or segs[-1].target.norm() != 0.0:
            return None
        i = len(segs) - 1
        while i > 0 and segs[i - 1].target.norm() == 0.0:
            i -= 1
        speed = self._v0s[i].norm()
        for j in range(i, len(segs)):
            need = speed / segs[j].ramp
            if need <= segs[j].duration or j == len(segs) - 1:
                return self._starts[j] + need
            speed -= segs[j].ramp * segs[j].duration
        return None


def _ramp_velocity(v0: Vec3, seg: Segment, tau: float) -> Vec3:
    dv = seg.target - v0
    L = dv.norm()
    if L == 0.0:
        return seg.target
    frac = seg.ramp * tau / L
    if frac >= 1.0:
        return seg.target
    return v0 + dv * frac


def intended_velocity(profile: WalkerProfile, t: float) -> Vec3:
    """Walker's own velocity relative to the belt at time ``t``.

    Within a segment the velocity moves in a straight line toward the segment
    target at the ramp rate; the last segment's target is held indefinitely.
    """
    if not profile.segments or t < 0:
        return Vec3()
    i, tau = profile._locate(t)
    v = _ramp_velocity(profile._v0s[i], profile.segments[i], tau)
    rp = profile.ripple
    if rp.amplitude > 0.0:
        n = v.norm()
        if n > 0.0:
            v = v * (1.0 + rp.amplitude * math.sin(2 * math.pi * rp.frequency * t) / n)
    return v


def intended_displacement(profile: WalkerProfile, t: float) -> Vec3:
    """Exact integral of the (ripple-free) intended velocity over [0, t]."""
    if not profile.segments or t <= 0:
        return Vec3()
    i_end, _ = profile._locate(t)
    total = Vec3()
    for i in range(i_end + 1):
        seg = profile.segments[i]
        last = i == i_end
        tau = (t - profile._starts[i]) if last else seg.duration
        total = total + _segment_displacement(profile._v0s[i], seg, tau)
    return total


def _segment_displacement(v0: Vec3, seg: Segment, tau: float) -> Vec3:
    dv = seg.target - v0
    L = dv.norm()
    if L == 0.0:
        return seg.target * tau
    t_r = L / seg.ramp
    if tau <= t_r:
        return v0 * tau + dv * (seg.ramp * tau * tau / (2.0 * L))
    return (v0 + seg.target) * (t_r / 2.0) + seg.target * (tau - t_r)


# --------------------------------------------------------------------------
# drives


@dataclass(frozen=True)
class MotorState:
    speed: float = 0.0  # shaft rad/s about +Z
    revolutions: float = 0.0  # encoder revolutions
    commanded: float = 0.0  # shaft rad/s
    accel_limit: float = math.inf  # shaft rad/s^2


def torque_limits(cfg: RigConfig) -> tuple[float, float]:
    """Shaft accelerations (speed-up, brake) one drive can deliver, rad/s^2.

    Each motor moves half the rotating inertia against half the friction.
    Friction opposes motion, so it is subtracted while speeding up and added
    while braking.
    """
    drive = cfg.eta * group_torque(cfg)
    fric = cfg.tau_fric / 2.0
    inertia = cfg.I_rot / 2.0
    up = max(0.0, drive - fric) / inertia * cfg.gear_ratio
    down = (drive + fric) / inertia * cfg.gear_ratio
    return up, down


def _advance(w: float, target: float, up: float, down: float, dt: float):
    """Move shaft speed ``w`` toward ``target`` for ``dt``; return (speed, angle)."""
    angle = 0.0
    t_left = dt
    for _ in range(4):
        if t_left <= 0.0:
            break
        if w == target:
            angle += w * t_left
            break
        same_side = target != 0.0 and (w == 0.0 or (target > 0.0) == (w > 0.0))
        if same_side and abs(target) > abs(w):
            a, stop = up, target
        else:
            a = down
            stop = target if same_side else 0.0
        if a <= 0.0:
            angle += w * t_left
            break
        need = abs(stop - w) / a
        if need <= t_left:
            angle += (w + stop) / 2.0 * need
            w = stop
            t_left -= need
        else:
            w_new = w + math.copysign(a * t_left, stop - w)
            angle += (w + w_new) / 2.0 * t_left
            w = w_new
            t_left = 0.0
    return w, angle


def step_motor(state: MotorState, commanded: float, cfg: RigConfig, dt: float,
               accel_limit: float | None = None) -> MotorState:
    rated = cfg.rated_shaft_speed
    if abs(commanded) > rated:
        commanded = math.copysign(rated, commanded)
    lim = state.accel_limit if accel_limit is None else accel_limit
    up, down = torque_limits(cfg)
    w, angle = _advance(state.speed, commanded, min(lim, up), min(lim, down), dt)
    revs = state.revolutions + shaft_speed_to_encoder_rate(angle)
    return MotorState(w, revs, commanded, lim)


def step_motors(states: Sequence[MotorState], commanded: RollerSpeeds, cfg: RigConfig,
                dt: float) -> tuple[MotorState, MotorState]:
    """Advance both drives by ``dt`` toward the commanded shaft speeds."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return (step_motor(states[0], commanded.w_r1.z, cfg, dt),
            step_motor(states[1], commanded.w_r2.z, cfg, dt))


def field_velocity(motors: Sequence[MotorState], cfg: RigConfig) -> Vec3:
    """Surface velocity of the field for the drives' current shaft speeds."""
    lam = cfg.gear_ratio
    return forward_kinematics(RollerSpeeds.from_scalars(motors[0].speed / lam,
                                                        motors[1].speed / lam), cfg)


# --------------------------------------------------------------------------
# body


@dataclass(frozen=True)
class PlantState:
    t: float = 0.0
    body: Vec3 = field(default_factory=lambda: Vec3(0.0, 1.0, 0.0))
    intent: Vec3 = field(default_factory=Vec3)
    intended_distance: Vec3 = field(default_factory=Vec3)
    ovf_velocity: Vec3 = field(default_factory=Vec3)
    motors: tuple[MotorState, MotorState] = (MotorState(), MotorState())
    sway_offset: Vec3 = field(default_factory=Vec3)
    sway_rate: Vec3 = field(default_factory=Vec3)

    @property
    def position(self) -> Vec3:
        """Body center including sway."""
        return self.body + self.sway_offset


def _sway_step(offset: Vec3, rate: Vec3, accel: Vec3, p: SwayParams, dt: float):
    wn = 2 * math.pi * p.natural_frequency
    k = p.cog_height / REFERENCE_COG_HEIGHT
    c = 2 * p.damping_ratio * wn
    # semi-implicit Euler
    acc = rate * (-c) - offset * (wn * wn) - accel.xz() * k
    rate = rate + acc * dt
    return offset + rate * dt, rate


def step_body(state: PlantState, dt: float, profile: WalkerProfile | None = None,
              ovf_displacement: Vec3 | None = None, ovf_velocity: Vec3 | None = None,
              cfg: RigConfig | None = None, center: Vec3 = Vec3()) -> PlantState:
    """Integrate the body over ``dt`` under the walker intent and field motion.

    The walker's displacement uses the trapezoid rule on the intended
    velocity, exact for the piecewise-linear profiles. ``ovf_displacement``
    should come from the drives' revolution increments; it defaults to the
    current field velocity times ``dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t1 = state.t + dt
    if profile is not None:
        intent1 = intended_velocity(profile, t1)
        walk = (state.intent + intent1) * (dt / 2.0)
    else:
        intent1 = state.intent
        walk = state.intent * dt
    v_ovf1 = state.ovf_velocity if ovf_velocity is None else ovf_velocity
    carry = state.ovf_velocity * dt if ovf_displacement is None else ovf_displacement
    body = state.body + walk + carry
    offset, rate = state.sway_offset, state.sway_rate
    if profile is not None and profile.sway.enabled:
        accel = (v_ovf1 - state.ovf_velocity) / dt
        offset, rate = _sway_step(offset, rate, accel, profile.sway, dt)
    new = PlantState(t1, body, intent1, state.intended_distance + walk, v_ovf1,
                     state.motors, offset, rate)
    if cfg is not None:
        pos = new.position
        if math.hypot(pos.x - center.x, pos.z - center.z) > cfg.active_radius:
            raise BoundaryFault(t1, pos, cfg.active_radius)
    return new


def step_plant(state: PlantState, commanded: RollerSpeeds, profile: WalkerProfile,
               cfg: RigConfig, dt: float = PLANT_DT, center: Vec3 = Vec3()) -> PlantState:
    """Drives, then body, for one plant step."""
    motors = step_motors(state.motors, commanded, cfg, dt)
    disp = ovf_distance_from_revs(motors[0].revolutions - state.motors[0].revolutions,
                                  motors[1].revolutions - state.motors[1].revolutions, cfg)
    v_ovf = field_velocity(motors, cfg)
    new = step_body(state, dt, profile, disp, v_ovf, cfg, center)
    return dataclasses.replace(new, motors=motors)


# --------------------------------------------------------------------------
# open-loop acceleration test


def acceleration_experiment(cfg: RigConfig, surface_limit: float, axis: str = "x",
                            top_speed: float = 1.78, hold: float = 0.3,
                            dt: float = PLANT_DT) -> dict:
    """Start from rest to ``top_speed`` and brake back, with a drive slew limit.

    ``surface_limit`` is the drive acceleration limit expressed at the field
    surface for axis-direction motion. Returns time series of field distance,
    velocity and acceleration along the axis plus the realized start and brake
    accelerations, each measured between the 10 % and 90 % speed crossings.
    """
    theta = {"x": 0.0, "z": math.pi / 2}[axis]
    unit = Vec3(1.0, 0.0, 0.0) if axis == "x" else Vec3(0.0, 0.0, 1.0)
    target = inverse_kinematics(VelocityCommand(theta, top_speed), cfg).scaled(cfg.gear_ratio)
    stop = RollerSpeeds.from_scalars(0.0, 0.0)
    lim = cfg.gear_ratio * surface_limit / cfg.roller_radius
    motors = (MotorState(accel_limit=lim), MotorState(accel_limit=lim))

    up, _ = torque_limits(cfg)
    ramp_time = top_speed / max(1e-9, min(surface_limit, up * cfg.roller_radius / cfg.gear_ratio))
    t_on = ramp_time + hold
    n = int(math.ceil((2 * t_on) / dt))
    ts = np.arange(n + 1) * dt
    dist = np.zeros(n + 1)
    vel = np.zeros(n + 1)
    for k in range(n):
        cmd = target if ts[k] < t_on else stop
        prev = motors
        motors = step_motors(motors, cmd, cfg, dt)
        d = ovf_distance_from_revs(motors[0].revolutions - prev[0].revolutions,
                                   motors[1].revolutions - prev[1].revolutions, cfg)
        dist[k + 1] = dist[k] + d.dot(unit)
        vel[k + 1] = field_velocity(motors, cfg).dot(unit)
    acc = np.gradient(vel, dt)
    split = int(round(t_on / dt))
    start = _crossing_rate(ts[: split + 1], vel[: split + 1], top_speed)
    brake = _crossing_rate(ts[split:], vel[split:], top_speed)
    return {
        "t": ts, "distance": dist, "velocity": vel, "acceleration": acc,
        "start_accel": start, "brake_accel": brake, "t_brake": t_on,
    }


def _crossing_rate(t: np.ndarray, v: np.ndarray, top: float) -> float:
    lo, hi = 0.1 * top, 0.9 * top
    if v[-1] < v[0]:
        t, v = t[::-1], v[::-1]
    t_lo = float(np.interp(lo, v, t))
    t_hi = float(np.interp(hi, v, t))
    return (hi - lo) / abs(t_hi - t_lo)
