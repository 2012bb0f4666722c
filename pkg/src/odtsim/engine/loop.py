"""Fixed-step closed loop: 1 kHz plant, control every ``cfg.T``.

Transport delays are modeled with delay lines on the plant step grid:

* tracker samples reach the PC ``T_rm`` after capture; the controller uses
  the newest one;
* drive revolution counts reach the drive side of the link ``T_ovf`` after
  capture;
* a tracker sample and the revolution counts captured at the same instant
  form a synchronized measurement once both have arrived, and that pair is
  available to the locomotion calculation ``T_c`` later, i.e. ``T_s`` after
  capture;
* speed commands take effect at the drives ``T_c`` after they are issued.
"""

from __future__ import annotations

import dataclasses
import math

from ..control import CONTROLLERS, Controller, ControllerInput, SaturationFlags, condition_command
from ..delay import DelayLine, to_steps
from ..drivebus.emulator import drive_emulator_step
from ..drivebus.frames import (
    REG_ACCEL,
    REG_SPEED,
    decode_frame,
    encode_accel,
    encode_speed,
    quantize_revolutions,
    write_register_request,
)
from ..geom import UnitQuat, Vec3
from ..kinematics import RPM_TO_RAD_S, RollerSpeeds
from ..locomotion import LocomotionCalculator
from ..plant import PLANT_DT, BoundaryFault, MotorState, PlantState, intended_velocity, step_plant
from ..tracking import TrackerStream, body_center_global
from .analysis import classify_stages
from .config import ScenarioConfig
from .trace import Trace, TraceRecord

_ZERO_SPEEDS = RollerSpeeds.from_scalars(0.0, 0.0)


class _ModbusLink:
    """Routes speed and acceleration commands through RTU frames to shadow drives."""

    def __init__(self):
        self.shadow = [MotorState(), MotorState()]

    def send(self, speeds: RollerSpeeds, accel: float, t: float) -> tuple[RollerSpeeds, float]:
        out = []
        for i, w in enumerate((speeds.w_r1.z, speeds.w_r2.z)):
            unit = i + 1
            reqs = (write_register_request(unit, REG_SPEED, encode_speed(w / RPM_TO_RAD_S)),
                    write_register_request(unit, REG_ACCEL,
                                           encode_accel(min(accel / RPM_TO_RAD_S, 655350.0))))
            for req in reqs:
                self.shadow[i], _, _ = drive_emulator_step(decode_frame(req), self.shadow[i], t,
                                                           unit=unit)
            out.append(self.shadow[i].commanded)
        return RollerSpeeds.from_scalars(*out), self.shadow[0].accel_limit


def run(scenario: ScenarioConfig, controller: Controller | None = None,
        dt: float = PLANT_DT) -> Trace:
    """Simulate ``scenario`` and return its closed trace.

    A boundary fault ends the run early; the trace then carries a ``fault``
    entry with its time and position.
    """
    sc = scenario
    cfg = sc.rig
    profile = sc.walker
    lat = sc.latency
    p_ref = sc.controller.p_ref
    if controller is None:
        controller = CONTROLLERS[sc.controller.kind](sc.controller.accel_limit)

    n_steps = to_steps(sc.duration, dt)
    ctrl_every = to_steps(cfg.T, dt)
    if ctrl_every < 1:
        raise ValueError("control period shorter than the plant step")
    tracker_every = max(1, to_steps(1.0 / sc.tracker.sample_rate, dt))
    d_c = to_steps(lat.T_c, dt)

    tracker = TrackerStream(dataclasses.replace(sc.tracker, latency=lat.T_rm), seed=sc.seed, tick=dt)
    p_utrl = sc.tracker.p_utrl
    motor_line = DelayLine(to_steps(lat.T_ovf, dt))
    pair_line = DelayLine(d_c)
    cmd_line = DelayLine(d_c)
    link = _ModbusLink() if sc.drive_link == "modbus" else None
    quantize = link is not None

    loco = LocomotionCalculator(cfg, p_ref, sc.locomotion.beta1, sc.locomotion.beta2,
                                sc.locomotion.slip, sc.locomotion.mapping)
    trace = Trace(name=sc.name, meta={"T_s": lat.T_s, "T": cfg.T, "dt": dt,
                                          "center": [p_ref.x, p_ref.z]})

    state = PlantState(t=0.0, body=sc.start_position, intent=intended_velocity(profile, 0.0))
    heading = 0.0
    commanded = _ZERO_SPEEDS
    prev_cmd = _ZERO_SPEEDS
    tracked: dict[int, object] = {}
    revs_at: dict[int, tuple[float, float]] = {}
    newest_sample = None
    latest_pair = None
    keep = 4 * (max(to_steps(lat.T_rm, dt), to_steps(lat.T_ovf, dt)) + tracker_every) + 8

    def capture(k: int) -> None:
        nonlocal heading
        v = state.intent
        if v.x * v.x + v.z * v.z > 1e-12:
            heading = math.atan2(-v.z, v.x)
        if k % tracker_every == 0:
            tracker.capture(k * dt, state.position, UnitQuat.from_yaw(heading))
        m1, m2 = state.motors
        revs = (m1.revolutions, m2.revolutions)
        if quantize:
            revs = (quantize_revolutions(revs[0]), quantize_revolutions(revs[1]))
        motor_line.push(k, (k, revs))

    def deliver(k: int) -> None:
        nonlocal newest_sample, latest_pair
        for s in tracker.deliver(k * dt):
            newest_sample = s
            step = to_steps(s.t, dt)
            tracked[step] = s
            _pair(k, step)
        for step, revs in motor_line.pop_due(k):
            revs_at[step] = revs
            _pair(k, step)
        for pair in pair_line.pop_due(k):
            latest_pair = pair
        if len(revs_at) > keep:
            for old in [s for s in revs_at if s < k - keep]:
                del revs_at[old]

    def _pair(k: int, step: int) -> None:
        if step in tracked and step in revs_at:
            pair_line.push(k, (step, tracked.pop(step), revs_at.pop(step)))

    capture(0)
    deliver(0)
    for k in range(n_steps):
        if k % ctrl_every == 0:
            t = k * dt
            if newest_sample is not None:
                p_ug = body_center_global(newest_sample, p_utrl)
            else:
                p_ug = p_ref
            out = controller.step(ControllerInput(t, p_ug, p_ref), cfg)
            motor_cmd, flags = condition_command(out, prev_cmd, cfg, cfg.T)
            prev_cmd = motor_cmd
            accel_shaft = cfg.gear_ratio * out.accel_limit / cfg.roller_radius
            if link is not None:
                motor_cmd, accel_shaft = link.send(motor_cmd, accel_shaft, t)
            cmd_line.push(k, (motor_cmd, accel_shaft))

            if latest_pair is not None:
                _, sample, revs = latest_pair
                loc = loco.update(t, body_center_global(sample, p_utrl), revs)
                D_rm, D_ovf, D_pe, D_ve = loc.D_rm, loc.D_ovf, loc.D_pe, loc.D_ve
            else:
                D_rm = D_ovf = D_pe = D_ve = Vec3()
            m1, m2 = state.motors
            trace.append(TraceRecord(
                t=t, intent_velocity=state.intent, intended_distance=state.intended_distance,
                body=state.position, D_rm=D_rm, D_ovf=D_ovf, ovf_command=out.cmd.vector(),
                ovf_velocity=state.ovf_velocity, motor_speed=(m1.speed, m2.speed),
                motor_revs=(m1.revolutions, m2.revolutions), D_pe=D_pe, D_ve=D_ve,
                speed_saturated=flags.speed, slew_limited=flags.slew))

        for motor_cmd, accel_shaft in cmd_line.pop_due(k):
            commanded = motor_cmd
            state = dataclasses.replace(state, motors=tuple(
                dataclasses.replace(m, accel_limit=accel_shaft) for m in state.motors))
        try:
            state = step_plant(state, commanded, profile, cfg, dt, center=p_ref)
        except BoundaryFault as fault:
            trace.fault = {"kind": "boundary", "t": fault.t,
                           "position": list(fault.position.as_tuple())}
            break
        capture(k + 1)
        deliver(k + 1)

    labels = classify_stages(trace)
    trace.records = [dataclasses.replace(r, stage=s) for r, s in zip(trace.records, labels)]
    trace.close()
    return trace
