import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from odtsim.geom import Vec3
from odtsim.kinematics import RigConfig, RollerSpeeds, VelocityCommand, inverse_kinematics
from odtsim.plant import (
    BoundaryFault,
    MotorState,
    PlantState,
    RippleParams,
    Segment,
    SwayParams,
    WalkerProfile,
    acceleration_experiment,
    field_velocity,
    intended_displacement,
    intended_velocity,
    step_body,
    step_motor,
    step_motors,
    step_plant,
    torque_limits,
)
from tests.oracles.reference import field_from_rollers, fine_integral, motor_speed_fine

CFG = RigConfig()
DT = 1e-3


def walk(*segs, **kw):
    return WalkerProfile(tuple(Segment(d, Vec3(*v), r) for d, v, r in segs), **kw)


def test_intended_velocity_examples():
    p = walk((5.0, (1, 0, 0), 2.0))
    assert intended_velocity(p, 0.25) == Vec3(0.5, 0, 0)
    assert intended_velocity(p, 100.0) == Vec3(1, 0, 0)
    p = walk((1.0, (1, 0, 0), 2.0), (3.0, (0, 0, 0), 2.0))
    assert intended_velocity(p, 1.25).x == pytest.approx(0.5)
    assert intended_velocity(p, 1.5) == Vec3()
    assert p.stop_time() == pytest.approx(1.5)
    assert intended_velocity(WalkerProfile(), 3.0) == Vec3()


@given(st.floats(0, 12))
def test_intended_velocity_continuous(t):
    p = walk((2.0, (0.5, 0, 0), 1.0), (3.0, (0, 0, -0.5), 1.0), (4.0, (0, 0, 0), 1.44))
    a, b = intended_velocity(p, t), intended_velocity(p, t + 1e-7)
    assert (a - b).norm() <= 1.44 * 1e-7 * 1.01 + 1e-15


def test_intended_displacement_matches_fine_integral():
    p = walk((2.0, (0.5, 0, 0), 1.0), (3.0, (0, 0, -0.5), 1.0), (4.0, (0, 0, 0), 1.44))
    for t in (0.3, 2.7, 6.0, 9.5):
        ref = fine_integral(lambda s: tuple(intended_velocity(p, s)), 0.0, t, 200000)
        assert np.allclose(tuple(intended_displacement(p, t)), ref, atol=1e-9)


def test_segment_validation():
    with pytest.raises(ValueError):
        Segment(1.0, Vec3(1, 0, 0), 0.0)
    with pytest.raises(ValueError):
        Segment(1.0, Vec3(0, 1, 0), 1.0)


def test_ripple_changes_speed_only():
    p = walk((5.0, (0.6, 0, 0.8), 100.0), ripple=RippleParams(0.1, 2.0))
    v = intended_velocity(p, 1.125)
    assert v.x / v.z == pytest.approx(0.75)
    assert v.norm() == pytest.approx(1.0 + 0.1 * math.sin(2 * math.pi * 2.0 * 1.125))


def test_zero_command_no_motion():
    m = step_motors((MotorState(), MotorState()), RollerSpeeds.from_scalars(0, 0), CFG, DT)
    assert m == (MotorState(0.0, 0.0, 0.0), MotorState(0.0, 0.0, 0.0))


def test_motor_speed_never_exceeds_rated():
    m = step_motor(MotorState(), 1e6, CFG, 1.0)
    assert m.speed == pytest.approx(CFG.rated_shaft_speed)


def test_motor_matches_fine_reference():
    up, down = torque_limits(CFG)
    lim = 3000.0
    m = MotorState(accel_limit=lim)
    schedule = [(0.2, 250.0), (0.1, -120.0), (0.15, 0.0)]
    speeds, revs = [m.speed], [m.revolutions]
    for dur, cmd in schedule:
        for _ in range(int(round(dur / DT))):
            m = step_motor(m, cmd, CFG, DT)
            speeds.append(m.speed)
            revs.append(m.revolutions)
    # oracle on a 10x finer grid
    fine = [0.0]
    w = 0.0
    for dur, cmd in schedule:
        seg = motor_speed_fine(w, cmd, min(up, lim), min(down, lim), DT / 10, int(round(dur / DT * 10)))
        fine.extend(seg[1:])
        w = seg[-1]
    fine = np.array(fine)
    assert np.allclose(speeds, fine[::10], atol=1e-9)
    # angle: trapezoid on the fine grid is exact for piecewise-linear speed
    angle = np.concatenate([[0.0], np.cumsum((fine[1:] + fine[:-1]) / 2 * DT / 10)])
    assert np.allclose(revs, -angle[::10] / (2 * math.pi), atol=1e-6)


def test_friction_asymmetry():
    up, down = torque_limits(CFG)
    assert down > up
    r = acceleration_experiment(CFG, 1000.0)
    assert r["brake_accel"] >= r["start_accel"]


@pytest.mark.parametrize("axis", ["x", "z"])
def test_acceleration_experiments(axis):
    fast = acceleration_experiment(CFG, 39.32, axis)
    assert 15 <= fast["start_accel"] <= 19
    assert 28 <= fast["brake_accel"] <= 32
    mid = acceleration_experiment(CFG, 12.0, axis)
    assert abs(mid["start_accel"] - 12.5) <= 1 and abs(mid["brake_accel"] - 12.5) <= 1
    slow = acceleration_experiment(CFG, 3.6, axis)
    assert abs(slow["start_accel"] - 3.8) <= 0.3 and abs(slow["brake_accel"] - 3.8) <= 0.3


def test_acceleration_experiment_values_frozen():
    # torque-limited start and brake, from the rigid-body oracle
    r = acceleration_experiment(CFG, 39.32)
    assert r["start_accel"] == pytest.approx(18.3996, abs=1e-3)
    assert r["brake_accel"] == pytest.approx(30.6139, abs=1e-3)


def test_body_examples():
    s = PlantState(body=Vec3(0.1, 1, 0), intent=Vec3(1, 0, 0), ovf_velocity=Vec3(-1, 0, 0))
    n = step_body(s, 0.01)
    assert n.body == Vec3(0.1, 1, 0)
    s = PlantState(body=Vec3(0.3, 1, 0), ovf_velocity=Vec3(-0.2, 0, 0))
    assert step_body(s, 0.5).body.x == pytest.approx(0.2)
    s = PlantState(body=Vec3(0.3, 1, 0.1))
    assert step_body(s, 0.5, WalkerProfile()).body == Vec3(0.3, 1, 0.1)


def test_boundary_fault():
    s = PlantState(body=Vec3(0.57, 1, 0), intent=Vec3(1, 0, 0))
    with pytest.raises(BoundaryFault) as e:
        step_body(s, 0.01, cfg=CFG)
    assert e.value.position.x > CFG.active_radius


def test_body_displacement_is_intent_plus_field():
    """Closed-form intent integral plus a fine-grid field integral."""
    p = walk((0.6, (0.4, 0, 0.2), 1.0), (0.4, (0, 0, 0), 1.0))
    target = inverse_kinematics(VelocityCommand(2.5, 0.5), CFG).scaled(CFG.gear_ratio)
    lim = CFG.gear_ratio * 12.0 / CFG.roller_radius
    s = PlantState(body=Vec3(0, 1, 0), motors=(MotorState(accel_limit=lim),) * 2)
    n = 1000
    for _ in range(n):
        s = step_plant(s, target, p, CFG, DT)
    up, down = torque_limits(CFG)
    w1 = motor_speed_fine(0.0, target.w_r1.z, min(up, lim), min(down, lim), DT / 10, 10 * n)
    w2 = motor_speed_fine(0.0, target.w_r2.z, min(up, lim), min(down, lim), DT / 10, 10 * n)
    # trapezoid over fine samples of the (piecewise-linear) field velocity
    vel = np.array([field_from_rollers(a / 3, b / 3, CFG.theta_r1, CFG.theta_r2, CFG.d_r)
                    for a, b in zip(w1, w2)])
    ovf = np.sum((vel[1:] + vel[:-1]) / 2, axis=0) * DT / 10
    expect = np.array([0, 1, 0]) + np.array(tuple(intended_displacement(p, 1.0))) + ovf
    assert np.allclose(tuple(s.body), expect, atol=1e-9)
    assert s.body.y == 1.0
    assert tuple(s.ovf_velocity) == pytest.approx(tuple(field_velocity(s.motors, CFG)))


def test_sway_settles_at_static_offset():
    sway = SwayParams(enabled=True, natural_frequency=1.5, damping_ratio=0.7, cog_height=1.0)
    p = WalkerProfile(sway=sway)
    s = PlantState(body=Vec3(0, 1, 0))
    a = 2.0
    for k in range(5000):
        s = step_body(s, DT, p, ovf_velocity=Vec3(a * (k + 1) * DT, 0, 0))
    wn = 2 * math.pi * 1.5
    assert s.sway_offset.x == pytest.approx(-a / wn ** 2, rel=1e-3)


def test_sway_disabled_is_exact():
    p = WalkerProfile()
    s = PlantState(body=Vec3(0, 1, 0), ovf_velocity=Vec3(0.2, 0, 0))
    s = step_body(s, DT, p, ovf_velocity=Vec3(0.4, 0, 0))
    assert s.sway_offset == Vec3()
