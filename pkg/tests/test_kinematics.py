import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from odtsim.geom import Vec3
from odtsim.kinematics import (
    KinematicsError,
    RigConfig,
    RollerSpeeds,
    VelocityCommand,
    acceleration_envelope,
    back_calculate_losses,
    compose_ovf,
    forward_kinematics,
    inverse_kinematics,
    max_speed_envelope,
    motor_rpm_per_s_to_surface_accel,
    ovf_distance_from_revs,
    retained_velocity,
    shaft_speed_to_encoder_rate,
    surface_accel_to_motor_rpm_per_s,
    surface_velocity,
)
from tests.oracles.reference import field_from_rollers, fine_integral, rollers_for_field, torque_accels

CFG = RigConfig()
# 2/d_r for d_r = 0.0342
W_UNIT = 58.47953216374269


def close(a, b, tol=1e-9):
    return all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a, b))


@pytest.mark.parametrize("w, expected", [
    (0.0, (0, 0, 0)),
    (10.0, (-0.171, 0, 0)),
    (-58.479, (1.0000, 0, 0)),
])
def test_surface_velocity(w, expected):
    assert close(surface_velocity(Vec3(0, 0, w), CFG), expected, 1e-4)


def test_surface_velocity_rejects_off_axis():
    with pytest.raises(KinematicsError, match="roller axis violation"):
        surface_velocity(Vec3(1, 0, 0), CFG)
    with pytest.raises(KinematicsError, match="roller axis violation"):
        RollerSpeeds(Vec3(0, 1, 0), Vec3())


def test_retained_velocity_examples():
    q = math.pi / 4
    assert close(retained_velocity(Vec3(1, 0, 0), q), (0.5, 0, 0.5))
    u = Vec3(math.cos(q), 0, math.sin(q)) * 0.7
    assert close(retained_velocity(u, q), tuple(u))
    assert close(retained_velocity(Vec3(1, 0, -1), q), (0, 0, 0))


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-math.pi, math.pi))
def test_retained_velocity_idempotent(x, z, th):
    once = retained_velocity(Vec3(x, 0, z), th)
    assert close(retained_velocity(once, th), tuple(once))


def test_compose():
    assert compose_ovf(Vec3(0.5, 0, 0.5), Vec3(0.5, 0, -0.5)) == Vec3(1, 0, 0)
    assert compose_ovf(Vec3(), Vec3()) == Vec3()


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_compose_commutes(a, b, c, d):
    assert compose_ovf(Vec3(a, 0, b), Vec3(c, 0, d)) == compose_ovf(Vec3(c, 0, d), Vec3(a, 0, b))


def test_inverse_examples():
    s = inverse_kinematics(VelocityCommand(0.0, 1.0), CFG)
    assert s.w_r1.z == pytest.approx(-W_UNIT, rel=1e-12)
    assert s.w_r2.z == pytest.approx(-W_UNIT, rel=1e-12)
    s = inverse_kinematics(VelocityCommand(math.pi / 2, 1.0), CFG)
    assert s.w_r1.z == pytest.approx(-W_UNIT, rel=1e-9)
    assert s.w_r2.z == pytest.approx(W_UNIT, rel=1e-9)
    for th in (0.0, 1.0, -2.5):
        s = inverse_kinematics(VelocityCommand(th, 0.0), CFG)
        assert s.w_r1.z == 0.0 and s.w_r2.z == 0.0


def test_inverse_degenerate_angle():
    # the rig validator keeps angles mirror symmetric, so build one at +-90 deg
    cfg = CFG.replace(theta_r1=math.pi / 2, theta_r2=0.0)
    with pytest.raises(KinematicsError, match="degenerate wheel angle"):
        inverse_kinematics(VelocityCommand(0.3, 1.0), cfg)


def test_inverse_matches_linear_solve():
    for th in np.linspace(-math.pi, math.pi, 17):
        vx, vz = 0.8 * math.cos(th), 0.8 * math.sin(th)
        ref = rollers_for_field(vx, vz, CFG.theta_r1, CFG.theta_r2, CFG.d_r)
        s = inverse_kinematics(VelocityCommand(th, 0.8), CFG)
        assert close((s.w_r1.z, s.w_r2.z), ref, 1e-9)


def test_forward_matches_reference():
    for w1, w2 in [(3.0, -7.0), (-58.0, 12.5), (0.0, 1.0)]:
        ref = field_from_rollers(w1, w2, CFG.theta_r1, CFG.theta_r2, CFG.d_r)
        assert close(forward_kinematics(RollerSpeeds.from_scalars(w1, w2), CFG), ref)


def test_round_trip_grid():
    worst = 0.0
    for alpha in (0.1, 0.5, 1.0, 1.78):
        for i in range(360):
            th = 2 * math.pi * i / 360
            want = (alpha * math.cos(th), 0.0, alpha * math.sin(th))
            got = forward_kinematics(inverse_kinematics(VelocityCommand(th, alpha), CFG), CFG)
            worst = max(worst, math.dist(tuple(got), want) / alpha)
    assert worst <= 1e-9


@given(st.floats(-math.pi, math.pi), st.floats(0.01, 1.78))
def test_mirror_symmetry(th, alpha):
    a = forward_kinematics(inverse_kinematics(VelocityCommand(th, alpha), CFG), CFG)
    b = forward_kinematics(inverse_kinematics(VelocityCommand(-th, alpha), CFG), CFG)
    assert close((a.x, -a.z), (b.x, b.z))
    assert max_speed_envelope(CFG, th) == pytest.approx(max_speed_envelope(CFG, -th), rel=1e-12)


@pytest.mark.parametrize("n1, n2, expected", [
    (0, 0, (0, 0, 0)),
    (100, 100, (3.5814, 0, 0)),
    (100, -100, (0, 0, 3.5814)),
])
def test_ovf_distance_from_revs(n1, n2, expected):
    d = ovf_distance_from_revs(n1, n2, CFG)
    assert close(d, expected, 1e-4)
    assert d.y == 0.0


def test_revolutions_track_field_integral():
    """Eq. 7 on integrated revolutions equals the integrated field velocity.

    Reference: midpoint integration on a grid 10x finer than the check grid.
    """
    def w1(t):
        return -40.0 * math.sin(3.0 * t) + 5.0

    def w2(t):
        return 25.0 * math.cos(2.0 * t) - 10.0 * t

    t_end, n = 2.0, 2000
    h = t_end / n
    revs = [0.0, 0.0]
    for i in range(n):
        tm = (i + 0.5) * h
        # roller angle increments expressed at the motor shaft
        revs[0] += shaft_speed_to_encoder_rate(w1(tm) * CFG.gear_ratio) * h
        revs[1] += shaft_speed_to_encoder_rate(w2(tm) * CFG.gear_ratio) * h
    d = ovf_distance_from_revs(revs[0], revs[1], CFG)
    ref = fine_integral(lambda t: field_from_rollers(w1(t), w2(t), CFG.theta_r1, CFG.theta_r2,
                                                     CFG.d_r), 0.0, t_end, 10 * n)
    assert close(d, ref, 1e-6)


@pytest.mark.parametrize("theta, expected", [
    (0.0, 1.791), (math.pi / 2, 1.791), (math.pi / 4, 1.791 / math.sqrt(2)),
])
def test_max_speed_envelope(theta, expected):
    assert max_speed_envelope(CFG, theta) == pytest.approx(expected, abs=1e-3)


def test_max_speed_within_one_percent_of_table():
    assert abs(max_speed_envelope(CFG, 0.0) / 1.78 - 1) <= 0.01


def test_acceleration_envelope_theoretical():
    theo = CFG.replace(eta=0.90, tau_fric=0.0)
    a = acceleration_envelope(theo, 0.0)
    assert a["unloaded_start"] == pytest.approx(25.06, abs=0.01)
    assert abs(a["unloaded_start"] / 25.00 - 1) <= 0.005
    loaded = acceleration_envelope(theo, 100.0)["loaded"]
    assert loaded == pytest.approx(4.84, abs=0.005)
    assert abs(loaded / 4.84 - 1) <= 0.01


def test_acceleration_envelope_with_losses():
    a = acceleration_envelope(CFG, 0.0)
    ref_start, ref_brake = torque_accels(0.88, 1.9, 3.0, 1, 2.5, 0.007, 0.0342)
    assert a["unloaded_start"] == pytest.approx(ref_start, rel=1e-12)
    assert a["unloaded_brake"] == pytest.approx(ref_brake, rel=1e-12)
    assert a["unloaded_start"] == pytest.approx(18.4, abs=0.05)
    assert a["unloaded_brake"] == pytest.approx(30.6, abs=0.05)
    assert abs(a["unloaded_brake"] / 30.0 - 1) <= 0.10
    with pytest.raises(KinematicsError):
        acceleration_envelope(CFG, -1.0)


def test_back_calculated_losses_invert_envelope():
    a = acceleration_envelope(CFG)
    got = back_calculate_losses(a["unloaded_start"], a["unloaded_brake"], CFG)
    assert got["eta"] == pytest.approx(CFG.eta, rel=1e-12)
    assert got["tau_fric"] == pytest.approx(CFG.tau_fric, rel=1e-12)


def test_accel_unit_conversion():
    # the drives' 65535 (r/min)/s maximum, expressed at the surface
    a = motor_rpm_per_s_to_surface_accel(65535, CFG)
    assert a == pytest.approx(65535 * 2 * math.pi / 60 / 3 * 0.0171, rel=1e-12)
    assert surface_accel_to_motor_rpm_per_s(a, CFG) == pytest.approx(65535, rel=1e-12)


@pytest.mark.parametrize("field, value", [
    ("d_r", 0.0), ("eta", 1.5), ("gear_ratio", 0.5), ("K_p", 0.0), ("D_th", -1.0), ("T", 0.0),
    ("theta_r2", 0.3),
])
def test_rig_validation(field, value):
    with pytest.raises(KinematicsError):
        CFG.replace(**{field: value})
