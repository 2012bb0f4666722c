import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from odtsim.geom import Vec3
from odtsim.kinematics import RigConfig, ovf_distance_from_revs
from odtsim.locomotion import (
    IDENTITY3,
    LocomotionCalculator,
    VeMapping,
    accumulate_ovf,
    map_to_ve,
    physical_distance,
    remaining_distance,
)

CFG = RigConfig()
coord = st.floats(-10, 10)


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def test_remaining_distance():
    assert remaining_distance(Vec3(0.2, 1, 0.3), Vec3(0.2, 1, 0.3)) == Vec3()
    assert remaining_distance(Vec3(0.3, 0.9, 0), Vec3()) == Vec3(0.3, 0, 0)


def test_accumulate_ovf():
    acc = Vec3(0.5, 0, 0.1)
    assert close(accumulate_ovf(Vec3(-1, 0, 0), IDENTITY3, 0.05, acc), (0.45, 0, 0.1))
    assert accumulate_ovf(Vec3(), IDENTITY3, 0.05, acc) == acc
    slip = ((0.9, 0, 0), (0, 0.9, 0), (0, 0, 0.9))
    assert close(accumulate_ovf(Vec3(-1, 0, 0), slip, 0.05, Vec3()), (-0.045, 0, 0))
    with pytest.raises(ValueError):
        accumulate_ovf(Vec3(), IDENTITY3, 0.0, acc)


def test_physical_distance():
    d_ovf, d_rm = Vec3(-1, 0, 0), Vec3(0.1, 0, 0)
    assert close(physical_distance(d_ovf, d_rm, 1, 1), (1.1, 0, 0))
    assert close(physical_distance(d_ovf, d_rm, 0.5, 1), (0.6, 0, 0))
    assert physical_distance(Vec3(), Vec3(), 0.7, 1.3) == Vec3()


def test_map_to_ve():
    d = Vec3(1.25, 0, -0.5)
    assert map_to_ve(d, VeMapping()) is d
    assert map_to_ve(d, VeMapping("uniform-gain", gain=2.0)) == Vec3(2.5, 0, -1.0)
    assert close(map_to_ve(Vec3(1, 0, 0), VeMapping("rotation", angle=math.pi / 2)), (0, 0, -1))
    hook = VeMapping("custom", hook=lambda v, p: v * p["k"], params={"k": 3.0})
    assert map_to_ve(d, hook) == Vec3(3.75, 0, -1.5)
    with pytest.raises(ValueError):
        VeMapping("warp")
    with pytest.raises(ValueError):
        VeMapping("custom")


@given(coord, coord, coord)
def test_identity_mapping_bitwise(x, y, z):
    v = Vec3(x, y, z)
    assert tuple(map_to_ve(v, VeMapping())) == (x, y, z)


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=30))
def test_calculator_ovf_equals_eq7(deltas):
    calc = LocomotionCalculator(CFG)
    n1 = n2 = 0.0
    for k, (a, b) in enumerate(deltas):
        n1 += a
        n2 += b
        st_ = calc.update(k * 0.05, Vec3(0, 1, 0), (n1, n2))
    ref = ovf_distance_from_revs(n1, n2, CFG)
    assert close(st_.D_ovf, tuple(ref), 1e-9 * max(1.0, ref.norm()))
    assert st_.D_ovf.y == 0.0 and st_.D_pe.y == 0.0 and st_.D_ve.y == 0.0


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.05, 0.5), st.floats(-math.pi, math.pi))
def test_gain_matching_drift_law(b1, b2, offset, heading):
    """Carry-back with no intent: the body moves with the field, so
    delta D_rm = delta D_ovf and delta D_pe = (b1 - b2) * offset along travel."""
    calc = LocomotionCalculator(CFG, beta1=b1, beta2=b2)
    u = Vec3(math.cos(heading), 0, math.sin(heading))
    body = u * offset
    start = calc.update(0.0, body + Vec3(0, 1, 0), (0.0, 0.0))
    d_pe0 = start.D_pe
    # revolutions that move the field by -u * offset, from the 2x2 inverse
    a, b = ovf_distance_from_revs(1, 0, CFG), ovf_distance_from_revs(0, 1, CFG)
    det = a.x * b.z - b.x * a.z
    dx, dz = -u.x * offset, -u.z * offset
    n1 = (dx * b.z - b.x * dz) / det
    n2 = (a.x * dz - dx * a.z) / det
    end = calc.update(1.0, Vec3(0, 1, 0), (n1, n2))
    delta = end.D_pe - d_pe0
    expect = u * (offset * (b1 - b2))
    assert close(delta, tuple(expect), 1e-9)
    # projected on the travel direction: sign(beta1 - beta2)
    along = delta.dot(u)
    if b1 > b2:
        assert along > 0
    elif b1 < b2:
        assert along < 0
