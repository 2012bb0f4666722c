"""Reconstruction of walked distance from drive telemetry and tracker data.

Physical distance is the field's carried distance (sign flipped) plus the
user's remaining offset from the reference point, each weighted by a gain.
With equal gains the carry-back after a stop cancels exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .geom import Vec3, rotate_about_y
from .kinematics import RigConfig, ovf_distance_from_revs

Matrix3 = tuple[tuple[float, float, float], tuple[float, float, float], tuple[float, float, float]]
IDENTITY3: Matrix3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

# Constant matrix, scalar multiple of identity, or a function of time.
SlipModel = Union[Matrix3, float, Callable[[float], Matrix3]]


def slip_matrix(slip: SlipModel, t: float) -> Matrix3:
    if callable(slip):
        return slip(t)
    if isinstance(slip, (int, float)):
        s = float(slip)
        return ((s, 0.0, 0.0), (0.0, s, 0.0), (0.0, 0.0, s))
    return slip


def matvec(m: Matrix3, v: Vec3) -> Vec3:
    return Vec3(m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z)


def remaining_distance(p_ug: Vec3, p_ref: Vec3) -> Vec3:
    return Vec3(p_ug.x - p_ref.x, 0.0, p_ug.z - p_ref.z)


def accumulate_ovf(v_ovf: Vec3, S_L: Matrix3, dt: float, acc: Vec3) -> Vec3:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return acc + matvec(S_L, v_ovf) * dt


def physical_distance(D_ovf: Vec3, D_rm: Vec3, beta1: float = 1.0,
                      beta2: float = 1.0) -> Vec3:
    return D_rm * beta2 - D_ovf * beta1


@dataclass(frozen=True)
class VeMapping:
    """Map from physical to virtual-environment distance.

    ``kind`` is ``identity``, ``uniform-gain`` (``gain``), ``rotation``
    (``angle`` in radians, right-handed about +Y) or ``custom`` (``hook``
    called as ``hook(D_pe, params)``). ``params`` is passed through untouched.
    """

    kind: str = "identity"
    gain: float = 1.0
    angle: float = 0.0
    hook: Callable[[Vec3, dict], Vec3] | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("identity", "uniform-gain", "rotation", "custom"):
            raise ValueError(f"unknown mapping kind {self.kind!r}")
        if self.kind == "custom" and self.hook is None:
            raise ValueError("custom mapping needs a hook")


def map_to_ve(D_pe: Vec3, m: VeMapping) -> Vec3:
    if m.kind == "identity":
        return D_pe
    if m.kind == "uniform-gain":
        return D_pe * m.gain
    if m.kind == "rotation":
        return rotate_about_y(D_pe, m.angle)
    return m.hook(D_pe, m.params)


@dataclass
class LocomotionState:
    D_ovf: Vec3 = field(default_factory=Vec3)
    D_rm: Vec3 = field(default_factory=Vec3)
    D_pe: Vec3 = field(default_factory=Vec3)
    D_ve: Vec3 = field(default_factory=Vec3)
    beta1: float = 1.0
    beta2: float = 1.0
    slip: SlipModel = 1.0


class LocomotionCalculator:
    """Accumulates field distance from revolution counts and maps to the VE.

    Each ``update`` takes one synchronized measurement: the tracked body
    center and the two encoder counts captured at the same instant.
    """

    def __init__(self, cfg: RigConfig, p_ref: Vec3 = Vec3(), beta1: float = 1.0,
                 beta2: float = 1.0, slip: SlipModel = 1.0,
                 mapping: VeMapping | None = None):
        self.cfg = cfg
        self.p_ref = p_ref
        self.mapping = mapping or VeMapping()
        self.state = LocomotionState(beta1=beta1, beta2=beta2, slip=slip)
        self._last_revs: tuple[float, float] | None = None

    def update(self, t: float, p_ug: Vec3, revs: Sequence[float]) -> LocomotionState:
        st = self.state
        prev = self._last_revs or (0.0, 0.0)
        step = ovf_distance_from_revs(revs[0] - prev[0], revs[1] - prev[1], self.cfg)
        st.D_ovf = st.D_ovf + matvec(slip_matrix(st.slip, t), step)
        self._last_revs = (revs[0], revs[1])
        st.D_rm = remaining_distance(p_ug, self.p_ref)
        st.D_pe = physical_distance(st.D_ovf, st.D_rm, st.beta1, st.beta2)
        st.D_ve = map_to_ve(st.D_pe, self.mapping)
        return st
