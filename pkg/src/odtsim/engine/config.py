"""Scenario description for one closed-loop run."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from ..geom import Vec3, rotate_about_y
from ..kinematics import RigConfig
from ..locomotion import SlipModel, VeMapping
from ..plant import Segment, WalkerProfile
from ..tracking import TrackerModel


@dataclass(frozen=True)
class LatencyParams:
    T_rm: float = 0.022  # tracker
    T_ovf: float = 0.008  # drive telemetry over the bus
    T_c: float = 0.001  # serial upload to / commands from the PC

    def __post_init__(self):
        if min(self.T_rm, self.T_ovf, self.T_c) < 0:
            raise ValueError("latencies must be non-negative")

    @property
    def T_m(self) -> float:
        return max(self.T_rm, self.T_ovf)

    @property
    def T_s(self) -> float:
        return self.T_m + self.T_c


@dataclass(frozen=True)
class ControllerParams:
    kind: str = "proportional"
    accel_limit: float = 12.0  # m/s^2 at the surface
    p_ref: Vec3 = field(default_factory=Vec3)


@dataclass(frozen=True)
class LocomotionParams:
    beta1: float = 1.0
    beta2: float = 1.0
    slip: SlipModel = 1.0
    mapping: VeMapping = field(default_factory=VeMapping)


@dataclass(frozen=True)
class ScenarioConfig:
    rig: RigConfig = field(default_factory=RigConfig)
    tracker: TrackerModel = field(default_factory=TrackerModel)
    latency: LatencyParams = field(default_factory=LatencyParams)
    walker: WalkerProfile = field(default_factory=WalkerProfile)
    controller: ControllerParams = field(default_factory=ControllerParams)
    locomotion: LocomotionParams = field(default_factory=LocomotionParams)
    duration: float = 10.0
    seed: int = 0
    drive_link: str = "direct"
    start_position: Vec3 = field(default_factory=lambda: Vec3(0.0, 1.0, 0.0))
    name: str = "scenario"

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.drive_link not in ("direct", "modbus"):
            raise ValueError("drive_link must be 'direct' or 'modbus'")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def rotate_scenario(sc: ScenarioConfig, quarter_turns: int) -> ScenarioConfig:
    """The same scenario turned by ``quarter_turns`` x 90 deg about +Y."""
    ang = quarter_turns * math.pi / 2

    def rot(v: Vec3) -> Vec3:
        r = rotate_about_y(v, ang)
        # snap the cos/sin residue so axis-aligned inputs stay axis-aligned
        return Vec3(*(round(c, 15) for c in r))

    walker = dataclasses.replace(
        sc.walker,
        segments=tuple(dataclasses.replace(s, target=rot(s.target)) for s in sc.walker.segments))
    ctrl = dataclasses.replace(sc.controller, p_ref=rot(sc.controller.p_ref))
    return dataclasses.replace(sc, walker=walker, controller=ctrl,
                               start_position=rot(sc.start_position))


__all__ = ["ControllerParams", "LatencyParams", "LocomotionParams", "ScenarioConfig",
           "Segment", "rotate_scenario"]
