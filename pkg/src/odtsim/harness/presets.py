"""Canned experiments: acceleration tests, trajectories, start-stop walks and
the gain sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from ..engine import LocomotionParams, ScenarioConfig, run
from ..engine.trace import Trace
from ..geom import Vec3
from ..kinematics import THEORETICAL_EFFICIENCY, RigConfig, acceleration_envelope, max_speed_envelope
from ..plant import Segment, WalkerProfile, acceleration_experiment
from ..tracking import TrackerModel

WALK_SPEED = 0.5  # m/s; keeps the steady offset well inside the active radius
WALK_RAMP = 1.0  # m/s^2
ACCEL_LIMITS = (39.32, 12.0, 3.6)  # m/s^2 at the surface
GAIN_RATIOS = ((0.5, 1.0), (1.0, 1.0), (5.0, 1.0))


class PresetError(KeyError):
    pass


@dataclass
class PresetResult:
    name: str
    runs: dict[str, Trace] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)


def _quiet(**kw) -> ScenarioConfig:
    # noise off so drift and latency measurements are exact
    kw.setdefault("tracker", TrackerModel(noise_sigma=0.0))
    return ScenarioConfig(**kw)


def startstop_scenario(axis: str = "x", speed: float = WALK_SPEED, walk: float = 4.0,
                       rest: float = 6.0, **kw) -> ScenarioConfig:
    """Walk along an axis for ``walk`` seconds, then stop and stand."""
    target = Vec3(speed, 0.0, 0.0) if axis == "x" else Vec3(0.0, 0.0, speed)
    prof = WalkerProfile((Segment(walk, target, WALK_RAMP), Segment(rest, Vec3(), WALK_RAMP)))
    kw.setdefault("name", f"startstop-{axis}")
    return _quiet(walker=prof, duration=walk + rest, **kw)


def polygon_segments(vertices, speed: float = WALK_SPEED, ramp: float = WALK_RAMP,
                     pause: bool = False):
    """Walker segments visiting ``vertices`` in order at ``speed``.

    Leg durations are ``length / speed``: the distance lost while ramping up is
    regained while ramping into the next leg, so the path closes on the final
    vertex. With ``pause`` the walker comes to rest at every vertex, which
    keeps sharp corners exact instead of rounding them off.
    """
    segs = []
    for (x0, z0), (x1, z1) in zip(vertices, vertices[1:]):
        length = math.hypot(x1 - x0, z1 - z0)
        segs.append(Segment(length / speed, Vec3((x1 - x0) / length * speed, 0.0,
                                                 (z1 - z0) / length * speed), ramp))
        if pause:
            segs.append(Segment(speed / ramp, Vec3(), ramp))
    return segs


def circle_vertices(radius: float = 1.5, n: int = 72):
    # start at the origin heading +X, circle counter-clockwise seen from above (+Y)
    return [(radius * math.sin(2 * math.pi * i / n), radius * (math.cos(2 * math.pi * i / n) - 1.0))
            for i in range(n + 1)]


def square_vertices(side: float = 2.0):
    return [(0.0, 0.0), (side, 0.0), (side, -side), (0.0, -side), (0.0, 0.0)]


def trajectory_scenario(name: str, vertices, rest: float = 6.0,
                        pause: bool = False) -> ScenarioConfig:
    segs = polygon_segments(vertices, pause=pause)
    segs.append(Segment(rest, Vec3(), WALK_RAMP))
    prof = WalkerProfile(tuple(segs))
    return _quiet(walker=prof, duration=prof.total_duration, name=name)


def gain_sweep_scenarios(base: ScenarioConfig | None = None) -> dict[str, ScenarioConfig]:
    base = base or startstop_scenario("x")
    out = {}
    for b1, b2 in GAIN_RATIOS:
        key = f"beta{b1:g}-{b2:g}"
        out[key] = base.replace(locomotion=LocomotionParams(beta1=b1, beta2=b2),
                                name=f"gain-sweep-{key}")
    return out


def accel_sweep_table(rig: RigConfig | None = None) -> list[dict]:
    rig = rig or RigConfig()
    rows = []
    for axis in ("x", "z"):
        for lim in ACCEL_LIMITS:
            r = acceleration_experiment(rig, lim, axis)
            rows.append({"axis": axis, "slew_limit": lim, "start_accel": r["start_accel"],
                         "brake_accel": r["brake_accel"]})
    return rows


def envelope_table(rig: RigConfig | None = None, user_mass: float = 100.0) -> list[dict]:
    rig = rig or RigConfig()
    # the theoretical figures assume rated efficiency and no friction
    theo = rig.replace(eta=THEORETICAL_EFFICIENCY, tau_fric=0.0)
    acc = acceleration_envelope(rig, user_mass)
    return [
        {"quantity": "max_axis_speed", "value": max_speed_envelope(rig, 0.0), "unit": "m/s"},
        {"quantity": "theoretical_acceleration",
         "value": acceleration_envelope(theo, 0.0)["unloaded_start"], "unit": "m/s^2"},
        {"quantity": "unloaded_start_acceleration", "value": acc["unloaded_start"], "unit": "m/s^2"},
        {"quantity": "unloaded_brake_acceleration", "value": acc["unloaded_brake"], "unit": "m/s^2"},
        {"quantity": f"loaded_acceleration_{user_mass:g}kg",
         "value": acceleration_envelope(theo, user_mass)["loaded"],
         "unit": "m/s^2"},
    ]


def _scenarios(name: str, base: ScenarioConfig | None) -> dict[str, ScenarioConfig]:
    if name in ("startstop-x", "startstop-z"):
        return {name: startstop_scenario(name[-1])}
    if name == "circle":
        return {name: trajectory_scenario(name, circle_vertices())}
    if name == "square":
        return {name: trajectory_scenario(name, square_vertices(), pause=True)}
    if name == "gain-sweep":
        return gain_sweep_scenarios(base)
    return {}


PRESETS: tuple[str, ...] = ("accel-sweep", "circle", "square", "startstop-x", "startstop-z",
                            "gain-sweep", "envelope-report")


def preset_scenarios(name: str, seed: int | None = None) -> dict[str, ScenarioConfig]:
    """Scenarios a preset runs, keyed by run id (empty for table-only presets)."""
    if name not in PRESETS:
        raise PresetError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    scs = _scenarios(name, None)
    if seed is not None:
        scs = {k: v.replace(seed=seed) for k, v in scs.items()}
    return scs


def run_preset(name: str, seed: int | None = None,
               runner: Callable[[ScenarioConfig], Trace] = run) -> PresetResult:
    scs = preset_scenarios(name, seed)
    res = PresetResult(name)
    for key in sorted(scs):
        res.runs[key] = runner(scs[key])
    if name == "accel-sweep":
        res.tables["accel"] = accel_sweep_table()
    elif name == "envelope-report":
        res.tables["envelope"] = envelope_table()
    return res
