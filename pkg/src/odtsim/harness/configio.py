"""JSON scenario files: schema validation and conversion to ``ScenarioConfig``."""

from __future__ import annotations

import dataclasses
import json
from functools import lru_cache
from importlib import resources

import jsonschema

from ..engine.config import ControllerParams, LatencyParams, LocomotionParams, ScenarioConfig
from ..geom import Vec3
from ..kinematics import RigConfig
from ..locomotion import VeMapping
from ..plant import RippleParams, Segment, SwayParams, WalkerProfile
from ..tracking import TrackerModel


class ConfigError(ValueError):
    """The scenario file is unreadable, not JSON, or violates the schema."""


@lru_cache(maxsize=None)
def load_schema(name: str = "scenario") -> dict:
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(data: dict, schema: str = "scenario") -> None:
    try:
        jsonschema.validate(data, load_schema(schema))
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {e.message}") from None


def _vec(v) -> Vec3:
    return Vec3.from_seq(v)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Validate ``data`` and build the scenario; missing fields take defaults."""
    validate(data)
    kw: dict = {}
    try:
        if "rig" in data:
            kw["rig"] = RigConfig(**data["rig"])
        if "tracker" in data:
            t = dict(data["tracker"])
            if "p_utrl" in t:
                t["p_utrl"] = _vec(t["p_utrl"])
            kw["tracker"] = TrackerModel(**t)
        if "latency" in data:
            kw["latency"] = LatencyParams(**data["latency"])
        if "walker" in data:
            w = data["walker"]
            segs = tuple(Segment(s["duration"], _vec(s["target"]), s.get("ramp", 1.0))
                         for s in w.get("segments", []))
            kw["walker"] = WalkerProfile(segs, SwayParams(**w.get("sway", {})),
                                         RippleParams(**w.get("ripple", {})))
        if "controller" in data:
            c = dict(data["controller"])
            if "p_ref" in c:
                c["p_ref"] = _vec(c["p_ref"])
            kw["controller"] = ControllerParams(**c)
        if "locomotion" in data:
            loc = dict(data["locomotion"])
            if isinstance(loc.get("slip"), list):
                loc["slip"] = tuple(tuple(float(x) for x in row) for row in loc["slip"])
            if "mapping" in loc:
                loc["mapping"] = VeMapping(**loc["mapping"])
            kw["locomotion"] = LocomotionParams(**loc)
        for key in ("name", "duration", "seed", "drive_link"):
            if key in data:
                kw[key] = data[key]
        if "start_position" in data:
            kw["start_position"] = _vec(data["start_position"])
        return ScenarioConfig(**kw)
    except ValueError as e:
        # domain validation beyond what the schema can express
        raise ConfigError(str(e)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("schema violation at <root>: config must be a JSON object")
    return scenario_from_dict(data)


def scenario_to_dict(sc: ScenarioConfig) -> dict:
    """Inverse of ``scenario_from_dict`` for scenarios without code hooks."""
    if callable(sc.locomotion.slip) or sc.locomotion.mapping.kind == "custom":
        raise ConfigError("scenarios with callable slip or custom mapping cannot be serialized")
    tracker = dataclasses.asdict(sc.tracker)
    tracker.pop("latency", None)
    tracker["p_utrl"] = list(sc.tracker.p_utrl.as_tuple())
    slip = sc.locomotion.slip
    mapping = sc.locomotion.mapping
    return {
        "name": sc.name,
        "duration": sc.duration,
        "seed": sc.seed,
        "drive_link": sc.drive_link,
        "start_position": list(sc.start_position.as_tuple()),
        "rig": dataclasses.asdict(sc.rig),
        "tracker": tracker,
        "latency": dataclasses.asdict(sc.latency),
        "walker": {
            "segments": [{"duration": s.duration, "target": [s.target.x, s.target.z], "ramp": s.ramp}
                         for s in sc.walker.segments],
            "sway": dataclasses.asdict(sc.walker.sway),
            "ripple": dataclasses.asdict(sc.walker.ripple),
        },
        "controller": {"kind": sc.controller.kind, "accel_limit": sc.controller.accel_limit,
                       "p_ref": list(sc.controller.p_ref.as_tuple())},
        "locomotion": {
            "beta1": sc.locomotion.beta1,
            "beta2": sc.locomotion.beta2,
            "slip": [list(r) for r in slip] if isinstance(slip, tuple) else float(slip),
            "mapping": {"kind": mapping.kind, "gain": mapping.gain, "angle": mapping.angle,
                        "params": dict(mapping.params)},
        },
    }
