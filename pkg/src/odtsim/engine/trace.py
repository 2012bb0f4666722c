"""Per-control-tick signal record of a run."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geom import Vec3


@dataclass(frozen=True)
class TraceRecord:
    t: float
    intent_velocity: Vec3
    intended_distance: Vec3
    body: Vec3
    D_rm: Vec3
    D_ovf: Vec3
    ovf_command: Vec3
    ovf_velocity: Vec3
    motor_speed: tuple[float, float]
    motor_revs: tuple[float, float]
    D_pe: Vec3
    D_ve: Vec3
    speed_saturated: bool = False
    slew_limited: bool = False
    stage: str = ""


_VECTOR_FIELDS = [
    ("intent_velocity", "intent_v"),
    ("intended_distance", "intent_d"),
    ("body", "body_"),
    ("D_rm", "d_rm_"),
    ("D_ovf", "d_ovf_"),
    ("ovf_command", "ovf_cmd_v"),
    ("ovf_velocity", "ovf_v"),
]

# Fixed CSV column order; all values SI (m, m/s, rad/s, rev, s).
COLUMNS = tuple(
    ["t", "stage"]
    + [f"{prefix}{c}" for _, prefix in _VECTOR_FIELDS for c in "xyz"]
    + ["motor1_speed", "motor2_speed", "motor1_revs", "motor2_revs"]
    + [f"d_pe_{c}" for c in "xyz"]
    + [f"d_ve_{c}" for c in "xyz"]
    + ["sat_speed", "sat_slew"]
)


def record_row(r: TraceRecord) -> list:
    row: list = [r.t, r.stage]
    for name, _ in _VECTOR_FIELDS:
        row.extend(getattr(r, name))
    row.extend(r.motor_speed)
    row.extend(r.motor_revs)
    row.extend(r.D_pe)
    row.extend(r.D_ve)
    row.extend([int(r.speed_saturated), int(r.slew_limited)])
    return row


@dataclass
class Trace:
    """Append-only list of records; ``close`` freezes it."""

    name: str = "run"
    records: list[TraceRecord] = field(default_factory=list)
    fault: dict | None = None
    closed: bool = False
    meta: dict = field(default_factory=dict)

    def append(self, rec: TraceRecord) -> None:
        if self.closed:
            raise RuntimeError("trace is closed")
        self.records.append(rec)

    def close(self) -> None:
        self.closed = True

    def __len__(self) -> int:
        return len(self.records)

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def vectors(self, name: str) -> np.ndarray:
        """``(N, 3)`` array of a vector field, e.g. ``vectors("D_pe")``."""
        return np.array([tuple(getattr(r, name)) for r in self.records], dtype=float).reshape(-1, 3)

    def scalars(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def stages(self) -> list[str]:
        return [r.stage for r in self.records]
