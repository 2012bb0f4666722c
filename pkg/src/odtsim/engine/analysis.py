"""Post-run measurements on a trace."""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicHermiteSpline

STAGES = ("idle", "start-transient", "offset-walking", "stop-transient", "carry-back")
CANONICAL_ORDER = ["start-transient", "offset-walking", "stop-transient", "carry-back"]

MOVING_EPS = 1e-9
INTENT_EPS = 1e-3
OVF_EPS = 1e-3
DECEL_THRESHOLD = 0.1  # m/s^2
CANCEL_FRACTION = 0.1


class AnalysisError(ValueError):
    pass


def _xz(a: np.ndarray) -> np.ndarray:
    return a[:, [0, 2]]


def _intended_spline(trace):
    t = trace.t
    d = _xz(trace.vectors("intended_distance"))
    v = _xz(trace.vectors("intent_velocity"))
    # pad one tick before the start so lookups at t < 0 give zero distance
    dt = t[1] - t[0]
    tt = np.concatenate([[t[0] - dt], t])
    dd = np.vstack([np.zeros((1, 2)), d])
    vv = np.vstack([np.zeros((1, 2)), v])
    return CubicHermiteSpline(tt, dd, vv, axis=0)


def _intended_at(spline, t: np.ndarray) -> np.ndarray:
    out = spline(np.clip(t, spline.x[0], spline.x[-1]))
    out[t <= spline.x[0]] = 0.0
    return out


def measure_scene_latency(trace, max_delay: float = 0.2, step: float = 1e-3) -> float:
    """Delay that best aligns the estimated distance ``D_pe`` with the walker's
    intended distance, found by grid search over ``[0, max_delay]``."""
    if len(trace) < 4:
        raise AnalysisError("insufficient motion")
    d_int = _xz(trace.vectors("intended_distance"))
    if not np.any(np.abs(d_int) > 1e-9):
        raise AnalysisError("insufficient motion")
    t = trace.t
    d_pe = _xz(trace.vectors("D_pe"))
    spline = _intended_spline(trace)
    n = int(round(max_delay / step))
    errs = np.empty(n + 1)
    for i in range(n + 1):
        diff = d_pe - _intended_at(spline, t - i * step)
        errs[i] = np.mean(np.sum(diff * diff, axis=1))
    return float(np.argmin(errs) * step)


def _stop_index(trace) -> int:
    speed = np.linalg.norm(_xz(trace.vectors("intent_velocity")), axis=1)
    moving = np.nonzero(speed > MOVING_EPS)[0]
    if len(moving) == 0 or moving[-1] + 1 >= len(speed):
        raise AnalysisError("no stop event")
    return int(moving[-1] + 1)


def measure_working_delay(trace) -> float:
    """Time from the walker stopping until the field has stopped carrying them
    back. ``inf`` if the field is still moving at the end of the trace."""
    i_stop = _stop_index(trace)
    t = trace.t
    ovf = np.linalg.norm(_xz(trace.vectors("ovf_velocity")), axis=1)
    active = np.nonzero(ovf[i_stop:] >= OVF_EPS)[0]
    if len(active) == 0:
        return 0.0
    last = i_stop + int(active[-1])
    if last + 1 >= len(t):
        return math.inf
    return float(t[last + 1] - t[i_stop])


def measure_ve_drift(trace) -> float:
    """Virtual displacement accumulated after the stop, signed along the
    direction of travel. Positive means the scene kept moving forward."""
    i_stop = _stop_index(trace)
    d_ve = _xz(trace.vectors("D_ve"))
    d_int = _xz(trace.vectors("intended_distance"))
    direction = d_int[i_stop]
    n = np.linalg.norm(direction)
    if n == 0.0:
        raise AnalysisError("no stop event")
    return float(np.dot(d_ve[-1] - d_ve[i_stop], direction / n))


def classify_stages(trace) -> list[str]:
    """Label each record with its locomotion stage."""
    if len(trace) == 0:
        return []
    t = trace.t
    intent = _xz(trace.vectors("intent_velocity"))
    ovf = _xz(trace.vectors("ovf_velocity"))
    speed = np.linalg.norm(intent, axis=1)
    ovf_speed = np.linalg.norm(ovf, axis=1)
    if len(t) > 1:
        dspeed = np.gradient(speed, t)
    else:
        dspeed = np.zeros(1)
    residual = np.linalg.norm(intent + ovf, axis=1)
    labels = []
    for i in range(len(t)):
        if speed[i] < INTENT_EPS:
            labels.append("carry-back" if ovf_speed[i] >= OVF_EPS else "idle")
        elif dspeed[i] < -DECEL_THRESHOLD:
            labels.append("stop-transient")
        elif residual[i] <= CANCEL_FRACTION * speed[i]:
            labels.append("offset-walking")
        else:
            labels.append("start-transient")
    return labels


def stage_sequence(labels) -> list[str]:
    """Run-length compressed stage labels, idle removed."""
    seq: list[str] = []
    for s in labels:
        if s != "idle" and (not seq or seq[-1] != s):
            seq.append(s)
    return seq


def stage_boundaries(trace) -> list[dict]:
    """Start and end time of each contiguous stage run."""
    out: list[dict] = []
    for r in trace.records:
        if out and out[-1]["stage"] == r.stage:
            out[-1]["end"] = r.t
        else:
            out.append({"stage": r.stage, "start": r.t, "end": r.t})
    return out


def _safe(fn, trace):
    try:
        return fn(trace)
    except AnalysisError:
        return None


def compute_metrics(trace) -> dict:
    """Summary numbers for a run; measurements that do not apply are ``None``."""
    records = trace.records
    body = trace.vectors("body")
    cx, cz = trace.meta.get("center", (0.0, 0.0))
    wd = _safe(measure_working_delay, trace)
    return {
        "name": trace.name,
        "n_records": len(records),
        "scene_latency": _safe(measure_scene_latency, trace),
        "working_delay": None if wd is None or math.isinf(wd) else wd,
        "working_delay_unbounded": wd is not None and math.isinf(wd),
        "ve_drift": _safe(measure_ve_drift, trace),
        "stage_sequence": stage_sequence(trace.stages),
        "stage_boundaries": stage_boundaries(trace),
        "saturation_counts": {
            "speed": int(sum(r.speed_saturated for r in records)),
            "slew": int(sum(r.slew_limited for r in records)),
        },
        "fault": trace.fault,
        "max_local_radius": float(np.max(np.hypot(body[:, 0] - cx, body[:, 2] - cz))) if records else 0.0,
        "ve_path_length": float(np.sum(np.linalg.norm(np.diff(trace.vectors("D_ve"), axis=0),
                                                      axis=1))) if len(records) > 1 else 0.0,
        "final_ve": list(records[-1].D_ve.as_tuple()) if records else None,
    }
