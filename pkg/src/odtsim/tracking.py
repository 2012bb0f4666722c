"""Waist tracker: body-center reconstruction and sensor stream emulation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .delay import DelayLine, to_steps
from .geom import UnitQuat, Vec3, quat_rotate


class TrackingError(ValueError):
    pass


@dataclass(frozen=True)
class TrackerSample:
    t: float
    p_tg: Vec3
    q_tg: UnitQuat


@dataclass(frozen=True)
class TrackerModel:
    p_utrl: Vec3 = field(default_factory=lambda: Vec3(0.0, -0.1, 0.0))
    latency: float = 0.022
    noise_sigma: float = 0.001
    sample_rate: float = 1000.0

    def __post_init__(self):
        if self.latency < 0 or self.noise_sigma < 0 or self.sample_rate <= 0:
            raise TrackingError("tracker latency, noise and rate must be non-negative")


def body_center_global(s: TrackerSample, p_utrl: Vec3) -> Vec3:
    """Global position of the body center from the tracker pose."""
    q = s.q_tg
    if abs(math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z) - 1.0) > 1e-6:
        raise TrackingError("pose attitude invalid")
    return s.p_tg + quat_rotate(q, p_utrl)


def tracker_pose_for_body(body: Vec3, q: UnitQuat, p_utrl: Vec3) -> Vec3:
    """Where the tracker sits when the body center is at ``body``."""
    return body - quat_rotate(q, p_utrl)


def sample_tracker(true_pose: tuple[Vec3, UnitQuat], t: float, model: TrackerModel,
                   rng_seed=None) -> TrackerSample:
    """One measurement of ``true_pose`` taken at time ``t``.

    ``rng_seed`` may be an int or a ``numpy.random.Generator``; a generator is
    advanced, an int gives a reproducible single draw.
    """
    p, q = true_pose
    if model.noise_sigma > 0:
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
        nx, ny, nz = rng.normal(0.0, model.noise_sigma, 3)
        p = Vec3(p.x + nx, p.y + ny, p.z + nz)
    return TrackerSample(t, p, q)


class TrackerStream:
    """Tracker samples delivered to consumers ``model.latency`` after capture.

    Capture and delivery times are quantized to ``tick`` seconds. Only the
    most recent ``history`` delivered samples are retained.
    """

    def __init__(self, model: TrackerModel, seed=None, tick: float = 1e-3,
                 history: int = 4096):
        self.model = model
        self.tick = tick
        self._line = DelayLine(to_steps(model.latency, tick))
        self._rng = np.random.default_rng(seed)
        self.delivered: deque[TrackerSample] = deque(maxlen=history)

    def capture(self, t: float, body: Vec3, q: UnitQuat) -> TrackerSample:
        pose = (tracker_pose_for_body(body, q, self.model.p_utrl), q)
        s = sample_tracker(pose, t, self.model, self._rng)
        self._line.push(to_steps(t, self.tick), s)
        return s

    def deliver(self, now: float) -> list[TrackerSample]:
        out = self._line.pop_due(to_steps(now, self.tick))
        self.delivered.extend(out)
        return out

    def newest(self, now: float) -> TrackerSample | None:
        self.deliver(now)
        return self.delivered[-1] if self.delivered else None
