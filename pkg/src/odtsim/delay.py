"""Integer-step delay lines used to model transport latency."""

from __future__ import annotations

import heapq
from typing import Any


class DelayLine:
    """FIFO-stable event queue: items pushed at step k come out at k + delay.

    Ties are released in push order, which keeps runs deterministic.
    """

    def __init__(self, delay_steps: int):
        if delay_steps < 0:
            raise ValueError("delay must be non-negative")
        self.delay_steps = int(delay_steps)
        self._heap: list = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, step: int, item: Any, extra_delay: int = 0) -> int:
        due = step + self.delay_steps + extra_delay
        heapq.heappush(self._heap, (due, self._seq, item))
        self._seq += 1
        return due

    def pop_due(self, step: int) -> list:
        out = []
        heap = self._heap
        while heap and heap[0][0] <= step:
            out.append(heapq.heappop(heap)[2])
        return out


def to_steps(seconds: float, dt: float) -> int:
    """Quantize a duration to whole plant steps."""
    return int(round(seconds / dt))
