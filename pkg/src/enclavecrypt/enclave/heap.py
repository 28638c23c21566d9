from __future__ import annotations

import threading
from contextlib import contextmanager

from .errors import HeapExhausted

DEFAULT_BUDGET = 102_400
MIN_BUDGET = 4096
RECORD_OVERHEAD = 64


class TrustedHeapMeter:
    """Byte accounting for everything the enclave holds.

    Each allocation costs its payload plus a fixed bookkeeping overhead.
    An allocation that would overshoot the budget raises and changes
    nothing.
    """

    def __init__(self, budget_bytes: int = DEFAULT_BUDGET):
        self.budget_bytes = budget_bytes
        self.used_bytes = 0
        self.peak_bytes = 0
        self._lock = threading.Lock()

    def charge(self, payload: int) -> int:
        cost = payload + RECORD_OVERHEAD
        with self._lock:
            if self.used_bytes + cost > self.budget_bytes:
                raise HeapExhausted(
                    f"trusted heap exhausted: {self.used_bytes} used, "
                    f"{cost} requested, budget {self.budget_bytes}")
            self.used_bytes += cost
            self.peak_bytes = max(self.peak_bytes, self.used_bytes)
        return cost

    def release(self, cost: int) -> None:
        with self._lock:
            self.used_bytes -= cost

    @contextmanager
    def staging(self, payload: int):
        """Charge a transient buffer for the duration of one boundary call."""
        cost = self.charge(payload)
        try:
            yield
        finally:
            self.release(cost)
