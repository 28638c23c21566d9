from __future__ import annotations

import os
import threading

from ..primitives import sha256

SEED_SIZE = 32


class EnclaveRng:
    """In-enclave random source.

    Without a seed it reads OS entropy.  With a 32-byte seed it expands
    SHA-256(seed || counter) deterministically; that mode exists for
    reproducible tests only.
    """

    def __init__(self, seed: bytes | None = None):
        if seed is not None and len(seed) != SEED_SIZE:
            raise ValueError(f"seed must be {SEED_SIZE} bytes")
        self._seed = bytearray(seed) if seed is not None else None
        self._counter = 0
        self._pool = bytearray()
        self._lock = threading.Lock()

    @property
    def deterministic(self) -> bool:
        return self._seed is not None

    def read(self, n: int) -> bytearray:
        if self._seed is None:
            return bytearray(os.urandom(n))
        with self._lock:
            while len(self._pool) < n:
                block = sha256(bytes(self._seed) + self._counter.to_bytes(8, "big"))
                self._pool += block
                self._counter += 1
            out = self._pool[:n]
            del self._pool[:n]
        return out

    def wipe(self) -> None:
        if self._seed is not None:
            self._seed[:] = bytes(len(self._seed))
        self._pool[:] = bytes(len(self._pool))
