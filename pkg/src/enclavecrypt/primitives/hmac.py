"""HMAC-SHA-256 (RFC 2104) with incremental message absorption."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .sha256 import (
    BLOCK_SIZE,
    Sha256State,
    sha256,
    sha256_final,
    sha256_init,
    sha256_update,
)


class EmptyKeyError(ValueError):
    """HMAC was asked to run with a zero-length key."""


@dataclass(frozen=True)
class HmacState:
    # both halves already absorbed their padded key block; the key itself is not kept
    inner: Sha256State
    outer: Sha256State


def hmac_init(key: bytes) -> HmacState:
    if len(key) == 0:
        raise EmptyKeyError("HMAC key must be at least one byte")
    if len(key) > BLOCK_SIZE:
        key = sha256(key)
    block = bytes(key).ljust(BLOCK_SIZE, b"\x00")
    ipad = bytes(b ^ 0x36 for b in block)
    opad = bytes(b ^ 0x5C for b in block)
    return HmacState(sha256_update(sha256_init(), ipad),
                     sha256_update(sha256_init(), opad))


def hmac_update(state: HmacState, data: bytes) -> HmacState:
    return HmacState(sha256_update(state.inner, data), state.outer)


def hmac_final(state: HmacState) -> bytes:
    return sha256_final(sha256_update(state.outer, sha256_final(state.inner)))


def hmac_sha256(key: bytes, message: bytes | Iterable[bytes]) -> bytes:
    """Compute HMAC-SHA-256 over ``message``, which may be bytes or an iterable of chunks."""
    state = hmac_init(key)
    if isinstance(message, (bytes, bytearray, memoryview)):
        message = (message,)
    for chunk in message:
        state = hmac_update(state, chunk)
    return hmac_final(state)
