"""PKCS#7 padding for the 16-byte AES block."""

from __future__ import annotations

BLOCK_SIZE = 16


class PaddingError(ValueError):
    """Padding bytes are inconsistent: wrong key or corrupted ciphertext."""


def pkcs7_pad(tail: bytes) -> bytes:
    n = len(tail)
    if n >= BLOCK_SIZE:
        raise ValueError(f"tail must be shorter than {BLOCK_SIZE} bytes, got {n}")
    k = BLOCK_SIZE - n
    return bytes(tail) + bytes([k]) * k


def pkcs7_unpad(block: bytes) -> bytes:
    """Strip padding from the final block.

    Every byte of the block is inspected regardless of where a mismatch
    occurs, so the work done does not depend on the pad length.
    """
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")
    k = block[-1]
    bad = int(k == 0) | int(k > BLOCK_SIZE)
    for i in range(BLOCK_SIZE):
        in_pad = int(i >= BLOCK_SIZE - k)
        bad |= in_pad & int(block[i] != k)
    if bad:
        raise PaddingError("invalid PKCS#7 padding")
    return bytes(block[: BLOCK_SIZE - k])
