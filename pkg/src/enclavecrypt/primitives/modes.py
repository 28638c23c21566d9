"""ECB and CBC over block-aligned byte strings.

These operate on whole blocks only; streaming, residual buffering and
padding are the caller's business.  The CBC helpers return the updated
chaining block alongside the output so a stream can be continued.
"""

from __future__ import annotations

import numpy as np

from .aes import (
    BLOCK_SIZE,
    AesRoundKeys,
    cbc_decrypt_kernel,
    cbc_encrypt_kernel,
    ecb_decrypt_kernel,
    ecb_encrypt_kernel,
)


def _aligned(data: bytes) -> np.ndarray:
    if len(data) % BLOCK_SIZE:
        raise ValueError(f"data length {len(data)} is not a multiple of {BLOCK_SIZE}")
    return np.frombuffer(bytes(data), dtype=np.uint8).copy()


def _chain(iv: bytes) -> np.ndarray:
    if len(iv) != BLOCK_SIZE:
        raise ValueError(f"IV must be {BLOCK_SIZE} bytes")
    return np.frombuffer(bytes(iv), dtype=np.uint8).copy()


def ecb_encrypt(rk: AesRoundKeys, data: bytes) -> bytes:
    buf = _aligned(data)
    ecb_encrypt_kernel(rk.schedule, rk.nr, buf)
    return buf.tobytes()


def ecb_decrypt(rk: AesRoundKeys, data: bytes) -> bytes:
    buf = _aligned(data)
    ecb_decrypt_kernel(rk.schedule, rk.nr, buf)
    return buf.tobytes()


def cbc_encrypt(rk: AesRoundKeys, iv: bytes, data: bytes) -> tuple[bytes, bytes]:
    buf, chain = _aligned(data), _chain(iv)
    cbc_encrypt_kernel(rk.schedule, rk.nr, chain, buf)
    return buf.tobytes(), chain.tobytes()


def cbc_decrypt(rk: AesRoundKeys, iv: bytes, data: bytes) -> tuple[bytes, bytes]:
    buf, chain = _aligned(data), _chain(iv)
    cbc_decrypt_kernel(rk.schedule, rk.nr, chain, buf)
    return buf.tobytes(), chain.tobytes()
