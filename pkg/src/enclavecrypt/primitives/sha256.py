"""Incremental SHA-256 (FIPS 180-4).

The state is a plain value: ``sha256_update`` returns a new state and never
mutates its argument.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

BLOCK_SIZE = 64
DIGEST_SIZE = 32

_K = np.array([
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
], dtype=np.uint64)

_H0 = (0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
       0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19)

# uint64 throughout: numba turns mixed signed/unsigned arithmetic into floats
_U = np.uint64
_M32 = np.uint64(0xFFFFFFFF)


@njit(inline="always")
def _rotr(x, n):
    return ((x >> _U(n)) | (x << _U(32 - n))) & _M32


@njit(cache=True)
def _compress(h, data, k):
    """Fold every complete 64-byte block of data into h (uint32[8]) in place."""
    w = np.empty(64, np.uint64)
    hv = np.empty(8, np.uint64)
    for i in range(8):
        hv[i] = h[i]
    for off in range(0, data.shape[0] - 63, 64):
        for t in range(16):
            j = off + 4 * t
            w[t] = ((np.uint64(data[j]) << _U(24)) | (np.uint64(data[j + 1]) << _U(16))
                    | (np.uint64(data[j + 2]) << _U(8)) | np.uint64(data[j + 3]))
        for t in range(16, 64):
            x = w[t - 15]
            y = w[t - 2]
            s0 = _rotr(x, 7) ^ _rotr(x, 18) ^ (x >> _U(3))
            s1 = _rotr(y, 17) ^ _rotr(y, 19) ^ (y >> _U(10))
            w[t] = (w[t - 16] + s0 + w[t - 7] + s1) & _M32
        a, b, c, d, e, f, g, hh = hv[0], hv[1], hv[2], hv[3], hv[4], hv[5], hv[6], hv[7]
        for t in range(64):
            s1 = _rotr(e, 6) ^ _rotr(e, 11) ^ _rotr(e, 25)
            ch = (e & f) ^ (~e & g & _M32)
            t1 = (hh + s1 + ch + k[t] + w[t]) & _M32
            s0 = _rotr(a, 2) ^ _rotr(a, 13) ^ _rotr(a, 22)
            maj = (a & b) ^ (a & c) ^ (b & c)
            t2 = (s0 + maj) & _M32
            hh = g
            g = f
            f = e
            e = (d + t1) & _M32
            d = c
            c = b
            b = a
            a = (t1 + t2) & _M32
        hv[0] = (hv[0] + a) & _M32
        hv[1] = (hv[1] + b) & _M32
        hv[2] = (hv[2] + c) & _M32
        hv[3] = (hv[3] + d) & _M32
        hv[4] = (hv[4] + e) & _M32
        hv[5] = (hv[5] + f) & _M32
        hv[6] = (hv[6] + g) & _M32
        hv[7] = (hv[7] + hh) & _M32
    for i in range(8):
        h[i] = hv[i]


@dataclass(frozen=True)
class Sha256State:
    h: tuple[int, ...] = _H0
    pending: bytes = b""
    total_bits: int = 0

    def __post_init__(self):
        if len(self.h) != 8:
            raise ValueError("SHA-256 state needs 8 chaining words")
        if len(self.pending) >= BLOCK_SIZE:
            raise ValueError("pending buffer must hold fewer than 64 bytes")


def sha256_init() -> Sha256State:
    return Sha256State()


def sha256_update(state: Sha256State, data: bytes) -> Sha256State:
    if not data:
        return state
    buf = state.pending + bytes(data)
    full = len(buf) - len(buf) % BLOCK_SIZE
    h = state.h
    if full:
        arr = np.array(h, dtype=np.uint32)
        _compress(arr, np.frombuffer(buf, dtype=np.uint8, count=full), _K)
        h = tuple(int(v) for v in arr)
    bits = (state.total_bits + 8 * len(data)) & 0xFFFFFFFFFFFFFFFF
    return Sha256State(h, buf[full:], bits)


def sha256_final(state: Sha256State) -> bytes:
    tail = b"\x80" + b"\x00" * ((55 - len(state.pending)) % BLOCK_SIZE)
    tail += struct.pack(">Q", state.total_bits)
    done = sha256_update(state, tail)
    return struct.pack(">8I", *done.h)


def sha256(data: bytes) -> bytes:
    """One-shot convenience wrapper."""
    return sha256_final(sha256_update(sha256_init(), data))
