"""AES-128/192/256 block cipher (FIPS 197).

SubBytes is never evaluated through a lookup table.  Bytes are bitsliced
into eight bit planes (up to 64 bytes per plane word) and the S-box is
computed arithmetically: inversion in GF(2^8) as x**254 followed by the
affine map.  Every memory access and every branch depends only on public
lengths, never on key or data bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

BLOCK_SIZE = 16

_ROUNDS = {16: 10, 24: 12, 32: 14}


class KeyLengthError(ValueError):
    """Key length is not one of 16, 24 or 32 bytes."""


# ---------------------------------------------------------------------------
# bitsliced GF(2^8) arithmetic, modulus x^8 + x^4 + x^3 + x + 1
#
# A field element is a tuple of eight bit planes; bit i of every lane lives
# in plane i.  All helpers are straight-line so they stay in registers.

@njit(inline="always")
def _reduce(p0, p1, p2, p3, p4, p5, p6, p7, p8, p9, p10, p11, p12, p13, p14):
    # x^k = x^(k-4) + x^(k-5) + x^(k-7) + x^(k-8) for k >= 8, highest first
    p10 ^= p14; p9 ^= p14; p7 ^= p14; p6 ^= p14
    p9 ^= p13; p8 ^= p13; p6 ^= p13; p5 ^= p13
    p8 ^= p12; p7 ^= p12; p5 ^= p12; p4 ^= p12
    p7 ^= p11; p6 ^= p11; p4 ^= p11; p3 ^= p11
    p6 ^= p10; p5 ^= p10; p3 ^= p10; p2 ^= p10
    p5 ^= p9; p4 ^= p9; p2 ^= p9; p1 ^= p9
    p4 ^= p8; p3 ^= p8; p1 ^= p8; p0 ^= p8
    return (p0, p1, p2, p3, p4, p5, p6, p7)


@njit(inline="always")
def _gf_mul(a, b):
    a0, a1, a2, a3, a4, a5, a6, a7 = a
    b0, b1, b2, b3, b4, b5, b6, b7 = b
    return _reduce(
        a0 & b0,
        (a0 & b1) ^ (a1 & b0),
        (a0 & b2) ^ (a1 & b1) ^ (a2 & b0),
        (a0 & b3) ^ (a1 & b2) ^ (a2 & b1) ^ (a3 & b0),
        (a0 & b4) ^ (a1 & b3) ^ (a2 & b2) ^ (a3 & b1) ^ (a4 & b0),
        (a0 & b5) ^ (a1 & b4) ^ (a2 & b3) ^ (a3 & b2) ^ (a4 & b1) ^ (a5 & b0),
        (a0 & b6) ^ (a1 & b5) ^ (a2 & b4) ^ (a3 & b3) ^ (a4 & b2) ^ (a5 & b1)
        ^ (a6 & b0),
        (a0 & b7) ^ (a1 & b6) ^ (a2 & b5) ^ (a3 & b4) ^ (a4 & b3) ^ (a5 & b2)
        ^ (a6 & b1) ^ (a7 & b0),
        (a1 & b7) ^ (a2 & b6) ^ (a3 & b5) ^ (a4 & b4) ^ (a5 & b3) ^ (a6 & b2)
        ^ (a7 & b1),
        (a2 & b7) ^ (a3 & b6) ^ (a4 & b5) ^ (a5 & b4) ^ (a6 & b3) ^ (a7 & b2),
        (a3 & b7) ^ (a4 & b6) ^ (a5 & b5) ^ (a6 & b4) ^ (a7 & b3),
        (a4 & b7) ^ (a5 & b6) ^ (a6 & b5) ^ (a7 & b4),
        (a5 & b7) ^ (a6 & b6) ^ (a7 & b5),
        (a6 & b7) ^ (a7 & b6),
        a7 & b7,
    )


@njit(inline="always")
def _gf_sq(a):
    a0, a1, a2, a3, a4, a5, a6, a7 = a
    z = a0 ^ a0
    return _reduce(a0, z, a1, z, a2, z, a3, z, a4, z, a5, z, a6, z, a7)


@njit(inline="always")
def _gf_inv(x):
    # x**254 == x**-1, with 0 -> 0
    x2 = _gf_sq(x)
    x3 = _gf_mul(x2, x)
    x12 = _gf_sq(_gf_sq(x3))
    x15 = _gf_mul(x12, x3)
    x240 = _gf_sq(_gf_sq(_gf_sq(_gf_sq(x15))))
    return _gf_mul(x240, _gf_mul(x12, x2))


_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(inline="always")
def _sbox_planes(x):
    b0, b1, b2, b3, b4, b5, b6, b7 = _gf_inv(x)
    # affine map with constant 0x63
    return (
        b0 ^ b4 ^ b5 ^ b6 ^ b7 ^ _ONES,
        b1 ^ b5 ^ b6 ^ b7 ^ b0 ^ _ONES,
        b2 ^ b6 ^ b7 ^ b0 ^ b1,
        b3 ^ b7 ^ b0 ^ b1 ^ b2,
        b4 ^ b0 ^ b1 ^ b2 ^ b3,
        b5 ^ b1 ^ b2 ^ b3 ^ b4 ^ _ONES,
        b6 ^ b2 ^ b3 ^ b4 ^ b5 ^ _ONES,
        b7 ^ b3 ^ b4 ^ b5 ^ b6,
    )


@njit(inline="always")
def _inv_sbox_planes(s):
    s0, s1, s2, s3, s4, s5, s6, s7 = s
    # inverse affine map with constant 0x05, then inversion
    return _gf_inv((
        s7 ^ s5 ^ s2 ^ _ONES,
        s0 ^ s6 ^ s3,
        s1 ^ s7 ^ s4 ^ _ONES,
        s2 ^ s0 ^ s5,
        s3 ^ s1 ^ s6,
        s4 ^ s2 ^ s7,
        s5 ^ s3 ^ s0,
        s6 ^ s4 ^ s1,
    ))


@njit(inline="always")
def _transpose8(x):
    # 8x8 bit matrix, row i = byte i: afterwards byte j holds bit j of each row
    t = (x ^ (x >> np.uint64(7))) & np.uint64(0x00AA00AA00AA00AA)
    x = x ^ t ^ (t << np.uint64(7))
    t = (x ^ (x >> np.uint64(14))) & np.uint64(0x0000CCCC0000CCCC)
    x = x ^ t ^ (t << np.uint64(14))
    t = (x ^ (x >> np.uint64(28))) & np.uint64(0x00000000F0F0F0F0)
    return x ^ t ^ (t << np.uint64(28))


@njit(inline="always")
def _byte(x, j):
    return (x >> np.uint64(8 * j)) & np.uint64(0xFF)


@njit(cache=True)
def _sub_bytes(buf, n, inverse):
    """Apply the S-box (or its inverse) to buf[0:n] in place, 64 bytes per pass."""
    for base in range(0, n, 64):
        count = min(64, n - base)
        nw = (count + 7) // 8
        p0 = p1 = p2 = p3 = p4 = p5 = p6 = p7 = np.uint64(0)
        for w in range(nw):
            x = np.uint64(0)
            for i in range(8):
                if 8 * w + i < count:
                    x |= np.uint64(buf[base + 8 * w + i]) << np.uint64(8 * i)
            x = _transpose8(x)
            sh = np.uint64(8 * w)
            p0 |= _byte(x, 0) << sh
            p1 |= _byte(x, 1) << sh
            p2 |= _byte(x, 2) << sh
            p3 |= _byte(x, 3) << sh
            p4 |= _byte(x, 4) << sh
            p5 |= _byte(x, 5) << sh
            p6 |= _byte(x, 6) << sh
            p7 |= _byte(x, 7) << sh
        if inverse:
            r0, r1, r2, r3, r4, r5, r6, r7 = _inv_sbox_planes((p0, p1, p2, p3, p4, p5, p6, p7))
        else:
            r0, r1, r2, r3, r4, r5, r6, r7 = _sbox_planes((p0, p1, p2, p3, p4, p5, p6, p7))
        for w in range(nw):
            y = (_byte(r0, w) | (_byte(r1, w) << np.uint64(8))
                 | (_byte(r2, w) << np.uint64(16)) | (_byte(r3, w) << np.uint64(24))
                 | (_byte(r4, w) << np.uint64(32)) | (_byte(r5, w) << np.uint64(40))
                 | (_byte(r6, w) << np.uint64(48)) | (_byte(r7, w) << np.uint64(56)))
            y = _transpose8(y)
            for i in range(8):
                if 8 * w + i < count:
                    buf[base + 8 * w + i] = np.uint8(_byte(y, i))


# ---------------------------------------------------------------------------
# round transformations on byte arrays holding whole blocks

@njit(cache=True)
def _xtime(a):
    return ((a << 1) ^ (0x1B * (a >> 7))) & 0xFF


@njit(cache=True)
def _add_round_key(buf, n, rk, r):
    off = 16 * r
    for i in range(n):
        buf[i] ^= rk[off + (i & 15)]


@njit(cache=True)
def _shift_rows(buf, n, tmp, inverse):
    for b in range(0, n, 16):
        for i in range(16):
            tmp[i] = buf[b + i]
        for c in range(4):
            for r in range(4):
                if inverse:
                    src = (c - r) % 4
                else:
                    src = (c + r) % 4
                buf[b + r + 4 * c] = tmp[r + 4 * src]


@njit(cache=True)
def _mix_columns(buf, n, inverse):
    for off in range(0, n, 4):
        a0 = np.int64(buf[off])
        a1 = np.int64(buf[off + 1])
        a2 = np.int64(buf[off + 2])
        a3 = np.int64(buf[off + 3])
        if inverse:
            u = _xtime(_xtime(a0 ^ a2))
            v = _xtime(_xtime(a1 ^ a3))
            a0 ^= u
            a1 ^= v
            a2 ^= u
            a3 ^= v
        t = a0 ^ a1 ^ a2 ^ a3
        buf[off] = a0 ^ t ^ _xtime(a0 ^ a1)
        buf[off + 1] = a1 ^ t ^ _xtime(a1 ^ a2)
        buf[off + 2] = a2 ^ t ^ _xtime(a2 ^ a3)
        buf[off + 3] = a3 ^ t ^ _xtime(a3 ^ a0)


@njit(cache=True)
def _encrypt_inplace(buf, n, rk, nr, tmp):
    _add_round_key(buf, n, rk, 0)
    for r in range(1, nr):
        _sub_bytes(buf, n, False)
        _shift_rows(buf, n, tmp, False)
        _mix_columns(buf, n, False)
        _add_round_key(buf, n, rk, r)
    _sub_bytes(buf, n, False)
    _shift_rows(buf, n, tmp, False)
    _add_round_key(buf, n, rk, nr)


@njit(cache=True)
def _decrypt_inplace(buf, n, rk, nr, tmp):
    _add_round_key(buf, n, rk, nr)
    for r in range(nr - 1, 0, -1):
        _shift_rows(buf, n, tmp, True)
        _sub_bytes(buf, n, True)
        _add_round_key(buf, n, rk, r)
        _mix_columns(buf, n, True)
    _shift_rows(buf, n, tmp, True)
    _sub_bytes(buf, n, True)
    _add_round_key(buf, n, rk, 0)


@njit(cache=True)
def ecb_encrypt_kernel(rk, nr, buf):
    """Encrypt every 16-byte block of buf in place, all blocks per round."""
    tmp = np.empty(16, np.uint8)
    _encrypt_inplace(buf, buf.shape[0], rk, nr, tmp)


@njit(cache=True)
def ecb_decrypt_kernel(rk, nr, buf):
    tmp = np.empty(16, np.uint8)
    _decrypt_inplace(buf, buf.shape[0], rk, nr, tmp)


@njit(cache=True)
def cbc_encrypt_kernel(rk, nr, chain, buf):
    """CBC-encrypt buf in place; chain (16 bytes) is updated to the last block."""
    tmp = np.empty(16, np.uint8)
    blk = np.empty(16, np.uint8)
    for off in range(0, buf.shape[0], 16):
        for i in range(16):
            blk[i] = buf[off + i] ^ chain[i]
        _encrypt_inplace(blk, 16, rk, nr, tmp)
        for i in range(16):
            buf[off + i] = blk[i]
            chain[i] = blk[i]


@njit(cache=True)
def cbc_decrypt_kernel(rk, nr, chain, buf):
    n = buf.shape[0]
    if n == 0:
        return
    ct = buf.copy()
    tmp = np.empty(16, np.uint8)
    _decrypt_inplace(buf, n, rk, nr, tmp)
    for i in range(16):
        buf[i] ^= chain[i]
    for i in range(16, n):
        buf[i] ^= ct[i - 16]
    for i in range(16):
        chain[i] = ct[n - 16 + i]


@njit(cache=True)
def _expand_kernel(key, nk, nr):
    total = 4 * (nr + 1)
    w = np.zeros(total, np.uint32)
    tmp = np.empty(16, np.uint8)
    word = np.empty(4, np.uint8)
    rcon = 1
    for i in range(nk):
        w[i] = ((np.uint32(key[4 * i]) << 24) | (np.uint32(key[4 * i + 1]) << 16)
                | (np.uint32(key[4 * i + 2]) << 8) | np.uint32(key[4 * i + 3]))
    for i in range(nk, total):
        t = w[i - 1]
        for j in range(4):
            word[j] = np.uint8((t >> np.uint32(24 - 8 * j)) & np.uint32(0xFF))
        if i % nk == 0:
            first = word[0]
            word[0] = word[1]
            word[1] = word[2]
            word[2] = word[3]
            word[3] = first
            _sub_bytes(word, 4, False)
            word[0] ^= np.uint8(rcon)
            rcon = _xtime(rcon)
        elif nk > 6 and i % nk == 4:
            _sub_bytes(word, 4, False)
        t = ((np.uint32(word[0]) << 24) | (np.uint32(word[1]) << 16)
             | (np.uint32(word[2]) << 8) | np.uint32(word[3]))
        w[i] = w[i - nk] ^ t
    return w


# ---------------------------------------------------------------------------
# public API

@dataclass(eq=False)
class AesRoundKeys:
    """Expanded key schedule.

    ``words`` is the FIPS 197 word array (4 * (nr + 1) words); ``schedule``
    holds the same material as bytes in the order the round functions
    consume it.
    """

    words: np.ndarray
    nr: int

    def __post_init__(self):
        if len(self.words) != 4 * (self.nr + 1) or self.nr not in (10, 12, 14):
            raise ValueError("inconsistent key schedule")
        self.schedule = self.words.astype(">u4").view(np.uint8).copy()

    def wipe(self) -> None:
        self.words[:] = 0
        self.schedule[:] = 0


def aes_key_expand(key: bytes) -> AesRoundKeys:
    nr = _ROUNDS.get(len(key))
    if nr is None:
        raise KeyLengthError(f"AES key must be 16, 24 or 32 bytes, got {len(key)}")
    k = np.frombuffer(bytes(key), dtype=np.uint8)
    return AesRoundKeys(_expand_kernel(k, len(key) // 4, nr), nr)


def _block_array(block: bytes) -> np.ndarray:
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")
    return np.frombuffer(bytes(block), dtype=np.uint8).copy()


def aes_encrypt_block(rk: AesRoundKeys, block: bytes) -> bytes:
    buf = _block_array(block)
    ecb_encrypt_kernel(rk.schedule, rk.nr, buf)
    return buf.tobytes()


def aes_decrypt_block(rk: AesRoundKeys, block: bytes) -> bytes:
    buf = _block_array(block)
    ecb_decrypt_kernel(rk.schedule, rk.nr, buf)
    return buf.tobytes()
