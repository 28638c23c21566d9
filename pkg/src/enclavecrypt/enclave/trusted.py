"""State that lives inside the enclave.

Nothing in this module is handed across the boundary.  ``boundary``
resolves enclave ids to :class:`Enclave` objects and returns only
handles, digests, ciphertext and plaintext.
"""

from __future__ import annotations

import itertools
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..primitives import (
    AesRoundKeys,
    PaddingError,
    aes_key_expand,
    hmac_final,
    hmac_init,
    hmac_update,
    pkcs7_pad,
    pkcs7_unpad,
    sha256_final,
    sha256_init,
    sha256_update,
)
from ..primitives.aes import (
    cbc_decrypt_kernel,
    cbc_encrypt_kernel,
    ecb_decrypt_kernel,
    ecb_encrypt_kernel,
)
from .errors import (
    BadKeyLength,
    BadPadding,
    ChunkTooLarge,
    InvalidHandle,
    IvUnavailable,
    MisalignedCiphertext,
    SessionBusy,
    SessionFinalized,
)
from .heap import TrustedHeapMeter
from .rng import EnclaveRng

MAX_CHUNK = 4096
AES_KEY_BITS = (128, 192, 256)
BLOCK = 16

# payload sizes charged to the heap meter (bookkeeping overhead is added there)
RNG_STATE_BYTES = 32
SHA_SESSION_BYTES = 32 + 64 + 8 + 32          # chaining words, pending, length, digest
HMAC_SESSION_BYTES = 2 * (32 + 64 + 8) + 32   # inner and outer states, digest
IV_BYTES = BLOCK


def _cipher_session_bytes(nr: int) -> int:
    return 16 * (nr + 1) + BLOCK + BLOCK        # round keys, chain, residual


# handles and session ids are unique across every enclave in the process
_handle_ids = itertools.count(1)
_session_ids = itertools.count(1)


class HashKind(Enum):
    SHA256 = "sha256"
    HMAC_SHA256 = "hmac_sha256"


class Mode(Enum):
    ECB = "ecb"
    CBC = "cbc"


class Direction(Enum):
    ENCRYPT = "encrypt"
    DECRYPT = "decrypt"


@dataclass(frozen=True)
class KeyHandle:
    """Opaque reference to a key held by one enclave."""

    handle: int
    keylen_bits: int


@dataclass(frozen=True)
class TestHooks:
    """Construction-time switches for known-answer tests.

    ``seed`` makes the RNG deterministic, ``iv`` fixes the CBC IV of every
    session, and ``pad_final=False`` turns off PKCS#7 so raw block vectors
    can be checked.  Release code paths never build one of these.
    """

    __test__ = False

    seed: bytes | None = None
    iv: bytes | None = None
    pad_final: bool = True


@dataclass
class KeyRecord:
    key: bytearray
    cost: int
    iv: bytearray | None = None
    iv_cost: int = 0

    def wipe(self) -> None:
        self.key[:] = bytes(len(self.key))
        if self.iv is not None:
            self.iv[:] = bytes(BLOCK)


@dataclass
class _Session:
    cost: int
    finalized: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    @contextmanager
    def busy(self):
        if not self.lock.acquire(blocking=False):
            raise SessionBusy("another call is already running on this session")
        try:
            yield
        finally:
            self.lock.release()

    def wipe(self) -> None:
        pass


@dataclass
class HashSession(_Session):
    kind: HashKind = HashKind.SHA256
    state: object = None
    digest: bytes | None = None

    def wipe(self) -> None:
        self.state = None
        self.digest = None


@dataclass
class CipherSession(_Session):
    mode: Mode = Mode.ECB
    direction: Direction = Direction.ENCRYPT
    round_keys: AesRoundKeys | None = None
    chain: np.ndarray | None = None
    residual: bytearray = field(default_factory=bytearray)
    pad_final: bool = True

    def wipe(self) -> None:
        if self.round_keys is not None:
            self.round_keys.wipe()
        if self.chain is not None:
            self.chain[:] = 0
        self.residual[:] = bytes(len(self.residual))

    def _transform(self, data: bytes) -> bytes:
        buf = np.frombuffer(data, dtype=np.uint8).copy()
        rk, nr = self.round_keys.schedule, self.round_keys.nr
        if self.mode is Mode.ECB:
            kernel = ecb_encrypt_kernel if self.direction is Direction.ENCRYPT else ecb_decrypt_kernel
            kernel(rk, nr, buf)
        elif self.direction is Direction.ENCRYPT:
            cbc_encrypt_kernel(rk, nr, self.chain, buf)
        else:
            cbc_decrypt_kernel(rk, nr, self.chain, buf)
        return buf.tobytes()

    def encrypt(self, chunk: bytes, is_final: bool) -> bytes:
        data = bytes(self.residual) + chunk
        cut = len(data) - len(data) % BLOCK
        if is_final:
            if self.pad_final:
                blocks = data[:cut] + pkcs7_pad(data[cut:])
            elif cut != len(data):
                raise MisalignedCiphertext("unpadded input must be block aligned")
            else:
                blocks = data
            rest = b""
        else:
            blocks, rest = data[:cut], data[cut:]
        out = self._transform(blocks)
        self.residual[:] = rest
        return out

    def decrypt(self, chunk: bytes, is_final: bool) -> bytes:
        data = bytes(self.residual) + chunk
        if is_final:
            if len(data) % BLOCK:
                raise MisalignedCiphertext(
                    "ciphertext length is not a multiple of the block size")
            out = self._transform(data)
            self.residual[:] = b""
            if not self.pad_final:
                return out
            if not out:
                raise BadPadding("ciphertext is empty")
            try:
                return out[:-BLOCK] + pkcs7_unpad(out[-BLOCK:])
            except PaddingError:
                raise BadPadding("bad padding: wrong key or corrupted ciphertext") from None
        # hold back the last (possibly partial) block so the final call can unpad it
        keep = (len(data) - 1) % BLOCK + 1 if data else 0
        cut = len(data) - keep
        out = self._transform(data[:cut])
        self.residual[:] = data[cut:]
        return out


class Enclave:
    def __init__(self, eid: int, budget_bytes: int, max_chunk: int = MAX_CHUNK,
                 hooks: TestHooks | None = None):
        self.eid = eid
        self.max_chunk = max_chunk
        self.hooks = hooks or TestHooks()
        self.meter = TrustedHeapMeter(budget_bytes)
        self.meter.charge(RNG_STATE_BYTES)
        self.rng = EnclaveRng(self.hooks.seed)
        self.keys: dict[int, KeyRecord] = {}
        self.sessions: dict[int, _Session] = {}
        self.lock = threading.RLock()

    # -- keystore ---------------------------------------------------------

    def _store_key(self, key: bytearray) -> KeyHandle:
        with self.lock:
            cost = self.meter.charge(len(key))
            handle = next(_handle_ids)
            self.keys[handle] = KeyRecord(key, cost)
        return KeyHandle(handle, 8 * len(key))

    def gen_key(self, keylen_bits: int, usage: str) -> KeyHandle:
        if usage == "aes":
            if keylen_bits not in AES_KEY_BITS:
                raise BadKeyLength(f"AES keys are 128, 192 or 256 bits, not {keylen_bits}")
        elif usage == "hmac":
            if keylen_bits <= 0 or keylen_bits % 8:
                raise BadKeyLength("HMAC key length must be a positive multiple of 8 bits")
        else:
            raise ValueError(f"unknown key usage {usage!r}")
        return self._store_key(self.rng.read(keylen_bits // 8))

    def set_user_key(self, key: bytes, usage: str | None) -> KeyHandle:
        if len(key) == 0:
            raise BadKeyLength("key must not be empty")
        if usage == "aes" and len(key) * 8 not in AES_KEY_BITS:
            raise BadKeyLength(f"AES keys are 16, 24 or 32 bytes, not {len(key)}")
        return self._store_key(bytearray(key))

    def _key(self, kh: KeyHandle) -> KeyRecord:
        rec = self.keys.get(getattr(kh, "handle", None))
        if rec is None:
            raise InvalidHandle("key handle does not belong to this enclave")
        return rec

    def delete_key(self, kh: KeyHandle) -> None:
        with self.lock:
            rec = self._key(kh)
            del self.keys[kh.handle]
            self.meter.release(rec.cost + rec.iv_cost)
            rec.wipe()

    # -- sessions ---------------------------------------------------------

    def _open(self, session: _Session) -> int:
        sid = next(_session_ids)
        self.sessions[sid] = session
        return sid

    def session(self, sid: int, kind: type) -> _Session:
        s = self.sessions.get(sid)
        if not isinstance(s, kind):
            raise InvalidHandle(f"no {kind.__name__} with id {sid} in this enclave")
        return s

    def open_hash(self, kind: HashKind, kh: KeyHandle | None = None) -> int:
        with self.lock:
            if kind is HashKind.SHA256:
                cost = self.meter.charge(SHA_SESSION_BYTES)
                return self._open(HashSession(cost, kind=kind, state=sha256_init()))
            rec = self._key(kh)
            cost = self.meter.charge(HMAC_SESSION_BYTES)
            return self._open(HashSession(cost, kind=kind, state=hmac_init(bytes(rec.key))))

    def hash_update(self, sid: int, kind: HashKind, chunk: bytes) -> None:
        s = self.session(sid, HashSession)
        if s.kind is not kind:
            raise InvalidHandle(f"session {sid} is not a {kind.value} session")
        self._check_chunk(chunk)
        with s.busy(), self.meter.staging(len(chunk)):
            if s.finalized:
                raise SessionFinalized("digest already retrieved; open a new session")
            if kind is HashKind.SHA256:
                s.state = sha256_update(s.state, chunk)
            else:
                s.state = hmac_update(s.state, chunk)

    def hash_digest(self, sid: int, kind: HashKind) -> bytes:
        s = self.session(sid, HashSession)
        if s.kind is not kind:
            raise InvalidHandle(f"session {sid} is not a {kind.value} session")
        with s.busy():
            if not s.finalized:
                final = sha256_final if kind is HashKind.SHA256 else hmac_final
                s.digest = final(s.state)
                s.state = None
                s.finalized = True
            return s.digest

    def open_cipher(self, kh: KeyHandle, mode: Mode, direction: Direction) -> int:
        with self.lock:
            rec = self._key(kh)
            if len(rec.key) * 8 not in AES_KEY_BITS:
                raise BadKeyLength(f"{len(rec.key)}-byte key cannot be used for AES")
            rk = aes_key_expand(bytes(rec.key))
            cost = self.meter.charge(_cipher_session_bytes(rk.nr))
            try:
                chain = None
                if mode is Mode.CBC:
                    chain = self._session_iv(rec, direction)
            except BaseException:
                self.meter.release(cost)
                rk.wipe()
                raise
            return self._open(CipherSession(
                cost, mode=mode, direction=direction, round_keys=rk, chain=chain,
                pad_final=self.hooks.pad_final))

    def _session_iv(self, rec: KeyRecord, direction: Direction) -> np.ndarray:
        # an encryption session mints a fresh IV and pins it to the key so a
        # later decryption session on the same key can pick it up
        if self.hooks.iv is not None or direction is Direction.ENCRYPT:
            if self.hooks.iv is not None:
                iv = bytearray(self.hooks.iv)
            else:
                iv = self.rng.read(IV_BYTES)
            if rec.iv is None:
                rec.iv_cost = self.meter.charge(IV_BYTES)
                rec.iv = iv
            else:
                rec.iv[:] = iv
        elif rec.iv is None:
            raise IvUnavailable("no IV for this key: run a CBC encryption session first")
        return np.frombuffer(bytes(rec.iv), dtype=np.uint8).copy()

    def cipher_update(self, sid: int, mode: Mode, direction: Direction,
                      chunk: bytes, is_final: bool) -> bytes:
        s = self.session(sid, CipherSession)
        if s.mode is not mode or s.direction is not direction:
            raise InvalidHandle(
                f"session {sid} is a {s.mode.value} {s.direction.value} session")
        self._check_chunk(chunk)
        # staging: the input copy plus an output buffer with room for one pad block
        with s.busy(), self.meter.staging(2 * len(chunk) + 2 * BLOCK):
            if s.finalized:
                raise SessionFinalized("stream already finished; open a new session")
            if is_final:
                s.finalized = True
            if direction is Direction.ENCRYPT:
                return s.encrypt(chunk, is_final)
            return s.decrypt(chunk, is_final)

    def close_session(self, sid: int) -> None:
        with self.lock:
            s = self.sessions.pop(sid, None)
            if s is None:
                raise InvalidHandle(f"no session with id {sid} in this enclave")
            self.meter.release(s.cost)
            s.wipe()

    def _check_chunk(self, chunk: bytes) -> None:
        if len(chunk) > self.max_chunk:
            raise ChunkTooLarge(f"chunk of {len(chunk)} bytes exceeds {self.max_chunk}")

    # -- teardown ---------------------------------------------------------

    def wipe(self) -> None:
        with self.lock:
            for rec in self.keys.values():
                rec.wipe()
            for s in self.sessions.values():
                s.wipe()
            self.keys.clear()
            self.sessions.clear()
            self.rng.wipe()
