"""Entry points into the enclave.

This is the whole surface the untrusted side may call.  Each function takes
an enclave id and returns only status, opaque handles, digests, ciphertext,
plaintext or heap figures.  There is no way to read a key or an IV back
out; ``ECALLS`` enumerates the surface so that property can be audited.
"""

from __future__ import annotations

import itertools
import threading
from typing import NamedTuple

from .errors import EnclaveNotFound, InvalidArgument, Status
from .heap import DEFAULT_BUDGET, MIN_BUDGET
from .trusted import (
    MAX_CHUNK,
    Direction,
    Enclave,
    HashKind,
    KeyHandle,
    Mode,
    TestHooks,
)

EnclaveId = int
SessionId = int

_registry: dict[int, Enclave] = {}
_registry_lock = threading.Lock()
_enclave_ids = itertools.count(1)


class HeapUsage(NamedTuple):
    used_bytes: int
    budget_bytes: int


def _get(eid: EnclaveId) -> Enclave:
    with _registry_lock:
        enclave = _registry.get(eid)
    if enclave is None:
        raise EnclaveNotFound(f"no enclave with id {eid}")
    return enclave


# -- lifecycle --------------------------------------------------------------

def enclave_create(heap_budget_bytes: int = DEFAULT_BUDGET, *,
                   max_chunk: int = MAX_CHUNK,
                   test_hooks: TestHooks | None = None) -> EnclaveId:
    if heap_budget_bytes < MIN_BUDGET:
        raise InvalidArgument(f"heap budget must be at least {MIN_BUDGET} bytes")
    if max_chunk < 1:
        raise InvalidArgument("max_chunk must be positive")
    with _registry_lock:
        eid = next(_enclave_ids)
        _registry[eid] = Enclave(eid, heap_budget_bytes, max_chunk, test_hooks)
    return eid


def enclave_destroy(eid: EnclaveId) -> Status:
    with _registry_lock:
        enclave = _registry.pop(eid, None)
    if enclave is None:
        raise EnclaveNotFound(f"no enclave with id {eid}")
    enclave.wipe()
    return Status.OK


def heap_usage(eid: EnclaveId) -> HeapUsage:
    meter = _get(eid).meter
    return HeapUsage(meter.used_bytes, meter.budget_bytes)


def heap_peak(eid: EnclaveId) -> int:
    """High-water mark of trusted heap use since the enclave was created."""
    return _get(eid).meter.peak_bytes


# -- keys ---------------------------------------------------------------------

def gen_key(eid: EnclaveId, keylen_bits: int, usage: str = "aes") -> KeyHandle:
    """Generate a key inside the enclave.

    ``usage`` is ``"aes"`` (128/192/256 bits) or ``"hmac"`` (any positive
    multiple of 8 bits).
    """
    return _get(eid).gen_key(keylen_bits, usage)


def set_user_key(eid: EnclaveId, key_bytes: bytes, usage: str | None = None) -> KeyHandle:
    return _get(eid).set_user_key(bytes(key_bytes), usage)


def delete_key(eid: EnclaveId, kh: KeyHandle) -> Status:
    _get(eid).delete_key(kh)
    return Status.OK


# -- hashing ------------------------------------------------------------------

def sha256_session(eid: EnclaveId) -> SessionId:
    return _get(eid).open_hash(HashKind.SHA256)


def gen_sha256(eid: EnclaveId, sid: SessionId, chunk: bytes) -> Status:
    _get(eid).hash_update(sid, HashKind.SHA256, bytes(chunk))
    return Status.OK


def get_sha256(eid: EnclaveId, sid: SessionId) -> bytes:
    return _get(eid).hash_digest(sid, HashKind.SHA256)


def hmac_session(eid: EnclaveId, kh: KeyHandle) -> SessionId:
    return _get(eid).open_hash(HashKind.HMAC_SHA256, kh)


def gen_hmac_sha256(eid: EnclaveId, sid: SessionId, chunk: bytes) -> Status:
    _get(eid).hash_update(sid, HashKind.HMAC_SHA256, bytes(chunk))
    return Status.OK


def get_hmac_sha256(eid: EnclaveId, sid: SessionId) -> bytes:
    return _get(eid).hash_digest(sid, HashKind.HMAC_SHA256)


# -- ciphers ------------------------------------------------------------------

def cipher_session(eid: EnclaveId, kh: KeyHandle, mode: Mode | str,
                   direction: Direction | str) -> SessionId:
    return _get(eid).open_cipher(kh, Mode(mode), Direction(direction))


def encrypt_aes_ecb(eid: EnclaveId, sid: SessionId, chunk: bytes, is_final: bool = False) -> bytes:
    return _get(eid).cipher_update(sid, Mode.ECB, Direction.ENCRYPT, bytes(chunk), is_final)


def decrypt_aes_ecb(eid: EnclaveId, sid: SessionId, chunk: bytes, is_final: bool = False) -> bytes:
    return _get(eid).cipher_update(sid, Mode.ECB, Direction.DECRYPT, bytes(chunk), is_final)


def encrypt_aes_cbc(eid: EnclaveId, sid: SessionId, chunk: bytes, is_final: bool = False) -> bytes:
    return _get(eid).cipher_update(sid, Mode.CBC, Direction.ENCRYPT, bytes(chunk), is_final)


def decrypt_aes_cbc(eid: EnclaveId, sid: SessionId, chunk: bytes, is_final: bool = False) -> bytes:
    return _get(eid).cipher_update(sid, Mode.CBC, Direction.DECRYPT, bytes(chunk), is_final)


def close_session(eid: EnclaveId, sid: SessionId) -> Status:
    """Release a hash or cipher session and its heap charge."""
    _get(eid).close_session(sid)
    return Status.OK


ECALLS = (
    enclave_create,
    enclave_destroy,
    heap_usage,
    heap_peak,
    gen_key,
    set_user_key,
    delete_key,
    sha256_session,
    gen_sha256,
    get_sha256,
    hmac_session,
    gen_hmac_sha256,
    get_hmac_sha256,
    cipher_session,
    encrypt_aes_ecb,
    decrypt_aes_ecb,
    encrypt_aes_cbc,
    decrypt_aes_cbc,
    close_session,
)
