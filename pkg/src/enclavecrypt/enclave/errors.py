"""Status codes returned across the enclave boundary and their exceptions."""

from __future__ import annotations

from enum import IntEnum


class Status(IntEnum):
    OK = 0
    ENCLAVE_NOT_FOUND = 10
    INVALID_HANDLE = 11
    BAD_KEY_LENGTH = 12
    HEAP_EXHAUSTED = 13
    SESSION_FINALIZED = 14
    SESSION_BUSY = 15
    CHUNK_TOO_LARGE = 16
    BAD_PADDING = 17
    MISALIGNED_CIPHERTEXT = 18
    IV_UNAVAILABLE = 19
    INVALID_ARGUMENT = 20


class EnclaveError(Exception):
    status = Status.INVALID_ARGUMENT


class EnclaveNotFound(EnclaveError):
    status = Status.ENCLAVE_NOT_FOUND


class InvalidHandle(EnclaveError):
    status = Status.INVALID_HANDLE


class BadKeyLength(EnclaveError, ValueError):
    status = Status.BAD_KEY_LENGTH


class HeapExhausted(EnclaveError):
    status = Status.HEAP_EXHAUSTED


class SessionFinalized(EnclaveError):
    status = Status.SESSION_FINALIZED


class SessionBusy(EnclaveError):
    status = Status.SESSION_BUSY


class ChunkTooLarge(EnclaveError, ValueError):
    status = Status.CHUNK_TOO_LARGE


class BadPadding(EnclaveError):
    status = Status.BAD_PADDING


class MisalignedCiphertext(EnclaveError):
    status = Status.MISALIGNED_CIPHERTEXT


class IvUnavailable(EnclaveError):
    """CBC decryption needs the IV of an encryption session run on the same key."""

    status = Status.IV_UNAVAILABLE


class InvalidArgument(EnclaveError, ValueError):
    status = Status.INVALID_ARGUMENT
