"""Simulated trusted module.

Import from here (or ``boundary``) only; ``trusted`` holds the secrets.
"""

from .boundary import (
    ECALLS,
    EnclaveId,
    HeapUsage,
    SessionId,
    cipher_session,
    close_session,
    decrypt_aes_cbc,
    decrypt_aes_ecb,
    delete_key,
    enclave_create,
    enclave_destroy,
    encrypt_aes_cbc,
    encrypt_aes_ecb,
    gen_hmac_sha256,
    gen_key,
    gen_sha256,
    get_hmac_sha256,
    get_sha256,
    heap_peak,
    heap_usage,
    hmac_session,
    set_user_key,
    sha256_session,
)
from .errors import (
    BadKeyLength,
    BadPadding,
    ChunkTooLarge,
    EnclaveError,
    EnclaveNotFound,
    HeapExhausted,
    InvalidArgument,
    InvalidHandle,
    IvUnavailable,
    MisalignedCiphertext,
    SessionBusy,
    SessionFinalized,
    Status,
)
from .heap import DEFAULT_BUDGET, RECORD_OVERHEAD
from .trusted import MAX_CHUNK, Direction, KeyHandle, Mode, TestHooks
