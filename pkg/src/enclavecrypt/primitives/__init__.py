"""Cryptographic building blocks used inside the enclave.

Nothing here knows about enclaves, handles or chunk limits.
"""

from .aes import (
    AesRoundKeys,
    KeyLengthError,
    aes_decrypt_block,
    aes_encrypt_block,
    aes_key_expand,
)
from .hmac import EmptyKeyError, HmacState, hmac_final, hmac_init, hmac_sha256, hmac_update
from .modes import cbc_decrypt, cbc_encrypt, ecb_decrypt, ecb_encrypt
from .padding import PaddingError, pkcs7_pad, pkcs7_unpad
from .sha256 import Sha256State, sha256, sha256_final, sha256_init, sha256_update

__all__ = [
    "AesRoundKeys",
    "EmptyKeyError",
    "HmacState",
    "KeyLengthError",
    "PaddingError",
    "Sha256State",
    "aes_decrypt_block",
    "aes_encrypt_block",
    "aes_key_expand",
    "cbc_decrypt",
    "cbc_encrypt",
    "ecb_decrypt",
    "ecb_encrypt",
    "hmac_final",
    "hmac_init",
    "hmac_sha256",
    "hmac_update",
    "pkcs7_pad",
    "pkcs7_unpad",
    "sha256",
    "sha256_final",
    "sha256_init",
    "sha256_update",
]
