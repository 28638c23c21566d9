import random

from enclavecrypt import enclave as ec


def random_partition(n: int, rng: random.Random, max_piece: int = 4096) -> list[int]:
    """Split n into random piece sizes in [1, max_piece]."""
    sizes = []
    while n > 0:
        # mix tiny and large pieces
        piece = rng.choice([rng.randint(1, 32), rng.randint(1, max_piece)])
        piece = min(piece, n)
        sizes.append(piece)
        n -= piece
    return sizes


def pieces(data: bytes, sizes: list[int]) -> list[bytes]:
    out, i = [], 0
    for s in sizes:
        out.append(data[i:i + s])
        i += s
    assert i == len(data)
    return out


def stream(call, eid, sid, chunks: list[bytes]) -> bytes:
    """Push chunks through an encrypt/decrypt entry point, flagging the last as final."""
    if not chunks:
        return call(eid, sid, b"", True)
    out = [call(eid, sid, c, i == len(chunks) - 1) for i, c in enumerate(chunks)]
    return b"".join(out)


ENC = {"ecb": ec.encrypt_aes_ecb, "cbc": ec.encrypt_aes_cbc}
DEC = {"ecb": ec.decrypt_aes_ecb, "cbc": ec.decrypt_aes_cbc}


def encrypt(eid, kh, mode, chunks):
    sid = ec.cipher_session(eid, kh, mode, "encrypt")
    try:
        return stream(ENC[mode], eid, sid, chunks)
    finally:
        ec.close_session(eid, sid)


def decrypt(eid, kh, mode, chunks):
    sid = ec.cipher_session(eid, kh, mode, "decrypt")
    try:
        return stream(DEC[mode], eid, sid, chunks)
    finally:
        ec.close_session(eid, sid)


def digest(eid, algo, chunks, kh=None):
    if algo == "sha256":
        sid = ec.sha256_session(eid)
        gen, get = ec.gen_sha256, ec.get_sha256
    else:
        sid = ec.hmac_session(eid, kh)
        gen, get = ec.gen_hmac_sha256, ec.get_hmac_sha256
    try:
        for c in chunks:
            gen(eid, sid, c)
        return get(eid, sid)
    finally:
        ec.close_session(eid, sid)
