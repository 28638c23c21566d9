"""Untrusted side: slice inputs into temporary buffers and drive enclave sessions.

Only the public enclave surface is used here; the host never sees key or
IV bytes.
"""

from __future__ import annotations

import logging
import os
import tempfile
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import enclave as ec

log = logging.getLogger(__name__)

DEFAULT_BUFFER_SIZE = 4096


class HostIOError(OSError):
    """Reading the input or writing the output failed."""


class JobKind(Enum):
    DIGEST = "digest"
    CIPHERTEXT = "ciphertext"
    PLAINTEXT = "plaintext"


@dataclass(frozen=True)
class ChunkSource:
    """A file path or an in-memory byte string, read in ``buffer_size`` pieces."""

    path: Path | None = None
    data: bytes | None = None
    buffer_size: int = DEFAULT_BUFFER_SIZE

    def __post_init__(self):
        if (self.path is None) == (self.data is None):
            raise ValueError("exactly one of path or data is required")
        if self.buffer_size < 1:
            raise ValueError("buffer_size must be positive")

    @classmethod
    def file(cls, path: str | os.PathLike, buffer_size: int = DEFAULT_BUFFER_SIZE) -> ChunkSource:
        return cls(path=Path(path), buffer_size=buffer_size)

    @classmethod
    def inline(cls, text: str | bytes, buffer_size: int = DEFAULT_BUFFER_SIZE) -> ChunkSource:
        if isinstance(text, str):
            text = text.encode()
        return cls(data=bytes(text), buffer_size=buffer_size)


@dataclass(frozen=True)
class JobResult:
    kind: JobKind
    bytes_processed: int
    output: bytes | Path
    bytes_written: int = 0


def stream_chunks(src: ChunkSource) -> Iterator[bytes]:
    """Yield the source in order as chunks of at most ``src.buffer_size`` bytes.

    A file is opened before this returns, so a bad path fails immediately.
    """
    size = src.buffer_size
    if src.data is not None:
        data = src.data
        return (data[i:i + size] for i in range(0, len(data), size))
    try:
        fh = open(src.path, "rb")
    except OSError as e:
        raise HostIOError(f"cannot read {src.path}: {e.strerror or e}") from e

    def gen():
        with fh:
            while True:
                try:
                    chunk = fh.read(size)
                except OSError as e:
                    raise HostIOError(f"error reading {src.path}: {e}") from e
                if not chunk:
                    return
                yield chunk

    return gen()


def run_hash(eid: ec.EnclaveId, algo: str, src: ChunkSource,
             key: ec.KeyHandle | None = None) -> JobResult:
    """Digest ``src`` inside the enclave.  ``algo`` is sha256 or hmac_sha256."""
    if algo == "sha256":
        sid = ec.sha256_session(eid)
        gen, get = ec.gen_sha256, ec.get_sha256
    elif algo == "hmac_sha256":
        if key is None:
            raise ValueError("hmac_sha256 needs a key handle")
        sid = ec.hmac_session(eid, key)
        gen, get = ec.gen_hmac_sha256, ec.get_hmac_sha256
    else:
        raise ValueError(f"unknown hash algorithm {algo!r}")
    try:
        n = 0
        for chunk in stream_chunks(src):
            gen(eid, sid, chunk)
            n += len(chunk)
        digest = get(eid, sid)
    finally:
        ec.close_session(eid, sid)
    return JobResult(JobKind.DIGEST, n, digest)


_CIPHER_CALLS = {
    (ec.Mode.ECB, ec.Direction.ENCRYPT): ec.encrypt_aes_ecb,
    (ec.Mode.ECB, ec.Direction.DECRYPT): ec.decrypt_aes_ecb,
    (ec.Mode.CBC, ec.Direction.ENCRYPT): ec.encrypt_aes_cbc,
    (ec.Mode.CBC, ec.Direction.DECRYPT): ec.decrypt_aes_cbc,
}


def _pump(eid: ec.EnclaveId, sid: ec.SessionId, call: Callable, chunks: Iterator[bytes],
          write: Callable[[bytes], object]) -> int:
    # the last chunk carries is_final; an empty input sends one empty final chunk
    n = 0
    prev = next(chunks, None)
    if prev is None:
        write(call(eid, sid, b"", True))
        return 0
    for nxt in chunks:
        write(call(eid, sid, prev, False))
        n += len(prev)
        prev = nxt
    write(call(eid, sid, prev, True))
    return n + len(prev)


def _run_cipher(eid, mode, direction, kh, src, out_path, suffix, kind) -> JobResult:
    mode, direction = ec.Mode(mode), ec.Direction(direction)
    call = _CIPHER_CALLS[mode, direction]
    sid = ec.cipher_session(eid, kh, mode, direction)
    try:
        chunks = stream_chunks(src)
        if out_path is None and src.path is None:
            parts: list[bytes] = []
            n = _pump(eid, sid, call, chunks, parts.append)
            out = b"".join(parts)
            return JobResult(kind, n, out, len(out))
        target = Path(out_path) if out_path is not None else src.path.with_name(src.path.name + suffix)
        return _write_atomically(target, lambda write: _pump(eid, sid, call, chunks, write), kind)
    finally:
        ec.close_session(eid, sid)


def _write_atomically(target: Path, produce, kind: JobKind) -> JobResult:
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".part")
    except OSError as e:
        raise HostIOError(f"cannot write to {target.parent}: {e.strerror or e}") from e
    written = 0
    try:
        with os.fdopen(fd, "wb") as fh:
            def write(b: bytes):
                nonlocal written
                fh.write(b)
                written += len(b)
            n = produce(write)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    log.debug("wrote %s (%d bytes)", target, written)
    return JobResult(kind, n, target, written)


def run_encrypt(eid: ec.EnclaveId, mode: ec.Mode | str, kh: ec.KeyHandle, src: ChunkSource,
                out_path: str | os.PathLike | None = None) -> JobResult:
    """Encrypt ``src``; files go to ``out_path`` (default ``<input>.enc``).

    With an in-memory source and no ``out_path`` the ciphertext is returned
    in ``JobResult.output``.
    """
    return _run_cipher(eid, mode, ec.Direction.ENCRYPT, kh, src, out_path, ".enc",
                       JobKind.CIPHERTEXT)


def run_decrypt(eid: ec.EnclaveId, mode: ec.Mode | str, kh: ec.KeyHandle, src: ChunkSource,
                out_path: str | os.PathLike | None = None) -> JobResult:
    return _run_cipher(eid, mode, ec.Direction.DECRYPT, kh, src, out_path, ".dec",
                       JobKind.PLAINTEXT)
