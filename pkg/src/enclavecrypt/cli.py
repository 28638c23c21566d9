"""Command-line front end.

    enclavecrypt -a <sha256|hmac_sha256|aes_ecb|aes_cbc>
                 [-userkey|-randomkey <key|keylen>] -intext|-infile <input>
                 [-d] [-out <path>] [--buffer-size <bytes>] [--roundtrip] [-v]

Each run creates one enclave and destroys it before exiting, so a random
key can only be used within that run (see ``--roundtrip``).
"""

from __future__ import annotations

import argparse
import binascii
import os
import sys
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

from . import enclave as ec
from .host import ChunkSource, HostIOError, run_decrypt, run_encrypt, run_hash

USAGE = ("usage: ./app -a <sha256|hmac_sha256|aes_ecb|aes_cbc> "
         "[-userkey|-randomkey <key|keylen>] -intext|-infile <input>\n"
         "       [-d] [-out <path>] [--buffer-size <bytes>] [--roundtrip] [-v]")

ALGORITHMS = ("sha256", "hmac_sha256", "aes_ecb", "aes_cbc")
HEAP_ENV = "ENCLAVECRYPT_HEAP_BYTES"


class ExitCode(IntEnum):
    OK = 0
    INTERNAL_ERROR = 1
    USAGE_ERROR = 2
    CONFLICTING_FLAGS = 3
    IO_ERROR = 4
    ROUNDTRIP_MISMATCH = 5
    # 10 and up: enclave status codes, unchanged


class UsageError(Exception):
    code = ExitCode.USAGE_ERROR


class ConflictingFlags(UsageError):
    code = ExitCode.CONFLICTING_FLAGS


@dataclass(frozen=True)
class CliRequest:
    algo: str
    userkey: bytes | None = None
    randomkey_bits: int | None = None
    intext: str | None = None
    infile: Path | None = None
    decrypt: bool = False
    out: Path | None = None
    buffer_size: int = 4096
    roundtrip: bool = False
    verbose: bool = False

    @property
    def is_cipher(self) -> bool:
        return self.algo.startswith("aes_")

    @property
    def mode(self) -> ec.Mode:
        return ec.Mode(self.algo[4:])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="./app", add_help=False, allow_abbrev=False)
    p.add_argument("-a", dest="algo")
    p.add_argument("-userkey")
    p.add_argument("-randomkey")
    p.add_argument("-intext")
    p.add_argument("-infile")
    p.add_argument("-d", dest="decrypt", action="store_true")
    p.add_argument("-out")
    p.add_argument("--buffer-size", default="4096")
    p.add_argument("--roundtrip", action="store_true")
    p.add_argument("-v", dest="verbose", action="store_true")
    return p


def parse_args(argv: list[str]) -> CliRequest:
    ns = _parser().parse_args(argv)
    if ns.algo is None:
        raise UsageError("-a is required")
    if ns.algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {ns.algo!r}")
    if ns.userkey is not None and ns.randomkey is not None:
        raise ConflictingFlags("-userkey and -randomkey are mutually exclusive")
    if ns.intext is not None and ns.infile is not None:
        raise ConflictingFlags("-intext and -infile are mutually exclusive")
    if ns.intext is None and ns.infile is None:
        raise UsageError("one of -intext or -infile is required")

    is_cipher = ns.algo.startswith("aes_")
    has_key = ns.userkey is not None or ns.randomkey is not None
    if ns.algo == "sha256" and has_key:
        raise UsageError("sha256 takes no key")
    if ns.algo != "sha256" and not has_key:
        raise UsageError(f"{ns.algo} needs -userkey or -randomkey")
    if not is_cipher and (ns.decrypt or ns.roundtrip):
        raise UsageError("-d and --roundtrip apply to aes_ecb and aes_cbc only")
    if ns.decrypt and ns.roundtrip:
        raise ConflictingFlags("-d and --roundtrip are mutually exclusive")
    if ns.decrypt and ns.randomkey is not None:
        raise UsageError("decryption needs -userkey; a random key does not outlive its run "
                         "(use --roundtrip)")

    userkey = None
    if ns.userkey is not None:
        try:
            userkey = binascii.unhexlify(ns.userkey)
        except (binascii.Error, ValueError):
            raise UsageError("-userkey must be a hex string") from None

    bits = None
    if ns.randomkey is not None:
        try:
            bits = int(ns.randomkey)
        except ValueError:
            raise UsageError("-randomkey takes a key length in bits") from None
        if is_cipher and bits not in (128, 192, 256):
            raise UsageError("AES key length must be 128, 192 or 256 bits")
        if not is_cipher and (bits <= 0 or bits % 8):
            raise UsageError("HMAC key length must be a positive multiple of 8 bits")

    try:
        buffer_size = int(ns.buffer_size)
    except ValueError:
        raise UsageError("--buffer-size takes a byte count") from None
    if buffer_size < 1:
        raise UsageError("--buffer-size must be positive")

    return CliRequest(
        algo=ns.algo,
        userkey=userkey,
        randomkey_bits=bits,
        intext=ns.intext,
        infile=Path(ns.infile) if ns.infile is not None else None,
        decrypt=ns.decrypt,
        out=Path(ns.out) if ns.out is not None else None,
        buffer_size=buffer_size,
        roundtrip=ns.roundtrip,
        verbose=ns.verbose,
    )


def _source(req: CliRequest) -> ChunkSource:
    if req.infile is not None:
        return ChunkSource.file(req.infile, req.buffer_size)
    if req.is_cipher and req.decrypt:
        # ciphertext given inline is hex, matching what encryption prints
        try:
            return ChunkSource.inline(binascii.unhexlify(req.intext), req.buffer_size)
        except (binascii.Error, ValueError):
            raise UsageError("-intext for decryption must be hex ciphertext") from None
    return ChunkSource.inline(req.intext, req.buffer_size)


def _key(eid: int, req: CliRequest) -> ec.KeyHandle:
    usage = "aes" if req.is_cipher else "hmac"
    if req.userkey is not None:
        return ec.set_user_key(eid, req.userkey, usage)
    return ec.gen_key(eid, req.randomkey_bits, usage)


class RoundtripMismatch(Exception):
    code = ExitCode.ROUNDTRIP_MISMATCH


def _show(output: bytes | Path) -> str:
    return output.hex() if isinstance(output, bytes) else str(output)


def _describe(result, label: str) -> str:
    if isinstance(result.output, bytes):
        return result.output.hex()
    return (f"{label} -> {result.output} "
            f"({result.bytes_processed} bytes in, {result.bytes_written} bytes out)")


def execute(req: CliRequest, eid: int) -> str:
    """Run one job in enclave ``eid`` and return the result line."""
    src = _source(req)
    if not req.is_cipher:
        kh = _key(eid, req) if req.algo == "hmac_sha256" else None
        return run_hash(eid, req.algo, src, kh).output.hex()

    kh = _key(eid, req)
    label = str(req.infile) if req.infile is not None else "<intext>"
    if req.decrypt:
        return _describe(run_decrypt(eid, req.mode, kh, src, req.out), label)

    enc = run_encrypt(eid, req.mode, kh, src, req.out)
    if not req.roundtrip:
        return _describe(enc, label)

    if isinstance(enc.output, bytes):
        back = run_decrypt(eid, req.mode, kh, ChunkSource.inline(enc.output, req.buffer_size))
        same = back.output == src.data
    else:
        dec_path = (req.infile.with_name(req.infile.name + ".dec") if req.infile is not None
                    else enc.output.with_name(enc.output.name + ".dec"))
        back = run_decrypt(eid, req.mode, kh, ChunkSource.file(enc.output, req.buffer_size),
                           dec_path)
        if req.infile is not None:
            same = _same_file(req.infile, back.output)
        else:
            same = back.output.read_bytes() == src.data
    if not same:
        raise RoundtripMismatch(f"decrypted output {_show(back.output)} differs from the input")
    return (f"roundtrip ok: {label} -> {_show(enc.output)} -> {_show(back.output)} "
            f"({enc.bytes_processed} bytes, {enc.bytes_written} bytes ciphertext)")


def _same_file(a: Path, b: Path) -> bool:
    with open(a, "rb") as fa, open(b, "rb") as fb:
        while True:
            x, y = fa.read(1 << 20), fb.read(1 << 20)
            if x != y:
                return False
            if not x:
                return True


def _heap_budget() -> int:
    raw = os.environ.get(HEAP_ENV)
    if raw is None:
        return ec.DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{HEAP_ENV} must be an integer byte count") from None


def main(argv: list[str] | None = None, *, test_hooks: ec.TestHooks | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        req = parse_args(argv)
        budget = _heap_budget()
    except UsageError as e:
        print(f"error: {e}\n{USAGE}", file=sys.stderr)
        return int(e.code)

    try:
        eid = ec.enclave_create(budget, max_chunk=req.buffer_size, test_hooks=test_hooks)
    except ec.EnclaveError as e:
        print(f"error: {e.status.name}: {e}", file=sys.stderr)
        return int(e.status)
    try:
        line = execute(req, eid)
    except (UsageError, RoundtripMismatch) as e:
        print(f"error: {e}\n{USAGE}", file=sys.stderr)
        return int(e.code)
    except ec.EnclaveError as e:
        print(f"error: {e.status.name}: {e}", file=sys.stderr)
        return int(e.status)
    except HostIOError as e:
        print(f"error: IO_ERROR: {e}", file=sys.stderr)
        return int(ExitCode.IO_ERROR)
    finally:
        if req.verbose:
            print(f"heap: peak {ec.heap_peak(eid)} of {ec.heap_usage(eid).budget_bytes} bytes",
                  file=sys.stderr)
        ec.enclave_destroy(eid)
    print(line)
    return int(ExitCode.OK)
