import hashlib
import hmac as std_hmac
import os
import subprocess
import sys

import pytest
from cryptography.hazmat.primitives import padding as std_padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from enclavecrypt import enclave as ec
from enclavecrypt.cli import USAGE, ConflictingFlags, ExitCode, UsageError, main, parse_args

from conftest import SEED

KEY = "2b7e151628aed2a6abf7158809cf4f3c"
USAGE_HEAD = USAGE.splitlines()[0]


def run(capsys, *argv, **kw):
    rc = main(list(argv), **kw)
    out, err = capsys.readouterr()
    return rc, out.strip(), err


def _ecb(key: bytes, msg: bytes) -> bytes:
    p = std_padding.PKCS7(128).padder()
    return Cipher(algorithms.AES(key), modes.ECB()).encryptor().update(p.update(msg) + p.finalize())


# -- parsing -------------------------------------------------------------------------

def test_parse_examples():
    r = parse_args(["-a", "aes_cbc", "-randomkey", "256", "-infile", "f.txt"])
    assert (r.algo, r.randomkey_bits, str(r.infile), r.is_cipher) == ("aes_cbc", 256, "f.txt", True)
    r = parse_args(["-a", "hmac_sha256", "-userkey", "0b0b", "-intext", "hi"])
    assert r.userkey == b"\x0b\x0b" and r.intext == "hi"
    r = parse_args(["-a", "sha256", "-intext", "abc", "--buffer-size", "16", "-v"])
    assert r.buffer_size == 16 and r.verbose


@pytest.mark.parametrize("argv", [
    ["-a", "aes_ecb", "-userkey", KEY, "-randomkey", "128", "-intext", "x"],
    ["-a", "sha256", "-intext", "x", "-infile", "y"],
    ["-a", "aes_ecb", "-userkey", KEY, "-intext", "00", "-d", "--roundtrip"],
])
def test_conflicting_flags(argv):
    with pytest.raises(ConflictingFlags):
        parse_args(argv)


@pytest.mark.parametrize("argv", [
    [],
    ["-intext", "abc"],
    ["-a", "md5", "-intext", "abc"],
    ["-a", "sha256"],
    ["-a", "sha256", "-userkey", "00", "-intext", "x"],
    ["-a", "hmac_sha256", "-intext", "x"],
    ["-a", "aes_ecb", "-randomkey", "100", "-intext", "x"],
    ["-a", "aes_ecb", "-randomkey", "abc", "-intext", "x"],
    ["-a", "hmac_sha256", "-randomkey", "12", "-intext", "x"],
    ["-a", "aes_ecb", "-userkey", "zz", "-intext", "x"],
    ["-a", "aes_ecb", "-randomkey", "128", "-intext", "00", "-d"],
    ["-a", "sha256", "-intext", "x", "-d"],
    ["-a", "sha256", "-intext", "x", "--buffer-size", "0"],
    ["-a", "sha256", "-intext", "x", "--bogus"],
    ["-a", "sha256", "-intext", "x", "stray"],
])
def test_malformed_invocations(capsys, argv):
    rc, out, err = run(capsys, *argv)
    assert rc == ExitCode.USAGE_ERROR
    assert out == ""
    assert USAGE in err


def test_conflict_exit_code_and_usage(capsys):
    rc, _, err = run(capsys, "-a", "sha256", "-intext", "x", "-infile", "y")
    assert rc == ExitCode.CONFLICTING_FLAGS and USAGE in err


def test_usage_error_is_a_value_of_the_documented_codes():
    assert {int(c) for c in ExitCode} == {0, 1, 2, 3, 4, 5}
    assert all(int(s) >= 10 for s in ec.Status if s is not ec.Status.OK)
    assert issubclass(ConflictingFlags, UsageError)


# -- execution -----------------------------------------------------------------------

def test_sha256_intext(capsys):
    assert run(capsys, "-a", "sha256", "-intext", "abc")[:2] == (0, hashlib.sha256(b"abc").hexdigest())


def test_sha256_empty_intext(capsys):
    rc, out, _ = run(capsys, "-a", "sha256", "-intext", "")
    assert (rc, out) == (0, hashlib.sha256(b"").hexdigest())


def test_hmac_userkey(capsys):
    rc, out, _ = run(capsys, "-a", "hmac_sha256", "-userkey", "0b" * 20, "-intext", "Hi There")
    assert rc == 0
    assert out == std_hmac.new(b"\x0b" * 20, b"Hi There", "sha256").hexdigest()


def test_hmac_randomkey_runs(capsys):
    rc, out, _ = run(capsys, "-a", "hmac_sha256", "-randomkey", "256", "-intext", "x")
    assert rc == 0 and len(bytes.fromhex(out)) == 32


def test_ecb_userkey_matches_oracle_and_decrypts(capsys):
    rc, out, _ = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-intext", "attack at dawn")
    assert rc == 0 and out == _ecb(bytes.fromhex(KEY), b"attack at dawn").hex()
    rc, back, _ = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-intext", out, "-d")
    assert rc == 0 and bytes.fromhex(back) == b"attack at dawn"


def test_hash_file(tmp_path, capsys):
    p = tmp_path / "in"
    data = os.urandom(10_000)
    p.write_bytes(data)
    rc, out, _ = run(capsys, "-a", "sha256", "-infile", str(p), "--buffer-size", "333")
    assert (rc, out) == (0, hashlib.sha256(data).hexdigest())


@pytest.mark.parametrize("algo", ["aes_ecb", "aes_cbc"])
def test_file_roundtrip_mode(tmp_path, capsys, algo):
    p = tmp_path / "in.bin"
    p.write_bytes(os.urandom(12_345))
    rc, out, _ = run(capsys, "-a", algo, "-randomkey", "192", "-infile", str(p), "--roundtrip")
    assert rc == 0 and out.startswith("roundtrip ok")
    assert (tmp_path / "in.bin.dec").read_bytes() == p.read_bytes()
    assert (tmp_path / "in.bin.enc").stat().st_size == 16 * (12_345 // 16 + 1)


def test_inline_roundtrip_mode(capsys):
    rc, out, _ = run(capsys, "-a", "aes_cbc", "-randomkey", "128", "-intext", "hello", "--roundtrip")
    assert rc == 0 and out.startswith("roundtrip ok")


def test_file_encrypt_with_out_path(tmp_path, capsys):
    p = tmp_path / "m"
    p.write_bytes(b"message")
    out_path = tmp_path / "ct.bin"
    rc, out, _ = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-infile", str(p), "-out", str(out_path))
    assert rc == 0 and str(out_path) in out
    assert out_path.read_bytes() == _ecb(bytes.fromhex(KEY), b"message")
    rc, _, _ = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-infile", str(out_path), "-d")
    assert rc == 0 and (tmp_path / "ct.bin.dec").read_bytes() == b"message"


def test_missing_infile(tmp_path, capsys):
    rc, out, err = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-infile", str(tmp_path / "nope"))
    assert rc == ExitCode.IO_ERROR and out == "" and "IO_ERROR" in err
    assert list(tmp_path.iterdir()) == []


def test_enclave_errors_become_exit_codes(capsys):
    rc, _, err = run(capsys, "-a", "aes_ecb", "-userkey", "0011", "-intext", "x")
    assert rc == ec.Status.BAD_KEY_LENGTH and "BAD_KEY_LENGTH" in err
    rc, _, err = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-intext", "00" * 17, "-d")
    assert rc == ec.Status.MISALIGNED_CIPHERTEXT
    rc, _, err = run(capsys, "-a", "aes_cbc", "-userkey", KEY, "-intext", "00" * 16, "-d")
    assert rc == ec.Status.IV_UNAVAILABLE


def test_wrong_key_decrypt_reports_bad_padding_or_garbage(capsys):
    _, ct, _ = run(capsys, "-a", "aes_ecb", "-userkey", KEY, "-intext", "secret")
    rc, out, err = run(capsys, "-a", "aes_ecb", "-userkey", "00" * 16, "-intext", ct, "-d")
    assert rc == ec.Status.BAD_PADDING or (rc == 0 and bytes.fromhex(out) != b"secret")


def test_reproducible_with_seed_hook(capsys):
    hooks = ec.TestHooks(seed=SEED)
    a = run(capsys, "-a", "aes_cbc", "-randomkey", "128", "-intext", "abc", test_hooks=hooks)
    b = run(capsys, "-a", "aes_cbc", "-randomkey", "128", "-intext", "abc", test_hooks=hooks)
    c = run(capsys, "-a", "aes_cbc", "-randomkey", "128", "-intext", "abc")
    assert a[0] == 0 and a[1] == b[1] != c[1]


def test_verbose_reports_peak_heap(capsys):
    rc, _, err = run(capsys, "-a", "sha256", "-intext", "abc", "-v")
    assert rc == 0
    line = next(l for l in err.splitlines() if l.startswith("heap:"))
    peak, budget = int(line.split()[2]), int(line.split()[4])
    assert 0 < peak < budget == ec.DEFAULT_BUDGET


def test_heap_budget_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("ENCLAVECRYPT_HEAP_BYTES", "5000")
    rc, _, err = run(capsys, "-a", "aes_cbc", "-randomkey", "256", "-intext", "x" * 3000)
    assert rc == ec.Status.HEAP_EXHAUSTED and "HEAP_EXHAUSTED" in err
    monkeypatch.setenv("ENCLAVECRYPT_HEAP_BYTES", "lots")
    assert run(capsys, "-a", "sha256", "-intext", "x")[0] == ExitCode.USAGE_ERROR


def test_enclaves_are_destroyed_after_each_run(capsys):
    from enclavecrypt.enclave import boundary
    before = set(boundary._registry)
    run(capsys, "-a", "sha256", "-intext", "x")
    run(capsys, "-a", "aes_ecb", "-userkey", "00", "-intext", "x")
    assert set(boundary._registry) == before


def test_console_entry_point_exit_codes():
    def cli(*argv):
        return subprocess.run([sys.executable, "-m", "enclavecrypt", *argv],
                              capture_output=True, text=True)
    ok = cli("-a", "sha256", "-intext", "abc")
    assert ok.returncode == 0 and ok.stdout.strip() == hashlib.sha256(b"abc").hexdigest()
    bad = cli("-a", "sha512", "-intext", "abc")
    assert bad.returncode == 2 and USAGE_HEAD in bad.stderr
