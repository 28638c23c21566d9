import pytest

from enclavecrypt import enclave as ec

SEED = bytes(range(32))


@pytest.fixture
def eid():
    e = ec.enclave_create()
    yield e
    try:
        ec.enclave_destroy(e)
    except ec.EnclaveNotFound:
        pass


@pytest.fixture
def make_enclave():
    """Factory for enclaves with arbitrary options; all are destroyed afterwards."""
    made = []

    def make(*args, **kwargs):
        e = ec.enclave_create(*args, **kwargs)
        made.append(e)
        return e

    yield make
    for e in made:
        try:
            ec.enclave_destroy(e)
        except ec.EnclaveNotFound:
            pass


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome == "passed":
                continue
            if "test_acceptance.py" not in rep.nodeid:
                continue
            name = dict(rep.user_properties).get("criterion", rep.nodeid.split("::")[-1])
            lines.append(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(lines), key=lambda s: s[6:]):
            terminalreporter.write_line(line)
