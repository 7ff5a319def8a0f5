from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jacobsthal.primes import primes_up_to_index  # noqa: E402


@pytest.fixture(scope="session")
def prime_sets():
    return {n: primes_up_to_index(n) for n in range(1, 25)}


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def acceptance(request):
    """``record(number, ok, detail)`` prints one verdict line and keeps it for the summary."""
    lines = request.config._acceptance_lines

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"acceptance {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines[number] = line
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
