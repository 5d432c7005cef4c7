import functools

import pytest

from costab.cotstruct import enumerate_cohearts
from costab.snapshot import build_snapshot

# criterion number -> (status, title, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@functools.lru_cache(maxsize=None)
def _snap(name: str, width: int, lo: int, hi: int):
    return build_snapshot(name, width, (lo, hi))


@functools.lru_cache(maxsize=None)
def _hearts(name: str, width: int, lo: int, hi: int):
    return tuple(enumerate_cohearts(_snap(name, width, lo, hi)).structures)


@pytest.fixture(scope="session")
def kA2():
    return _snap("kA2", 2, -2, 2)


@pytest.fixture(scope="session")
def dual():
    return _snap("dual", 3, -2, 2)


@pytest.fixture(scope="session")
def trivial_snap():
    return _snap("k", 1, -2, 2)


@pytest.fixture(scope="session")
def kA2_hearts():
    return list(_hearts("kA2", 2, -2, 2))


@pytest.fixture(scope="session")
def dual_hearts():
    return list(_hearts("dual", 3, -2, 2))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status} - {title}" + (f" ({detail})" if detail else ""))
