import numpy as np
import pytest

from arbls.kernels import alpha_grid, build_partition_table


@pytest.fixture(scope="session")
def grid():
    return alpha_grid()


@pytest.fixture(scope="session")
def table(grid):
    return build_partition_table(grid, c=1.0, epsilon=10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_VERDICT_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one acceptance line; it is echoed now and in the terminal summary."""
    lines = request.config.stash.setdefault(_VERDICT_KEY, [])

    def record(number, ok, detail):
        tag = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"[{tag}] criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
