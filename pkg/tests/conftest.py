import numpy as np
import pytest

from effsec.probcore import Dmc, WiretapChannel

ACCEPTANCE_LINES: list[str] = []


def random_pmf(rng, k, zeros=False):
    p = rng.dirichlet(np.ones(k))
    if zeros and k > 2:
        p[rng.integers(k)] = 0.0
        p = p / p.sum()
    return p


def random_dmc(rng, nx, ny):
    return Dmc.from_matrix(np.vstack([random_pmf(rng, ny) for _ in range(nx)]))


def random_wiretap(rng, nx=2, ny=2, nz=2):
    return WiretapChannel.from_factors(random_dmc(rng, nx, ny), random_dmc(rng, nx, nz))


@pytest.fixture
def record_criterion():
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
