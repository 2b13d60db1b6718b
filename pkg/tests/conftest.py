import numpy as np
import pytest

from haltlab.ensembles import EnsembleSpec, SeedPath, sample_goe


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def goe(n, index, seed=11):
    return sample_goe(EnsembleSpec("GOE", n), SeedPath(seed, index))


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    a = a + a.T
    return np.tril(a) + np.tril(a, -1).T


ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail):
    ACCEPTANCE_LINES.append(f"{name:<34} {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
