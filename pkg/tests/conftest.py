import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_psd(rng, dim, rank=None):
    rank = dim if rank is None else rank
    X = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return X @ X.conj().T


def random_unitary(rng, dim):
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(20190401)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
