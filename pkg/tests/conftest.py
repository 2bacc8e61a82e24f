import numpy as np
import pytest

from nlgame import games, strategies


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_hermitian(rng, d):
    m = rand_complex(rng, d, d)
    return (m + m.conj().T) / 2


def rand_unit(rng, n):
    v = rand_complex(rng, n)
    return v / np.linalg.norm(v)


def rand_povm(rng, d, k):
    """Random k-outcome POVM: G_i = S^{-1/2} M_i S^{-1/2} with M_i PSD."""
    ms = [(lambda x: x @ x.conj().T)(rand_complex(rng, d, d)) for _ in range(k)]
    total = sum(ms)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return np.array([inv_sqrt @ m @ inv_sqrt for m in ms])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def h4():
    return games.hadamard_graph(4)


@pytest.fixture(scope="session")
def g4(h4):
    return games.make_coloring_game(h4, 4)


@pytest.fixture(scope="session")
def fourier4():
    return strategies.fourier_strategy_hadamard(4)


@pytest.fixture(scope="session")
def blocksum4(fourier4):
    return strategies.block_direct_sum_strategy(fourier4, 0.3)


@pytest.fixture(scope="session")
def chsh():
    return games.make_chsh_game()


@pytest.fixture(scope="session")
def magic():
    return games.make_magic_square_game()


def commuting_instance(rng, d_max=8):
    """Random full-rank psi with measurements that commute with its root.

    In the Schmidt basis both measurements are block diagonal over the
    coefficient classes; inside each block they are coarse-grainings of one
    random orthonormal basis, so many outcome pairs have exactly zero overlap.
    Returns (E, F, psi, Psi).
    """
    from nlgame.strategies import random_unitary

    d = int(rng.integers(2, d_max + 1))
    n_classes = int(rng.integers(1, d + 1))
    label = np.sort(np.concatenate([np.arange(n_classes), rng.integers(0, n_classes, d - n_classes)]))
    lam = rng.uniform(0.2, 1.0, n_classes)[label]
    lam /= np.linalg.norm(lam)
    U, W = random_unitary(d, rng), random_unitary(d, rng)
    psi = (U @ np.diag(lam) @ W.T).reshape(-1)
    Psi = (U @ W.T).reshape(-1) / np.sqrt(d)

    k = int(rng.integers(2, 4))
    Ep = np.zeros((k, d, d), dtype=complex)
    Fp = np.zeros((k, d, d), dtype=complex)
    for c in range(n_classes):
        idx = np.flatnonzero(label == c)
        V = random_unitary(len(idx), rng)
        ea, fa = rng.integers(0, k, len(idx)), rng.integers(0, k, len(idx))
        for col in range(len(idx)):
            P = np.outer(V[:, col], V[:, col].conj())
            Ep[ea[col]][np.ix_(idx, idx)] += P
            Fp[fa[col]][np.ix_(idx, idx)] += P.conj()
    E = U @ Ep @ U.conj().T
    F = W @ Fp @ W.conj().T
    return E, F, psi, Psi


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number, text, ok):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        assert ok, text

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
