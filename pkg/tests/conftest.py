import warnings
from importlib import resources

import numpy as np
import pytest

from qef import code

DATA = resources.files("qef") / "data"


def example_matrices():
    return code.load_matrix(DATA / "example_hx.txt"), code.load_matrix(DATA / "example_hz.txt")


def random_corpus(count: int = 100, seed: int = 0, max_n: int = 24):
    """Dual-containing codes with varied sizes, Z-row counts and column order."""
    rng = np.random.default_rng(seed)
    out = []
    for s in range(count):
        n = int(rng.integers(6, max_n + 1))
        rho1 = int(rng.integers(1, n // 2 + 1))
        rho2 = int(rng.integers(1, n - rho1 + 1))
        h1, h2 = code.random_dual_containing(n, rho1, s, rho2)
        perm = rng.permutation(n)
        out.append(code.build_css(h1[:, perm], h2[:, perm]))
    return out


@pytest.fixture(scope="session")
def example():
    return example_matrices()


@pytest.fixture(scope="session")
def example_ea(example):
    return code.ea_extend(*example)


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


@pytest.fixture(autouse=True)
def _quiet_odd_blocks():
    from qef.ftencoder import OddBlockCountZSeed

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OddBlockCountZSeed)
        yield
