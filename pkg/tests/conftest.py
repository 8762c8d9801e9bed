import math
from pathlib import Path

import pytest

from experiments.density import random_lengths
from graph.graph_model import flower, interval, lasso, mandarin, star
from spectral.scattering import build_bond_scattering

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "graphs"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def interval_bs():
    return build_bond_scattering(interval(math.pi))


@pytest.fixture
def equilateral_star_bs():
    return build_bond_scattering(star([1.0, 1.0, 1.0]))


@pytest.fixture
def random_star():
    return star(random_lengths(3, seed=11))


@pytest.fixture
def random_lasso():
    loop, tail = random_lengths(2, seed=5)
    return lasso(loop, tail)


@pytest.fixture
def random_mandarin():
    return mandarin(random_lengths(3, seed=7))


@pytest.fixture
def random_flower():
    return flower(random_lengths(3, seed=7))
