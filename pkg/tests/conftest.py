import numpy as np
import pytest

from roomgen.demo import make_demo_catalog
from roomgen.objio import load_catalog


@pytest.fixture(scope="session")
def catalog_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("catalog")
    make_demo_catalog(path, n_objects=40, seed=7)
    return path


@pytest.fixture(scope="session")
def catalog_clouds(catalog_dir):
    return load_catalog(catalog_dir, min_points=32).clouds


@pytest.fixture
def unit_cube():
    corners = np.array(
        [
            [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1],
            [1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1],
        ],
        dtype=np.float64,
    )
    inner = np.random.default_rng(3).uniform(0, 1, size=(64, 3))
    return np.concatenate([corners, inner], axis=0)
