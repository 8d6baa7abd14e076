import numpy as np
import pytest

from dgiga.driver import run_sweep
from dgiga.geofile import load_surface
from dgiga.problems import make_problem

BUNDLED = {
    1: "square4.g",
    2: "square4_p2.g",
    3: "square4_p3.g",
}
BUNDLED_CYL = {2: "qcyl4.g", 3: "qcyl4_p3.g"}


def bundled(name):
    from dgiga.cli import data_path

    return data_path(name)


@pytest.fixture(scope="session")
def planar_sweep():
    """Cached plane_sine sweeps on the bundled 4-patch square, keyed by (p, levels)."""
    cache = {}

    def get(p: int, levels: int):
        key = (p, levels)
        if key not in cache:
            surface = load_surface(bundled(BUNDLED[p]))

            def factory(surf, delta):
                return make_problem("plane_sine", surf, p, delta)

            cache[key] = run_sweep(surface, p, factory, levels=levels)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def cylinder_sweep():
    """Cached cylinder_sine sweeps on the bundled quarter cylinder."""
    cache = {}

    def get(p: int, levels: int):
        key = (p, levels)
        if key not in cache:
            surface = load_surface(bundled(BUNDLED_CYL[p]))

            def factory(surf, delta):
                return make_problem("cylinder_sine", surf, p, delta)

            cache[key] = run_sweep(surface, p, factory, levels=levels)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def jump_sweep():
    """plane_sine on the 4-patch square with checkerboard coefficients 1 / 1e4."""
    from dgiga.geometries import square_grid

    surface = square_grid(2, alpha=[1.0, 1e4, 1e4, 1.0])

    def factory(surf, delta):
        return make_problem("plane_sine", surf, 2, delta)

    return run_sweep(surface, 2, factory, levels=5)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
