import numpy as np
import pytest

from vvindex import (TrackControls, build_root_system, chebyshev_nodes,
                     enumerate_t0, make_schedule, track_set)


@pytest.fixture(scope="session")
def a1():
    return build_root_system("A", 1)


@pytest.fixture(scope="session")
def a2():
    return build_root_system("A", 2)


@pytest.fixture(scope="session")
def b2():
    return build_root_system("B", 2)


@pytest.fixture(scope="session")
def g2():
    return build_root_system("G", 2)


@pytest.fixture(scope="session")
def controls():
    return TrackControls()


@pytest.fixture(scope="session")
def tracked_cache(controls):
    """Tracked representative paths, shared across test modules."""
    cache = {}

    def get(rsd, h, t_end=None, nodes=()):
        t_min = -1.0 + controls.x_min**2 if t_end is None else t_end
        key = (rsd.name, h, round(t_min, 12), tuple(np.round(nodes, 12)))
        if key not in cache:
            fps = enumerate_t0(rsd, h, controls)
            sched = make_schedule(t_min, controls, extra_nodes=nodes)
            cache[key] = track_set(rsd, fps, sched, controls)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def fit_nodes():
    return chebyshev_nodes(-0.9, 0.0, 20)
