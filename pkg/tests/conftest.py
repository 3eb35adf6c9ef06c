import numpy as np
import pytest

from edecoh.models import BeamSpec, gold, silicon
from edecoh.trajectory import GeometrySpec, TrajectoryEnsemble


@pytest.fixture(scope="session")
def beam():
    return BeamSpec()


@pytest.fixture(scope="session")
def geom():
    return GeometrySpec()


@pytest.fixture(scope="session")
def si10():
    return silicon(10.0)


@pytest.fixture(scope="session")
def si15():
    return silicon(1.5)


@pytest.fixture(scope="session")
def au():
    return gold()


def make_constant_height_ensemble(
    heights, detector_ys, beam, surface_length=1e-2, n_samples=201, surface_height=0.0
):
    """Ensemble of constant-height passes for coherence tests."""
    heights = np.asarray(heights, dtype=float)
    t = np.linspace(0.0, surface_length / beam.speed, n_samples)
    y = np.repeat(heights[:, None], n_samples, axis=1)
    return TrajectoryEnsemble(
        t=t,
        y=y,
        absorbed=np.zeros(heights.size, dtype=bool),
        detector_y=np.asarray(detector_ys, dtype=float),
        y0=heights.copy(),
        vy0=np.zeros(heights.size),
        speed=beam.speed,
        surface_height=surface_height,
        seed=0,
    )
