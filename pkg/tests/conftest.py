import numpy as np
import pytest

from dps.dalembert import build_frame_field, potentials_from_axis
from dps.hirota import AxisData, evolve_u
from dps.lattice import Rect
from dps.potentials import PotentialPair
from dps.surfaces import AmslerConfig, RevolutionConfig, build_amsler, build_revolution


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def random_surface():
    """Axis data, evolved u, potentials and the loop-group frames on 6x6."""
    rng = np.random.default_rng(7)
    rect = Rect(0, 5, 0, 5)
    ax = AxisData.random(rng, rect, p=0.8, q=0.8)
    u = evolve_u(ax, rect)
    alpha, beta = potentials_from_axis(u)
    pot = PotentialPair(alpha, beta, ax.p, ax.q, require_alpha0=False)
    ff = build_frame_field(pot, rect)
    return {"rect": rect, "axis": ax, "u": u, "pot": pot, "ff": ff}


@pytest.fixture(scope="session")
def amsler8():
    return build_amsler(AmslerConfig(q=1.0, s=0.0, ell=np.pi / 4, size=8))


@pytest.fixture(scope="session")
def revolution8():
    return build_revolution(RevolutionConfig(q=1.0, ell=4, size=8))
