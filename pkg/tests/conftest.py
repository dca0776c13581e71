import numpy as np
import pytest

from bscoloring.geometry import estimate_region_areas
from bscoloring.graphcolor import build_cluster_plan
from bscoloring.topology import Rect, Topology, generate_perturbed_grid


@pytest.fixture(scope="session")
def grid100():
    return generate_perturbed_grid(7, 7, 200.0, 100.0, seed=11)


@pytest.fixture(scope="session")
def grid200():
    return generate_perturbed_grid(7, 7, 200.0, 200.0, seed=12)


@pytest.fixture(scope="session")
def plan100(grid100):
    return build_cluster_plan(grid100, estimate_region_areas(grid100, 5000, 11), 4)


def explicit(points, pad=1.0):
    pts = np.asarray(points, dtype=float)
    lo, hi = pts.min(axis=0) - pad, pts.max(axis=0) + pad
    w = Rect(lo[0], lo[1], hi[0], hi[1])
    return Topology(pts, w, w)
