import numpy as np
import pytest

from soco.geometry import Ball, Box, HalfspacePolytope, Simplex


@pytest.fixture
def unit_ball():
    return Ball(np.zeros(2), 1.0)


@pytest.fixture
def unit_box():
    return Box(np.zeros(2), np.ones(2))


@pytest.fixture
def simplex3():
    return Simplex(3)


@pytest.fixture
def pentagon():
    ang = 2.0 * np.pi * np.arange(5) / 5
    normals = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return HalfspacePolytope(normals, np.ones(5))
