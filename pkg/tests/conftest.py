import math

import numpy as np
import pytest

from kdense.bodies import Disk, Ellipse, Polygon, smooth

# Lens oracle: V(B ∩ ((1,0) + rB)) / (pi r^2), evaluated once at 30 digits.
LENS = {
    0.025: 0.497347376166453582,
    0.05: 0.494694503590842160,
    0.1: 0.489387015744145530,
    0.2: 0.478758051735187390,
    0.25: 0.473432519874437947,
    0.5: 0.446609918724663901,
    1.0: 0.391002218955770642,
}
DELTA1_DISK = 1.0 / (3.0 * math.pi)
# ∫_B |y - (1,0)| dy, pinned by two independent quadratures
F_PHI_DISK_EDGE = 32.0 / 9.0
OMEGA_ELLIPSE_21 = 7.916317428905746


def lens_area(r):
    return r * r * math.acos(r / 2) + math.acos(1 - r * r / 2) - 0.5 * r * math.sqrt(4 - r * r)


def lens_delta(r):
    return lens_area(r) / (math.pi * r * r)


@pytest.fixture
def disk():
    return Disk(1.0)


@pytest.fixture
def ellipse():
    return Ellipse(2.0, 1.0)


@pytest.fixture
def square():
    return Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])


@pytest.fixture
def triangle():
    return Polygon([(-1, -1), (1, -1), (0, 2)])


@pytest.fixture(scope="session")
def smoothed_square():
    return smooth(Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)]), 0.1)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def assert_close(a, b, tol):
    assert np.all(np.abs(np.asarray(a) - np.asarray(b)) <= tol), (a, b)
