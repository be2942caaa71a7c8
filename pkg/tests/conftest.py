"""Shared fixtures: the standard test curves and measurement setups."""

import numpy as np
import pytest

from thinscan.forward_model import make_directions, make_frequencies
from thinscan.geometry import Background, InclusionSpec, SupportingCurve


def parabola_curve() -> SupportingCurve:
    # x(z) = [z - 0.2, -0.5 z^2 + 0.4] on [-0.5, 0.5]
    return SupportingCurve.polynomial([-0.2, 1.0], [0.4, 0.0, -0.5], (-0.5, 0.5))


def cubic_curve() -> SupportingCurve:
    # x(z) = [z + 0.2, z^3 + z^2 - 0.5] on [-0.5, 0.5]
    return SupportingCurve.polynomial([0.2, 1.0], [-0.5, 0.0, 1.0, 1.0], (-0.5, 0.5))


def short_segment(center=(0.0, 0.0), length=5e-4) -> SupportingCurve:
    # point-like horizontal segment centered on the given point
    cx, cy = center
    return SupportingCurve.polynomial([cx, length], [cy], (-0.5, 0.5))


@pytest.fixture(scope="session")
def background():
    return Background(eps0=1.0, mu0=1.0)


@pytest.fixture(scope="session")
def parabola():
    return parabola_curve()


@pytest.fixture(scope="session")
def parabola_inclusion(parabola):
    return InclusionSpec(curve=parabola, h=0.015, eps=5.0, mu=5.0)


@pytest.fixture(scope="session")
def dirs_24_20():
    return make_directions(24, 20)


@pytest.fixture(scope="session")
def omegas_10():
    return make_frequencies(10, 0.3, 0.7).omegas


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
