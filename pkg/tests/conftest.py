import numpy as np
import pytest

from knotenergy import PolyCurve, SphereMap, generate
from knotenergy.curve import build_arc_table


@pytest.fixture(scope="session")
def circle_1000():
    return generate("circle", 1000)


@pytest.fixture(scope="session")
def square_1000():
    return generate("square", 1000)


@pytest.fixture(scope="session")
def stadion_1000():
    return generate("stadion", 1000)


@pytest.fixture(scope="session")
def generator_curves_500():
    """One instance of every generator at N=500 (square/stadion need n % 4 == 0)."""
    return {
        "circle": generate("circle", 500),
        "square": generate("square", 500),
        "stadion": generate("stadion", 500),
        "wavy": generate("wavy", 500),
    }


def circle_tangent(n: int) -> SphereMap:
    t = np.arange(n) / n
    return SphereMap(np.column_stack(
        [-np.sin(2 * np.pi * t), np.cos(2 * np.pi * t), np.zeros(n)]))


@pytest.fixture(scope="session")
def circle_tangent_500():
    return circle_tangent(500)


def raw_tangents(curve: PolyCurve) -> np.ndarray:
    """Constant-speed derivative field gamma' = L * unit tangent."""
    from knotenergy import tangent_field
    return build_arc_table(curve).total * tangent_field(curve)
