import numpy as np
import pytest

from anisomesh.canvas import build_canvas
from anisomesh.metric_field import euclidean

UNIT = ((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def unit_canvas():
    # grid step 0.2 on the unit square
    return build_canvas(UNIT, 0.3)


@pytest.fixture
def fine_canvas():
    return build_canvas(UNIT, 0.02 * np.sqrt(2))


@pytest.fixture
def eucl():
    return euclidean(2)
