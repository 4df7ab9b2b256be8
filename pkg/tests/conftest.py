import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fitzkit import LinePiece, PointPiece, PolygonalOperator, pp  # noqa: E402


@pytest.fixture
def identity():
    return PolygonalOperator([LinePiece(pp(0, 0), pp(1, 1))])


@pytest.fixture
def cross():
    o = pp(0, 0)
    return PolygonalOperator([LinePiece(o, pp(1, 0)), LinePiece(o, pp(0, 1))])


@pytest.fixture
def origin():
    return PolygonalOperator([PointPiece(pp(0, 0))])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
