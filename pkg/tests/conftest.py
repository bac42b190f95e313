import math

import pytest

GAMMA = 4.0 / 9.0
SQRT_GAMMA = 2.0 / 3.0
C5 = 4.0 / (15.0 * SQRT_GAMMA)  # 0.4 for gamma = 4/9


@pytest.fixture
def gamma():
    return GAMMA
