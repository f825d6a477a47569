import numpy as np
import pytest

from cone_harmonics import algebra


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[("sym", 2), ("sym", 3), ("herm", 2), ("herm", 3)], ids=lambda p: f"{p[0]}{p[1]}")
def alg(request):
    return algebra(*request.param)
