from __future__ import annotations

import numpy as np
import pytest

from e2rc.codes import build_code, rate_04_code, rate_half_code


@pytest.fixture(scope="session")
def code7():
    return build_code(7, 3, 6, seed=1)


@pytest.fixture(scope="session")
def code8():
    return build_code(8, 4, 7, seed=1)


@pytest.fixture(scope="session")
def code64():
    return build_code(64, 64, 63, seed=1)


@pytest.fixture(scope="session")
def code600():
    return rate_half_code(seed=1)


@pytest.fixture(scope="session")
def code_low():
    return rate_04_code(seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
