import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("package", deadline=None, max_examples=60)
settings.load_profile("package")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
