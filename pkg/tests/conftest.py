import numpy as np
import pytest
from hypothesis import settings

from balcover import exactfield as ef
from balcover.fileio import Workspace

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

BACKENDS = ["python"] + (["compiled"] if ef.compiled_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    before = ef.BACKEND
    ef.use_backend(request.param)
    yield request.param
    ef.use_backend(before)


@pytest.fixture
def ws():
    return Workspace()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def terms(cat, m):
    """Coordinates of ``m`` as ``{label: signed coefficient}``."""
    p = cat.p
    return {lab: (int(c) - p if int(c) > p // 2 else int(c))
            for lab, c in zip(cat.hom_labels(m.source, m.target), m.coords) if c}
