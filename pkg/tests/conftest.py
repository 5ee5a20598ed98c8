# tests/conftest.py
import numpy as np
import pytest

from components.code_core import construct_code, encode
from models.code_params import CodeParams


@pytest.fixture(scope='session')
def code_634():
    """Verified (6,3,4) code with m=1 over GF(65537)."""
    return construct_code(CodeParams(n=6, k=3, d=4, m=1, q=65537, seed=0))


@pytest.fixture(scope='session')
def code_634_m2():
    """Verified (6,3,4) code with m=2: 32 subsymbols per node."""
    return construct_code(CodeParams(n=6, k=3, d=4, m=2, q=65537, seed=0))


def random_units(code, seed=0, stripes=None):
    rng = np.random.default_rng(seed)
    shape = (code.alpha_sub,) if stripes is None else (code.alpha_sub, stripes)
    return [code.field(rng.integers(0, code.params.q, size=shape)) for _ in range(code.k)]


@pytest.fixture
def blocks_634(code_634):
    return {block.node_id: block for block in encode(code_634, random_units(code_634, seed=7))}
