# tests/test_scalar_baseline.py
import itertools

import numpy as np
import pytest

from components.code_core import cutset_point, decode
from components.scalar_baseline import SCALAR_Q, build_42, encode_42, repair_42
from utils.errors import UnknownNode, WrongHelperShape

A = (1, 2)
B = (3, 4)


@pytest.fixture(scope='module')
def scalar_code():
    return build_42()


@pytest.fixture(scope='module')
def blocks_42(scalar_code):
    _, code = scalar_code
    return {block.node_id: block for block in encode_42(A, B, code=code)}


def contents(blocks, *nodes):
    return {node: blocks[node].data for node in nodes}


def test_code_is_verified(scalar_code):
    scalar, code = scalar_code
    assert code.params.q == SCALAR_Q
    assert code.is_scalar
    assert code.verified
    assert code.mds_report.summary() == "6/6"
    assert code.rank_report.summary() == "4/4"
    assert scalar.rank_conditions() == {'node1': 2, 'node2': 2}


def test_encoding_example(blocks_42):
    assert [int(x) for x in blocks_42[3].data] == [4, 3]
    assert [int(x) for x in blocks_42[4].data] == [0, 1]


def test_node_one_repair_oracle(blocks_42, scalar_code):
    _, code = scalar_code
    result = repair_42(1, contents(blocks_42, 2, 3, 4), code=code)
    assert [int(result.payloads[node][0]) for node in (2, 3, 4)] == [2, 2, 1]
    assert [int(x) for x in result.restored.data] == [1, 2]


def test_every_node_repairs_with_three_symbols(blocks_42, scalar_code):
    _, code = scalar_code
    cutset = cutset_point(4, 2, 3, code.derived.M_units)
    assert (cutset.gamma, cutset.beta) == (3, 1)
    for failed in range(1, 5):
        survivors = [node for node in range(1, 5) if node != failed]
        result = repair_42(failed, contents(blocks_42, *survivors), code=code)
        assert result.restored == blocks_42[failed]
        assert result.downloads == {node: 1 for node in survivors}
        assert result.gamma_measured == cutset.gamma


def test_decode_from_every_pair(blocks_42, scalar_code):
    _, code = scalar_code
    for pair in itertools.combinations(range(1, 5), 2):
        a, b = decode(code, contents(blocks_42, *pair))
        assert [int(x) for x in a] == list(A)
        assert [int(x) for x in b] == list(B)


def test_repair_with_stripes(scalar_code):
    _, code = scalar_code
    rng = np.random.default_rng(0)
    a = rng.integers(0, 5, size=(2, 4))
    b = rng.integers(0, 5, size=(2, 4))
    blocks = {block.node_id: block for block in encode_42(a, b, code=code)}
    result = repair_42(3, contents(blocks, 1, 2, 4), code=code)
    assert result.restored == blocks[3]
    assert result.stripes == 4


def test_repair_needs_all_survivors(blocks_42):
    with pytest.raises(WrongHelperShape):
        repair_42(1, contents(blocks_42, 2, 3))
    with pytest.raises(UnknownNode):
        repair_42(5, contents(blocks_42, 1, 2, 3))
