# tests/test_code_core.py
import itertools
from fractions import Fraction

import numpy as np
import pytest

from components.code_core import (construct_code, cutset_point, decode, derive_params, describe_code,
                                  draw_coefficients, encode, load_code, survey_field_size, verify_mds)
from models.code_instance import CodeInstance
from models.code_params import CodeParams
from tests.conftest import random_units
from utils.errors import (BadSubset, ConstructionFailed, DimensionMismatch, Inadmissible, LengthMismatch,
                          ParseError, VersionMismatch)


# ---------------------------------------------------------
# Parameters and the cutset point
# ---------------------------------------------------------
@pytest.mark.parametrize('n, k, d, m, N, B, alpha_sub, M_units', [
    (6, 3, 4, 1, 4, 1, 2, 6),
    (6, 3, 4, 2, 4, 16, 32, 6),
    (4, 2, 3, 1, 2, 1, 2, 4),
    (5, 3, 3, 3, 2, 9, 9, 3),
])
def test_derive_params(n, k, d, m, N, B, alpha_sub, M_units):
    derived = derive_params(CodeParams(n=n, k=k, d=d, m=m))
    assert (derived.N, derived.B, derived.alpha_sub, derived.M_units) == (N, B, alpha_sub, M_units)
    assert derived.M_sub == k * alpha_sub


@pytest.mark.parametrize('n, k, d', [(6, 3, 2), (3, 3, 2), (6, 0, 4), (6, 3, 6)])
def test_inadmissible_parameters(n, k, d):
    with pytest.raises(Inadmissible):
        CodeParams(n=n, k=k, d=d).validate()


def test_inadmissible_field_and_seed():
    with pytest.raises(Inadmissible):
        CodeParams(n=6, k=3, d=4, q=4).validate()
    with pytest.raises(Inadmissible):
        CodeParams(n=6, k=3, d=4, m=0).validate()
    with pytest.raises(Inadmissible):
        CodeParams(n=6, k=3, d=4, seed=2 ** 64).validate()


def test_params_dict_round_trip():
    params = CodeParams(n=7, k=3, d=6, m=2, q=5, seed=9)
    assert CodeParams.from_dict(params.to_dict()) == params
    assert params.parity_count == 4
    assert [params.is_systematic(node) for node in (3, 4)] == [True, False]


def test_cutset_point_example():
    point = cutset_point(6, 3, 4, 6)
    assert (point.alpha, point.gamma, point.beta) == (2, 4, 1)
    assert point.naive_gamma == 6


def test_cutset_reduction_factor():
    point = cutset_point(31, 6, 30, 6)
    assert point.reduction_factor == 5


def test_cutset_point_is_exact():
    point = cutset_point(5, 3, 4, 1)
    assert point.gamma == Fraction(2, 3)
    with pytest.raises(Inadmissible):
        cutset_point(5, 3, 4, 0)


# ---------------------------------------------------------
# Construction
# ---------------------------------------------------------
def test_construct_verified(code_634):
    assert code_634.verified
    assert code_634.mds_report.summary() == "20/20"
    assert code_634.rank_report.summary() == "6/6"
    assert np.count_nonzero(code_634.coefficients.view(np.ndarray)) == code_634.coefficients.size


def test_construction_is_reproducible(code_634):
    again = construct_code(CodeParams(n=6, k=3, d=4, m=1, q=65537, seed=0))
    assert again == code_634
    assert np.array_equal(draw_coefficients(code_634.params, code_634.attempt), code_634.coefficients)


def test_different_seeds_draw_different_coefficients():
    a = draw_coefficients(CodeParams(n=6, k=3, d=4, seed=1), 0)
    b = draw_coefficients(CodeParams(n=6, k=3, d=4, seed=2), 0)
    assert not np.array_equal(a, b)


def test_binary_field_cannot_be_constructed():
    with pytest.raises(ConstructionFailed) as info:
        construct_code(CodeParams(n=6, k=3, d=4, q=2), max_attempts=3)
    assert info.value.last_condition == 'mds'
    assert info.value.attempts == 3


def test_code_instance_rejects_bad_coefficients():
    params = CodeParams(n=6, k=3, d=4)
    with pytest.raises(DimensionMismatch):
        CodeInstance(params, params.field.Ones((3, 3, 3)))
    with pytest.raises(Inadmissible):
        CodeInstance(params, params.field.Zeros((3, 3, 2)))


def test_mds_report_names_failing_subsets():
    params = CodeParams(n=6, k=3, d=4)
    code = CodeInstance(params, params.field.Ones((3, 3, 2)))
    report = verify_mds(code)
    assert not report.passed
    assert (4, 5, 6) in [check.subset for check in report.failures]
    assert [check.subset for check in report.checks] == list(itertools.combinations(range(1, 7), 3))
    assert report.by_systematic_count()[3] == (1, 1)


def test_threaded_mds_report_keeps_order(code_634):
    assert verify_mds(code_634, workers=4) == verify_mds(code_634)


# ---------------------------------------------------------
# Encoding and decoding
# ---------------------------------------------------------
def test_systematic_nodes_store_units(code_634):
    units = random_units(code_634, seed=1)
    blocks = encode(code_634, units)
    assert [block.node_id for block in blocks] == [1, 2, 3, 4, 5, 6]
    for l in range(3):
        assert np.array_equal(blocks[l].data, units[l])
    assert str(blocks[4].role) == "Parity(2)"


def test_encoding_is_linear(code_634):
    a = random_units(code_634, seed=2)
    b = random_units(code_634, seed=3)
    summed = encode(code_634, [x + y for x, y in zip(a, b)])
    for block, left, right in zip(summed, encode(code_634, a), encode(code_634, b)):
        assert np.array_equal(block.data, left.data + right.data)


def test_encode_rejects_wrong_lengths(code_634):
    units = random_units(code_634)
    with pytest.raises(LengthMismatch):
        encode(code_634, units[:2])
    with pytest.raises(LengthMismatch):
        encode(code_634, units[:2] + [code_634.field.Zeros(3)])


def test_decode_from_every_subset(code_634):
    units = random_units(code_634, seed=4, stripes=3)
    blocks = {block.node_id: block.data for block in encode(code_634, units)}
    for subset in itertools.combinations(range(1, 7), 3):
        decoded = decode(code_634, {node: blocks[node] for node in subset})
        for got, want in zip(decoded, units):
            assert np.array_equal(got, want)


def test_decode_needs_k_nodes(code_634):
    blocks = {block.node_id: block.data for block in encode(code_634, random_units(code_634))}
    with pytest.raises(BadSubset):
        decode(code_634, {1: blocks[1], 2: blocks[2]})


# ---------------------------------------------------------
# Descriptors
# ---------------------------------------------------------
def test_descriptor_round_trip(code_634):
    text = describe_code(code_634)
    assert text.startswith("MSRCODE v1\n")
    assert text.endswith("end\n")
    assert "[diagonals]" not in text
    assert load_code(text) == code_634


def test_explicit_descriptor_round_trip(code_634):
    text = describe_code(code_634, explicit=True)
    assert "[diagonals]" in text
    assert load_code(text, verify=False) == code_634


def test_truncated_descriptor_is_rejected(code_634):
    text = describe_code(code_634, explicit=True)
    with pytest.raises(ParseError):
        load_code(text[:len(text) // 2])


def test_descriptor_version_and_content_errors(code_634):
    text = describe_code(code_634)
    with pytest.raises(VersionMismatch):
        load_code(text.replace("MSRCODE v1", "MSRCODE v2"))
    with pytest.raises(ParseError):
        load_code(text.replace("generator=philox-seedseq-v1", "generator=mersenne"))
    with pytest.raises(ParseError):
        load_code(text.replace("n=6\n", ""))


def test_descriptor_with_inadmissible_parameters_keeps_its_error(code_634):
    text = describe_code(code_634)
    with pytest.raises(Inadmissible) as info:
        load_code(text.replace("d=4", "d=2"))
    assert not isinstance(info.value, ParseError)


# ---------------------------------------------------------
# Field-size survey
# ---------------------------------------------------------
def test_survey_records_every_seed():
    survey = survey_field_size(6, 3, 4, 1, 65537, range(3))
    assert [record['seed'] for record in survey.records] == [0, 1, 2]
    assert 0.0 <= survey.success_rate <= 1.0
    assert survey.failures == sum(not record['first_attempt_passed'] for record in survey.records)
