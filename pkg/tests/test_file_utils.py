# tests/test_file_utils.py
import numpy as np
import pytest

from utils.config import Settings
from utils.errors import ParseError, VersionMismatch
from utils.file_utils import bytes_to_subsymbols, format_descriptor, parse_descriptor, subsymbols_to_bytes

FIELDS = {'scheme': 'alignment', 'n': 6, 'k': 3, 'd': 4, 'm': 1, 'q': 65537,
          'generator': 'philox-seedseq-v1', 'seed': 0, 'attempt': 0}


def test_descriptor_text_layout():
    text = format_descriptor(FIELDS, {(1, 1): [5, 6], (1, 2): [7, 8]})
    assert text.splitlines() == [
        'MSRCODE v1', 'scheme=alignment', 'n=6', 'k=3', 'd=4', 'm=1', 'q=65537',
        'generator=philox-seedseq-v1', 'seed=0', 'attempt=0', '[diagonals]', '1,1=5,6', '1,2=7,8', 'end',
    ]
    fields, diagonals = parse_descriptor(text)
    assert fields['q'] == '65537'
    assert diagonals == {(1, 1): [5, 6], (1, 2): [7, 8]}


def test_descriptor_parse_errors():
    good = format_descriptor(FIELDS)
    with pytest.raises(ParseError):
        parse_descriptor('')
    with pytest.raises(ParseError):
        parse_descriptor(good.replace('MSRCODE', 'OTHER'))
    with pytest.raises(VersionMismatch):
        parse_descriptor(good.replace('v1', 'v3'))
    with pytest.raises(ParseError):
        parse_descriptor(good.replace('end\n', ''))
    with pytest.raises(ParseError):
        parse_descriptor(good.replace('q=65537', 'q 65537'))
    with pytest.raises(ParseError):
        parse_descriptor(format_descriptor(FIELDS, {(1, 1): [1]}).replace('1,1=1', '1;1=1'))


def test_subsymbol_packing_is_little_endian():
    values = bytes_to_subsymbols(b'\x01\x02\x03')
    assert list(values) == [0x0201, 0x0003]
    assert subsymbols_to_bytes(values) == b'\x01\x02\x03\x00'
    with pytest.raises(ParseError):
        subsymbols_to_bytes(np.array([65536]))


def test_settings_from_environment():
    settings = Settings.from_env({'MSR_FIELD_MODULUS': '257', 'MSR_WORKERS': '0', 'MSR_LOG_LEVEL': 'debug'})
    assert settings.to_dict() == {'field_modulus': 257, 'max_attempts': 32, 'workers': 1, 'log_level': 'DEBUG'}
    assert Settings.from_env({}).field_modulus == 65537
