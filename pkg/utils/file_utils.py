# utils/file_utils.py
import re

import numpy as np

from utils.config import BYTES_PER_SUBSYMBOL, DESCRIPTOR_MAGIC, DESCRIPTOR_VERSION
from utils.errors import ParseError, VersionMismatch

REQUIRED_KEYS = ('n', 'k', 'd', 'm', 'q', 'generator', 'seed')
KEY_ORDER = ('scheme', 'n', 'k', 'd', 'm', 'q', 'generator', 'seed', 'attempt')
DIAGONALS_SECTION = '[diagonals]'
END_LINE = 'end'

_DIAGONAL_LINE = re.compile(r'^(\d+),(\d+)=([0-9,]+)$')


def format_descriptor(fields, diagonals=None):
    """
    Render descriptor text.

    Args:
        fields (dict): Parameter values keyed as in KEY_ORDER
        diagonals (dict, optional): (i, l) -> list of diagonal entries

    Returns:
        str: UTF-8 text ending with a newline
    """
    lines = [f"{DESCRIPTOR_MAGIC} v{DESCRIPTOR_VERSION}"]
    lines += [f"{key}={fields[key]}" for key in KEY_ORDER if key in fields]
    if diagonals is not None:
        lines.append(DIAGONALS_SECTION)
        for (i, l) in sorted(diagonals):
            lines.append(f"{i},{l}=" + ','.join(str(value) for value in diagonals[(i, l)]))
    lines.append(END_LINE)
    return '\n'.join(lines) + '\n'


def parse_descriptor(text):
    """
    Parse descriptor text into its fields and optional diagonals.

    Raises:
        ParseError: missing header, keys or closing line, or malformed lines
        VersionMismatch: header of an unsupported version
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("Empty descriptor")

    header = lines[0].split()
    if len(header) != 2 or header[0] != DESCRIPTOR_MAGIC or not header[1].startswith('v'):
        raise ParseError(f"Not a code descriptor header: {lines[0]!r}")
    if header[1] != f"v{DESCRIPTOR_VERSION}":
        raise VersionMismatch(f"Descriptor version {header[1]} is not supported (expected v{DESCRIPTOR_VERSION})")
    if lines[-1] != END_LINE:
        raise ParseError("Descriptor is truncated (missing closing line)")

    fields = {}
    diagonals = None
    for line in lines[1:-1]:
        if line == DIAGONALS_SECTION:
            if diagonals is not None:
                raise ParseError("Duplicate diagonal section")
            diagonals = {}
            continue
        if diagonals is not None:
            match = _DIAGONAL_LINE.match(line)
            if not match:
                raise ParseError(f"Malformed diagonal line: {line!r}")
            key = (int(match.group(1)), int(match.group(2)))
            if key in diagonals:
                raise ParseError(f"Diagonal {key} listed twice")
            diagonals[key] = [int(value) for value in match.group(3).split(',') if value]
            continue
        if '=' not in line:
            raise ParseError(f"Malformed line: {line!r}")
        key, value = line.split('=', 1)
        fields[key.strip()] = value.strip()

    missing = [key for key in REQUIRED_KEYS if key not in fields]
    if missing:
        raise ParseError(f"Descriptor is missing keys: {', '.join(missing)}")
    return fields, diagonals


def bytes_to_subsymbols(data):
    """Pack bytes little-endian, two per subsymbol; odd lengths are zero-padded by one byte."""
    if len(data) % BYTES_PER_SUBSYMBOL:
        data = bytes(data) + b'\x00' * (BYTES_PER_SUBSYMBOL - len(data) % BYTES_PER_SUBSYMBOL)
    return np.frombuffer(bytes(data), dtype='<u2').astype(np.int64)


def subsymbols_to_bytes(values):
    """Inverse of bytes_to_subsymbols; every value must fit in 16 bits."""
    values = np.asarray(values.view(np.ndarray) if hasattr(values, 'view') else values, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() >= 2 ** (8 * BYTES_PER_SUBSYMBOL)):
        raise ParseError("Subsymbol value does not fit the byte packing")
    return values.astype('<u2').tobytes()


def read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


def write_text(path, text):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
