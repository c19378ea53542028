"""Binary container for :class:`~mulspace.grid.GridFunction`.

Layout (all little-endian)::

    offset  size  field
    0       4     magic b"MSGF"
    4       2     format version (uint16, currently 1)
    6       1     dim (uint8, 1 or 2)
    7       1     side (uint8, 0 = space, 1 = frequency)
    8       4     N, points per axis (uint32)
    12      4     reserved, zero
    16      8     L, half width (float64)
    24      8     h = 2L/N, spacing (float64; checked on read)
    32      ...   N^dim complex samples as interleaved (re, im) float64,
                  row-major, natural x / xi order
"""

import struct

import numpy as np

from .grid import FREQUENCY, SPACE, GridFunction, make_grid

MAGIC = b"MSGF"
VERSION = 1
_HEADER = struct.Struct("<4sHBBI4x")
_REALS = struct.Struct("<dd")
_SIDE_CODE = {SPACE: 0, FREQUENCY: 1}
_CODE_SIDE = {v: k for k, v in _SIDE_CODE.items()}


class FormatError(ValueError):
    pass


def to_bytes(f):
    g = f.grid
    head = _HEADER.pack(MAGIC, VERSION, g.dim, _SIDE_CODE[f.side], g.points_per_axis)
    body = np.ascontiguousarray(f.samples, dtype="<c16").tobytes()
    return head + _REALS.pack(g.half_width, g.spacing) + body


def from_bytes(buf):
    if len(buf) < _HEADER.size + _REALS.size:
        raise FormatError("truncated header")
    magic, version, dim, side, n = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if side not in _CODE_SIDE:
        raise FormatError(f"bad side code {side}")
    half, spacing = _REALS.unpack_from(buf, _HEADER.size)
    grid = make_grid(dim, n, half)
    if not np.isclose(spacing, grid.spacing, rtol=1e-12, atol=0):
        raise FormatError("spacing inconsistent with N and L")
    offset = _HEADER.size + _REALS.size
    count = n ** dim
    if len(buf) != offset + 16 * count:
        raise FormatError(f"expected {count} samples")
    samples = np.frombuffer(buf, dtype="<c16", count=count, offset=offset)
    return GridFunction(grid, samples.reshape(grid.shape), _CODE_SIDE[side])


def write(path, f):
    with open(path, "wb") as fh:
        fh.write(to_bytes(f))


def read(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
