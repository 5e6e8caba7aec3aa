"""NPY v1.0 tensor file parsing and memory-mapped access.

The store keeps every representation matrix in plain dense ``.npy`` files,
so random access to one item's rows never loads the whole file.  Only
format version 1.0 is accepted: magic ``\\x93NUMPY``, version bytes
``\\x01\\x00``, little-endian uint16 header length, then an ASCII dict with
exactly the keys ``descr``, ``fortran_order`` and ``shape``.  The payload
starts at a 64-byte-aligned offset (the padding rule used by the format's
reference writer).
"""

from __future__ import annotations

import ast
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import (
    BadMagicError,
    MalformedHeaderError,
    MissingFileError,
    ShapeMismatchError,
    UnsupportedVersionError,
)

MAGIC = b"\x93NUMPY"

# enough for any sane v1.0 header; header_len is uint16 so 10 + 65535 caps it
_MAX_PREAMBLE = 10 + 65535


@dataclass(frozen=True)
class TensorFileHeader:
    """Parsed NPY v1.0 header.

    ``dtype_code`` is the raw descr string (e.g. ``'<f4'``); ``data_offset``
    is the byte offset where the payload begins.
    """

    dtype_code: str
    fortran_order: bool
    shape: tuple[int, ...]
    data_offset: int

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.dtype_code)

    @property
    def element_count(self) -> int:
        n = 1
        for dim in self.shape:
            n *= dim
        return n

    @property
    def payload_nbytes(self) -> int:
        return self.element_count * self.dtype.itemsize


def parse_npy_header(data: bytes) -> TensorFileHeader:
    """Parse the header of an NPY v1.0 byte stream starting at offset 0.

    Raises ``BadMagicError`` when the magic is absent, ``UnsupportedVersionError``
    for any version other than 1.0, and ``MalformedHeaderError`` for a
    truncated, unparseable, or rule-violating header dict.
    """
    if data[:6] != MAGIC:
        raise BadMagicError(f"not an NPY file (leading bytes {data[:6]!r})")
    if len(data) < 10:
        raise MalformedHeaderError("file truncated before header length")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise UnsupportedVersionError(f"NPY version {major}.{minor} not supported, need 1.0")
    (header_len,) = struct.unpack("<H", data[8:10])
    data_offset = 10 + header_len
    if len(data) < data_offset:
        raise MalformedHeaderError(
            f"header declares {header_len} bytes but only {len(data) - 10} present")
    if data_offset % 64 != 0:
        raise MalformedHeaderError(
            f"payload offset {data_offset} is not 64-byte aligned")

    try:
        header_text = data[10:data_offset].decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedHeaderError(f"header is not ASCII: {exc}") from exc
    if not header_text.endswith("\n"):
        raise MalformedHeaderError("header is not newline-terminated")

    try:
        fields = ast.literal_eval(header_text.strip())
    except (ValueError, SyntaxError) as exc:
        raise MalformedHeaderError(f"header dict does not parse: {exc}") from exc
    if not isinstance(fields, dict) or set(fields) != {"descr", "fortran_order", "shape"}:
        raise MalformedHeaderError(
            f"header keys must be exactly descr/fortran_order/shape, got {fields!r}")

    descr = fields["descr"]
    order = fields["fortran_order"]
    shape = fields["shape"]
    if not isinstance(descr, str):
        raise MalformedHeaderError(f"structured descr {descr!r} not supported")
    try:
        dtype = np.dtype(descr)
    except TypeError as exc:
        raise MalformedHeaderError(f"bad descr {descr!r}: {exc}") from exc
    if dtype.hasobject:
        raise MalformedHeaderError("object dtypes are not valid tensor data")
    if not isinstance(order, bool):
        raise MalformedHeaderError(f"fortran_order must be a bool, got {order!r}")
    if (not isinstance(shape, tuple)
            or any(not isinstance(d, int) or isinstance(d, bool) or d < 0 for d in shape)):
        raise MalformedHeaderError(f"shape must be a tuple of non-negative ints, got {shape!r}")

    return TensorFileHeader(
        dtype_code=descr,
        fortran_order=order,
        shape=shape,
        data_offset=data_offset,
    )


def read_header(path: str | Path) -> TensorFileHeader:
    """Parse the header of an NPY file on disk and check the payload length.

    The file must contain exactly ``product(shape) * itemsize`` payload
    bytes after the header; anything else is a ``ShapeMismatchError``.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"tensor file not found: {path}")
    with open(path, "rb") as fh:
        header = parse_npy_header(fh.read(_MAX_PREAMBLE))
    actual = path.stat().st_size - header.data_offset
    if actual != header.payload_nbytes:
        raise ShapeMismatchError(
            f"{path}: header declares {header.payload_nbytes} payload bytes, "
            f"file holds {actual}")
    return header


def open_npy(path: str | Path) -> np.ndarray:
    """Memory-map an NPY v1.0 file read-only.

    The header is parsed by :func:`parse_npy_header`; the payload is mapped
    lazily, so opening costs O(1) regardless of file size.
    """
    path = Path(path)
    header = read_header(path)
    if header.element_count == 0:
        return np.empty(header.shape, dtype=header.dtype)
    mm = np.memmap(path, dtype=header.dtype, mode="r",
                   offset=header.data_offset, shape=header.shape,
                   order="F" if header.fortran_order else "C")
    return mm
