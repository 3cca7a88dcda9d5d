"""Binary tensor files (DTEN), raw imports, model directories and CSV traces.

DTEN layout, all little-endian::

    b"DTEN" | u32 version (=1) | u32 order | order x u64 dims | float64 payload

The payload is in first-index-fastest order.
"""

from __future__ import annotations

import csv
import os
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .algorithms import ConvergenceTrace, TraceRecord, TuckerModel
from .tensor import DenseTensor

MAGIC = b"DTEN"
VERSION = 1
TRACE_HEADER = ("outer", "mode", "inner", "elapsed_s", "rel_err")
_F64 = np.dtype("<f8")


class DtenError(ValueError):
    """Malformed DTEN file."""


class BadMagicError(DtenError):
    pass


class VersionMismatchError(DtenError):
    pass


class TruncatedError(DtenError):
    pass


class PayloadLengthError(DtenError):
    """Payload is longer than the header's dims allow."""


class RawLengthError(ValueError):
    pass


def encode_header(dims: Sequence[int]) -> bytes:
    return MAGIC + struct.pack(f"<II{len(dims)}Q", VERSION, len(dims), *dims)


def write_dten(path, t) -> None:
    t = t if isinstance(t, DenseTensor) else DenseTensor(t)
    if not np.all(np.isfinite(t.array)):
        raise ValueError("refusing to write non-finite values")
    payload = t.data.astype(_F64, copy=False).tobytes()
    with open(path, "wb") as fh:
        fh.write(encode_header(t.dims))
        fh.write(payload)


def read_dten(path) -> DenseTensor:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise BadMagicError(f"{path}: not a DTEN file")
    if len(buf) < 12:
        raise TruncatedError(f"{path}: header truncated")
    version, order = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise VersionMismatchError(f"{path}: version {version}, expected {VERSION}")
    start = 12 + 8 * order
    if len(buf) < start:
        raise TruncatedError(f"{path}: header truncated")
    dims = struct.unpack_from(f"<{order}Q", buf, 12)
    if order == 0 or any(n == 0 for n in dims):
        raise DtenError(f"{path}: invalid dims {dims}")
    need = 8 * int(np.prod(dims, dtype=object))
    have = len(buf) - start
    if have < need:
        raise TruncatedError(f"{path}: payload has {have} bytes, expected {need}")
    if have > need:
        raise PayloadLengthError(f"{path}: payload has {have} bytes, expected {need}")
    data = np.frombuffer(buf, dtype=_F64, offset=start).astype(np.float64)
    return DenseTensor.from_flat(dims, data)


def import_raw(path, dims: Sequence[int]) -> DenseTensor:
    """Read a headerless float64 little-endian payload."""
    dims = tuple(int(n) for n in dims)
    size = os.path.getsize(path)
    need = 8 * int(np.prod(dims))
    if size != need:
        raise RawLengthError(f"{path}: {size} bytes, expected {need} for dims {dims}")
    data = np.fromfile(path, dtype=_F64).astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite values")
    return DenseTensor.from_flat(dims, data)


def write_trace_csv(path, trace: ConvergenceTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for rec in trace.records:
            w.writerow(
                [rec.outer, rec.mode, rec.inner, f"{rec.elapsed_s:.17g}", f"{rec.rel_err:.17g}"]
            )


def read_trace_csv(path) -> list[TraceRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRACE_HEADER:
        raise ValueError(f"{path}: unexpected trace header")
    return [
        TraceRecord(int(a), int(b), int(c), float(e), float(r)) for a, b, c, e, r in rows[1:]
    ]


def write_model(directory, m: TuckerModel) -> None:
    """Store ``core.dten`` and ``factor_1.dten`` .. ``factor_d.dten``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_dten(directory / "core.dten", m.core)
    for i, u in enumerate(m.factors, start=1):
        write_dten(directory / f"factor_{i}.dten", DenseTensor(u))


def read_model(directory) -> TuckerModel:
    directory = Path(directory)
    core = read_dten(directory / "core.dten")
    factors = []
    for i in range(1, core.order + 1):
        f = read_dten(directory / f"factor_{i}.dten")
        if f.order != 2:
            raise DtenError(f"factor_{i}.dten is not a matrix")
        factors.append(f.array)
    return TuckerModel(core, factors)
