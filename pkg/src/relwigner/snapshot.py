"""Binary snapshot format for phase-space states.

Little-endian header followed by the raw payload:

    magic   4 bytes  b"DWPS"
    version u32      currently 1
    n_x     u32
    n_p     u32
    x_min, x_max, p_min, p_max   f64 each
    time    f64
    payload_kind  u32   0 = W0_REAL, 1 = FULL_MATRIX

W0_REAL stores n_x * n_p float64 values, row-major with x outer and p
inner.  FULL_MATRIX stores n_x * n_p * 16 complex128 values in the same
point order, the 4x4 matrix row-major within each point.  Round trips are
bit exact.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .phase_grid import MatrixPhaseField, PhaseGrid, Representation

MAGIC = b"DWPS"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdddddI")


class PayloadKind(IntEnum):
    W0_REAL = 0
    FULL_MATRIX = 1


class SnapshotError(Exception):
    pass


@dataclass
class Snapshot:
    grid: PhaseGrid
    time: float
    kind: PayloadKind
    payload: np.ndarray

    def as_field(self) -> MatrixPhaseField:
        if self.kind is not PayloadKind.FULL_MATRIX:
            raise SnapshotError("only FULL_MATRIX snapshots reconstruct a field")
        return MatrixPhaseField(self.grid, Representation.X_P, self.payload)


def write_snapshot(path, grid: PhaseGrid, time: float, payload: np.ndarray,
                   kind: PayloadKind) -> None:
    payload = np.asarray(payload)
    if kind is PayloadKind.W0_REAL:
        expected = (grid.n_x, grid.n_p)
        payload = payload.astype(np.float64, copy=False)
    else:
        expected = (grid.n_x, grid.n_p, 4, 4)
        payload = payload.astype(np.complex128, copy=False)
    if payload.shape != expected:
        raise SnapshotError(f"payload shape {payload.shape}, expected {expected}")
    header = _HEADER.pack(
        MAGIC, VERSION, grid.n_x, grid.n_p,
        grid.x_min, grid.x_max, grid.p_min, grid.p_max,
        time, int(kind),
    )
    buf = np.ascontiguousarray(payload)
    if buf.dtype.byteorder == ">":          # raw bytes are little-endian on disk
        buf = buf.astype(buf.dtype.newbyteorder("<"))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(buf.tobytes())


def write_field_snapshot(path, field: MatrixPhaseField, time: float) -> None:
    if field.rep is not Representation.X_P:
        raise SnapshotError("full snapshots are written in the X_P representation")
    write_snapshot(path, field.grid, time, field.data, PayloadKind.FULL_MATRIX)


def read_snapshot(path) -> Snapshot:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError("truncated header")
    magic, version, n_x, n_p, x_min, x_max, p_min, p_max, time, kind_raw = _HEADER.unpack(
        raw[: _HEADER.size]
    )
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}")
    try:
        kind = PayloadKind(kind_raw)
    except ValueError as exc:
        raise SnapshotError(f"unknown payload kind {kind_raw}") from exc
    grid = PhaseGrid(n_x, n_p, x_min, x_max, p_min, p_max)
    body = raw[_HEADER.size:]
    if kind is PayloadKind.W0_REAL:
        count = n_x * n_p
        dtype = np.dtype("<f8")
        shape = (n_x, n_p)
    else:
        count = n_x * n_p * 16
        dtype = np.dtype("<c16")
        shape = (n_x, n_p, 4, 4)
    if len(body) != count * dtype.itemsize:
        raise SnapshotError(
            f"payload length {len(body)} bytes, expected {count * dtype.itemsize}"
        )
    payload = np.frombuffer(body, dtype=dtype).reshape(shape).copy()
    return Snapshot(grid, time, kind, payload)
