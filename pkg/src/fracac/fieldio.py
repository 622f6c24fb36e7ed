"""FACF1 field files: a 7-line ASCII header followed by raw float64 payload.

Header lines, in order::

    FACF1
    dims=<2|3>
    sizes=<M0> <M1> [<M2>]
    meshsizes=<h0> <h1> [<h2>]
    alpha=<float>
    eps=<float>
    time=<float>

The payload is the full grid including the boundary frame, row-major
little-endian float64, so its byte length is ``8 * prod(M_i + 1)``.  Floats
are written with ``repr`` so the header round-trips bit-exactly; a reader
needs no sidecar configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .stepper import Field

__all__ = ["MAGIC", "FieldFile", "FieldFormatError", "write_field", "read_field"]

MAGIC = "FACF1"


class FieldFormatError(ValueError):
    """Raised when a field file is malformed or truncated."""


@dataclass
class FieldFile:
    """Field values plus the run parameters recorded alongside them."""

    values: np.ndarray
    time: float
    alpha: float
    eps: float
    meshsizes: tuple[float, ...]

    @property
    def field(self) -> Field:
        return Field(self.values, self.time)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(n - 1 for n in self.values.shape)


def write_field(path, ff: FieldFile) -> None:
    values = np.asarray(ff.values, dtype=float)
    if values.ndim not in (2, 3):
        raise ValueError(f"field payload must be 2D or 3D, got ndim={values.ndim}")
    if len(ff.meshsizes) != values.ndim:
        raise ValueError("meshsizes must have one entry per axis")
    sizes = " ".join(str(n - 1) for n in values.shape)
    meshsizes = " ".join(repr(float(h)) for h in ff.meshsizes)
    header = (
        f"{MAGIC}\n"
        f"dims={values.ndim}\n"
        f"sizes={sizes}\n"
        f"meshsizes={meshsizes}\n"
        f"alpha={repr(float(ff.alpha))}\n"
        f"eps={repr(float(ff.eps))}\n"
        f"time={repr(float(ff.time))}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def _header_value(line: bytes, key: str) -> str:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FieldFormatError(f"header line for {key!r} is not ASCII") from exc
    prefix = key + "="
    if not text.startswith(prefix):
        raise FieldFormatError(f"expected header line {prefix!r}..., got {text!r}")
    return text[len(prefix):]


def read_field(path) -> FieldFile:
    raw = Path(path).read_bytes()
    lines = []
    start = 0
    for _ in range(7):
        end = raw.find(b"\n", start)
        if end < 0:
            raise FieldFormatError("truncated header")
        lines.append(raw[start:end])
        start = end + 1
    if lines[0] != MAGIC.encode("ascii"):
        raise FieldFormatError(f"bad magic {lines[0]!r}, expected {MAGIC!r}")
    dims = int(_header_value(lines[1], "dims"))
    if dims not in (2, 3):
        raise FieldFormatError(f"dims must be 2 or 3, got {dims}")
    sizes = tuple(int(s) for s in _header_value(lines[2], "sizes").split())
    meshsizes = tuple(float(s) for s in _header_value(lines[3], "meshsizes").split())
    if len(sizes) != dims or len(meshsizes) != dims:
        raise FieldFormatError("sizes/meshsizes do not match dims")
    alpha = float(_header_value(lines[4], "alpha"))
    eps = float(_header_value(lines[5], "eps"))
    time = float(_header_value(lines[6], "time"))

    shape = tuple(m + 1 for m in sizes)
    expected = 8 * int(np.prod(shape))
    payload = raw[start:]
    if len(payload) < expected:
        raise FieldFormatError(f"truncated payload: {len(payload)} bytes, expected {expected}")
    if len(payload) > expected:
        raise FieldFormatError(f"trailing bytes after payload: {len(payload) - expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
    return FieldFile(values=values, time=time, alpha=alpha, eps=eps, meshsizes=meshsizes)
