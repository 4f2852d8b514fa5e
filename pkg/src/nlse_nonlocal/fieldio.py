"""Field dumps: a short text header, then raw little-endian 64-bit values.

The header carries everything needed to rebuild the grid and interpret the
payload: dimension, per-axis half-widths and point counts, the field kind,
and whether values are real or complex.  Values follow row-major; complex
data interleaves real and imaginary parts.  Round trips are bit-exact.
"""

from __future__ import annotations

import numpy as np

from .grid import ScalarField, make_grid

__all__ = ["write_field", "read_field"]

_MAGIC = "nlse-nonlocal field v1"


def write_field(path, field):
    """Write a ScalarField to ``path`` in the dump format."""
    values = np.asarray(field.values)
    is_complex = np.iscomplexobj(values)
    grid = field.grid
    lines = [
        _MAGIC,
        f"dim {grid.dim}",
        f"kind {field.kind}",
        f"dtype {'complex' if is_complex else 'real'}",
        "halfwidth " + " ".join(f"{L:.17g}" for L in grid.halfwidth),
        "npoints " + " ".join(str(n) for n in grid.npoints),
        "data",
    ]
    payload = values.astype("<c16" if is_complex else "<f8", copy=False)
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(payload).tobytes())


def _header_fields(lines):
    fields = {}
    for line in lines:
        key, _, rest = line.partition(" ")
        fields[key] = rest
    return fields


def read_field(path):
    """Read a dump written by write_field; returns a ScalarField."""
    with open(path, "rb") as fh:
        blob = fh.read()
    marker = b"data\n"
    split = blob.find(marker)
    if split < 0:
        raise ValueError(f"{path}: missing data marker in field dump")
    header = blob[:split].decode("ascii").splitlines()
    if not header or header[0] != _MAGIC:
        raise ValueError(f"{path}: not a field dump (bad magic line)")
    fields = _header_fields(header[1:])
    try:
        dim = int(fields["dim"])
        kind = fields["kind"]
        dtype = fields["dtype"]
        halfwidth = tuple(float(t) for t in fields["halfwidth"].split())
        npoints = tuple(int(t) for t in fields["npoints"].split())
    except KeyError as exc:
        raise ValueError(f"{path}: field dump header lacks {exc}") from None
    if dtype not in ("real", "complex"):
        raise ValueError(f"{path}: dtype must be real or complex")
    grid = make_grid(dim, halfwidth, npoints)
    raw = blob[split + len(marker):]
    values = np.frombuffer(raw, dtype="<c16" if dtype == "complex" else "<f8")
    if values.size != grid.size:
        raise ValueError(
            f"{path}: payload has {values.size} values, grid needs {grid.size}")
    return ScalarField(grid, values.reshape(grid.shape).copy(), kind=kind)
