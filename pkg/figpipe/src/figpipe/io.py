"""Readers for the simulator's external file formats.

CSV schemas (header line, comma-separated, one record per line):

    linecut.csv   px,density,cplus2,cminus2
    ydensity.csv  step,time,x,phi
    scaling.csv   epsilon,k_L,flip,noflip,longitudinal_on
    peaks.csv     n,predicted_dpy,px,py,amp_total,amp_plus,amp_minus
    fields.csv    x,y,a_x,a_y

Snapshot container (DKD1, little-endian): fixed header
(magic 4s, version u32, nx u32, ny u32, step u64, time f8, y_offset f8,
nplanes u32), then per plane a descriptor (name 24s NUL-padded, dtype u8
with 1=f8/2=c8/3=c16, ndim u8, 2 pad bytes, dim0 u32, dim1 u32), then raw
row-major payloads in plane order.
"""

import struct

import numpy as np

SCHEMAS = {
    "linecut": ["px", "density", "cplus2", "cminus2"],
    "ydensity": ["step", "time", "x", "phi"],
    "scaling": ["epsilon", "k_L", "flip", "noflip", "longitudinal_on"],
    "peaks": ["n", "predicted_dpy", "px", "py", "amp_total", "amp_plus",
              "amp_minus"],
    "fields": ["x", "y", "a_x", "a_y"],
}


class SchemaError(ValueError):
    pass


def read_csv(path, schema):
    """Read a schema-checked CSV into a dict of float arrays.

    Raises SchemaError naming the file and line of any mismatch.
    """
    columns = SCHEMAS[schema]
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file, expected {schema} data")
    header = lines[0].split(",")
    if header != columns:
        raise SchemaError(
            f"{path}:1: header {','.join(header)!r} does not match the "
            f"{schema} schema {','.join(columns)!r}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise SchemaError(
                f"{path}:{lineno}: expected {len(columns)} fields, "
                f"got {len(parts)}"
            )
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, k] for k, name in enumerate(columns)}


_HDR = struct.Struct("<4s3IQ2dI")
_PLANE = struct.Struct("<24sBB2xII")
_DTYPES = {1: np.dtype("<f8"), 2: np.dtype("<c8"), 3: np.dtype("<c16")}


def read_snapshot(path):
    """Read a DKD1 snapshot -> (header dict, {name: array})."""
    with open(path, "rb") as fh:
        raw = fh.read(_HDR.size)
        if len(raw) < _HDR.size:
            raise SchemaError(f"{path}: truncated snapshot header")
        magic, version, nx, ny, step, time, y_offset, nplanes = _HDR.unpack(raw)
        if magic != b"DKD1":
            raise SchemaError(f"{path}: not a DKD1 snapshot (magic {magic!r})")
        if version != 1:
            raise SchemaError(f"{path}: unsupported snapshot version {version}")
        descs = []
        for _ in range(nplanes):
            raw = fh.read(_PLANE.size)
            if len(raw) < _PLANE.size:
                raise SchemaError(f"{path}: truncated plane table")
            name, code, ndim, d0, d1 = _PLANE.unpack(raw)
            descs.append((name.rstrip(b"\0").decode("utf-8"), code, ndim, d0, d1))
        planes = {}
        for name, code, ndim, d0, d1 in descs:
            if code not in _DTYPES:
                raise SchemaError(f"{path}: unknown dtype code {code}")
            dt = _DTYPES[code]
            raw = fh.read(d0 * d1 * dt.itemsize)
            if len(raw) < d0 * d1 * dt.itemsize:
                raise SchemaError(f"{path}: truncated payload for {name}")
            arr = np.frombuffer(raw, dtype=dt).copy()
            planes[name] = arr.reshape((d0, d1) if ndim == 2 else (d0,))
    return {"nx": nx, "ny": ny, "step": step, "time": time,
            "y_offset": y_offset}, planes
