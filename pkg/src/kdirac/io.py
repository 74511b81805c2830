"""Run directories, snapshot/checkpoint binary containers and CSV emission.

Snapshot container ("DKD1", little-endian throughout):

    magic     4s   b"DKD1"
    version   u32  1
    nx, ny    u32
    step      u64
    time      f8
    y_offset  f8   lab coordinate of grid row 0
    nplanes   u32
    then per plane a descriptor
        name    24s  NUL-padded utf-8
        dtype   u8   1 = float64, 2 = complex64, 3 = complex128
        ndim    u8   1 or 2
        (pad)   2x
        dim0    u32
        dim1    u32  (1 for 1D planes)
    then all plane payloads in order, row-major.

Momentum-space planes (mom_density, spin maps, their axes) are stored in
monotone-momentum order with kinetic axis labels, so files are
self-describing.  Checkpoints ("DKDC") store the full complex128 state plus
the co-moving offset bookkeeping and a hash of the config text; they are
written at snapshot-aligned steps, which makes resumed runs bit-identical
to uninterrupted ones under a fixed thread configuration.
"""

import hashlib
import json
import os
import struct
from dataclasses import replace

import numpy as np

from . import __version__
from .beam import sample_on_grid
from .config import config_to_text, parse_config_text, validate
from .grid import POSITION, SpinorField, fftshift2, kinetic_momentum_axis, to_momentum
from .observables import (
    line_cut,
    momentum_density,
    position_density,
    spin_maps,
    y_integrated_density,
)
from .propagator import Stepper, drive

SNAP_MAGIC = b"DKD1"
CKPT_MAGIC = b"DKDC"
_HDR = struct.Struct("<4s3IQ2dI")
_PLANE = struct.Struct("<24sBB2xII")
_CKPT_HDR = struct.Struct("<4s3IQ2dq64s")

_DTYPES = {1: np.dtype("<f8"), 2: np.dtype("<c8"), 3: np.dtype("<c16")}
_DTYPE_CODES = {v: k for k, v in _DTYPES.items()}

DEFAULT_MASK = ("ydensity", "linecut")
FULL_MASK = ("pos_density", "mom_density", "spin", "ydensity", "linecut")
MASK_GROUPS = ("pos_density", "mom_density", "spin", "ydensity", "linecut", "psi")


class FormatError(ValueError):
    pass


def _plane_code(arr):
    dt = np.dtype(arr.dtype).newbyteorder("<")
    if dt not in _DTYPE_CODES:
        raise FormatError(f"unsupported plane dtype {arr.dtype}")
    return _DTYPE_CODES[dt]


def write_snapshot(path, step, time, y_offset, nx, ny, planes):
    """Write named arrays to a DKD1 container; bit-exact round trip."""
    with open(path, "wb") as fh:
        fh.write(_HDR.pack(SNAP_MAGIC, 1, nx, ny, step, time, y_offset,
                           len(planes)))
        for name, arr in planes.items():
            arr = np.asarray(arr)
            if arr.ndim not in (1, 2):
                raise FormatError(f"plane {name}: only 1D/2D planes supported")
            dims = (arr.shape[0], arr.shape[1] if arr.ndim == 2 else 1)
            encoded = name.encode("utf-8")
            if len(encoded) > 24:
                raise FormatError(f"plane name too long: {name}")
            fh.write(_PLANE.pack(encoded, _plane_code(arr), arr.ndim, *dims))
        for arr in planes.values():
            arr = np.asarray(arr)
            fh.write(np.ascontiguousarray(arr).astype(
                np.dtype(arr.dtype).newbyteorder("<"), copy=False).tobytes())


def read_snapshot(path):
    """Read a DKD1 container -> (header dict, {name: array})."""
    with open(path, "rb") as fh:
        raw = fh.read(_HDR.size)
        if len(raw) < _HDR.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, nx, ny, step, time, y_offset, nplanes = _HDR.unpack(raw)
        if magic != SNAP_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if version != 1:
            raise FormatError(f"{path}: unsupported version {version}")
        descs = []
        for _ in range(nplanes):
            raw = fh.read(_PLANE.size)
            if len(raw) < _PLANE.size:
                raise FormatError(f"{path}: truncated plane table")
            name, code, ndim, d0, d1 = _PLANE.unpack(raw)
            descs.append((name.rstrip(b"\0").decode("utf-8"), code, ndim, d0, d1))
        planes = {}
        for name, code, ndim, d0, d1 in descs:
            if code not in _DTYPES:
                raise FormatError(f"{path}: unknown dtype code {code}")
            dt = _DTYPES[code]
            count = d0 * d1
            raw = fh.read(count * dt.itemsize)
            if len(raw) < count * dt.itemsize:
                raise FormatError(f"{path}: truncated payload for plane {name}")
            arr = np.frombuffer(raw, dtype=dt).copy()
            planes[name] = arr.reshape((d0, d1) if ndim == 2 else (d0,))
    header = {"nx": nx, "ny": ny, "step": step, "time": time,
              "y_offset": y_offset}
    return header, planes


def build_snapshot_planes(field, grid, config, mask, workers=1):
    """Compute the observable planes selected by mask from a position field."""
    planes = {}
    mask = tuple(mask)
    for group in mask:
        if group not in MASK_GROUPS:
            raise ValueError(f"unknown snapshot mask entry {group!r}")
    need_momentum = any(g in mask for g in ("mom_density", "spin", "linecut"))
    if "pos_density" in mask:
        planes["pos_density"] = position_density(field)
        planes["x_axis"] = grid.x_coords()
        planes["y_axis"] = grid.y_coords()
    if "ydensity" in mask:
        planes["ydensity"] = y_integrated_density(field, grid)
        planes.setdefault("x_axis", grid.x_coords())
    if "psi" in mask:
        for i in range(4):
            planes[f"psi{i}"] = field.data[i].astype(np.complex64)
    if need_momentum:
        mom = to_momentum(field, grid, workers=workers)
        dens = momentum_density(mom)
        plus, minus = spin_maps(mom, grid, config.gauge_shift)
        kx, ky = kinetic_momentum_axis(grid, config.gauge_shift, shifted=True)
        planes["px_kinetic"] = kx
        planes["py_kinetic"] = ky
        if "mom_density" in mask:
            planes["mom_density"] = fftshift2(dens)
        if "spin" in mask:
            planes["spin_plus"] = fftshift2(plus)
            planes["spin_minus"] = fftshift2(minus)
        if "linecut" in mask:
            _, ky_unshifted = kinetic_momentum_axis(grid, config.gauge_shift)
            cut_py = config.p0[1]
            _, cut_d = line_cut(dens, ky_unshifted, cut_py)
            _, cut_p = line_cut(plus, ky_unshifted, cut_py)
            _, cut_m = line_cut(minus, ky_unshifted, cut_py)
            planes["linecut_density"] = np.fft.fftshift(cut_d)
            planes["linecut_plus"] = np.fft.fftshift(cut_p)
            planes["linecut_minus"] = np.fft.fftshift(cut_m)
            planes.setdefault("px_kinetic", kx)
    return planes


def write_checkpoint(path, psi, step, time, y_offset0, shift_cells, config_sha):
    with open(path, "wb") as fh:
        fh.write(_CKPT_HDR.pack(CKPT_MAGIC, 1, psi.shape[1], psi.shape[2],
                                step, time, y_offset0, shift_cells,
                                config_sha.encode("ascii")))
        fh.write(np.ascontiguousarray(psi).astype("<c16", copy=False).tobytes())


def read_checkpoint(path):
    with open(path, "rb") as fh:
        raw = fh.read(_CKPT_HDR.size)
        if len(raw) < _CKPT_HDR.size:
            raise FormatError(f"{path}: truncated checkpoint header")
        magic, version, nx, ny, step, time, y_offset0, cells, sha = \
            _CKPT_HDR.unpack(raw)
        if magic != CKPT_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if version != 1:
            raise FormatError(f"{path}: unsupported version {version}")
        count = 4 * nx * ny
        raw = fh.read(count * 16)
        if len(raw) < count * 16:
            raise FormatError(f"{path}: truncated checkpoint payload")
        psi = np.frombuffer(raw, dtype="<c16").copy().reshape(4, nx, ny)
    return {
        "nx": nx, "ny": ny, "step": step, "time": time,
        "y_offset0": y_offset0, "shift_cells": cells,
        "config_sha256": sha.decode("ascii"),
    }, psi


# ---------------------------------------------------------------------------
# run directories

class RunDir:
    """Owns one run directory: manifest, snapshots, checkpoints, CSVs.

    The manifest embeds the config text, so analysis never needs the
    original config file.  Nothing in the directory carries wall-clock
    information; identical config and thread count give identical bytes.
    """

    def __init__(self, path):
        self.path = path

    def _p(self, *parts):
        return os.path.join(self.path, *parts)

    def manifest_path(self):
        return self._p("manifest.json")

    def read_manifest(self):
        with open(self.manifest_path(), "r", encoding="utf-8") as fh:
            return json.load(fh)

    def write_manifest(self, manifest):
        text = json.dumps(manifest, indent=1, sort_keys=True)
        with open(self.manifest_path(), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")

    def config(self):
        return parse_config_text(self.read_manifest()["config_text"])

    def snapshot_file(self, step):
        return self._p("snapshots", f"snap_{step:010d}.dkd")

    def checkpoint_file(self, step):
        return self._p(f"checkpoint_{step:010d}.dkc")

    def final_file(self):
        return self._p("final.dkd")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_fields_csv(path, grid, t, beam):
    """Field dump a(x, y, t) on the grid: columns x, y, a_x, a_y."""
    a_x, a_y = sample_on_grid(grid, t, beam)
    xs = grid.x_coords()
    ys = grid.y_coords()
    rows = []
    for i in range(grid.nx):
        for j in range(grid.ny):
            rows.append((xs[i], ys[j], a_x[i, j], a_y[i, j]))
    _write_csv(path, ["x", "y", "a_x", "a_y"], rows)


class _Sink:
    """drive() sink writing snapshots/checkpoints and updating the manifest."""

    def __init__(self, rundir, config, mask, checkpoint_every, config_sha,
                 manifest, workers):
        self.rundir = rundir
        self.config = config
        self.mask = tuple(mask)
        self.checkpoint_every = checkpoint_every
        self.config_sha = config_sha
        self.manifest = manifest
        self.workers = workers
        self.n_steps = config.n_steps

    def __call__(self, step, time, field, grid):
        final = step == self.n_steps
        mask = FULL_MASK if final else self.mask
        planes = build_snapshot_planes(field, grid, self.config, mask,
                                       workers=self.workers)
        path = (self.rundir.final_file() if final
                else self.rundir.snapshot_file(step))
        write_snapshot(path, step, time, grid.y_offset, grid.nx, grid.ny,
                       planes)
        entry = {"step": step, "time": time,
                 "file": os.path.relpath(path, self.rundir.path)}
        snaps = [s for s in self.manifest["snapshots"] if s["step"] != step]
        snaps.append(entry)
        self.manifest["snapshots"] = sorted(snaps, key=lambda s: s["step"])
        write_ckpt = final or (self.checkpoint_every
                               and step % self.checkpoint_every == 0
                               and step > 0)
        if write_ckpt:
            cpath = self.rundir.checkpoint_file(step)
            write_checkpoint(cpath, field.data, step, time, grid.y_offset0,
                             grid.accumulated_shift_cells, self.config_sha)
            ckpts = [c for c in self.manifest["checkpoints"]
                     if c["step"] != step]
            ckpts.append({"step": step,
                          "file": os.path.relpath(cpath, self.rundir.path)})
            self.manifest["checkpoints"] = sorted(ckpts,
                                                  key=lambda c: c["step"])
        self.rundir.write_manifest(self.manifest)


def execute(config, outdir, workers=1, mask=DEFAULT_MASK, checkpoint_every=0,
            log_every=0, log_stream=None):
    """Run a configuration into a fresh run directory; returns the RunDir.

    The config is canonicalized through its text form first, so the run is
    reproducible from the manifest alone.
    """
    problems = validate(config)
    if problems:
        raise ValueError("invalid configuration: " + "; ".join(problems))
    text = config_to_text(config)
    config = parse_config_text(text)
    sha = hashlib.sha256(text.encode()).hexdigest()
    rundir = RunDir(outdir)
    os.makedirs(os.path.join(outdir, "snapshots"), exist_ok=True)
    if checkpoint_every and checkpoint_every % config.snapshot_every != 0:
        raise ValueError("checkpoint_every must be a multiple of snapshot_every")
    manifest = {
        "format": "kdirac-rundir",
        "version": 1,
        "code_version": __version__,
        "config_text": text,
        "config_sha256": sha,
        "snapshot_mask": list(mask),
        "snapshots": [],
        "checkpoints": [],
        "final": "final.dkd",
    }
    rundir.write_manifest(manifest)
    sink = _Sink(rundir, config, mask, checkpoint_every, sha, manifest, workers)
    stepper = Stepper(config, workers=workers)
    drive(stepper, sink=sink, log_every=log_every, log_stream=log_stream)
    return rundir


def resume(rundir_path, checkpoint_path=None, workers=1, log_every=0,
           log_stream=None):
    """Resume an interrupted run from its latest (or given) checkpoint.

    The config comes from the rundir manifest; a checkpoint whose config
    hash disagrees with it is rejected.
    """
    rundir = RunDir(rundir_path)
    manifest = rundir.read_manifest()
    text = manifest["config_text"]
    config = parse_config_text(text)
    sha = hashlib.sha256(text.encode()).hexdigest()
    if checkpoint_path is None:
        if not manifest["checkpoints"]:
            raise FormatError("no checkpoints recorded in manifest")
        entry = manifest["checkpoints"][-1]
        checkpoint_path = os.path.join(rundir_path, entry["file"])
    header, psi = read_checkpoint(checkpoint_path)
    if header["config_sha256"] != sha:
        raise FormatError(
            "checkpoint config hash mismatch: checkpoint "
            f"{header['config_sha256'][:12]}... vs manifest {sha[:12]}..."
        )
    grid = replace(config.grid,
                   accumulated_shift_cells=header["shift_cells"])
    if header["y_offset0"] != grid.y_offset0:
        raise FormatError("checkpoint grid origin disagrees with config")
    field = SpinorField(psi, POSITION)
    stepper = Stepper(config, field=field, grid=grid, step=header["step"],
                      workers=workers)
    mask = tuple(manifest["snapshot_mask"])
    ckpt_steps = [c["step"] for c in manifest["checkpoints"]]
    checkpoint_every = 0
    if len(ckpt_steps) >= 2:
        checkpoint_every = ckpt_steps[1] - ckpt_steps[0]
    elif ckpt_steps and ckpt_steps[0] not in (0, config.n_steps):
        checkpoint_every = ckpt_steps[0]
    sink = _Sink(rundir, config, mask, checkpoint_every, sha, manifest,
                 workers)
    drive(stepper, sink=sink, log_every=log_every, log_stream=log_stream)
    return rundir
