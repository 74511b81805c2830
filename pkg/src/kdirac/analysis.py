"""Rundir analysis: diffraction peaks, line cuts and CSV emission.

Everything here works from the run directory alone (manifest + final
snapshot); the original config file is never needed.
"""

import os

import numpy as np

from .io import RunDir, _write_csv, read_snapshot
from .observables import DiffractionPeak, find_peak, predict_dpy

PEAK_WINDOW = 4  # bins around each predicted order; peaks are far wider apart


def _final_arrays(rundir):
    manifest = rundir.read_manifest()
    header, planes = read_snapshot(os.path.join(rundir.path, manifest["final"]))
    return manifest, header, planes


def extract_peaks(planes, config, orders=None):
    """Locate diffraction orders in a final snapshot's momentum planes.

    For each kinematically open order n the predicted kinetic peak momentum
    is (p0_x + 2 n k_L, p0_y + dpy(n)); the total-density local maximum
    within +-PEAK_WINDOW bins gives the located peak, and the spin maps are
    read at that same bin so the spin split never exceeds the density.
    """
    k_L = config.beam.k_L
    p0x, p0y = config.p0
    kx = planes["px_kinetic"]
    ky = planes["py_kinetic"]
    dens = planes["mom_density"]
    plus = planes["spin_plus"]
    minus = planes["spin_minus"]
    if orders is None:
        orders = range(-2, 3)
    peaks = []
    for n in orders:
        try:
            dpy, _ = predict_dpy(n, p0x, k_L)
        except ValueError:
            continue
        target = (p0x + 2.0 * n * k_L, p0y + dpy)
        ci = int(np.argmin(np.abs(kx - target[0])))
        cj = int(np.argmin(np.abs(ky - target[1])))
        if (ci - PEAK_WINDOW < 0 or ci + PEAK_WINDOW >= len(kx)
                or cj - PEAK_WINDOW < 0 or cj + PEAK_WINDOW >= len(ky)):
            continue
        i, j, amp = find_peak(dens, (ci, cj), PEAK_WINDOW)
        peaks.append(DiffractionPeak(
            n=n,
            predicted_dpy=dpy,
            found_p=(float(kx[i]), float(ky[j])),
            amp_total=amp,
            amp_plus=float(plus[i, j]),
            amp_minus=float(minus[i, j]),
        ))
    return peaks


def flip_amplitudes(planes, config):
    """(|c^+|^2, |c^-|^2) at the first-order diffracted bin (p0_x + 2k_L, p0_y).

    This is the spin-flip observable of the scaling studies; the bin is the
    located first-order peak.
    """
    peaks = extract_peaks(planes, config, orders=[1])
    if not peaks:
        raise ValueError("first diffraction order not on the momentum grid")
    return peaks[0].amp_plus, peaks[0].amp_minus


def analyze_rundir(path, orders=None):
    """Write peaks.csv, linecut.csv and ydensity.csv into a run directory."""
    rundir = RunDir(path)
    manifest, header, planes = _final_arrays(rundir)
    config = rundir.config()

    peaks = extract_peaks(planes, config, orders)
    _write_csv(
        rundir._p("peaks.csv"),
        ["n", "predicted_dpy", "px", "py", "amp_total", "amp_plus", "amp_minus"],
        [(p.n, p.predicted_dpy, p.found_p[0], p.found_p[1],
          p.amp_total, p.amp_plus, p.amp_minus) for p in peaks],
    )

    kx = planes["px_kinetic"]
    _write_csv(
        rundir._p("linecut.csv"),
        ["px", "density", "cplus2", "cminus2"],
        zip(kx, planes["linecut_density"], planes["linecut_plus"],
            planes["linecut_minus"]),
    )

    rows = []
    for entry in manifest["snapshots"]:
        hdr, snap = read_snapshot(os.path.join(path, entry["file"]))
        if "ydensity" not in snap:
            continue
        xs = snap["x_axis"]
        for x, phi in zip(xs, snap["ydensity"]):
            rows.append((hdr["step"], hdr["time"], x, phi))
    _write_csv(rundir._p("ydensity.csv"), ["step", "time", "x", "phi"], rows)
    return peaks
