"""Densities, spin-projection maps, diffraction-peak tools and scaling fits."""

import math
from dataclasses import dataclass

import numpy as np

from . import spinors
from .grid import MOMENTUM, POSITION, kinetic_momentum_axis


@dataclass(frozen=True)
class DiffractionPeak:
    """One located diffraction order.

    n            photon-pair order (equal absorbed/emitted count)
    predicted_dpy transverse momentum change from energy conservation [mc]
    found_p      located peak momentum (kinetic) [mc]
    amp_total    |phi|^2 at the peak bin
    amp_plus     |c^+|^2 at the peak bin
    amp_minus    |c^-|^2 at the peak bin
    """

    n: int
    predicted_dpy: float
    found_p: tuple
    amp_total: float
    amp_plus: float
    amp_minus: float

    def __post_init__(self):
        if self.amp_plus + self.amp_minus > self.amp_total + 1e-9:
            raise ValueError("spin amplitudes exceed total density at peak")


@dataclass(frozen=True)
class ScalingPoint:
    """One sweep sample for the power-law studies."""

    epsilon: float
    k_L: float
    flip_prob: float
    noflip_prob: float
    longitudinal_on: bool

    def __post_init__(self):
        for name in ("flip_prob", "noflip_prob"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name}={p} outside [0, 1]")


def position_density(field):
    """Probability density Psi^dag Psi per grid point (integrates to 1)."""
    if field.rep != POSITION:
        raise ValueError("position_density requires a position-representation field")
    return np.sum(np.abs(field.data) ** 2, axis=0)


def y_integrated_density(field, grid):
    """1D profile over x: density summed over y with the cell height."""
    return position_density(field).sum(axis=1) * grid.dy


def momentum_density(field):
    """Per-bin probability |phi|^2 (sums to 1)."""
    if field.rep != MOMENTUM:
        raise ValueError("momentum_density requires a momentum-representation field")
    return np.sum(np.abs(field.data) ** 2, axis=0)


def spin_maps(field, grid, gauge_shift):
    """Spin-projection maps (|c^+|^2, |c^-|^2) over the momentum grid.

    Projections use the kinetic momentum label of every bin; maps are in the
    field's (FFT) bin order.
    """
    if field.rep != MOMENTUM:
        raise ValueError("spin_maps requires a momentum-representation field")
    kx, ky = kinetic_momentum_axis(grid, gauge_shift)
    px = kx[:, None]
    py = ky[None, :]
    out = []
    for s in (+1, -1):
        u0, u1, u2, u3 = spinors.bispinor_components(px, py, s)
        c = (np.conj(u0) * field.data[0] + np.conj(u1) * field.data[1]
             + np.conj(u2) * field.data[2] + np.conj(u3) * field.data[3])
        out.append(np.abs(c) ** 2)
    return out[0], out[1]


def line_cut(map2d, py_kinetic_axis, kinetic_p_y=1.0):
    """Row of a momentum map at the bin nearest the requested kinetic p_y.

    Ties resolve to the lower index.  Returns (row_index, 1D profile over px).
    """
    idx = int(np.argmin(np.abs(np.asarray(py_kinetic_axis) - kinetic_p_y)))
    return idx, np.asarray(map2d)[:, idx].copy()


def predict_dpy(n, p_x, k_L):
    """Transverse momentum change of diffraction order n (equal photon count).

    Energy conservation for in-momentum (p_x, mc) and out-momentum
    (p_x + 2 n k_L, mc + dpy) gives the exact closed form
    dpy = -1 + sqrt(1 - 4 n k_L p_x - 4 n^2 k_L^2) [mc]; also returns the
    small-n quadratic expansion -2 n k_L p_x - 2 n^2 k_L^2.
    """
    disc = 1.0 - 4.0 * n * k_L * p_x - 4.0 * n * n * k_L * k_L
    if disc < 0.0:
        raise ValueError(f"order n={n} kinematically closed (discriminant {disc:g})")
    exact = -1.0 + math.sqrt(disc)
    quadratic = -2.0 * n * k_L * p_x - 2.0 * n * n * k_L * k_L
    return exact, quadratic


def find_peak(map2d, center, window):
    """Local maximum of map2d within +-window bins of center (index pair).

    window is (wx, wy) or a single int for both axes; the window must lie
    inside the map.  Ties break to the lowest flat index.  Returns
    (i, j, value).
    """
    map2d = np.asarray(map2d)
    if np.isscalar(window):
        window = (int(window), int(window))
    ci, cj = int(center[0]), int(center[1])
    i0, i1 = ci - window[0], ci + window[0] + 1
    j0, j1 = cj - window[1], cj + window[1] + 1
    if i0 < 0 or j0 < 0 or i1 > map2d.shape[0] or j1 > map2d.shape[1]:
        raise ValueError("peak window extends outside the grid")
    sub = map2d[i0:i1, j0:j1]
    flat = int(np.argmax(sub))
    di, dj = np.unravel_index(flat, sub.shape)
    return i0 + int(di), j0 + int(dj), float(sub[di, dj])


def loglog_slope(points):
    """Least-squares slope of log y vs log x with its standard error.

    points is a sequence of (x, y) with x, y > 0; needs at least two points
    with distinct x.  Returns (slope, stderr); stderr is 0 for an exact
    two-point fit.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (x, y) points")
    if np.any(pts <= 0):
        raise ValueError("log-log fit requires positive x and y")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    sxx = np.sum((lx - lx.mean()) ** 2)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x values identical")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = ly.mean() - slope * lx.mean()
    n = len(lx)
    if n == 2:
        return slope, 0.0
    ssr = float(np.sum((ly - intercept - slope * lx) ** 2))
    return slope, math.sqrt(ssr / (n - 2) / sxx)


def longitudinal_difference(with_long, without_long):
    """Per-spin difference (without - with) at the diffraction bin.

    Arguments are (amp_plus, amp_minus) pairs from two runs differing only
    in the longitudinal-component toggle; the returned pair is the signed
    difference |c^s_without|^2 - |c^s_with|^2 per spin.
    """
    return (without_long[0] - with_long[0], without_long[1] - with_long[1])
