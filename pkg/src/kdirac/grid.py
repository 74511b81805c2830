"""Periodic 2D grid, unitary position<->momentum transforms and the
co-moving box.

Conventions
-----------
Position-representation values Psi_j are normalized so that
sum |Psi_j|^2 * dA = 1 (dA = dx dy); momentum-representation values phi_k
are per-bin amplitudes with sum |phi_k|^2 = 1, i.e. |phi_k|^2 is the
probability in bin k.  The continuum transform prefactors are absorbed into
these measures, which keeps total probability representation-independent.

Momentum bins follow FFT (unshifted) ordering; `fftshift2` reorders maps for
display/export.  Transform phases are anchored at the true lab coordinates
(x_min, y_offset), so a packet built with phase exp(-i r0.p) lands at lab
position r0 and a cyclic co-moving shift is an exact no-op in momentum space.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class GridSpec:
    """Box geometry plus the co-moving offset state.

    y_offset0 is the lab-frame coordinate of row 0 at t = 0; the current
    offset is y_offset0 + accumulated_shift_cells * dy (kept in integer cell
    quanta so it stays exact over long runs).
    """

    nx: int
    ny: int
    x_min: float
    x_max: float
    y_span: float
    y_offset0: float
    accumulated_shift_cells: int = 0

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self):
        return self.y_span / self.ny

    @property
    def cell_area(self):
        return self.dx * self.dy

    @property
    def y_offset(self):
        """Current lab-frame coordinate of the box's lower edge (row 0)."""
        return self.y_offset0 + self.accumulated_shift_cells * self.dy

    def x_coords(self):
        return self.x_min + self.dx * np.arange(self.nx)

    def y_coords(self):
        return self.y_offset + self.dy * np.arange(self.ny)

    def px_axis(self, shifted=False):
        p = 2.0 * np.pi * sfft.fftfreq(self.nx, d=self.dx)
        return np.fft.fftshift(p) if shifted else p

    def py_axis(self, shifted=False):
        p = 2.0 * np.pi * sfft.fftfreq(self.ny, d=self.dy)
        return np.fft.fftshift(p) if shifted else p

    def nyquist(self):
        """(px, py) magnitude bounds of the canonical momentum grid."""
        return np.pi / self.dx, np.pi / self.dy


@dataclass
class SpinorField:
    """Four complex planes of shape (nx, ny) plus a representation tag."""

    data: np.ndarray
    rep: str

    def copy(self):
        return SpinorField(self.data.copy(), self.rep)

    def total_probability(self, grid):
        s = float(np.sum(np.abs(self.data) ** 2))
        return s * grid.cell_area if self.rep == POSITION else s


def empty_field(grid, rep):
    return SpinorField(np.zeros((4, grid.nx, grid.ny), dtype=complex), rep)


def _anchor_phase(grid, sign):
    """Per-bin phase exp(sign * i p.r_origin) anchoring DFT phases at the
    lab coordinates of grid point (0, 0)."""
    px = grid.px_axis()
    py = grid.py_axis()
    phx = np.exp(sign * 1j * px * grid.x_min)
    phy = np.exp(sign * 1j * py * grid.y_offset)
    return phx[:, None] * phy[None, :]


def to_momentum(field, grid, workers=1):
    """Unitary transform position -> momentum (per spinor component)."""
    if field.rep != POSITION:
        raise ValueError("to_momentum requires a position-representation field")
    n = grid.nx * grid.ny
    scale = math.sqrt(grid.cell_area / n)
    out = sfft.fftn(field.data, axes=(1, 2), workers=workers)
    out *= scale * _anchor_phase(grid, -1)
    return SpinorField(out, MOMENTUM)


def to_position(field, grid, workers=1):
    """Unitary transform momentum -> position (inverse of to_momentum)."""
    if field.rep != MOMENTUM:
        raise ValueError("to_position requires a momentum-representation field")
    n = grid.nx * grid.ny
    scale = math.sqrt(n / grid.cell_area)
    tmp = field.data * _anchor_phase(grid, +1)
    out = sfft.ifftn(tmp, axes=(1, 2), workers=workers)
    out *= scale
    return SpinorField(out, POSITION)


def target_shift_cells(t, v, dy):
    """Integer cell count the box should have moved after time t."""
    return math.floor(v * t / dy)


def comoving_update(grid, field, t, dt, v):
    """Advance the co-moving box from t to t+dt at velocity v.

    The continuous target offset is v*(t+dt); whenever it passes an integer
    number of cells beyond the current offset, the field planes are shifted
    cyclically by that cell count and the offset bookkeeping is advanced.
    The sub-cell remainder is implicit in the step counter (never
    interpolated).  Returns (grid', field'); the inputs are returned
    unchanged when no whole cell is crossed.
    """
    if field.rep != POSITION:
        raise ValueError("comoving_update requires a position-representation field")
    cells = target_shift_cells(t + dt, v, grid.dy)
    k = cells - grid.accumulated_shift_cells
    if k == 0:
        return grid, field
    new_grid = replace(grid, accumulated_shift_cells=cells)
    new_field = SpinorField(np.roll(field.data, -k, axis=2), field.rep)
    return new_grid, new_field


def kinetic_momentum_axis(grid, gauge_shift, shifted=False):
    """Per-bin kinetic momentum labels (px, py).

    The constant coupling a_m = (0, gauge_shift) shifts only the y-axis:
    kinetic p = canonical p - (0, gauge_shift).  All spin projections and
    reported momenta use these labels.
    """
    return grid.px_axis(shifted), grid.py_axis(shifted) - gauge_shift


def fftshift2(a):
    """Reorder an (nx, ny) momentum map to monotone axes."""
    return np.fft.fftshift(a)
