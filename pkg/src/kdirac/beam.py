"""Gaussian-beam standing-wave vector potential.

The laser propagates along x; two counterpropagating focused beams (direction
index d = +1/-1) form the standing wave.  Everything is expressed through the
momentum-like coupling a = qA/c in units of mc, so the Dirac Hamiltonian reads
H = alpha.(p - a) + beta.  The transverse radius in the 2D simulation plane is
r^2 = y^2.

A constant gauge coupling (0, gauge_shift) is part of the standing-wave total;
it shifts the canonical momentum grid relative to the kinetic momentum
(kinetic = canonical - gauge_shift along y) and carries no force.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BeamParams:
    """Standing-wave description.

    a0          coupling amplitude [mc]
    k_L         wave number [mc/hbar]; omega = k_L (c = 1)
    epsilon     beam divergence; w0 = 1/(k_L epsilon), x_R = k_L w0^2/2
    longitudinal_on   include the a_x polarization component
    gauge_shift constant y-coupling a_m [mc]
    """

    a0: float
    k_L: float
    epsilon: float
    longitudinal_on: bool = True
    gauge_shift: float = 0.0

    @property
    def omega(self):
        return self.k_L

    @property
    def wavelength(self):
        return 2.0 * np.pi / self.k_L

    @property
    def w0(self):
        return 1.0 / (self.k_L * self.epsilon)

    @property
    def x_R(self):
        return self.k_L * self.w0 ** 2 / 2.0


def beam_waist(x, params):
    """x-dependent waist w(x) = w0 sqrt(1 + x^2/x_R^2)."""
    return params.w0 * np.sqrt(1.0 + (x / params.x_R) ** 2)


def phases(x, y, t, d, params):
    """Propagation phases (phi, phi1) of the beam moving in direction d."""
    x_R = params.x_R
    w = beam_waist(x, params)
    gouy = np.arctan(d * x / x_R)
    phi = params.omega * t - d * params.k_L * x + gouy - d * x * y ** 2 / (x_R * w ** 2)
    return phi, phi + gouy


def single_beam(x, y, t, d, params):
    """Coupling components (a_x, a_y) of one focused beam."""
    w = beam_waist(x, params)
    envelope = (params.w0 / w) * np.exp(-(y / w) ** 2)
    phi, phi1 = phases(x, y, t, d, params)
    a_y = -params.a0 * envelope * np.sin(phi)
    if params.longitudinal_on:
        a_x = -2.0 * d * params.a0 * envelope * params.epsilon * (y / w) * np.cos(phi1)
    else:
        a_x = np.zeros_like(a_y)
    return a_x, a_y


def standing_wave(x, y, t, params):
    """Sum of the two counterpropagating beams plus the constant gauge term."""
    ax_p, ay_p = single_beam(x, y, t, +1, params)
    ax_m, ay_m = single_beam(x, y, t, -1, params)
    return ax_p + ax_m, ay_p + ay_m + params.gauge_shift


def standing_wave_profile(x, y, params):
    """Time-independent spatial pattern (F_x, F_y) of the standing wave.

    The counterpropagating superposition separates exactly into
    a(x, y, t) = sin(omega t) * (F_x, F_y) + (0, gauge_shift); the identity
    sin(wt+chi) + sin(wt-chi) = 2 sin(wt) cos(chi) (and the cosine analogue
    for a_x) collapses the two beams into one pattern.  The propagator keeps
    this pattern cached and rescales it by sin(omega t) each step.
    """
    w = beam_waist(x, params)
    envelope = (params.w0 / w) * np.exp(-(y / w) ** 2)
    gouy = np.arctan(x / params.x_R)
    chi = -params.k_L * x + gouy - x * y ** 2 / (params.x_R * w ** 2)
    f_y = -2.0 * params.a0 * envelope * np.cos(chi)
    if params.longitudinal_on:
        f_x = 4.0 * params.a0 * envelope * params.epsilon * (y / w) * np.sin(chi + gouy)
    else:
        f_x = np.zeros_like(f_y)
    return f_x, f_y


def sample_on_grid(grid, t, params, include_gauge=True):
    """Evaluate the standing wave at the grid's lab-frame coordinates.

    Uses the current co-moving y-offset of the grid.  Returns two (nx, ny)
    arrays.  With include_gauge=False only the beam part is returned, which
    is what the propagator applies (the constant is absorbed exactly into
    the kinetic momentum labels instead).
    """
    x = grid.x_coords()[:, None]
    y = grid.y_coords()[None, :]
    a_x, a_y = standing_wave(x, y, t, params)
    a_x = np.broadcast_to(a_x, (grid.nx, grid.ny)).copy()
    a_y = np.broadcast_to(a_y, (grid.nx, grid.ny)).copy()
    if not include_gauge:
        a_y -= params.gauge_shift
    return a_x, a_y
