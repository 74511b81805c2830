"""Dirac matrices in standard representation, free-particle dispersion and
x-polarized bispinors.

Natural units throughout: hbar = c = m = 1, momenta in mc, energies in mc^2.
The simulation plane is x-y, so only alpha_x, alpha_y and beta appear.
"""

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

# alpha_i = offdiag(sigma_i, sigma_i), beta = diag(1, 1, -1, -1)
ALPHA_X = np.block([[np.zeros((2, 2)), SIGMA_X], [SIGMA_X, np.zeros((2, 2))]])
ALPHA_Y = np.block([[np.zeros((2, 2)), SIGMA_Y], [SIGMA_Y, np.zeros((2, 2))]])
BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
ID4 = np.eye(4, dtype=complex)

# x-polarized two-spinor basis, unit-normalized
CHI_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
CHI_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)


def energy(p):
    """Relativistic energy sqrt(1 + px^2 + py^2) of a 2D momentum [mc]."""
    px, py = p[0], p[1]
    return np.sqrt(1.0 + px * px + py * py)


def free_hamiltonian(p):
    """Dense 4x4 free Dirac Hamiltonian alpha.p + beta at momentum p."""
    return ALPHA_X * p[0] + ALPHA_Y * p[1] + BETA


def bispinor_from_chi(p, chi):
    """Unit-normalized positive-energy bispinor built on a two-spinor chi.

    Upper pair equals chi (up to overall normalization), lower pair is
    (sigma.p)/(E+1) chi.  chi must be unit-normalized.
    """
    px, py = p[0], p[1]
    e = energy(p)
    sp = SIGMA_X * px + SIGMA_Y * py
    lower = (sp @ chi) / (e + 1.0)
    u = np.concatenate([chi, lower])
    # unit norm: prefactor sqrt((E+1)/(2E)) in closed form
    return u * np.sqrt((e + 1.0) / (2.0 * e))


def bispinor(p, s):
    """Positive-energy bispinor u^s(p), s = +1/-1 for the x-spin basis."""
    chi = CHI_PLUS if s > 0 else CHI_MINUS
    return bispinor_from_chi(p, chi)


def spin_project(phi, p, s):
    """Amplitude c^s = u^s(p)^dag . phi.

    p must be the kinetic momentum at the bin phi was taken from (the
    constant gauge coupling already removed).
    """
    return np.vdot(bispinor(p, s), phi)


def bispinor_components(px, py, s):
    """Vectorized bispinor components over momentum grids.

    px, py broadcast against each other; returns a tuple of arrays
    (c0, c1, c2, c3) such that u^s(p) = (c0, c1, c2, c3) per point,
    unit-normalized.
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    e = np.sqrt(1.0 + px * px + py * py)
    norm = np.sqrt((e + 1.0) / (2.0 * e))
    chi = CHI_PLUS if s > 0 else CHI_MINUS
    pm = px - 1j * py   # (sigma.p) chi = ((px-ipy) chi1, (px+ipy) chi0)
    pp = px + 1j * py
    c0 = norm * chi[0] * np.ones_like(e)
    c1 = norm * chi[1] * np.ones_like(e)
    c2 = norm * pm * chi[1] / (e + 1.0)
    c3 = norm * pp * chi[0] / (e + 1.0)
    return c0, c1, c2, c3
