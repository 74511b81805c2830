"""Hot-loop pointwise kernels.

Numba-compiled when available, with numpy fallbacks of identical semantics.
Both paths are elementwise (no reductions), so results are deterministic
for any thread count.
"""

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _potential_apply_np(psi, f_x, f_y, r, u):
    """Apply exp(i u alpha.F) pointwise, F = (f_x, f_y), r = |F|.

    cos(u r) I + i sin(u r)/r alpha.F  (sin(ur)/r -> u as r -> 0).
    In-place on psi of shape (4, nx, ny).
    """
    th = u * r
    c = np.cos(th)
    w = 1j * u * np.sinc(th / np.pi)
    fp = w * (f_x + 1j * f_y)
    fm = w * (f_x - 1j * f_y)
    a0 = psi[0].copy()
    a1 = psi[1].copy()
    psi[0] *= c
    psi[0] += fm * psi[3]
    psi[1] *= c
    psi[1] += fp * psi[2]
    psi[2] *= c
    psi[2] += fm * a1
    psi[3] *= c
    psi[3] += fp * a0
    return psi


def _kinetic_apply_np(psi, d_up, d_dn, q, qb):
    """Apply the precomputed free-step factors pointwise, in place."""
    a0 = psi[0].copy()
    a1 = psi[1].copy()
    psi[0] *= d_up
    psi[0] += qb * psi[3]
    psi[1] *= d_up
    psi[1] += q * psi[2]
    psi[2] *= d_dn
    psi[2] += qb * a1
    psi[3] *= d_dn
    psi[3] += q * a0
    return psi


if HAVE_NUMBA:

    @numba.njit(parallel=True, cache=True)
    def _potential_apply_nb(psi, f_x, f_y, r, u):
        n0, n1 = f_x.shape
        for i in numba.prange(n0):
            for j in range(n1):
                th = u * r[i, j]
                c = np.cos(th)
                if th != 0.0:
                    w = np.sin(th) / r[i, j]
                else:
                    w = u
                fp = 1j * w * (f_x[i, j] + 1j * f_y[i, j])
                fm = 1j * w * (f_x[i, j] - 1j * f_y[i, j])
                a0 = psi[0, i, j]
                a1 = psi[1, i, j]
                a2 = psi[2, i, j]
                a3 = psi[3, i, j]
                psi[0, i, j] = c * a0 + fm * a3
                psi[1, i, j] = c * a1 + fp * a2
                psi[2, i, j] = c * a2 + fm * a1
                psi[3, i, j] = c * a3 + fp * a0
        return psi

    @numba.njit(parallel=True, cache=True)
    def _kinetic_apply_nb(psi, d_up, d_dn, q, qb):
        n0, n1 = d_up.shape
        for i in numba.prange(n0):
            for j in range(n1):
                a0 = psi[0, i, j]
                a1 = psi[1, i, j]
                a2 = psi[2, i, j]
                a3 = psi[3, i, j]
                psi[0, i, j] = d_up[i, j] * a0 + qb[i, j] * a3
                psi[1, i, j] = d_up[i, j] * a1 + q[i, j] * a2
                psi[2, i, j] = d_dn[i, j] * a2 + qb[i, j] * a1
                psi[3, i, j] = d_dn[i, j] * a3 + q[i, j] * a0
        return psi

    potential_apply = _potential_apply_nb
    kinetic_apply = _kinetic_apply_nb
else:
    potential_apply = _potential_apply_np
    kinetic_apply = _kinetic_apply_np
