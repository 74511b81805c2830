"""Momentum-space Gaussian spin-up wave packet."""

from dataclasses import dataclass

import numpy as np

from . import spinors
from .grid import MOMENTUM, SpinorField, kinetic_momentum_axis


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet: kinetic center p0 [mc], lab position r0, spread sigma_p."""

    p0: tuple
    r0: tuple
    sigma_p: float


def build_packet(packet, grid, gauge_shift):
    """Build the normalized Gaussian packet in momentum representation.

    Per canonical bin with kinetic label p the amplitude is
    u^+(p) * exp(-((p - p0)/(2 sigma_p))^2 - i r0 . p_canonical); the spinor
    uses the kinetic momentum while the position phase uses the canonical
    (representation) momentum, so the packet lands at r0 for any gauge
    constant.  The continuum prefactor 1/(sqrt(2 pi) sigma_p) is applied and
    then the discrete field is renormalized to total probability 1.
    """
    if packet.sigma_p <= 0:
        raise ValueError("sigma_p must be positive")
    can_x = grid.px_axis()[:, None]
    can_y = grid.py_axis()[None, :]
    kin_x, kin_y = kinetic_momentum_axis(grid, gauge_shift)
    kin_x = kin_x[:, None]
    kin_y = kin_y[None, :]

    nyq_x, nyq_y = grid.nyquist()
    c_x = packet.p0[0] + gauge_shift * 0.0
    c_y = packet.p0[1] + gauge_shift
    for axis, c, nyq in (("x", c_x, nyq_x), ("y", c_y, nyq_y)):
        if abs(c) + 5.0 * packet.sigma_p >= nyq:
            raise ValueError(
                f"packet support (center {c:g} mc +- 5 sigma_p) exceeds the "
                f"{axis}-axis Nyquist bound {nyq:.3g} mc"
            )

    dq_x = kin_x - packet.p0[0]
    dq_y = kin_y - packet.p0[1]
    envelope = np.exp(-((dq_x / (2.0 * packet.sigma_p)) ** 2)
                      - ((dq_y / (2.0 * packet.sigma_p)) ** 2))
    envelope = envelope / (np.sqrt(2.0 * np.pi) * packet.sigma_p)
    phase = np.exp(-1j * (packet.r0[0] * can_x + packet.r0[1] * can_y))
    scalar = envelope * phase

    u0, u1, u2, u3 = spinors.bispinor_components(kin_x, kin_y, +1)
    data = np.stack([
        np.broadcast_to(u0 * scalar, (grid.nx, grid.ny)),
        np.broadcast_to(u1 * scalar, (grid.nx, grid.ny)),
        u2 * scalar,
        u3 * scalar,
    ]).astype(complex)
    norm = np.sqrt(np.sum(np.abs(data) ** 2))
    data /= norm
    return SpinorField(data, MOMENTUM)
