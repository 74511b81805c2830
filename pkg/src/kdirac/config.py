"""Natural-unit conventions, run configuration record and config-file I/O.

Unit system: hbar = c = m = 1.  Lengths are in reduced Compton wavelengths
hbar/(mc), times in hbar/(mc^2), momenta in mc, energies in mc^2, and the
vector potential is stored as the momentum-like coupling a = qA/c in mc.
The laser wavelength is lambda = 2 pi / k_L and the (non-reduced) Compton
wavelength is LAMBDA_C = 2 pi in these length units.

The config-file format is one `key = value` per line with `#` comments.
Lengths in the file are in units of lambda, except r0_x which is in
LAMBDA_C (the natural unit of the Bragg-crossing geometry: the x offset
needed to cross the beam axis at y = 0 is independent of k_L when expressed
in Compton wavelengths).  Momenta are in mc, times in hbar/(mc^2).
"""

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .beam import BeamParams
from .grid import GridSpec


class UnitSystem:
    """Conventions record; all module interfaces are unit-free."""

    LAMBDA_C = 2.0 * math.pi     # Compton wavelength h/(mc) in hbar/(mc)

    @staticmethod
    def wavelength(k_L):
        return 2.0 * math.pi / k_L


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run.

    p0 is the kinetic (physical) packet momentum [mc]; the canonical packet
    center on the grid is p0 + (0, gauge_shift).  r0 [hbar/(mc)] is the lab
    packet position, sigma_p [mc] the momentum spread, dt and t_total in
    hbar/(mc^2).  comoving_velocity [c] moves the box along y.
    """

    beam: BeamParams
    grid: GridSpec
    p0: tuple
    r0: tuple
    sigma_p: float
    dt: float
    t_total: float
    snapshot_every: int
    comoving_velocity: float

    @property
    def gauge_shift(self):
        return self.beam.gauge_shift

    @property
    def n_steps(self):
        return int(round(self.t_total / self.dt))


def derived_lengths(config):
    """Derived beam lengths {lambda, w0, x_R} of a config (or BeamParams)."""
    beam = config.beam if isinstance(config, SimConfig) else config
    if beam.k_L <= 0:
        raise ValueError("k_L must be positive")
    if beam.epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lam = 2.0 * math.pi / beam.k_L
    w0 = 1.0 / (beam.k_L * beam.epsilon)
    return {"lambda": lam, "w0": w0, "x_R": beam.k_L * w0 ** 2 / 2.0}


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


def validate(config):
    """Check all SimConfig invariants; returns a list of violation strings.

    Empty list means the configuration is usable.  Each entry names the
    offending field and the bound it breaks.
    """
    v = []
    beam, grid = config.beam, config.grid
    if config.dt <= 0:
        v.append("dt must be positive")
    if config.t_total <= 0:
        v.append("t_total must be positive")
    if config.snapshot_every < 1:
        v.append("snapshot_every must be >= 1")
    if beam.a0 < 0:
        v.append("a0 must be non-negative")
    if beam.k_L <= 0:
        v.append("k_L must be positive")
    if not (0.0 < beam.epsilon < 1.0):
        v.append("epsilon must be in (0, 1)")
    if not _is_pow2(grid.nx):
        v.append(f"nx={grid.nx} must be a power of two")
    if not _is_pow2(grid.ny):
        v.append(f"ny={grid.ny} must be a power of two")
    if grid.x_max <= grid.x_min or grid.y_span <= 0:
        v.append("grid extents must be positive")
        return v
    if config.sigma_p <= 0:
        v.append("sigma_p must be positive")
        return v
    # canonical packet center must be resolvable on the momentum grid
    nyq_x, nyq_y = grid.nyquist()
    canon = (config.p0[0], config.p0[1] + beam.gauge_shift)
    for axis, c, nyq in (("x", canon[0], nyq_x), ("y", canon[1], nyq_y)):
        if abs(c) >= nyq:
            v.append(
                f"canonical p_{axis}={c:g} mc exceeds {axis}-Nyquist "
                f"≈{nyq:.3g} mc"
            )
        elif abs(c) + 5.0 * config.sigma_p >= nyq:
            v.append(
                f"packet support |p_{axis}|+5 sigma_p exceeds {axis}-Nyquist "
                f"≈{nyq:.3g} mc"
            )
    return v


def bragg_config(
    k_L=0.1,
    epsilon=0.02,
    a0=0.1,
    nx=2048,
    ny=128,
    box_x_lambda=80.0,
    box_y_lambda=40.0,
    flight_lambda=280.0,
    dt=0.05,
    snapshot_every=2500,
    longitudinal_on=True,
    t_total=None,
):
    """Bragg-geometry run template, lambda-relative.

    The electron comes in with kinetic p = (-k_L, 1) mc (two-photon Bragg
    condition with the spin-effect momentum), starting flight_lambda/2
    wavelengths below the beam axis and offset in x so its classical path
    crosses the origin.  The gauge shift puts the canonical p_y center at
    exactly zero.  Box and trajectory lengths scale with lambda = 2 pi/k_L.
    """
    lam = 2.0 * math.pi / k_L
    beam = BeamParams(
        a0=a0,
        k_L=k_L,
        epsilon=epsilon,
        longitudinal_on=longitudinal_on,
        gauge_shift=-1.0,
    )
    y0 = -(flight_lambda / 2.0) * lam
    grid = GridSpec(
        nx=nx,
        ny=ny,
        x_min=-(box_x_lambda / 2.0) * lam,
        x_max=(box_x_lambda / 2.0) * lam,
        y_span=box_y_lambda * lam,
        y_offset0=y0 - (box_y_lambda / 2.0) * lam,
    )
    v = 1.0 / math.sqrt(2.0)
    return SimConfig(
        beam=beam,
        grid=grid,
        p0=(-k_L, 1.0),
        # crossing offset (flight/2) * lambda * k_L = flight * pi, i.e.
        # (flight/2) Compton wavelengths -- independent of k_L
        r0=((flight_lambda / 2.0) * lam * k_L, y0),
        sigma_p=k_L / 200.0,
        dt=dt,
        t_total=flight_lambda * lam / v if t_total is None else t_total,
        snapshot_every=snapshot_every,
        comoving_velocity=v,
    )


def showcase_config():
    """The full-scale spin-flip demonstration parameter set.

    The run time is the round 2.5e4 hbar/(mc^2) (half a million dt=0.05
    steps), slightly more than the exact 280 lambda sqrt(2) traversal time.
    """
    return bragg_config(t_total=2.5e4)


def diffraction_config(px_zero=False):
    """Tight-focus / strong-field preset populating many diffraction orders.

    Quadrupled coupling amplitude a0 = 0.4, epsilon = 0.1, doubled ny = 256.
    The px_zero variant drops the Bragg incidence (p_x = 0) and starts the
    electron on the beam axis so it crosses the focus.
    """
    cfg = bragg_config(k_L=0.1, epsilon=0.1, a0=0.4, ny=256)
    if px_zero:
        cfg = replace(cfg, p0=(0.0, 1.0), r0=(0.0, cfg.r0[1]))
    return cfg


def reduced_config(dt=0.1):
    """Reduced-scale Bragg regression: shorter flight, coarser packet."""
    return bragg_config(
        k_L=0.2,
        epsilon=0.05,
        nx=1024,
        ny=128,
        flight_lambda=160.0,
        dt=dt,
        snapshot_every=5000,
    )


# ---------------------------------------------------------------------------
# flat key = value config file format

CONFIG_KEYS = [
    "k_L",
    "a0",
    "epsilon",
    "nx",
    "ny",
    "box_x_lambda",
    "box_y_lambda",
    "p0_x",
    "p0_y",
    "r0_x",
    "r0_y",
    "sigma_p",
    "dt",
    "t_total",
    "snapshot_every",
    "longitudinal_on",
    "gauge_shift",
    "comoving_velocity",
]

_BOOL_KEYS = {"longitudinal_on"}
_INT_KEYS = {"nx", "ny", "snapshot_every"}


class ConfigError(ValueError):
    pass


def parse_config_text(text):
    """Parse flat `key = value` text into a SimConfig.

    Unknown keys, duplicates, missing keys and malformed values are all
    reported by name.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, val = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (lineno, val)
    missing = [k for k in CONFIG_KEYS if k not in raw]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    vals = {}
    for key, (lineno, val) in raw.items():
        try:
            if key in _BOOL_KEYS:
                lowered = val.lower()
                if lowered in ("true", "on", "yes", "1"):
                    vals[key] = True
                elif lowered in ("false", "off", "no", "0"):
                    vals[key] = False
                else:
                    raise ValueError(val)
            elif key in _INT_KEYS:
                vals[key] = int(val)
            else:
                vals[key] = float(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: malformed value for {key}: {val!r}")

    lam = 2.0 * math.pi / vals["k_L"]
    beam = BeamParams(
        a0=vals["a0"],
        k_L=vals["k_L"],
        epsilon=vals["epsilon"],
        longitudinal_on=vals["longitudinal_on"],
        gauge_shift=vals["gauge_shift"],
    )
    r0_y = vals["r0_y"] * lam
    grid = GridSpec(
        nx=vals["nx"],
        ny=vals["ny"],
        x_min=-(vals["box_x_lambda"] / 2.0) * lam,
        x_max=(vals["box_x_lambda"] / 2.0) * lam,
        y_span=vals["box_y_lambda"] * lam,
        y_offset0=r0_y - (vals["box_y_lambda"] / 2.0) * lam,
    )
    return SimConfig(
        beam=beam,
        grid=grid,
        p0=(vals["p0_x"], vals["p0_y"]),
        r0=(vals["r0_x"] * UnitSystem.LAMBDA_C, r0_y),
        sigma_p=vals["sigma_p"],
        dt=vals["dt"],
        t_total=vals["t_total"],
        snapshot_every=vals["snapshot_every"],
        comoving_velocity=vals["comoving_velocity"],
    )


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def config_to_text(config):
    """Serialize a SimConfig back to the flat key = value format."""
    beam, grid = config.beam, config.grid
    lam = 2.0 * math.pi / beam.k_L
    lines = [
        "# lengths in lambda (r0_x in Compton wavelengths), momenta in mc,",
        "# times in hbar/(mc^2); kinetic p = canonical p - (0, gauge_shift)",
        f"k_L = {beam.k_L!r}",
        f"a0 = {beam.a0!r}",
        f"epsilon = {beam.epsilon!r}",
        f"nx = {grid.nx}",
        f"ny = {grid.ny}",
        f"box_x_lambda = {(grid.x_max - grid.x_min) / lam!r}",
        f"box_y_lambda = {grid.y_span / lam!r}",
        f"p0_x = {config.p0[0]!r}",
        f"p0_y = {config.p0[1]!r}",
        f"r0_x = {config.r0[0] / UnitSystem.LAMBDA_C!r}",
        f"r0_y = {config.r0[1] / lam!r}",
        f"sigma_p = {config.sigma_p!r}",
        f"dt = {config.dt!r}",
        f"t_total = {config.t_total!r}",
        f"snapshot_every = {config.snapshot_every}",
        f"longitudinal_on = {'on' if beam.longitudinal_on else 'off'}",
        f"gauge_shift = {beam.gauge_shift!r}",
        f"comoving_velocity = {config.comoving_velocity!r}",
    ]
    return "\n".join(lines) + "\n"


def config_hash(config):
    """Stable hash of the physical run description (checkpoint guard)."""
    return hashlib.sha256(config_to_text(config).encode()).hexdigest()
