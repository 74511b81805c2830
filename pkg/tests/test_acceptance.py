"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Fast criteria run in the default session.  Tests marked `longrun` are the
full-scale reproductions (hours each at the production grids); run them
with `pytest -m longrun`.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from kdirac.beam import BeamParams
from kdirac.config import (
    SimConfig,
    bragg_config,
    diffraction_config,
    reduced_config,
    showcase_config,
)
from kdirac.grid import (
    GridSpec,
    MOMENTUM,
    SpinorField,
    comoving_update,
    kinetic_momentum_axis,
    to_momentum,
    to_position,
)
from kdirac.initial import PacketSpec, build_packet
from kdirac.observables import (
    find_peak,
    momentum_density,
    position_density,
    predict_dpy,
    spin_maps,
)
from kdirac.propagator import Stepper, kinetic_step, potential_step, run
from kdirac.spinors import (
    ALPHA_X,
    ALPHA_Y,
    BETA,
    ID4,
    bispinor,
    energy,
    free_hamiltonian,
    spin_project,
)


def report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[ACCEPTANCE] {name}: {status}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# criterion: algebraic suite (seconds)

def test_acceptance_algebraic_suite():
    mats = [ALPHA_X, ALPHA_Y, BETA]
    exact = all(
        np.array_equal(a @ b + b @ a, (2.0 * ID4 if i == j else np.zeros((4, 4))))
        for i, a in enumerate(mats)
        for j, b in enumerate(mats)
    )
    report("dirac-matrix anticommutation identities exact", exact)

    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        p = rng.uniform(-2, 2, size=2)
        h = free_hamiltonian(p)
        e = energy(p)
        for s in (+1, -1):
            u = bispinor(p, s)
            worst = max(worst, float(np.max(np.abs(h @ u - e * u))))
    report("bispinor eigenvector residual < 1e-12 on 1000 momenta",
           worst < 1e-12, f"worst residual {worst:.2e}")

    ortho = 0.0
    lin = 0.0
    for _ in range(200):
        p = rng.uniform(-2, 2, size=2)
        up, um = bispinor(p, +1), bispinor(p, -1)
        ortho = max(ortho, abs(np.vdot(up, um)),
                    abs(np.vdot(up, up) - 1), abs(np.vdot(um, um) - 1))
        phi1 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        phi2 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a, b = 0.4 - 0.9j, -1.2 + 0.3j
        for s in (+1, -1):
            lhs = spin_project(a * phi1 + b * phi2, p, s)
            rhs = a * spin_project(phi1, p, s) + b * spin_project(phi2, p, s)
            lin = max(lin, abs(lhs - rhs))
    report("spin projection orthonormality to machine precision",
           ortho < 1e-13, f"worst {ortho:.2e}")
    report("spin projection linearity to machine precision",
           lin < 1e-12, f"worst {lin:.2e}")


# ---------------------------------------------------------------------------
# criterion: propagator oracle equivalence (seconds-minutes)

def test_acceptance_propagator_oracles():
    # kinetic step: exact e^{-i E dt} phases
    grid = GridSpec(nx=16, ny=8, x_min=-16.0, x_max=16.0, y_span=8.0,
                    y_offset0=-4.0)
    gauge = -0.7
    kx, ky = kinetic_momentum_axis(grid, gauge)
    worst = 0.0
    for (i, j) in [(0, 0), (3, 5), (9, 2), (15, 7)]:
        p = (kx[i], ky[j])
        for s in (+1, -1):
            data = np.zeros((4, grid.nx, grid.ny), dtype=complex)
            data[:, i, j] = bispinor(p, s)
            out = kinetic_step(SpinorField(data, MOMENTUM), grid, gauge, 0.4)
            expected = np.exp(-1j * energy(p) * 0.4) * bispinor(p, s)
            worst = max(worst, float(np.max(np.abs(out.data[:, i, j]
                                                   - expected))))
    report("kinetic step reproduces e^{-iE dt} phases to 1e-12",
           worst < 1e-12, f"worst {worst:.2e}")

    # potential step: dense 4x4 matrix exponentials
    rng = np.random.default_rng(5)
    f = SpinorField((rng.standard_normal((4, grid.nx, grid.ny))
                     + 1j * rng.standard_normal((4, grid.nx, grid.ny))),
                    "position")
    a_x = rng.uniform(-0.6, 0.6, (grid.nx, grid.ny))
    a_y = rng.uniform(-0.6, 0.6, (grid.nx, grid.ny))
    dt = 0.3
    out = potential_step(f, a_x, a_y, dt)
    worst = 0.0
    for i in range(grid.nx):
        for j in range(grid.ny):
            u = scipy.linalg.expm(1j * dt * (ALPHA_X * a_x[i, j]
                                             + ALPHA_Y * a_y[i, j]))
            worst = max(worst, float(np.max(np.abs(
                out.data[:, i, j] - u @ f.data[:, i, j]))))
    report("potential step matches dense 4x4 exponentials to 1e-12",
           worst < 1e-12, f"worst {worst:.2e}")

    # uniform time-dependent coupling vs per-bin ODE oracle: global error
    # drops 4x (+-20%) when dt halves
    def a_of_t(t):
        return 0.35 * math.sin(1.3 * t), 0.45 * math.cos(0.7 * t)

    bins = [(0, 0), (1, 2), (3, 1), (5, 3), (7, 2)]
    sgrid = GridSpec(nx=8, ny=4, x_min=-8.0, x_max=8.0, y_span=4.0,
                     y_offset0=-2.0)
    data = np.zeros((4, sgrid.nx, sgrid.ny), dtype=complex)
    for i, j in bins:
        data[:, i, j] = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    data /= np.sqrt(np.sum(np.abs(data) ** 2))
    kx, ky = kinetic_momentum_axis(sgrid, gauge)
    t_end = 4.0

    def oracle(i, j):
        h0 = ALPHA_X * kx[i] + ALPHA_Y * ky[j] + BETA

        def rhs(t, y):
            psi = y[:4] + 1j * y[4:]
            ax, ay = a_of_t(t)
            d = -1j * ((h0 - ALPHA_X * ax - ALPHA_Y * ay) @ psi)
            return np.concatenate([d.real, d.imag])

        y0 = np.concatenate([data[:, i, j].real, data[:, i, j].imag])
        sol = solve_ivp(rhs, (0.0, t_end), y0, rtol=1e-12, atol=1e-14,
                        method="DOP853")
        return sol.y[:4, -1] + 1j * sol.y[4:, -1]

    exact = {b: oracle(*b) for b in bins}
    errs = []
    for dt in (0.05, 0.025):
        field = to_position(SpinorField(data.copy(), MOMENTUM), sgrid)
        for step in range(int(round(t_end / dt))):
            t_mid = (step + 0.5) * dt
            ax, ay = a_of_t(t_mid)
            ax = np.full((sgrid.nx, sgrid.ny), ax)
            ay = np.full((sgrid.nx, sgrid.ny), ay)
            field = potential_step(field, ax, ay, 0.5 * dt)
            mom = to_momentum(field, sgrid)
            mom = kinetic_step(mom, sgrid, gauge, dt)
            field = to_position(mom, sgrid)
            field = potential_step(field, ax, ay, 0.5 * dt)
        final = to_momentum(field, sgrid)
        errs.append(max(float(np.max(np.abs(final.data[:, i, j]
                                            - exact[(i, j)])))
                        for i, j in bins))
    ratio = errs[0] / errs[1]
    report("split-operator error halves dt -> 4x (+-20%) vs ODE oracle",
           3.2 < ratio < 4.8,
           f"errors {errs[0]:.3e} -> {errs[1]:.3e}, ratio {ratio:.2f}")


# ---------------------------------------------------------------------------
# criterion: unitarity & kinematics (minutes)

@pytest.mark.slow
def test_acceptance_norm_drift_showcase_grid():
    # 1e4 steps on the full showcase grid with the box ON the beam so the
    # potential kernel is genuinely exercised
    base = showcase_config()
    lam = base.beam.wavelength
    grid = replace(base.grid, y_offset0=-20.0 * lam)
    cfg = replace(base, grid=grid, r0=(base.r0[0], 0.0), t_total=500.0,
                  snapshot_every=10000)
    final, g = run(cfg, workers=2)
    drift = abs(final.total_probability(g) - 1.0)
    report("norm drift < 1e-8 over 1e4 showcase-grid steps",
           drift < 1e-8, f"drift {drift:.2e}")


@pytest.mark.slow
def test_acceptance_free_packet_velocity():
    grid = GridSpec(nx=256, ny=128, x_min=-384.0, x_max=384.0, y_span=512.0,
                    y_offset0=-256.0)
    beam = BeamParams(a0=0.0, k_L=0.1, epsilon=0.1, gauge_shift=-0.5)
    p0 = (0.3, 0.4)
    cfg = SimConfig(beam=beam, grid=grid, p0=p0, r0=(-20.0, -25.0),
                    sigma_p=0.01, dt=0.05, t_total=50.0, snapshot_every=1000,
                    comoving_velocity=0.0)
    packet = PacketSpec(cfg.p0, cfg.r0, cfg.sigma_p)
    f0 = to_position(build_packet(packet, grid, cfg.gauge_shift), grid)

    def centroid(f, g):
        dens = position_density(f) * g.cell_area
        return np.array([float(np.sum(g.x_coords()[:, None] * dens)),
                         float(np.sum(g.y_coords()[None, :] * dens))])

    final, g = run(cfg, workers=2)
    v = (centroid(final, g) - centroid(f0, grid)) / cfg.t_total
    v_exact = np.array(p0) / energy(p0)
    rel = float(np.max(np.abs(v - v_exact)) / np.linalg.norm(v_exact))
    report("free-packet centroid velocity matches p c^2/E within 0.1%",
           rel < 1e-3, f"relative error {rel:.2e}")


def test_acceptance_comoving_probability():
    rng = np.random.default_rng(2)
    grid = GridSpec(nx=64, ny=32, x_min=-32.0, x_max=32.0, y_span=32.0,
                    y_offset0=-16.0)
    data = rng.standard_normal((4, 64, 32)) + 1j * rng.standard_normal((4, 64, 32))
    data /= math.sqrt(np.sum(np.abs(data) ** 2) * grid.cell_area)
    f = SpinorField(data, "position")
    before = f.total_probability(grid)
    g2, f2 = comoving_update(grid, f, t=0.0, dt=1.0, v=7.3)
    after = f2.total_probability(g2)
    report("co-moving update conserves probability to 1e-12",
           abs(after - before) < 1e-12, f"delta {after - before:+.2e}")


# ---------------------------------------------------------------------------
# criterion: diffraction-order predictor (milliseconds)

def test_acceptance_predictor():
    worst = 0.0
    for k_L in (0.05, 0.1):
        for p_x in (0.0, -k_L):
            for n in range(-2, 3):
                closed, _ = predict_dpy(n, p_x, k_L)

                def res(d):
                    return energy((p_x + 2 * n * k_L, 1.0 + d)) - energy((p_x, 1.0))

                root = brentq(res, -0.999, 2.0, xtol=1e-15)
                worst = max(worst, abs(closed - root))
    ok_root = worst < 1e-12
    v1, _ = predict_dpy(-1, -0.1, 0.1)
    v2, _ = predict_dpy(1, 0.0, 0.1)
    ok_frozen = (abs(v1 - (-1 + math.sqrt(0.92))) < 1e-15
                 and abs(v2 - (-1 + math.sqrt(0.96))) < 1e-15)
    report("diffraction predictor matches root-find oracle to 1e-12",
           ok_root, f"worst {worst:.2e}")
    report("predictor frozen values -1+sqrt(0.92), -1+sqrt(0.96)", ok_frozen)


# ---------------------------------------------------------------------------
# criterion: reduced-scale Kapitza-Dirac regression (tens of minutes)

def _diffracted_bin_amplitudes(final, g, cfg):
    from kdirac.grid import fftshift2

    mom = to_momentum(final, g, workers=2)
    dens = fftshift2(momentum_density(mom))
    plus, minus = spin_maps(mom, g, cfg.gauge_shift)
    plus, minus = fftshift2(plus), fftshift2(minus)
    kx, ky = kinetic_momentum_axis(g, cfg.gauge_shift, shifted=True)
    target = (-cfg.p0[0], cfg.p0[1])  # Bragg: 2 hbar k_L transfer, dpy = 0
    ci = int(np.argmin(np.abs(kx - target[0])))
    cj = int(np.argmin(np.abs(ky - target[1])))
    i, j, amp = find_peak(dens, (ci, cj), 4)
    return {
        "peak_p": (float(kx[i]), float(ky[j])),
        "target": target,
        "cell": (abs(float(kx[i]) - target[0]), abs(float(ky[j]) - target[1])),
        "dp": (float(g.px_axis()[1]), float(g.py_axis()[1])),
        "amp_total": amp,
        "plus": float(plus[i, j]),
        "minus": float(minus[i, j]),
    }


@pytest.mark.slow
def test_acceptance_reduced_kapitza_dirac():
    cfg = reduced_config(dt=0.1)
    final, g = run(cfg, workers=2)
    res = _diffracted_bin_amplitudes(final, g, cfg)
    on_cell = (res["cell"][0] <= res["dp"][0] / 2
               and res["cell"][1] <= res["dp"][1] / 2)
    report("reduced run: diffracted peak at kinetic p_x = +hbar k_L",
           on_cell,
           f"peak at ({res['peak_p'][0]:+.4f}, {res['peak_p'][1]:+.4f}) mc, "
           f"target ({res['target'][0]:+.4f}, {res['target'][1]:+.4f})")
    ratio = res["minus"] / max(res["plus"], 1e-300)
    report("reduced run: spin-flip dominates, |c-|^2/|c+|^2 > 10",
           ratio > 10.0,
           f"|c-|^2={res['minus']:.3e}, |c+|^2={res['plus']:.3e}, "
           f"ratio {ratio:.1f}")


# ---------------------------------------------------------------------------
# criterion: full showcase reproduction (hours)

@pytest.mark.longrun
def test_acceptance_showcase_spin_flip():
    cfg = showcase_config()
    final, g = run(cfg, workers=2)
    mom = to_momentum(final, g, workers=2)
    plus, minus = spin_maps(mom, g, cfg.gauge_shift)
    kx, ky = kinetic_momentum_axis(g, cfg.gauge_shift)
    i = int(np.argmin(np.abs(kx - 0.1)))
    j = int(np.argmin(np.abs(ky - 1.0)))
    flip = float(minus[i, j])
    noflip = float(plus[i, j])
    report("showcase |c-(hbar k_L, mc, T)|^2 = 3.9e-3 within +-30%",
           abs(flip - 3.9e-3) <= 0.3 * 3.9e-3, f"got {flip:.3e}")
    report("showcase |c+(hbar k_L, mc, T)|^2 = 4.6e-5 within factor 3",
           4.6e-5 / 3 <= noflip <= 4.6e-5 * 3, f"got {noflip:.3e}")


# ---------------------------------------------------------------------------
# criterion: scaling suite (hours x a dozen runs)

@pytest.mark.longrun
def test_acceptance_scaling_suite(tmp_path):
    from kdirac.sweep import SweepPlan, run_sweep, scaling_report

    plan = SweepPlan(
        preset="bragg",
        epsilons=(0.02, 0.05, 0.1),
        k_Ls=(0.05, 0.07, 0.1),
        longitudinal=(True, False),
        overrides={},
    )
    paths = run_sweep(plan, str(tmp_path / "sweep"), threads=2)
    rep = scaling_report(paths, out_csv=str(tmp_path / "scaling.csv"))
    eps_slope = rep["eps_slope@kL=0.1"][0]
    kl_slope = rep["kL_slope@eps=0.05"][0]
    report("scaling: flip vs epsilon slope -2 +- 0.3 at k_L = 0.1",
           abs(eps_slope + 2.0) <= 0.3, f"slope {eps_slope:+.3f}")
    report("scaling: flip vs k_L slope +2 +- 0.3 at eps = 0.05",
           abs(kl_slope - 2.0) <= 0.3, f"slope {kl_slope:+.3f}")
    ld = rep.get("long_diff_slope@kL=0.1")
    report("scaling: longitudinal-difference slope vs epsilon = 2 +- 0.5",
           ld is not None and abs(ld[0] - 2.0) <= 0.5,
           f"slope {ld[0]:+.3f}" if ld else "missing")


# ---------------------------------------------------------------------------
# criterion: diffraction-regime peak geometry (hours)

def _diffraction_regime_check(px_zero, orders):
    from kdirac.grid import fftshift2

    cfg = diffraction_config(px_zero=px_zero)
    final, g = run(cfg, workers=2)
    mom = to_momentum(final, g, workers=2)
    dens = fftshift2(momentum_density(mom))
    plus, minus = spin_maps(mom, g, cfg.gauge_shift)
    plus, minus = fftshift2(plus), fftshift2(minus)
    kx, ky = kinetic_momentum_axis(g, cfg.gauge_shift, shifted=True)
    k_L = cfg.beam.k_L
    dpx, dpy_bin = float(g.px_axis()[1]), float(g.py_axis()[1])
    results = {}
    for n in orders:
        dpy, _ = predict_dpy(n, cfg.p0[0], k_L)
        target = (cfg.p0[0] + 2 * n * k_L, cfg.p0[1] + dpy)
        ci = int(np.argmin(np.abs(kx - target[0])))
        cj = int(np.argmin(np.abs(ky - target[1])))
        i, j, amp = find_peak(dens, (ci, cj), 4)
        results[n] = {
            "off": (abs(float(kx[i]) - target[0]), abs(float(ky[j]) - target[1])),
            "within_cell": (abs(float(kx[i]) - target[0]) <= dpx
                            and abs(float(ky[j]) - target[1]) <= dpy_bin),
            "plus": float(plus[i, j]),
            "minus": float(minus[i, j]),
        }
    return results


@pytest.mark.longrun
def test_acceptance_diffraction_regime_bragg_incidence():
    res = _diffraction_regime_check(px_zero=False, orders=(-1, 0, 1, 2))
    all_on = all(r["within_cell"] for r in res.values())
    report("diffraction regime (p_x=-hbar k_L): peaks within one cell of "
           "energy-conservation prediction", all_on,
           "; ".join(f"n={n}: off ({r['off'][0]:.2e},{r['off'][1]:.2e})"
                     for n, r in res.items()))
    ok_n0 = res[0]["plus"] > 10 * res[0]["minus"]
    ok_flip = res[1]["minus"] > res[1]["plus"] and \
        res[-1]["minus"] > res[-1]["plus"]
    report("diffraction regime: n=0 unflipped-dominant", ok_n0,
           f"|c+|^2={res[0]['plus']:.2e} vs |c-|^2={res[0]['minus']:.2e}")
    report("diffraction regime: n=+-1 flip-dominant", ok_flip,
           f"n=1: {res[1]['minus']:.2e} > {res[1]['plus']:.2e}; "
           f"n=-1: {res[-1]['minus']:.2e} > {res[-1]['plus']:.2e}")


@pytest.mark.longrun
def test_acceptance_diffraction_regime_normal_incidence():
    res = _diffraction_regime_check(px_zero=True, orders=(-2, -1, 0, 1, 2))
    all_on = all(r["within_cell"] for r in res.values())
    report("diffraction regime (p_x=0): peaks within one cell of prediction",
           all_on,
           "; ".join(f"n={n}: off ({r['off'][0]:.2e},{r['off'][1]:.2e})"
                     for n, r in res.items()))
    diffracted = [n for n in res if n != 0]
    ok = all(res[n]["minus"] < res[n]["plus"] for n in diffracted)
    report("diffraction regime (p_x=0): flip below no-flip at every order",
           ok,
           "; ".join(f"n={n}: {res[n]['minus']:.2e}<{res[n]['plus']:.2e}"
                     for n in diffracted))
