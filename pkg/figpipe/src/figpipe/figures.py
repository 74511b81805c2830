"""Figure renderers.

Each renderer is a pure function of its input files: fixed canvas size,
fixed colormaps, no timestamps or randomness, so re-rendering the same
inputs is byte-identical.  Output is always PNG.
"""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_csv, read_snapshot

_SAVEKW = dict(dpi=150, metadata={"Software": "figpipe"})
_CMAP = "viridis"


@dataclass(frozen=True)
class FigureSpec:
    """One render job: figure id, input paths, output path, options."""

    figure: str
    inputs: tuple
    output: str
    options: dict = field(default_factory=dict)


def _new_axes(width=6.4, height=4.2):
    fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def render_field_maps(spec):
    """Standing-wave coupling components a_x, a_y as two panels (fields.csv)."""
    data = read_csv(spec.inputs[0], "fields")
    x = np.unique(data["x"])
    y = np.unique(data["y"])
    shape = (len(x), len(y))
    if shape[0] * shape[1] != len(data["x"]):
        raise SchemaError(f"{spec.inputs[0]}: not a full x-y grid")
    fig, axes = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    for ax, comp, label in ((axes[0], "a_x", "a_x [mc]"),
                            (axes[1], "a_y", "a_y [mc]")):
        grid = data[comp].reshape(shape)
        lim = float(np.max(np.abs(grid))) or 1.0
        pm = ax.pcolormesh(x, y, grid.T, cmap="RdBu_r", vmin=-lim, vmax=lim,
                           shading="nearest")
        fig.colorbar(pm, ax=ax, label=label)
        ax.set_ylabel("y [hbar/mc]")
    axes[1].set_xlabel("x [hbar/mc]")
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_ydensity_stack(spec):
    """Transverse-integrated density over x, stacked in time (ydensity.csv)."""
    data = read_csv(spec.inputs[0], "ydensity")
    times = np.unique(data["time"])
    xs = np.unique(data["x"])
    if len(times) < 2:
        raise SchemaError(f"{spec.inputs[0]}: need at least two snapshots")
    grid = np.full((len(times), len(xs)), np.nan)
    t_index = {t: i for i, t in enumerate(times)}
    x_index = {x: i for i, x in enumerate(xs)}
    for t, x, phi in zip(data["time"], data["x"], data["phi"]):
        grid[t_index[t], x_index[x]] = phi
    if np.any(np.isnan(grid)):
        raise SchemaError(f"{spec.inputs[0]}: ragged time/x coverage")
    fig, ax = _new_axes()
    pm = ax.pcolormesh(xs, times, grid, cmap=_CMAP, shading="nearest")
    fig.colorbar(pm, ax=ax, label="integrated density [1/length]")
    ax.set_xlabel("x [hbar/mc]")
    ax.set_ylabel("t [hbar/mc^2]")
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_spin_linecut(spec):
    """Spin-resolved momentum-space density along p_x (linecut.csv)."""
    data = read_csv(spec.inputs[0], "linecut")
    fig, ax = _new_axes()
    floor = float(spec.options.get("floor", 1e-12))
    for key, label, style in (("density", "|phi|^2", "-"),
                              ("cplus2", "|c+|^2", "--"),
                              ("cminus2", "|c-|^2", ":")):
        vals = np.maximum(data[key], floor)
        ax.semilogy(data["px"], vals, style, label=label)
    ax.set_xlabel("kinetic p_x [mc]")
    ax.set_ylabel("bin probability")
    ax.set_ylim(floor, None)
    ax.legend(loc="upper right")
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_scaling(spec):
    """Spin-flip probability vs epsilon and vs k_L with slope guides
    (scaling.csv)."""
    data = read_csv(spec.inputs[0], "scaling")
    on = data["longitudinal_on"] > 0.5
    eps, kl, flip = data["epsilon"][on], data["k_L"][on], data["flip"][on]
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.2))
    for k in np.unique(kl):
        sel = kl == k
        order = np.argsort(eps[sel])
        axes[0].loglog(eps[sel][order], flip[sel][order], "o-",
                       label=f"k_L={k:g}")
    for e in np.unique(eps):
        sel = eps == e
        order = np.argsort(kl[sel])
        axes[1].loglog(kl[sel][order], flip[sel][order], "s-",
                       label=f"eps={e:g}")
    # slope guides through the data median
    gx = np.array([eps.min(), eps.max()])
    ref = np.median(flip) * (gx / np.median(eps)) ** -2
    axes[0].loglog(gx, ref, "k-.", label="slope -2")
    gx = np.array([kl.min(), kl.max()])
    ref = np.median(flip) * (gx / np.median(kl)) ** 2
    axes[1].loglog(gx, ref, "k-.", label="slope +2")
    axes[0].set_xlabel("beam divergence epsilon")
    axes[1].set_xlabel("wave number k_L [mc/hbar]")
    for ax in axes:
        ax.set_ylabel("spin-flip probability")
        ax.legend(fontsize=8)
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_longitudinal_difference(spec):
    """|flip(without) - flip(with)| vs epsilon with a slope-2 guide
    (scaling.csv containing both longitudinal toggles)."""
    data = read_csv(spec.inputs[0], "scaling")
    on = data["longitudinal_on"] > 0.5
    key_on = {}
    for e, k, f in zip(data["epsilon"][on], data["k_L"][on], data["flip"][on]):
        key_on[(e, k)] = f
    eps, diffs, kls = [], [], []
    off = ~on
    for e, k, f in zip(data["epsilon"][off], data["k_L"][off],
                       data["flip"][off]):
        if (e, k) in key_on:
            d = abs(f - key_on[(e, k)])
            if d > 0:
                eps.append(e)
                diffs.append(d)
                kls.append(k)
    if not eps:
        raise SchemaError(f"{spec.inputs[0]}: no paired with/without rows")
    eps = np.asarray(eps)
    diffs = np.asarray(diffs)
    kls = np.asarray(kls)
    fig, ax = _new_axes()
    for k in np.unique(kls):
        sel = kls == k
        order = np.argsort(eps[sel])
        ax.loglog(eps[sel][order], diffs[sel][order], "o-", label=f"k_L={k:g}")
    gx = np.array([eps.min(), eps.max()])
    ax.loglog(gx, np.median(diffs) * (gx / np.median(eps)) ** 2, "k-.",
              label="slope +2")
    ax.set_xlabel("beam divergence epsilon")
    ax.set_ylabel("| flip difference |")
    ax.legend(fontsize=8)
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_momentum_map(spec):
    """2D momentum density from a final snapshot with the diffraction-order
    parabola and circles from peaks.csv."""
    header, planes = read_snapshot(spec.inputs[0])
    for required in ("mom_density", "px_kinetic", "py_kinetic"):
        if required not in planes:
            raise SchemaError(
                f"{spec.inputs[0]}: snapshot lacks plane {required!r}")
    dens = planes["mom_density"]
    kx = planes["px_kinetic"]
    ky = planes["py_kinetic"]
    floor = float(spec.options.get("floor", 1e-12))
    fig, ax = _new_axes(6.4, 5.0)
    pm = ax.pcolormesh(kx, ky, np.log10(np.maximum(dens.T, floor)),
                       cmap=_CMAP, shading="nearest")
    fig.colorbar(pm, ax=ax, label="log10 bin probability")
    if len(spec.inputs) > 1:
        peaks = read_csv(spec.inputs[1], "peaks")
        ax.plot(peaks["px"], peaks["py"], "o", mfc="none", mec="red", ms=12,
                label="orders")
        if len(peaks["n"]) >= 3:
            # dashed guide: quadratic through the predicted order locations,
            # anchored at the n=0 row's transverse momentum
            i0 = int(np.argmin(np.abs(peaks["n"])))
            base = peaks["py"][i0] - peaks["predicted_dpy"][i0]
            coeffs = np.polyfit(peaks["px"], base + peaks["predicted_dpy"], 2)
            gx = np.linspace(peaks["px"].min(), peaks["px"].max(), 200)
            ax.plot(gx, np.polyval(coeffs, gx), "b--", lw=1.2,
                    label="energy-momentum conservation")
        ax.legend(loc="upper right", fontsize=8)
    win = spec.options.get("window")
    if win:
        ax.set_xlim(win[0], win[1])
        ax.set_ylim(win[2], win[3])
    ax.set_xlabel("kinetic p_x [mc]")
    ax.set_ylabel("kinetic p_y [mc]")
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


def render_spin_maps(spec):
    """Two-panel |c+|^2 / |c-|^2 momentum maps from a final snapshot."""
    header, planes = read_snapshot(spec.inputs[0])
    for required in ("spin_plus", "spin_minus", "px_kinetic", "py_kinetic"):
        if required not in planes:
            raise SchemaError(
                f"{spec.inputs[0]}: snapshot lacks plane {required!r}")
    kx, ky = planes["px_kinetic"], planes["py_kinetic"]
    floor = float(spec.options.get("floor", 1e-12))
    fig, axes = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    for ax, name, label in ((axes[0], "spin_plus", "|c+|^2"),
                            (axes[1], "spin_minus", "|c-|^2")):
        pm = ax.pcolormesh(kx, ky,
                           np.log10(np.maximum(planes[name].T, floor)),
                           cmap=_CMAP, shading="nearest")
        fig.colorbar(pm, ax=ax, label=f"log10 {label}")
        ax.set_ylabel("kinetic p_y [mc]")
    axes[1].set_xlabel("kinetic p_x [mc]")
    fig.savefig(spec.output, **_SAVEKW)
    plt.close(fig)


RENDERERS = {
    "fields": render_field_maps,        # beam component maps
    "ydensity": render_ydensity_stack,  # density vs x stacked over time
    "linecut": render_spin_linecut,     # spin-resolved p_x cut, log scale
    "scaling": render_scaling,          # flip prob vs eps / k_L, slope guides
    "longdiff": render_longitudinal_difference,
    "momentum": render_momentum_map,    # 2D map + order parabola overlay
    "spinmaps": render_spin_maps,
}


def render(spec):
    """Render one FigureSpec; raises SchemaError on malformed inputs."""
    if spec.figure not in RENDERERS:
        raise SchemaError(f"unknown figure id {spec.figure!r}; "
                          f"expected one of {sorted(RENDERERS)}")
    RENDERERS[spec.figure](spec)
    return spec.output
