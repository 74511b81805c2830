"""Parameter-sweep orchestration for the scaling studies.

A sweep plan is the same flat `key = value` text format as run configs:

    preset = bragg            # bragg | diffraction-regime | diffraction-regime-px0
    epsilon = 0.02, 0.05, 0.1 # comma lists form the sweep grid
    k_L = 0.1
    longitudinal = both       # on | off | both
    # optional template overrides, applied per run:
    # nx, ny, a0, dt, flight_lambda, snapshot_every

Every (epsilon, k_L) pair regenerates a full SimConfig from the
lambda-relative template, so box coordinates, initial position and momentum
follow the laser wavelength.  Runs execute in separate processes with
isolated run directories.
"""

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .analysis import analyze_rundir, flip_amplitudes, _final_arrays
from .config import ConfigError, bragg_config, diffraction_config
from .io import RunDir, _write_csv, execute
from .observables import ScalingPoint, loglog_slope

PRESETS = ("bragg", "diffraction-regime", "diffraction-regime-px0")


@dataclass(frozen=True)
class SweepPlan:
    preset: str
    epsilons: tuple
    k_Ls: tuple
    longitudinal: tuple   # subset of (True, False)
    overrides: dict

    def cases(self):
        for eps in self.epsilons:
            for k_L in self.k_Ls:
                for lon in self.longitudinal:
                    yield eps, k_L, lon

    def build_config(self, eps, k_L, lon):
        kw = dict(self.overrides)
        if self.preset == "bragg":
            cfg = bragg_config(k_L=k_L, epsilon=eps, longitudinal_on=lon, **kw)
        else:
            base = diffraction_config(px_zero=self.preset.endswith("px0"))
            cfg = bragg_config(
                k_L=k_L,
                epsilon=eps,
                a0=kw.pop("a0", base.beam.a0),
                ny=kw.pop("ny", base.grid.ny),
                longitudinal_on=lon,
                **kw,
            )
            if self.preset.endswith("px0"):
                cfg = replace(cfg, p0=(0.0, 1.0), r0=(0.0, cfg.r0[1]))
        return cfg


_OVERRIDE_KEYS = {
    "nx": int, "ny": int, "a0": float, "dt": float,
    "flight_lambda": float, "snapshot_every": int,
    "box_x_lambda": float, "box_y_lambda": float,
}


def parse_plan_text(text):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`")
        key, val = (part.strip() for part in stripped.split("=", 1))
        raw[key] = val
    preset = raw.pop("preset", "bragg")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    try:
        if preset == "bragg":
            eps = tuple(float(v) for v in raw.pop("epsilon").split(","))
            kls = tuple(float(v) for v in raw.pop("k_L").split(","))
        else:
            eps = tuple(float(v) for v in raw.pop("epsilon", "0.1").split(","))
            kls = tuple(float(v) for v in raw.pop("k_L", "0.1").split(","))
    except KeyError as exc:
        raise ConfigError(f"missing required plan key {exc.args[0]!r}")
    lon_txt = raw.pop("longitudinal", "on")
    lon = {"on": (True,), "off": (False,), "both": (True, False)}.get(lon_txt)
    if lon is None:
        raise ConfigError(f"longitudinal must be on|off|both, got {lon_txt!r}")
    overrides = {}
    for key, val in raw.items():
        if key not in _OVERRIDE_KEYS:
            raise ConfigError(f"unknown plan key {key!r}")
        overrides[key] = _OVERRIDE_KEYS[key](val)
    return SweepPlan(preset, eps, kls, lon, overrides)


def load_plan(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_plan_text(fh.read())


def case_dirname(eps, k_L, lon):
    return f"eps{eps:g}_kL{k_L:g}_lon{'on' if lon else 'off'}"


def _run_case(args):
    plan, eps, k_L, lon, outdir, workers = args
    cfg = plan.build_config(eps, k_L, lon)
    path = os.path.join(outdir, case_dirname(eps, k_L, lon))
    execute(cfg, path, workers=workers)
    analyze_rundir(path)
    return path


def run_sweep(plan, outdir, threads=1):
    """Run every sweep case; returns the list of run directories.

    Cases are independent processes (isolated rundirs); `threads` caps the
    number of concurrent runs.
    """
    os.makedirs(outdir, exist_ok=True)
    cases = [(plan, eps, k_L, lon, outdir, 1) for eps, k_L, lon in plan.cases()]
    if threads <= 1:
        paths = [_run_case(c) for c in cases]
    else:
        # spawn, not fork: the parent may hold a live OpenMP runtime
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
            paths = list(pool.map(_run_case, cases))
    return paths


def collect_scaling_points(rundirs):
    """Read the spin-flip observable of each rundir into ScalingPoints."""
    points = []
    for path in rundirs:
        rundir = RunDir(path)
        config = rundir.config()
        _, _, planes = _final_arrays(rundir)
        noflip, flip = flip_amplitudes(planes, config)
        points.append(ScalingPoint(
            epsilon=config.beam.epsilon,
            k_L=config.beam.k_L,
            flip_prob=flip,
            noflip_prob=noflip,
            longitudinal_on=config.beam.longitudinal_on,
        ))
    return points


def scaling_report(rundirs, out_csv=None):
    """Power-law slopes of the spin-flip probability across a sweep.

    Emits scaling.csv (epsilon, k_L, flip, noflip, longitudinal_on) and
    returns a dict of fitted (slope, stderr) pairs:

      eps_slope    flip vs epsilon at fixed k_L (longitudinal on)
      kL_slope     flip vs k_L at fixed epsilon (longitudinal on)
      long_diff_slope  |flip_without - flip_with| vs epsilon

    Each fit needs at least 3 points on its axis.
    """
    points = collect_scaling_points(rundirs)
    if out_csv:
        _write_csv(
            out_csv,
            ["epsilon", "k_L", "flip", "noflip", "longitudinal_on"],
            [(p.epsilon, p.k_L, p.flip_prob, p.noflip_prob, p.longitudinal_on)
             for p in points],
        )
    on = [p for p in points if p.longitudinal_on]
    off = [p for p in points if not p.longitudinal_on]
    report = {}

    k_values = sorted({p.k_L for p in on})
    eps_values = sorted({p.epsilon for p in on})
    for k_L in k_values:
        series = sorted((p.epsilon, p.flip_prob) for p in on if p.k_L == k_L)
        if len(series) >= 3:
            report[f"eps_slope@kL={k_L:g}"] = loglog_slope(series)
    for eps in eps_values:
        series = sorted((p.k_L, p.flip_prob) for p in on if p.epsilon == eps)
        if len(series) >= 3:
            report[f"kL_slope@eps={eps:g}"] = loglog_slope(series)
    if off:
        by_key_on = {(p.epsilon, p.k_L): p for p in on}
        for k_L in sorted({p.k_L for p in off}):
            series = []
            for p in sorted(off, key=lambda q: q.epsilon):
                if p.k_L != k_L or (p.epsilon, k_L) not in by_key_on:
                    continue
                diff = abs(p.flip_prob - by_key_on[(p.epsilon, k_L)].flip_prob)
                if diff > 0:
                    series.append((p.epsilon, diff))
            if len(series) >= 3:
                report[f"long_diff_slope@kL={k_L:g}"] = loglog_slope(series)
    if not report:
        raise ValueError("insufficient points: every axis needs >= 3 runs")
    return report
