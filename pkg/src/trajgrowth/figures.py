"""Regenerate the trajectory-growth and subvector figures as CSV + SVG + JSON metadata."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .distributions import FAMILIES, make_rng
from .experiment import ExperimentConfig, ExperimentResult, TrajectorySource, export_csv, \
    format_value, run_experiment
from .idx import find_mnist
from .svgplot import Plot
from .verify import subvector_norm_expectation

log = logging.getLogger(__name__)

FIGURES = ("fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5")

PRESETS = {
    "full": {"width": 784, "segments": 10000, "replicates": 100, "subvector_trials": 10**5},
    "desk": {"width": 256, "segments": 1000, "replicates": 20, "subvector_trials": 2 * 10**4},
}

FIG2_ALPHAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
FIG3_ALPHAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
FIG3_STDS = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
FIG4_WIDTHS = [10, 100, 500]
FIG4_ALPHAS = [round(0.05 * i, 2) for i in range(1, 21)]
DEPTH = 10


def mnist_or_random(source: str = "auto") -> TrajectorySource:
    """MNIST test-set line when the data is available, else a random line in R^784."""
    if source in ("auto", "mnist"):
        try:
            return TrajectorySource("mnist_line", path=str(find_mnist()))
        except FileNotFoundError:
            if source == "mnist":
                raise
            log.warning("MNIST test images not found; using a random line in R^784")
    return TrajectorySource("random_line", dim=784)


def _config(scale: str, traj: TrajectorySource, seed: int, **sweep) -> ExperimentConfig:
    p = PRESETS[scale]
    return ExperimentConfig(width=p["width"], depth=DEPTH, trajectory=traj,
                            segments=p["segments"], replicates=p["replicates"], seed=seed, **sweep)


def _write_meta(outdir: Path, name: str, meta: dict) -> Path:
    path = outdir / f"{name}.json"
    path.write_text(json.dumps(meta, indent=1, default=float))
    return path


def linear_r2(xs, ys) -> float:
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    coef = np.polyfit(xs, ys, 1)
    resid = ys - np.polyval(coef, xs)
    tot = ((ys - ys.mean()) ** 2).sum()
    return float(1.0 - (resid ** 2).sum() / tot) if tot > 0 else 1.0


def fig2(scale, outdir, seed=0, source="auto"):
    cfg = _config(scale, mnist_or_random(source), seed, families=["gaussian"],
                  alphas=FIG2_ALPHAS, scales=[6.0])
    res = run_experiment(cfg)
    plot = Plot("Expected trajectory length, sparse-Gaussian, sigma_w = 6",
                "layer d", "mean length", log_y=True)
    for c in res.cells:
        layers = range(c.depth + 1)
        color = plot.line(layers, c.mean_length, f"alpha={c.alpha:g}", markers=True)
        plot.line(layers, [c.input_length * c.bound_base ** d for d in layers], color=color,
                  dashed=True)
    return _finish("fig2", scale, res, plot, outdir, summary=False)


def _growth_sweep(name, scale, outdir, seed, traj, x_axis):
    if x_axis == "std":
        cfg = _config(scale, traj, seed, families=list(FAMILIES), alphas=[0.5], scales=FIG3_STDS)
        xlabel = "standard deviation of the weight law (before 1/sqrt(k))"
    else:
        cfg = _config(scale, traj, seed, families=list(FAMILIES), alphas=FIG3_ALPHAS, scales=[2.0])
        xlabel = "alpha (fraction of nonzero weights)"
    res = run_experiment(cfg)
    plot = Plot(f"Expected growth factor ({traj.kind})", xlabel, "E[|dz(d+1)| / |dz(d)|]")
    extra = {}
    for fam in FAMILIES:
        cells = [c for c in res.cells if c.family == fam]
        xs = [c.scale if x_axis == "std" else c.alpha for c in cells]
        ys = [c.growth for c in cells]
        color = plot.line(xs, ys, fam, markers=True)
        plot.line(xs, [c.bound_base for c in cells], f"{fam} bound", color=color, dashed=True)
        if x_axis == "std":
            extra[f"r2_{fam}"] = linear_r2(xs, ys)
    return _finish(name, scale, res, plot, outdir, summary=True, extra=extra)


def fig3a(scale, outdir, seed=0, source="auto"):
    return _growth_sweep("fig3a", scale, outdir, seed, mnist_or_random(source), "std")


def fig3b(scale, outdir, seed=0, source="auto"):
    return _growth_sweep("fig3b", scale, outdir, seed, mnist_or_random(source), "alpha")


def fig5(scale, outdir, seed=0, source="auto"):
    paths = []
    for suffix, kind, axis in (("a", "random_line", "std"), ("b", "random_line", "alpha"),
                               ("c", "random_arc", "std"), ("d", "random_arc", "alpha")):
        traj = TrajectorySource(kind, dim=500, planes=100)
        paths += _growth_sweep(f"fig5{suffix}", scale, outdir, seed, traj, axis)
    return paths


def _subvector_rows(name, scale, seed):
    rows = []
    rng = make_rng(seed, 7)
    for k in FIG4_WIDTHS:
        if name == "fig4a":
            u = rng.standard_normal(k)
            u /= np.linalg.norm(u)
        else:
            u = np.zeros(k)
            u[0] = 1.0
        for a in FIG4_ALPHAS:
            if name == "fig4a":
                v, se = subvector_norm_expectation(u, a, "montecarlo",
                                                   PRESETS[scale]["subvector_trials"], rng)
            else:
                v, se = subvector_norm_expectation(u, a, "enumerate")
            rows.append({"k": k, "alpha": a, "value": v, "stderr": se,
                         "lower_alpha": a, "upper_sqrt_alpha": math.sqrt(a)})
    return rows


def fig4(name, scale, outdir, seed=0):
    rows = _subvector_rows(name, scale, seed)
    csv_path = outdir / f"{name}.csv"
    with csv_path.open("w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: format_value(v) for k, v in r.items()})
    what = "uniform on the unit sphere" if name == "fig4a" else "first basis vector"
    plot = Plot(f"E||u_J|| for u {what}", "alpha", "E||u_J||")
    for k in FIG4_WIDTHS:
        sub = [r for r in rows if r["k"] == k]
        plot.line([r["alpha"] for r in sub], [r["value"] for r in sub], f"k={k}", markers=True)
    plot.line(FIG4_ALPHAS, FIG4_ALPHAS, "alpha", color="black", dashed=True)
    plot.line(FIG4_ALPHAS, [math.sqrt(a) for a in FIG4_ALPHAS], "sqrt(alpha)", color="#555555",
              dashed=True)
    svg = plot.save(outdir / f"{name}.svg")
    meta = _write_meta(outdir, name, {"figure": name, "scale": scale, "seed": seed,
                                      "widths": FIG4_WIDTHS,
                                      "trials": None if name == "fig4b"
                                      else PRESETS[scale]["subvector_trials"]})
    return [csv_path, svg, meta]


def _finish(name, scale, res: ExperimentResult, plot: Plot, outdir, summary, extra=None):
    csv_path = export_csv(res, outdir / f"{name}.csv", summary=summary)
    svg = plot.save(outdir / f"{name}.svg")
    meta = {"figure": name, "scale": scale, "preset": PRESETS[scale], "config": res.config,
            "note": "desk scale: reduced width, segments and replicates" if scale == "desk"
            else "full scale", "cells": [asdict(c) for c in res.cells]}
    meta.update(extra or {})
    return [csv_path, svg, _write_meta(outdir, name, meta)]


def reproduce_figure(name: str, scale: str = "desk", outdir=".", seed: int = 0,
                     source: str = "auto") -> list[Path]:
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; expected one of {FIGURES}")
    if scale not in PRESETS:
        raise ValueError(f"unknown scale {scale!r}; expected one of {tuple(PRESETS)}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if name in ("fig4a", "fig4b"):
        return fig4(name, scale, outdir, seed)
    return {"fig2": fig2, "fig3a": fig3a, "fig3b": fig3b, "fig5": fig5}[name](
        scale, outdir, seed, source)
