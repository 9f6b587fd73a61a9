"""Replicated trajectory-growth experiments over sweeps of weight laws."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml
from scipy import stats

from .bounds import base_for_spec
from .distributions import (
    FAMILIES,
    DistributionSpec,
    discrete,
    gaussian,
    make_rng,
    std_dev,
    uniform,
    with_family_std,
)
from .idx import find_mnist, load_idx, mnist_point
from .network import NetworkConfig, build_network, iter_layers
from .trajectory import GrowthAccumulator, GrowthProfile, Polyline, arc_trajectory, \
    line_trajectory, random_endpoints

CONFIG_VERSION = 1
# stream reserved for the input trajectory; replicates use streams 0..R-1
TRAJECTORY_STREAM = 2**64 - 1

CSV_COLUMNS = [
    "family", "alpha", "scale_param", "mixture_std", "k", "depth_layer", "mean_length",
    "std_length", "mean_growth", "stderr_growth", "bound_base", "dead_segment_fraction",
    "replicates", "segments", "seed", "mean_length_normalized",
]


def default_bias(family: str, scale: float = 0.01) -> DistributionSpec:
    if family == "gaussian":
        return gaussian(scale)
    if family == "uniform":
        return uniform(scale)
    return discrete([-scale, scale])


@dataclass
class TrajectorySource:
    kind: str = "random_line"  # mnist_line | random_line | random_arc
    dim: int = 784
    planes: int = 100
    path: str | None = None
    i: int = 100
    j: int = 1000

    def __post_init__(self):
        if self.kind not in ("mnist_line", "random_line", "random_arc"):
            raise ValueError(f"unknown trajectory source {self.kind!r}")

    def build(self, segments: int, seed: int) -> Polyline:
        if self.kind == "mnist_line":
            data = load_idx(self.path or find_mnist())
            return line_trajectory(mnist_point(data, self.i), mnist_point(data, self.j), segments)
        rng = make_rng(seed, TRAJECTORY_STREAM)
        x0, x1 = random_endpoints(self.dim, rng)
        if self.kind == "random_line":
            return line_trajectory(x0, x1, segments)
        return arc_trajectory(x0, x1, segments, self.planes, rng)


@dataclass
class ExperimentConfig:
    width: int = 784
    depth: int = 8
    families: list[str] = field(default_factory=lambda: ["gaussian"])
    alphas: list[float] = field(default_factory=lambda: [1.0])
    scales: list[float] = field(default_factory=lambda: [2.0])
    trajectory: TrajectorySource = field(default_factory=TrajectorySource)
    segments: int = 10000
    replicates: int = 100
    seed: int = 0
    scale_by_inv_sqrt_k: bool = True
    bias_scale: float = 0.01
    discrete_grid: int = 2
    discrete_zero: bool = True
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.trajectory, dict):
            self.trajectory = TrajectorySource(**self.trajectory)
        if not (self.families and self.alphas and self.scales):
            raise ValueError("sweep axes must be nonempty")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValueError(f"unknown family {fam!r}")
        if self.replicates < 1 or self.segments < 1:
            raise ValueError("replicates and segments must be >= 1")

    def cells(self):
        return list(itertools.product(self.families, self.alphas, self.scales))

    def weight_spec(self, family: str, alpha: float, scale: float) -> DistributionSpec:
        """``scale`` is the dense family's standard deviation before 1/sqrt(k) scaling."""
        return with_family_std(family, scale, alpha, self.scale_by_inv_sqrt_k,
                               self.discrete_grid, self.discrete_zero)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["version"] = CONFIG_VERSION
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        version = d.pop("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {version}")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(yaml.safe_load(f) or {})


@dataclass
class CellResult:
    family: str
    alpha: float
    scale: float
    scale_param: float
    mixture_std: float
    k: int
    depth: int
    replicates: int
    segments: int
    seed: int
    bound_base: float
    input_length: float
    mean_length: list[float]
    std_length: list[float]
    mean_pre_length: list[float]
    layer_growth: list[float]
    layer_growth_stderr: list[float]
    layer_dead_fraction: list[float]
    growth: float
    growth_stderr: float
    dead_fraction: float
    log_slope: float
    log_slope_stderr: float


@dataclass
class ExperimentResult:
    cells: list[CellResult]
    config: dict
    seed: int

    def cell(self, family: str, alpha: float, scale: float) -> CellResult:
        for c in self.cells:
            if c.family == family and math.isclose(c.alpha, alpha) and math.isclose(c.scale, scale):
                return c
        raise KeyError((family, alpha, scale))

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "seed": self.seed,
                           "cells": [asdict(c) for c in self.cells]}, indent=1)


def _std(x) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def run_replicate(config: NetworkConfig, points, seed: int, stream: int) -> GrowthProfile:
    net = build_network(config, seed, stream)
    acc = GrowthAccumulator(points)
    for h, z in iter_layers(net, points):
        acc.add(h, z)
    return acc.profile


def summarize_cell(profiles: list[GrowthProfile], spec: DistributionSpec, cfg: ExperimentConfig,
                   family: str, alpha: float, scale: float, k: int) -> CellResult:
    R = len(profiles)
    lengths = np.array([p.lengths for p in profiles])
    pre = np.array([p.pre_lengths for p in profiles])
    sums = np.array([p.ratio_sum for p in profiles])
    counts = np.array([p.ratio_count for p in profiles])
    per_rep_layer = np.array([p.mean_ratio for p in profiles])
    per_rep_pooled = np.array([p.pooled_ratio() for p in profiles])
    total = counts.sum()
    layer_counts = counts.sum(axis=0)
    layer_growth = np.divide(sums.sum(axis=0), layer_counts,
                             out=np.zeros(cfg.depth), where=layer_counts > 0)
    dead = np.array([p.dead_fraction for p in profiles])
    mean_len = lengths.mean(axis=0)
    slope, slope_se = _log_slope(mean_len)
    return CellResult(
        family=family, alpha=alpha, scale=scale, scale_param=spec.scale_param,
        mixture_std=std_dev(spec), k=k, depth=cfg.depth, replicates=R, segments=cfg.segments,
        seed=cfg.seed, bound_base=base_for_spec(spec, k).base,
        input_length=float(lengths[0, 0]),
        mean_length=mean_len.tolist(),
        std_length=[_std(lengths[:, d]) for d in range(lengths.shape[1])],
        mean_pre_length=pre.mean(axis=0).tolist(),
        layer_growth=layer_growth.tolist(),
        layer_growth_stderr=[_std(per_rep_layer[:, d]) / math.sqrt(R) for d in range(cfg.depth)],
        layer_dead_fraction=dead.mean(axis=0).tolist(),
        growth=float(sums.sum() / total) if total else 0.0,
        growth_stderr=_std(per_rep_pooled) / math.sqrt(R),
        dead_fraction=float(dead.mean()),
        log_slope=slope, log_slope_stderr=slope_se,
    )


def _log_slope(mean_length) -> tuple[float, float]:
    """Least-squares slope of log(mean length) against layer index, with its stderr."""
    y = np.asarray(mean_length)
    if np.any(y <= 0) or y.size < 3:
        return float("nan"), float("nan")
    fit = stats.linregress(np.arange(y.size), np.log(y))
    return float(fit.slope), float(fit.stderr)


def run_experiment(cfg: ExperimentConfig, input_polyline: Polyline | None = None) -> ExperimentResult:
    poly = input_polyline if input_polyline is not None else cfg.trajectory.build(cfg.segments, cfg.seed)
    points = poly.points
    cells = []
    for family, alpha, scale in cfg.cells():
        spec = cfg.weight_spec(family, alpha, scale)
        net_cfg = NetworkConfig(cfg.width, cfg.depth, spec,
                                default_bias(family, cfg.bias_scale), input_dim=poly.dim)

        def one(r, net_cfg=net_cfg):
            return run_replicate(net_cfg, points, cfg.seed, r)

        if cfg.workers > 1:
            with ThreadPoolExecutor(cfg.workers) as pool:
                profiles = list(pool.map(one, range(cfg.replicates)))
        else:
            profiles = [one(r) for r in range(cfg.replicates)]
        cells.append(summarize_cell(profiles, spec, cfg, family, alpha, scale, cfg.width))
    echo = cfg.to_dict()
    echo["segments"] = poly.segments
    return ExperimentResult(cells, echo, cfg.seed)


def format_value(x) -> str:
    # repr round-trips every float exactly
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def csv_rows(result: ExperimentResult, summary: bool = False):
    for c in result.cells:
        common = {"family": c.family, "alpha": c.alpha, "scale_param": c.scale_param,
                  "mixture_std": c.mixture_std, "k": c.k, "bound_base": c.bound_base,
                  "replicates": c.replicates, "segments": c.segments, "seed": c.seed}
        if summary:
            yield {**common, "depth_layer": "all", "mean_length": c.mean_length[-1],
                   "std_length": c.std_length[-1], "mean_growth": c.growth,
                   "stderr_growth": c.growth_stderr, "dead_segment_fraction": c.dead_fraction,
                   "mean_length_normalized": c.mean_length[-1] / c.input_length}
            continue
        for d in range(c.depth + 1):
            yield {**common, "depth_layer": d, "mean_length": c.mean_length[d],
                   "std_length": c.std_length[d],
                   "mean_growth": c.layer_growth[d - 1] if d else float("nan"),
                   "stderr_growth": c.layer_growth_stderr[d - 1] if d else float("nan"),
                   "dead_segment_fraction": c.layer_dead_fraction[d - 1] if d else 0.0,
                   "mean_length_normalized": c.mean_length[d] / c.input_length}


def to_csv(result: ExperimentResult, summary: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in csv_rows(result, summary):
        w.writerow([format_value(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def export_csv(result: ExperimentResult, path, summary: bool = False) -> Path:
    path = Path(path)
    try:
        path.write_text(to_csv(result, summary))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> list[dict]:
    """Parse a CSV written by :func:`export_csv`, converting numeric fields back."""
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            parsed = {}
            for k, v in row.items():
                if k == "family" or (k == "depth_layer" and v == "all"):
                    parsed[k] = v
                elif k in ("k", "depth_layer", "replicates", "segments", "seed"):
                    parsed[k] = int(v)
                else:
                    parsed[k] = float(v)
            out.append(parsed)
    return out
