"""Input trajectories, arc length and per-segment growth measurement."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .network import LayerTrace


@dataclass
class Polyline:
    """n+1 points in R^m, parameter t implicitly uniform on [0, 1]."""
    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 2:
            raise ValueError("a polyline needs at least 2 points of equal dimension")

    @property
    def segments(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def segment_norms(points) -> np.ndarray:
    return np.linalg.norm(np.diff(np.asarray(points, dtype=float), axis=0), axis=1)


def arc_length(p) -> float:
    pts = p.points if isinstance(p, Polyline) else p
    return math.fsum(segment_norms(pts))


def line_trajectory(x0, x1, segments: int) -> Polyline:
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if segments < 1:
        raise ValueError("segments must be >= 1")
    if np.array_equal(x0, x1):
        raise ValueError("endpoints must differ")
    t = np.linspace(0.0, 1.0, segments + 1)[:, None]
    pts = (1.0 - t) * x0 + t * x1
    pts[-1] = x1
    return Polyline(pts)


def arc_trajectory(x0, x1, segments: int, planes: int, rng: np.random.Generator) -> Polyline:
    """Chord x0 -> x1 bent into a semicircle in each of ``planes`` random planes.

    Each plane is spanned by the chord and a random unit direction orthogonal
    to it (and to the other directions). Along the chord the parameter stays
    linear; in each plane the offset is ||chord|| * sqrt(t (1 - t)), which puts
    the planar projection exactly on the circle with the chord as diameter.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if x0.size < 2:
        raise ValueError("arc trajectories need dimension >= 2")
    if planes == 0:
        return line_trajectory(x0, x1, segments)
    if planes < 0 or planes > x0.size - 1:
        raise ValueError(f"planes must lie in [0, {x0.size - 1}] for dimension {x0.size}")
    line = line_trajectory(x0, x1, segments)
    chord = x1 - x0
    length = np.linalg.norm(chord)
    basis = np.column_stack([chord, rng.standard_normal((x0.size, planes))])
    q, _ = np.linalg.qr(basis)
    directions = q[:, 1:planes + 1]
    t = np.linspace(0.0, 1.0, segments + 1)
    bump = length * np.sqrt(np.clip(t * (1.0 - t), 0.0, None))
    pts = line.points + bump[:, None] * directions.sum(axis=1)[None, :]
    pts[0], pts[-1] = x0, x1
    return Polyline(pts)


def random_endpoints(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two independent points uniform on the unit sphere in R^dim."""
    x = rng.standard_normal((2, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[0], x[1]


@dataclass
class GrowthProfile:
    """Per-layer lengths (index 0 is the input) and mean segment ratios (index d-1 for layer d)."""
    lengths: list[float]
    mean_ratio: list[float]
    dead_fraction: list[float]
    pre_lengths: list[float] = field(default_factory=list)
    ratio_sum: list[float] = field(default_factory=list)
    ratio_count: list[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.mean_ratio)

    def pooled_ratio(self) -> float:
        """Mean ratio over all surviving segments of all layers, equally weighted."""
        n = sum(self.ratio_count)
        return math.fsum(self.ratio_sum) / n if n else 0.0


class GrowthAccumulator:
    """Builds a GrowthProfile one layer at a time, without keeping the trace."""

    def __init__(self, input_points):
        self._prev = segment_norms(input_points)
        self.profile = GrowthProfile([math.fsum(self._prev)], [], [])

    def add(self, pre, post):
        prof = self.profile
        cur = segment_norms(post)
        live = self._prev > 0
        n_live = int(live.sum())
        s = math.fsum(cur[live] / self._prev[live]) if n_live else 0.0
        prof.ratio_sum.append(s)
        prof.ratio_count.append(n_live)
        prof.mean_ratio.append(s / n_live if n_live else 0.0)
        prof.dead_fraction.append(1.0 - n_live / live.size)
        prof.lengths.append(math.fsum(cur))
        prof.pre_lengths.append(math.fsum(segment_norms(pre)))
        self._prev = cur


def growth_profile(trace: LayerTrace, input: Polyline) -> GrowthProfile:
    """Per-layer lengths and mean segment growth ratios on post-activation polylines.

    Segments of zero length in the previous layer are left out of that
    layer's ratio mean and reported in ``dead_fraction`` instead.
    """
    acc = GrowthAccumulator(input.points)
    for h, z in zip(trace.pre, trace.post):
        if h.shape[0] != len(input):
            raise ValueError("trace point count does not match the input polyline")
        acc.add(h, z)
    return acc.profile
