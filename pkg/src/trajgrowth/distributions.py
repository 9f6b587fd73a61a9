"""Weight and bias laws for random sparse ReLU networks.

A law is a dense *family* (gaussian, uniform or a finite symmetric discrete
set) mixed with a point mass at zero: with probability ``alpha`` an entry is
drawn from the family, otherwise it is exactly 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

FAMILIES = ("gaussian", "uniform", "discrete")

# rows per Monte Carlo chunk; fixed so results never depend on memory settings
_CHUNK = 1 << 18
_MAX_ENUMERATION = 10**6


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    Philox takes a 128-bit key, so the seed occupies the low word and the
    stream id the high word. Two generators with the same key produce the
    same sequence regardless of which thread or process owns them.
    """
    if not (0 <= seed < 2**64 and 0 <= stream < 2**64):
        raise ValueError("seed and stream must be unsigned 64-bit integers")
    return np.random.Generator(np.random.Philox(key=seed | (stream << 64)))


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    scale: float = 1.0
    values: tuple[float, ...] = field(default=())
    alpha: float = 1.0
    scale_by_inv_sqrt_k: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.family == "discrete":
            vals = tuple(sorted({float(v) for v in self.values}))
            if not vals:
                raise ValueError("discrete value set must be nonempty")
            if vals != tuple(sorted(-v for v in vals)):
                raise ValueError(f"discrete value set must be symmetric, got {vals}")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "scale", 1.0)
        else:
            if not self.scale > 0:
                raise ValueError(f"{self.family} scale must be positive, got {self.scale}")
            object.__setattr__(self, "values", ())

    @property
    def n_values(self) -> int:
        return len(self.values)

    def dense(self) -> "DistributionSpec":
        return replace(self, alpha=1.0)

    def with_alpha(self, alpha: float) -> "DistributionSpec":
        return replace(self, alpha=alpha)

    def scaled(self, factor: float) -> "DistributionSpec":
        """Same law with every family draw multiplied by ``factor > 0``."""
        if self.family == "discrete":
            return replace(self, values=tuple(v * factor for v in self.values))
        return replace(self, scale=self.scale * factor)

    @property
    def scale_param(self) -> float:
        """sigma, half-width C, or max |w| for the discrete set."""
        if self.family == "discrete":
            return max(abs(v) for v in self.values)
        return self.scale

    def to_dict(self) -> dict:
        d = {"family": self.family, "alpha": self.alpha,
             "scale_by_inv_sqrt_k": self.scale_by_inv_sqrt_k}
        if self.family == "discrete":
            d["values"] = list(self.values)
        else:
            d["scale"] = self.scale
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        return cls(family=d["family"], scale=float(d.get("scale", 1.0)),
                   values=tuple(d.get("values", ())), alpha=float(d.get("alpha", 1.0)),
                   scale_by_inv_sqrt_k=bool(d.get("scale_by_inv_sqrt_k", False)))


def gaussian(sigma: float, alpha: float = 1.0, scale_by_inv_sqrt_k: bool = False) -> DistributionSpec:
    return DistributionSpec("gaussian", scale=sigma, alpha=alpha,
                            scale_by_inv_sqrt_k=scale_by_inv_sqrt_k)


def uniform(c: float, alpha: float = 1.0, scale_by_inv_sqrt_k: bool = False) -> DistributionSpec:
    return DistributionSpec("uniform", scale=c, alpha=alpha,
                            scale_by_inv_sqrt_k=scale_by_inv_sqrt_k)


def discrete(values: Sequence[float], alpha: float = 1.0,
             scale_by_inv_sqrt_k: bool = False) -> DistributionSpec:
    return DistributionSpec("discrete", values=tuple(values), alpha=alpha,
                            scale_by_inv_sqrt_k=scale_by_inv_sqrt_k)


def integer_grid(c: int, include_zero: bool = True) -> tuple[float, ...]:
    """The set {-c, ..., c}, optionally without 0."""
    if c < 1:
        raise ValueError("grid radius must be >= 1")
    return tuple(float(v) for v in range(-c, c + 1) if include_zero or v != 0)


def family_std(spec: DistributionSpec) -> float:
    if spec.family == "gaussian":
        return spec.scale
    if spec.family == "uniform":
        return spec.scale / math.sqrt(3.0)
    return math.sqrt(sum(v * v for v in spec.values) / spec.n_values)


def std_dev(spec: DistributionSpec) -> float:
    """Standard deviation of the sparse mixture (before any 1/sqrt(k) scaling)."""
    return math.sqrt(spec.alpha) * family_std(spec)


def with_family_std(family: str, std: float, alpha: float = 1.0,
                    scale_by_inv_sqrt_k: bool = False, grid: int = 2,
                    include_zero: bool = True) -> DistributionSpec:
    """Build a law of the given family whose dense part has standard deviation ``std``.

    Discrete laws use the integer grid {-grid, ..., grid} rescaled to hit ``std``.
    """
    if family == "gaussian":
        return gaussian(std, alpha, scale_by_inv_sqrt_k)
    if family == "uniform":
        return uniform(std * math.sqrt(3.0), alpha, scale_by_inv_sqrt_k)
    if family == "discrete":
        base = discrete(integer_grid(grid, include_zero), alpha, scale_by_inv_sqrt_k)
        return base.scaled(std / family_std(base))
    raise ValueError(f"unknown family {family!r}")


def _family_draws(spec: DistributionSpec, size, rng: np.random.Generator, factor: float):
    if spec.family == "gaussian":
        return rng.normal(0.0, spec.scale * factor, size=size)
    if spec.family == "uniform":
        c = spec.scale * factor
        return rng.uniform(-c, c, size=size)
    vals = np.asarray(spec.values) * factor
    return vals[rng.integers(0, len(vals), size=size)]


def sample(spec: DistributionSpec, size, rng: np.random.Generator, factor: float = 1.0):
    """Draw iid entries from the sparse mixture, family scale multiplied by ``factor``."""
    if spec.alpha == 0.0:
        return np.zeros(size)
    draws = _family_draws(spec, size, rng, factor)
    if spec.alpha < 1.0:
        keep = rng.random(size=size) < spec.alpha
        draws = np.where(keep, draws, 0.0)
    return draws


def sample_scalar(spec: DistributionSpec, rng: np.random.Generator) -> float:
    return float(sample(spec, 1, rng)[0])


def sample_matrix(spec: DistributionSpec, rows: int, cols: int, rng: np.random.Generator):
    """rows x cols matrix of iid draws; fan-in scaling by 1/sqrt(cols) if the spec asks for it."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be >= 1")
    factor = 1.0 / math.sqrt(cols) if spec.scale_by_inv_sqrt_k else 1.0
    return sample(spec, (rows, cols), rng, factor)


def m_constant(spec: DistributionSpec) -> float:
    """Constant M with E|u.w| >= M ||u|| for w iid from the dense family.

    Closed form for the gaussian (where it is tight); the p=1
    Marcinkiewicz-Zygmund route for uniform and discrete families.
    Uses the unscaled family parameter.
    """
    if spec.family == "gaussian":
        return math.sqrt(2.0) * spec.scale / math.sqrt(math.pi)
    if spec.family == "uniform":
        return spec.scale / (2.0 * math.sqrt(2.0))
    return sum(abs(v) for v in spec.values) / (math.sqrt(2.0) * spec.n_values)


def _gamma_gap(p: float) -> float:
    return math.gamma((p + 1.0) / 2.0) - math.sqrt(math.pi) / 2.0


@lru_cache(maxsize=None)
def mz_p0(tol: float = 1e-12) -> float:
    """Root of Gamma((p+1)/2) = sqrt(pi)/2 inside (1, 2).

    p = 2 is also a root, so the bracket stops short of it at 1.9 where the
    gap is already negative.
    """
    lo, hi = 1.0, 1.9
    if not (_gamma_gap(lo) > 0 > _gamma_gap(hi)):
        raise RuntimeError("bracket does not isolate the root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _gamma_gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mz_gamma_branch(p: float) -> float:
    return 2.0 ** (p / 2.0) * math.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def mz_constant_A(p: float) -> float:
    """Optimal lower Marcinkiewicz-Zygmund constant."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if p <= mz_p0():
        return 2.0 ** (p / 2.0 - 1.0)
    if p < 2.0:
        return _mz_gamma_branch(p)
    return 1.0


def mz_constant_B(p: float) -> float:
    """Optimal upper Marcinkiewicz-Zygmund constant."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if p <= 2.0:
        return 1.0
    return _mz_gamma_branch(p)


def enumerate_support(values: Sequence[float], dim: int) -> np.ndarray:
    """All len(values)**dim vectors with entries from ``values``, one per row."""
    vals = np.asarray(values, dtype=float)
    grids = np.meshgrid(*([vals] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def abs_dot_expectation_oracle(spec: DistributionSpec, u, trials: int,
                               rng: np.random.Generator) -> tuple[float, float]:
    """Estimate E|u.w| for w iid from the dense family; returns (mean, stderr).

    Small discrete supports are summed exactly (stderr 0).
    """
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise ValueError("u must be nonzero")
    dense = spec.dense()
    dim = u.size
    if dense.family == "discrete" and dense.n_values ** dim <= _MAX_ENUMERATION:
        support = enumerate_support(dense.values, dim)
        return float(np.mean(np.abs(support @ u))), 0.0
    if trials < 1000:
        raise ValueError("Monte Carlo estimate needs at least 1000 trials")
    total = total_sq = 0.0
    done = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        x = np.abs(sample(dense, (n, dim), rng) @ u)
        total += x.sum()
        total_sq += (x * x).sum()
        done += n
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
    return mean, math.sqrt(var / trials)
