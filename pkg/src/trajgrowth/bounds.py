"""Closed-form lower-bound bases for expected trajectory growth.

Each function returns the per-layer multiplicative factor; the expected
length after d layers is at least base**d times the input length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .distributions import DistributionSpec, m_constant

PROVENANCES = ("general", "gaussian", "uniform", "discrete", "prior_dense")


@dataclass(frozen=True)
class BoundBase:
    base: float
    provenance: str = "general"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not self.base >= 0:
            raise ValueError(f"bound base must be >= 0, got {self.base}")

    def __float__(self):
        return self.base


def _check(alpha, k):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if k < 1:
        raise ValueError(f"width must be >= 1, got {k}")


def base_general(alpha: float, m: float, k: int) -> BoundBase:
    _check(alpha, k)
    if m < 0:
        raise ValueError(f"M must be >= 0, got {m}")
    return BoundBase(alpha * m * math.sqrt(k) / 2.0, "general")


def base_gaussian(alpha: float, sigma_w: float, k: int) -> BoundBase:
    """Pass sigma_w / sqrt(k) to get the width-independent form for 1/sqrt(k)-scaled weights."""
    _check(alpha, k)
    if not sigma_w > 0:
        raise ValueError(f"sigma_w must be positive, got {sigma_w}")
    return BoundBase(alpha * sigma_w * math.sqrt(k) / math.sqrt(2.0 * math.pi), "gaussian")


def base_uniform(alpha: float, c_w: float, k: int) -> BoundBase:
    _check(alpha, k)
    if not c_w > 0:
        raise ValueError(f"c_w must be positive, got {c_w}")
    return BoundBase(alpha * c_w * math.sqrt(k) / (4.0 * math.sqrt(2.0)), "uniform")


def base_discrete(alpha: float, values: Sequence[float], k: int) -> BoundBase:
    _check(alpha, k)
    vals = sorted(set(float(v) for v in values))
    if not vals:
        raise ValueError("discrete value set must be nonempty")
    if vals != sorted(-v for v in vals):
        raise ValueError("discrete value set must be symmetric")
    mean_abs = math.fsum(abs(v) for v in vals) / len(vals)
    return BoundBase(alpha * math.sqrt(k) / (2.0 * math.sqrt(2.0)) * mean_abs, "discrete")


def base_prior_dense(sigma_w: float, k: int) -> BoundBase:
    """sigma_w sqrt(k) / sqrt(k + 1): order of magnitude only, the hidden constant is unknown."""
    if not sigma_w > 0 or k < 1:
        raise ValueError("need sigma_w > 0 and k >= 1")
    return BoundBase(sigma_w * math.sqrt(k) / math.sqrt(k + 1.0), "prior_dense")


def base_for_spec(spec: DistributionSpec, k: int) -> BoundBase:
    """Family-specific base for a weight law, honouring its 1/sqrt(k) scaling flag."""
    factor = 1.0 / math.sqrt(k) if spec.scale_by_inv_sqrt_k else 1.0
    if spec.family == "gaussian":
        return base_gaussian(spec.alpha, spec.scale * factor, k)
    if spec.family == "uniform":
        return base_uniform(spec.alpha, spec.scale * factor, k)
    return base_discrete(spec.alpha, [v * factor for v in spec.values], k)


def base_general_for_spec(spec: DistributionSpec, k: int) -> BoundBase:
    factor = 1.0 / math.sqrt(k) if spec.scale_by_inv_sqrt_k else 1.0
    return base_general(spec.alpha, m_constant(spec.dense().scaled(factor)), k)


def bound_length(bases: Iterable[BoundBase | float], input_length: float) -> float:
    """Lower bound on expected length after the given layers (layer-varying product)."""
    if input_length < 0:
        raise ValueError("input length must be >= 0")
    out = input_length
    for b in bases:
        out *= float(b)
    return out
