"""Random sparse feedforward ReLU networks and pointwise propagation."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .distributions import DistributionSpec, make_rng, sample_matrix, sample


@dataclass(frozen=True)
class NetworkConfig:
    width: int
    depth: int
    weight_spec: DistributionSpec
    bias_spec: DistributionSpec
    input_dim: int | None = None

    def __post_init__(self):
        if self.input_dim is None:
            object.__setattr__(self, "input_dim", self.width)
        if self.width < 1 or self.depth < 1 or self.input_dim < 1:
            raise ValueError("width, depth and input_dim must all be >= 1")
        if self.bias_spec.alpha != 1.0:
            raise ValueError("biases are never sparsified; bias_spec.alpha must be 1")

    def to_dict(self) -> dict:
        return {"width": self.width, "depth": self.depth, "input_dim": self.input_dim,
                "weight_spec": self.weight_spec.to_dict(), "bias_spec": self.bias_spec.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        return cls(width=int(d["width"]), depth=int(d["depth"]),
                   weight_spec=DistributionSpec.from_dict(d["weight_spec"]),
                   bias_spec=DistributionSpec.from_dict(d["bias_spec"]),
                   input_dim=d.get("input_dim"))


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    config: NetworkConfig | None = None
    seed: int | None = None
    stream: int | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias vector per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} disagree")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f"layer {i} fan-in {w.shape[1]} != previous width "
                                 f"{self.weights[i - 1].shape[0]}")

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    def scaled(self, c: float) -> "Network":
        """Copy with every weight multiplied by ``c`` (biases untouched)."""
        return Network([c * w for w in self.weights], [b.copy() for b in self.biases],
                       self.config, self.seed, self.stream)


@dataclass
class LayerTrace:
    """Pre- and post-activation images of a point set, one entry per layer."""
    pre: list[np.ndarray] = field(default_factory=list)
    post: list[np.ndarray] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.post)


def build_network(config: NetworkConfig, seed: int, stream: int = 0) -> Network:
    rng = make_rng(seed, stream)
    weights, biases = [], []
    fan_in = config.input_dim
    for _ in range(config.depth):
        weights.append(sample_matrix(config.weight_spec, config.width, fan_in, rng))
        biases.append(sample(config.bias_spec, config.width, rng))
        fan_in = config.width
    return Network(weights, biases, config, seed, stream)


def relu(x):
    return np.maximum(x, 0.0)


def iter_layers(net: Network, points) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (pre, post) activations layer by layer for an (n, input_dim) point array."""
    z = np.asarray(points, dtype=float)
    if z.ndim != 2 or z.shape[1] != net.input_dim:
        raise ValueError(f"points must have shape (n, {net.input_dim}), got {z.shape}")
    for w, b in zip(net.weights, net.biases):
        h = z @ w.T + b
        z = relu(h)
        yield h, z


def forward_trace(net: Network, points) -> LayerTrace:
    trace = LayerTrace()
    for h, z in iter_layers(net, points):
        trace.pre.append(h)
        trace.post.append(z)
    return trace


def active_set(pre_activation) -> np.ndarray:
    """Indices of strictly positive entries; h == 0 counts as inactive."""
    return np.flatnonzero(np.asarray(pre_activation) > 0)


def sparsity_fraction(net: Network) -> float:
    zeros = sum(int(np.count_nonzero(w == 0)) for w in net.weights)
    total = sum(w.size for w in net.weights)
    return zeros / total


# binary dump: magic, version, depth, seed, stream, then per layer (rows, cols,
# weights row-major, biases); all little-endian, floats as f64
_MAGIC = b"TGNET\x00"
_VERSION = 1


def save_network(net: Network, path) -> None:
    path = Path(path)
    with path.open("wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<IIqq", _VERSION, net.depth,
                            -1 if net.seed is None else net.seed,
                            -1 if net.stream is None else net.stream))
        for w, b in zip(net.weights, net.biases):
            f.write(struct.pack("<II", *w.shape))
            f.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_network(path) -> Network:
    data = Path(path).read_bytes()
    if not data.startswith(_MAGIC):
        raise ValueError(f"{path}: not a network dump")
    off = len(_MAGIC)
    version, depth, seed, stream = struct.unpack_from("<IIqq", data, off)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported dump version {version}")
    off += struct.calcsize("<IIqq")
    weights, biases = [], []
    for _ in range(depth):
        rows, cols = struct.unpack_from("<II", data, off)
        off += 8
        w = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=off).reshape(rows, cols)
        off += 8 * rows * cols
        b = np.frombuffer(data, dtype="<f8", count=rows, offset=off)
        off += 8 * rows
        weights.append(w.astype(float))
        biases.append(b.astype(float))
    return Network(weights, biases, None,
                   None if seed < 0 else seed, None if stream < 0 else stream)
