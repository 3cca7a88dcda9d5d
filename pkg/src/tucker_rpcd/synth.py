"""Seeded synthetic tensors with known multilinear rank.

Randomness comes from numpy's PCG64 generator. ``SeedSequence(seed)``
is spawned into independent child streams: child 0 draws the core,
children ``1..d`` draw the factors, child ``d + 1`` draws the noise.
Normal variates use numpy's ziggurat sampler (``standard_normal``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import qf
from .tensor import DenseTensor, _mode_product_array


@dataclass(frozen=True)
class SynthSpec:
    dims: Sequence[int]
    ranks: Sequence[int]
    kind: str = "lowrank"
    noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if len(self.dims) == 0 or len(self.dims) != len(self.ranks):
            raise ValueError("dims and ranks must be nonempty and of equal length")
        if any(r < 1 or r > n for n, r in zip(self.dims, self.ranks)):
            raise ValueError(f"ranks {self.ranks} must satisfy 1 <= r <= n for dims {self.dims}")
        if self.kind not in ("lowrank", "noisy"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.noise >= 0:
            raise ValueError("noise must be nonnegative")


def _streams(spec: SynthSpec) -> list[np.random.Generator]:
    children = np.random.SeedSequence(spec.seed).spawn(len(spec.dims) + 2)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _lowrank(spec: SynthSpec, streams) -> np.ndarray:
    arr = streams[0].standard_normal(spec.ranks)
    for i, (n, r) in enumerate(zip(spec.dims, spec.ranks)):
        u = qf(streams[i + 1].standard_normal((n, r)))[0]
        arr = _mode_product_array(arr, u, i)
    return arr


def gen_lowrank(spec: SynthSpec) -> DenseTensor:
    """``C x_1 U_1 ... x_d U_d`` with a standard normal core and random orthonormal factors."""
    return DenseTensor(_lowrank(spec, _streams(spec)), copy=False)


def gen_noisy(spec: SynthSpec) -> DenseTensor:
    """``L / ||L|| + noise * N / ||N||`` with ``L`` low rank and ``N`` standard normal."""
    streams = _streams(spec)
    low = _lowrank(spec, streams)
    out = low / np.linalg.norm(low)
    if spec.noise == 0:
        return DenseTensor(out, copy=False)
    for _ in range(2):
        noise = streams[-1].standard_normal(spec.dims)
        nn = np.linalg.norm(noise)
        if nn > 0:
            return DenseTensor(out + spec.noise * (noise / nn), copy=False)
    raise ArithmeticError("noise draw has zero norm")


def generate(spec: SynthSpec) -> DenseTensor:
    return gen_lowrank(spec) if spec.kind == "lowrank" else gen_noisy(spec)
