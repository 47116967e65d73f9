"""AWGN channel calibrated to a carrier-to-noise ratio, plus seeded RNG streams.

Random streams use numpy's PCG64 seeded through ``SeedSequence(seed,
spawn_key=key)``. Keys such as ``(point_index, frame_index)`` give every
frame its own stream, so parallel runs reproduce regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import HierarchyConfig


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ChannelSpec:
    cnr_db: float
    carrier_power: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.cnr_db):
            raise ValueError(f"cnr_db must be finite, got {self.cnr_db}")
        if not self.carrier_power > 0:
            raise ValueError("carrier power must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def for_config(cls, cfg: HierarchyConfig, cnr_db: float, seed: int = 0) -> "ChannelSpec":
        return cls(cnr_db, cfg.carrier_power, seed)

    @property
    def noise_power_n0(self) -> float:
        return self.carrier_power / db_to_linear(self.cnr_db)


def noise_sigma(spec: ChannelSpec) -> float:
    """Per-dimension noise standard deviation sqrt(N0/2)."""
    return math.sqrt(spec.noise_power_n0 / 2.0)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def transmit(x, spec: ChannelSpec, rng: np.random.Generator) -> np.ndarray:
    """Add complex Gaussian noise with variance N0/2 per dimension."""
    x = np.asarray(x, dtype=complex)
    sigma = noise_sigma(spec)
    noise = rng.standard_normal((2,) + x.shape)
    return x + sigma * (noise[0] + 1j * noise[1])
