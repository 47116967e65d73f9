"""QPSK/16QAM hierarchical constellation geometry, mapping and hard slicing.

Each dimension (I and Q) carries one basic bit (the sign) and one secondary
bit (inner or outer amplitude). Per dimension the four amplitudes are::

    b s   KarnaughGray    Balanced (Q only)
    0 0   +(1+lam)d1      +(1-lam)d1
    0 1   +(1-lam)d1      +(1+lam)d1
    1 1   -(1-lam)d1      -(1+lam)d1
    1 0   -(1+lam)d1      -(1-lam)d1

Bit 0 maps to a positive amplitude. Vectorized functions work on "channel
bit" arrays of even length where bit ``2t`` rides on the I component of
symbol ``t`` and bit ``2t+1`` on its Q component.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Mapping(str, enum.Enum):
    KARNAUGH_GRAY = "gray"
    BALANCED = "balanced"


@dataclass(frozen=True)
class HierarchyConfig:
    """Constellation geometry: ``lam`` = d2/d1, ``d1`` = QPSK half-distance."""

    lam: float
    d1: float = 1.0
    mapping: Mapping = Mapping.KARNAUGH_GRAY

    def __post_init__(self):
        if not 0.0 <= self.lam <= 0.5:
            raise ValueError(f"lambda must lie in [0, 1/2], got {self.lam}")
        if not self.d1 > 0.0:
            raise ValueError(f"d1 must be positive, got {self.d1}")
        object.__setattr__(self, "mapping", Mapping(self.mapping))

    @property
    def d2(self) -> float:
        return self.lam * self.d1

    @property
    def carrier_power(self) -> float:
        return 2.0 * (1.0 + self.lam**2) * self.d1**2

    @property
    def inner(self) -> float:
        return (1.0 - self.lam) * self.d1

    @property
    def outer(self) -> float:
        return (1.0 + self.lam) * self.d1


class IqSymbol(NamedTuple):
    i: float
    q: float

    def __complex__(self):
        return complex(self.i, self.q)

    @classmethod
    def from_complex(cls, z: complex) -> "IqSymbol":
        return cls(float(np.real(z)), float(np.imag(z)))


class BitQuad(NamedTuple):
    b_i: int
    b_q: int
    s_i: int
    s_q: int


def _check_bits(bits) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bits must be 0 or 1")
    return arr.astype(np.int8)


def amplitude(basic, secondary, cfg: HierarchyConfig, quadrature=False) -> np.ndarray:
    """Per-dimension amplitude for basic/secondary bit arrays.

    ``quadrature`` selects the Q-dimension rule, which differs from I only
    under the balanced mapping. It may be a boolean array.
    """
    b = _check_bits(basic)
    s = _check_bits(secondary)
    flip = np.asarray(quadrature, dtype=bool) & (cfg.mapping is Mapping.BALANCED)
    is_inner = (s == 1) ^ flip
    sign = 1.0 - 2.0 * b
    return sign * np.where(is_inner, cfg.inner, cfg.outer)


def _quadrature_mask(n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[1::2] = True
    return mask


def modulate(basic_bits, secondary_bits, cfg: HierarchyConfig) -> np.ndarray:
    """Map interleaved (I, Q) channel bit streams onto complex symbols."""
    b = _check_bits(basic_bits)
    s = _check_bits(secondary_bits)
    if b.shape != s.shape or b.ndim != 1 or b.size % 2:
        raise ValueError("basic and secondary streams must be equal, even-length 1-D arrays")
    amp = amplitude(b, s, cfg, _quadrature_mask(b.size))
    return amp[0::2] + 1j * amp[1::2]


def to_dimensions(y) -> np.ndarray:
    """Flatten complex symbols into the interleaved per-dimension amplitudes."""
    y = np.asarray(y, dtype=complex).ravel()
    out = np.empty(2 * y.size)
    out[0::2] = y.real
    out[1::2] = y.imag
    return out


def slice_legacy(y) -> np.ndarray:
    """Sign slicer of a QPSK receiver; amplitude exactly 0 decides bit 0."""
    return (to_dimensions(y) < 0).astype(np.int8)


def slice_hard(y, cfg: HierarchyConfig) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-distance slicer returning (basic_bits, secondary_bits).

    Ties go to the inner amplitude; at lam = 0 the inner and outer points
    coincide, so every decision is "inner".
    """
    r = to_dimensions(y)
    basic = (r < 0).astype(np.int8)
    is_inner = (np.abs(r) <= cfg.d1) | (cfg.lam == 0.0)
    flip = _quadrature_mask(r.size) & (cfg.mapping is Mapping.BALANCED)
    secondary = (is_inner ^ flip).astype(np.int8)
    return basic, secondary


def map_qpsk(b_i: int, b_q: int, cfg: HierarchyConfig) -> IqSymbol:
    b = _check_bits([b_i, b_q])
    amp = cfg.d1 * (1.0 - 2.0 * b)
    return IqSymbol(float(amp[0]), float(amp[1]))


def map_hierarchical(bits: BitQuad, cfg: HierarchyConfig) -> IqSymbol:
    z = modulate([bits.b_i, bits.b_q], [bits.s_i, bits.s_q], cfg)[0]
    return IqSymbol.from_complex(z)


def demap_hard(y: IqSymbol, cfg: HierarchyConfig) -> BitQuad:
    basic, secondary = slice_hard(complex(*y), cfg)
    return BitQuad(int(basic[0]), int(basic[1]), int(secondary[0]), int(secondary[1]))


def demap_legacy(y: IqSymbol) -> tuple[int, int]:
    b = slice_legacy(complex(*y))
    return int(b[0]), int(b[1])


def all_bitquads() -> list[BitQuad]:
    return [BitQuad(*(int(c) for c in f"{k:04b}")) for k in range(16)]
