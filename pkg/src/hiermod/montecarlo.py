"""Seeded end-to-end link simulation with error statistics.

Frame ``f`` of operating point ``p`` draws all of its randomness from
``make_rng(seed, p, f)``, and every statistic is an integer counter, so
results are bit-identical for any partition of frames over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from .analytic import OperatingPoint, default_repetition
from .channel import ChannelSpec, make_rng, noise_sigma, transmit
from .coding import CODE_K7, ConvCode, FrameLayout, SecondaryCode
from .constellation import HierarchyConfig, Mapping, modulate, slice_hard
from .receiver import IterationSchedule, decode_hierarchical, decode_legacy

Z95 = 1.96
MIN_ERRORS = 100


@dataclass
class ErrorCount:
    bits: int = 0
    errors: int = 0
    frames: int = 0
    sq_errors: int = 0  # sum over frames of (frame errors)^2

    def add_frame(self, bits: int, errors: int):
        self.bits += int(bits)
        self.errors += int(errors)
        self.frames += 1
        self.sq_errors += int(errors) ** 2

    def __add__(self, other: "ErrorCount") -> "ErrorCount":
        return ErrorCount(self.bits + other.bits, self.errors + other.errors,
                          self.frames + other.frames, self.sq_errors + other.sq_errors)

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else math.nan

    @property
    def ci_halfwidth(self) -> float:
        """95% normal-approximation binomial half-width."""
        if not self.bits:
            return math.nan
        p = self.ber
        return Z95 * math.sqrt(p * (1.0 - p) / self.bits)

    @property
    def frame_ci_halfwidth(self) -> float:
        """95% half-width of the frame-averaged BER from the spread across frames."""
        if self.frames < 2:
            return math.nan
        n = self.bits / self.frames
        mean = self.errors / self.frames
        var = (self.sq_errors / self.frames - mean**2) * self.frames / (self.frames - 1)
        return Z95 * math.sqrt(max(var, 0.0) / self.frames) / n

    @property
    def low_confidence(self) -> bool:
        return self.errors < MIN_ERRORS


@dataclass
class LinkStats:
    legacy_raw_basic: ErrorCount = field(default_factory=ErrorCount)
    legacy_coded_basic: ErrorCount = field(default_factory=ErrorCount)
    raw_secondary: ErrorCount = field(default_factory=ErrorCount)
    basic_given_s0: ErrorCount = field(default_factory=ErrorCount)
    basic_given_s1: ErrorCount = field(default_factory=ErrorCount)
    coded_basic: list[ErrorCount] = field(default_factory=list)
    coded_secondary: list[ErrorCount] = field(default_factory=list)

    def __add__(self, other: "LinkStats") -> "LinkStats":
        out = LinkStats()
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, list):
                if a and b and len(a) != len(b):
                    raise ValueError("cannot merge stats with different iteration counts")
                merged = [x + y for x, y in zip(a, b)] if a and b else list(a or b)
                setattr(out, f.name, merged)
            else:
                setattr(out, f.name, a + b)
        return out

    @property
    def frames(self) -> int:
        return self.legacy_raw_basic.frames


@dataclass(frozen=True)
class CodesConfig:
    basic: ConvCode = CODE_K7
    secondary: ConvCode = CODE_K7
    repetition: Optional[int] = None  # None: derived from lambda
    interleaver_depth: int = 1

    def layout(self, lam: float, message_bits: int) -> FrameLayout:
        rep = default_repetition(lam) if self.repetition is None else self.repetition
        return FrameLayout(self.basic, SecondaryCode(self.secondary, rep), message_bits, self.interleaver_depth)


@dataclass(frozen=True)
class RunSpec:
    operating_points: Sequence[tuple[float, float]]
    frames: int = 100
    frame_message_bits: int = 4096
    seed: int = 0
    mapping: Mapping = Mapping.KARNAUGH_GRAY
    schedule: IterationSchedule = IterationSchedule()
    codes: CodesConfig = CodesConfig()
    decode: bool = True
    noiseless: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "operating_points", tuple((float(l), float(c)) for l, c in self.operating_points))
        object.__setattr__(self, "mapping", Mapping(self.mapping))
        if not self.operating_points:
            raise ValueError("no operating points")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.frame_message_bits < 8:
            raise ValueError("frame_message_bits must be >= 8")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for lam, cnr in self.operating_points:
            OperatingPoint(lam, cnr)
            if self.decode:
                self.codes.layout(lam, self.frame_message_bits)


def simulate_frame(spec: RunSpec, point_index: int, frame_index: int) -> LinkStats:
    lam, cnr_db = spec.operating_points[point_index]
    cfg = HierarchyConfig(lam, mapping=spec.mapping)
    chan = ChannelSpec.for_config(cfg, cnr_db, spec.seed)
    rng = make_rng(spec.seed, point_index, frame_index)
    layout = spec.codes.layout(lam, spec.frame_message_bits)

    msg_b = rng.integers(0, 2, layout.basic_message_bits, dtype=np.int8)
    msg_s = rng.integers(0, 2, layout.secondary_message_bits, dtype=np.int8)
    tx_b, tx_s = layout.encode(msg_b, msg_s, rng)
    x = modulate(tx_b, tx_s, cfg)
    y = x if spec.noiseless else transmit(x, chan, rng)
    sigma = noise_sigma(chan)

    stats = LinkStats()
    hard_b, hard_s = slice_hard(y, cfg)
    wrong_b = hard_b != tx_b
    stats.legacy_raw_basic.add_frame(tx_b.size, np.count_nonzero(wrong_b))
    stats.raw_secondary.add_frame(tx_s.size, np.count_nonzero(hard_s != tx_s))
    s1 = tx_s == 1
    stats.basic_given_s1.add_frame(np.count_nonzero(s1), np.count_nonzero(wrong_b & s1))
    stats.basic_given_s0.add_frame(np.count_nonzero(~s1), np.count_nonzero(wrong_b & ~s1))

    if spec.decode:
        legacy = decode_legacy(y, layout.basic, sigma, cfg.d1, layout)
        stats.legacy_coded_basic.add_frame(msg_b.size, np.count_nonzero(legacy.message_bits != msg_b))
        result = decode_hierarchical(y, layout, cfg, sigma, spec.schedule)
        for rec in result.history:
            cb, cs = ErrorCount(), ErrorCount()
            cb.add_frame(msg_b.size, np.count_nonzero(rec.basic_bits != msg_b))
            cs.add_frame(msg_s.size, np.count_nonzero(rec.secondary_bits != msg_s))
            stats.coded_basic.append(cb)
            stats.coded_secondary.append(cs)
    return stats


def _run_chunk(args) -> LinkStats:
    spec, point_index, start, stop = args
    total = LinkStats()
    for f in range(start, stop):
        total = total + simulate_frame(spec, point_index, f)
    return total


def _chunks(spec: RunSpec, point_index: int, n_chunks: int):
    edges = np.linspace(0, spec.frames, min(n_chunks, spec.frames) + 1).astype(int)
    return [(spec, point_index, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run(spec: RunSpec) -> list[tuple[OperatingPoint, LinkStats]]:
    results = []
    if spec.workers == 1:
        for p, (lam, cnr) in enumerate(spec.operating_points):
            results.append((OperatingPoint(lam, cnr), _run_chunk((spec, p, 0, spec.frames))))
        return results
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        for p, (lam, cnr) in enumerate(spec.operating_points):
            total = LinkStats()
            for part in pool.map(_run_chunk, _chunks(spec, p, 4 * spec.workers)):
                total = total + part
            results.append((OperatingPoint(lam, cnr), total))
    return results


def empirical_mnr(lam: float, cnr_db: float, n_symbols: int = 10**6, seed: int = 0,
                  d1: float = 1.0, mapping: Mapping = Mapping.KARNAUGH_GRAY) -> float:
    """QPSK-layer power over the received power around the transmitted cloud center.

    The reference point is the QPSK point of the transmitted basic bits, so
    both channel noise and secondary scatter count as noise.
    """
    if n_symbols < 10**5:
        raise ValueError("empirical MNR needs at least 1e5 symbols")
    cfg = HierarchyConfig(lam, d1, mapping)
    rng = make_rng(seed, 0)
    basic = rng.integers(0, 2, 2 * n_symbols, dtype=np.int8)
    secondary = rng.integers(0, 2, 2 * n_symbols, dtype=np.int8)
    y = transmit(modulate(basic, secondary, cfg), ChannelSpec.for_config(cfg, cnr_db, seed), rng)
    centers = d1 * ((1 - 2.0 * basic[0::2]) + 1j * (1 - 2.0 * basic[1::2]))
    return 2.0 * d1**2 / float(np.mean(np.abs(y - centers) ** 2))
