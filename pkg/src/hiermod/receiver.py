"""Legacy QPSK receiver and the iterative hierarchical receiver.

Soft values move between the demapper and the two BCJR decoders as LLRs,
log(P1/P0). ``SoftSequence`` views are built for the public outputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coding import ConvCode, FrameLayout, SoftSequence, bcjr_decode_llr
from .constellation import HierarchyConfig, IqSymbol, Mapping, slice_legacy, to_dimensions


class PriorMode(str, enum.Enum):
    PAPER_FULL_APP = "paper"
    EXTRINSIC = "extrinsic"


@dataclass(frozen=True)
class IterationSchedule:
    max_iterations: int = 1
    prior_mode: PriorMode = PriorMode.EXTRINSIC

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        object.__setattr__(self, "prior_mode", PriorMode(self.prior_mode))


def gaussian_density(x, sigma: float):
    return np.exp(-np.square(x) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))


def _log_density(x, sigma):
    return -np.square(x) / (2.0 * sigma**2) - math.log(sigma * math.sqrt(2.0 * math.pi))


def _log_expit(x):
    return -np.logaddexp(0.0, -x)


def _amplitude_table(cfg: HierarchyConfig, quadrature) -> np.ndarray:
    """amp[..., b, s] for every dimension (quadrature may be an array)."""
    flip = np.asarray(quadrature, dtype=bool) & (cfg.mapping is Mapping.BALANCED)
    inner_for_s1 = np.where(flip, cfg.outer, cfg.inner)
    inner_for_s0 = np.where(flip, cfg.inner, cfg.outer)
    pos = np.stack([inner_for_s0, inner_for_s1], axis=-1)
    return np.stack([pos, -pos], axis=-2)


def conditional_likelihoods(r, cfg: HierarchyConfig, sigma: float, quadrature=False) -> np.ndarray:
    """P(r | x_b, x_s) indexed ``[..., b, s]`` for one-dimensional amplitudes."""
    r = np.asarray(r, dtype=float)
    amp = _amplitude_table(cfg, quadrature)
    return gaussian_density(r[..., None, None] - amp, sigma)


def _quadrature_mask(n):
    mask = np.zeros(n, dtype=bool)
    mask[1::2] = True
    return mask


def demap_llr(r: np.ndarray, prior_basic: np.ndarray, prior_secondary: np.ndarray,
              cfg: HierarchyConfig, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension demapping of interleaved amplitudes, all in LLRs.

    The basic output marginalizes over the secondary prior and vice versa;
    neither output includes the prior of its own bit.
    """
    amp = _amplitude_table(cfg, _quadrature_mask(r.size))
    lf = _log_density(r[:, None, None] - amp, sigma)
    lps = np.stack([_log_expit(-prior_secondary), _log_expit(prior_secondary)], axis=-1)
    lpb = np.stack([_log_expit(-prior_basic), _log_expit(prior_basic)], axis=-1)
    # lf[:, b, s]
    llr_b = (np.logaddexp(lps[:, 1] + lf[:, 1, 1], lps[:, 0] + lf[:, 1, 0])
             - np.logaddexp(lps[:, 1] + lf[:, 0, 1], lps[:, 0] + lf[:, 0, 0]))
    llr_s = (np.logaddexp(lpb[:, 1] + lf[:, 1, 1], lpb[:, 0] + lf[:, 0, 1])
             - np.logaddexp(lpb[:, 1] + lf[:, 1, 0], lpb[:, 0] + lf[:, 0, 0]))
    return llr_b, llr_s


@dataclass(frozen=True)
class DemapperOutput:
    basic_channel_probs: SoftSequence
    secondary_channel_probs: SoftSequence


def demap_soft(y, priors_basic: Optional[SoftSequence], priors_secondary: Optional[SoftSequence],
               cfg: HierarchyConfig, sigma: float) -> DemapperOutput:
    """Soft demapping of one symbol (``IqSymbol``) or an array of complex symbols.

    Priors are per-dimension soft bits in (I, Q) interleaved order; ``None``
    means uniform.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if isinstance(y, IqSymbol):
        y = complex(*y)
    r = to_dimensions(y)
    pb = np.zeros(r.size) if priors_basic is None else priors_basic.llr
    ps = np.zeros(r.size) if priors_secondary is None else priors_secondary.llr
    if pb.size != r.size or ps.size != r.size:
        raise ValueError("priors need one soft bit per dimension")
    llr_b, llr_s = demap_llr(r, pb, ps, cfg, sigma)
    return DemapperOutput(SoftSequence.from_llr(llr_b), SoftSequence.from_llr(llr_s))


def legacy_llr(received, sigma: float, d1: float = 1.0) -> np.ndarray:
    """Channel LLRs of a QPSK receiver with points at +-d1; knows nothing of lambda."""
    r = to_dimensions(received)
    return _log_density(r + d1, sigma) - _log_density(r - d1, sigma)


@dataclass
class LegacyResult:
    raw_bits: np.ndarray
    message_bits: np.ndarray
    message_llr: np.ndarray

    @property
    def message_app(self) -> SoftSequence:
        return SoftSequence.from_llr(self.message_llr)


def decode_legacy(received, code: ConvCode, sigma: float, d1: float = 1.0,
                  layout: Optional[FrameLayout] = None) -> LegacyResult:
    """Deployed-receiver model: sign slicer for raw bits, BCJR on QPSK metrics.

    Without ``layout`` the whole symbol stream is taken as one basic codeword
    (original system, no interleaver).
    """
    received = np.asarray(received, dtype=complex)
    if received.size == 0:
        raise ValueError("nothing received")
    llr = legacy_llr(received, sigma, d1)
    if layout is None:
        n = (llr.size // code.n_outputs) * code.n_outputs
        coded = llr[:n]
    else:
        coded = layout.basic_llr(llr)
    msg_llr, _ = bcjr_decode_llr(coded, code)
    return LegacyResult(slice_legacy(received), (msg_llr > 0).astype(np.int8), msg_llr)


@dataclass
class IterationRecord:
    basic_llr: np.ndarray
    secondary_llr: np.ndarray

    @property
    def basic_app(self) -> SoftSequence:
        return SoftSequence.from_llr(self.basic_llr)

    @property
    def secondary_app(self) -> SoftSequence:
        return SoftSequence.from_llr(self.secondary_llr)

    @property
    def basic_bits(self) -> np.ndarray:
        return (self.basic_llr > 0).astype(np.int8)

    @property
    def secondary_bits(self) -> np.ndarray:
        return (self.secondary_llr > 0).astype(np.int8)


@dataclass
class HierarchicalResult:
    basic_bits: np.ndarray
    secondary_bits: np.ndarray
    history: list[IterationRecord] = field(default_factory=list)


def decode_hierarchical(received, layout: FrameLayout, cfg: HierarchyConfig, sigma: float,
                        schedule: IterationSchedule = IterationSchedule()) -> HierarchicalResult:
    """Two-decoder receiver exchanging bit probabilities through the demapper.

    Iteration 0 demaps with uniform priors. Each later iteration demaps with
    the previous iteration's decoder outputs as priors. In EXTRINSIC mode
    only extrinsic LLRs are fed back; in PAPER_FULL_APP mode each decoder's
    full coded-bit APPs are fed back to the demapper and also reused as the
    decoder's own prior, as the iteration is literally written.
    """
    r = to_dimensions(received)
    if r.size != layout.n_channel_bits:
        raise ValueError(f"expected {layout.n_symbols} symbols, got {r.size // 2}")
    paper = schedule.prior_mode is PriorMode.PAPER_FULL_APP
    prior_b = np.zeros(r.size)
    prior_s = np.zeros(r.size)
    own_b = np.zeros(layout.basic_coded_bits)
    own_s = np.zeros(layout.secondary_coded_bits)
    history = []
    for _ in range(schedule.max_iterations):
        ch_b, ch_s = demap_llr(r, prior_b, prior_s, cfg, sigma)
        in_b = layout.basic_llr(ch_b) + own_b
        in_s = layout.secondary_llr(ch_s) + own_s
        msg_b, ext_b = bcjr_decode_llr(in_b, layout.basic)
        msg_s, ext_s = bcjr_decode_llr(in_s, layout.secondary.code)
        history.append(IterationRecord(msg_b, msg_s))
        if paper:
            own_b = ext_b + in_b
            own_s = ext_s + in_s
            prior_b = layout.basic_prior(own_b)
            prior_s = layout.secondary_prior(own_s)
        else:
            prior_b = layout.basic_prior(ext_b)
            prior_s = layout.secondary_prior(ext_s, ch_s)
    last = history[-1]
    return HierarchicalResult(last.basic_bits, last.secondary_bits, history)
