"""Convolutional codes, the BCJR soft-in/soft-out decoder and frame layout.

Generator polynomials are given in octal with the most significant tap on
the current input bit, e.g. (171, 133) for the K=7 satellite code. Codewords
are zero-tail terminated and the coded stream is ordered time-major: output
``j`` of step ``t`` sits at index ``t*n + j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numba
import numpy as np

LOG_FLOOR = math.log(np.finfo(float).tiny)
LLR_CLIP = 700.0


@dataclass(frozen=True)
class ConvCode:
    constraint_length: int
    generators: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))
        if self.constraint_length < 2:
            raise ValueError("constraint length must be at least 2")
        if len(self.generators) < 2:
            raise ValueError("need at least two generator polynomials")
        for g in self.generators:
            if not 0 < g < 2**self.constraint_length:
                raise ValueError(f"generator {g:o} does not fit constraint length {self.constraint_length}")

    @classmethod
    def parse(cls, text: str) -> "ConvCode":
        """Parse ``"K:g1,g2,..."`` with octal generators, e.g. ``"7:171,133"``."""
        try:
            k, gens = text.split(":")
            return cls(int(k), tuple(int(g, 8) for g in gens.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad code description {text!r}: {exc}") from None

    def __str__(self):
        return f"{self.constraint_length}:" + ",".join(f"{g:o}" for g in self.generators)

    @property
    def n_outputs(self) -> int:
        return len(self.generators)

    @property
    def rate(self) -> float:
        return 1.0 / self.n_outputs

    @property
    def memory(self) -> int:
        return self.constraint_length - 1

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    def coded_length(self, message_length: int) -> int:
        return self.n_outputs * (message_length + self.memory)

    @cached_property
    def taps(self) -> np.ndarray:
        """(n, K) tap matrix; column k multiplies the input delayed by k."""
        k = self.constraint_length
        return np.array([[(g >> (k - 1 - d)) & 1 for d in range(k)] for g in self.generators], dtype=np.int64)

    @cached_property
    def trellis(self) -> tuple[np.ndarray, np.ndarray]:
        """(next_state[S, 2], output_bits[S, 2, n]) for the shift-register state."""
        k = self.constraint_length
        next_state = np.empty((self.n_states, 2), dtype=np.int64)
        outputs = np.empty((self.n_states, 2, self.n_outputs), dtype=np.int64)
        for s in range(self.n_states):
            for u in (0, 1):
                reg = (u << (k - 1)) | s
                next_state[s, u] = reg >> 1
                for j, g in enumerate(self.generators):
                    outputs[s, u, j] = bin(g & reg).count("1") & 1
        return next_state, outputs


CODE_K3 = ConvCode(3, (0o7, 0o5))
CODE_K7 = ConvCode(7, (0o171, 0o133))


class SoftBit(NamedTuple):
    p1: float
    p0: float


@dataclass(frozen=True, eq=False)
class SoftSequence:
    """Per-bit probability pairs. Both halves are stored so that saturated
    probabilities keep their precision on the small side."""

    p1: np.ndarray
    p0: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float)
        p0 = np.asarray(self.p0, dtype=float)
        if p1.shape != p0.shape or p1.ndim != 1:
            raise ValueError("p1 and p0 must be 1-D arrays of equal length")
        if np.any((p1 < 0) | (p1 > 1) | (p0 < 0) | (p0 > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any((p1 == 0) & (p0 == 0)):
            raise ValueError("degenerate soft bit with p0 = p1 = 0")
        if np.any(np.abs(p1 + p0 - 1.0) > 1e-9):
            raise ValueError("soft bits must satisfy p0 + p1 = 1")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p0", p0)

    @classmethod
    def uniform(cls, n: int) -> "SoftSequence":
        return cls(np.full(n, 0.5), np.full(n, 0.5))

    @classmethod
    def from_llr(cls, llr) -> "SoftSequence":
        """From log(P1/P0)."""
        llr = np.asarray(llr, dtype=float)
        return cls(_expit(llr), _expit(-llr))

    @classmethod
    def from_likelihoods(cls, l1, l0) -> "SoftSequence":
        """Normalize unnormalized likelihood pairs."""
        l1 = np.asarray(l1, dtype=float)
        l0 = np.asarray(l0, dtype=float)
        if np.any((l1 == 0) & (l0 == 0)):
            raise ValueError("degenerate soft bit with zero likelihood for both values")
        total = l1 + l0
        return cls(l1 / total, l0 / total)

    @classmethod
    def from_bits(cls, bits) -> "SoftSequence":
        b = np.asarray(bits, dtype=float)
        return cls(b, 1.0 - b)

    @property
    def llr(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.maximum(np.log(self.p1), LOG_FLOOR) - np.maximum(np.log(self.p0), LOG_FLOOR)

    def hard(self) -> np.ndarray:
        return (self.p1 > self.p0).astype(np.int8)

    def __len__(self):
        return self.p1.size

    def __getitem__(self, i) -> SoftBit:
        return SoftBit(float(self.p1[i]), float(self.p0[i]))


def _expit(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def conv_encode(message, code: ConvCode) -> np.ndarray:
    """Zero-tail convolutional encoding; returns n*(len+K-1) bits."""
    u = np.asarray(message, dtype=np.int64)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("message must be a non-empty 1-D bit array")
    if np.any((u != 0) & (u != 1)):
        raise ValueError("message must contain only 0/1")
    padded = np.concatenate([u, np.zeros(code.memory, dtype=np.int64)])
    out = np.empty((padded.size, code.n_outputs), dtype=np.int8)
    for j, taps in enumerate(code.taps):
        out[:, j] = np.convolve(padded, taps)[: padded.size] & 1
    return out.ravel()


@numba.njit(cache=True, inline="always")
def _lse(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@numba.njit(cache=True)
def _bcjr_kernel(lch, lpr, next_state, outputs):
    # lch[t, j, c]: log P(channel | coded bit j of step t = c); lpr[t, u]: log prior of input u
    n_steps, n_out, _ = lch.shape
    n_states = next_state.shape[0]
    gamma = np.empty((n_steps, n_states, 2))
    for t in range(n_steps):
        for s in range(n_states):
            for u in range(2):
                g = lpr[t, u]
                for j in range(n_out):
                    g += lch[t, j, outputs[s, u, j]]
                gamma[t, s, u] = g

    alpha = np.full((n_steps + 1, n_states), -np.inf)
    alpha[0, 0] = 0.0
    for t in range(n_steps):
        for s in range(n_states):
            a = alpha[t, s]
            if a == -np.inf:
                continue
            for u in range(2):
                ns = next_state[s, u]
                alpha[t + 1, ns] = _lse(alpha[t + 1, ns], a + gamma[t, s, u])
        m = alpha[t + 1].max()
        if m > -np.inf:
            alpha[t + 1] -= m

    beta = np.full((n_steps + 1, n_states), -np.inf)
    beta[n_steps, 0] = 0.0
    for t in range(n_steps - 1, -1, -1):
        for s in range(n_states):
            acc = -np.inf
            for u in range(2):
                acc = _lse(acc, gamma[t, s, u] + beta[t + 1, next_state[s, u]])
            beta[t, s] = acc
        m = beta[t].max()
        if m > -np.inf:
            beta[t] -= m

    # posteriors: max-shifted exp-sums, one log per output
    n_br = n_states * 2
    full = np.empty(n_br)
    part = np.empty((n_out, n_br))
    lapp = np.full((n_steps, 2), -np.inf)
    lext = np.full((n_steps, n_out, 2), -np.inf)
    for t in range(n_steps):
        mf = -np.inf
        mp = np.full(n_out, -np.inf)
        for s in range(n_states):
            for u in range(2):
                k = 2 * s + u
                ab = alpha[t, s] + beta[t + 1, next_state[s, u]]
                full[k] = ab + gamma[t, s, u]
                mf = max(mf, full[k])
                for j in range(n_out):
                    part[j, k] = ab + gamma[t, s, u] - lch[t, j, outputs[s, u, j]] if ab > -np.inf else -np.inf
                    mp[j] = max(mp[j], part[j, k])
        acc = np.zeros(2)
        accp = np.zeros((n_out, 2))
        for s in range(n_states):
            for u in range(2):
                k = 2 * s + u
                acc[u] += math.exp(full[k] - mf)
                for j in range(n_out):
                    accp[j, outputs[s, u, j]] += math.exp(part[j, k] - mp[j])
        for u in range(2):
            if acc[u] > 0.0:
                lapp[t, u] = mf + math.log(acc[u])
        for j in range(n_out):
            for c in range(2):
                if accp[j, c] > 0.0:
                    lext[t, j, c] = mp[j] + math.log(accp[j, c])
    return lapp, lext


def _log_pair(seq: SoftSequence) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.stack([np.maximum(np.log(seq.p0), LOG_FLOOR), np.maximum(np.log(seq.p1), LOG_FLOOR)], axis=-1)


def bcjr_decode(channel_probs: SoftSequence, priors: Optional[SoftSequence], code: ConvCode
                ) -> tuple[SoftSequence, SoftSequence]:
    """Exact APP decoding on the zero-tail trellis.

    Returns ``(message_app, coded_extrinsic)``: posteriors of the message
    bits and, for every coded bit, the posterior with that bit's own channel
    term left out. ``priors=None`` means uniform message priors.
    """
    n_steps = len(channel_probs) // code.n_outputs
    if n_steps * code.n_outputs != len(channel_probs) or n_steps <= code.memory:
        raise ValueError(f"channel sequence length {len(channel_probs)} is not a valid codeword length")
    n_msg = n_steps - code.memory
    if priors is None:
        priors = SoftSequence.uniform(n_msg)
    if len(priors) != n_msg:
        raise ValueError(f"expected {n_msg} priors, got {len(priors)}")
    for seq in (channel_probs, priors):
        if np.any((seq.p0 == 0) & (seq.p1 == 0)):
            raise ValueError("degenerate soft bit with p0 = p1 = 0")

    lch = _log_pair(channel_probs).reshape(n_steps, code.n_outputs, 2)
    lpr = np.full((n_steps, 2), -np.inf)
    lpr[:, 0] = 0.0
    lpr[:n_msg] = _log_pair(priors)
    next_state, outputs = code.trellis
    lapp, lext = _bcjr_kernel(lch, lpr, next_state, outputs)
    app = _from_log(lapp[:n_msg, 1], lapp[:n_msg, 0])
    ext = _from_log(lext[..., 1].ravel(), lext[..., 0].ravel())
    return app, ext


def _from_log(l1: np.ndarray, l0: np.ndarray) -> SoftSequence:
    with np.errstate(invalid="ignore"):
        d = l1 - l0
    if np.any(np.isnan(d)):
        raise ValueError("observations are inconsistent with every codeword")
    return SoftSequence.from_llr(d)


def bcjr_decode_llr(channel_llr: np.ndarray, code: ConvCode) -> tuple[np.ndarray, np.ndarray]:
    """LLR-domain front end used inside the receivers (uniform priors).

    Returns (message LLRs, coded extrinsic LLRs). Inputs and outputs are
    clipped to +-LLR_CLIP so saturated evidence never produces infinities.
    """
    llr = np.clip(np.asarray(channel_llr, dtype=float), -LLR_CLIP, LLR_CLIP)
    n_steps = llr.size // code.n_outputs
    n_msg = n_steps - code.memory
    # log P(c=1) - log P(c=0) only matters up to a per-bit constant
    lch = np.stack([np.zeros_like(llr), llr], axis=-1).reshape(n_steps, code.n_outputs, 2)
    lpr = np.full((n_steps, 2), -np.inf)
    lpr[:, 0] = 0.0
    lpr[:n_msg, 1] = 0.0
    next_state, outputs = code.trellis
    lapp, lext = _bcjr_kernel(lch, lpr, next_state, outputs)
    msg = lapp[:n_msg, 1] - lapp[:n_msg, 0]
    ext = lext[..., 1].ravel() - lext[..., 0].ravel()
    return np.clip(msg, -LLR_CLIP, LLR_CLIP), np.clip(ext, -LLR_CLIP, LLR_CLIP)


def block_interleaver(length: int, depth: int) -> np.ndarray:
    """Permutation writing row-wise into ``depth`` rows and reading column-wise.

    ``channel = stream[perm]``; depth 1 is the identity.
    """
    if depth < 1:
        raise ValueError("interleaver depth must be >= 1")
    idx = np.arange(length)
    return np.lexsort((idx // depth, idx % depth)) if depth > 1 else idx


@dataclass(frozen=True)
class SecondaryCode:
    code: ConvCode = CODE_K7
    repetition: int = 1

    def __post_init__(self):
        if self.repetition < 1:
            raise ValueError("repetition factor must be >= 1")


@dataclass(frozen=True)
class FrameLayout:
    """How the basic and secondary codewords share the symbols of one frame.

    The basic codeword fixes the symbol count. The secondary codeword is
    repeated bit-wise ``repetition`` times and as many secondary message
    bits are used as fit into the remaining two bits per symbol. Unused
    positions carry random filler bits that the receivers ignore.
    """

    basic: ConvCode
    secondary: SecondaryCode
    basic_message_bits: int
    interleaver_depth: int = 1
    secondary_message_bits: int = field(init=False)
    n_symbols: int = field(init=False)

    def __post_init__(self):
        if self.basic_message_bits < 1:
            raise ValueError("frame needs at least one basic message bit")
        n_sym = -(-self.basic.coded_length(self.basic_message_bits) // 2)
        per_bit = self.secondary.code.n_outputs * self.secondary.repetition
        m_s = (2 * n_sym) // per_bit - self.secondary.code.memory
        if m_s < 1:
            raise ValueError(
                f"frame of {n_sym} symbols cannot carry a secondary codeword with repetition "
                f"{self.secondary.repetition}")
        object.__setattr__(self, "n_symbols", n_sym)
        object.__setattr__(self, "secondary_message_bits", m_s)

    @property
    def n_channel_bits(self) -> int:
        return 2 * self.n_symbols

    @property
    def basic_coded_bits(self) -> int:
        return self.basic.coded_length(self.basic_message_bits)

    @property
    def secondary_coded_bits(self) -> int:
        return self.secondary.code.coded_length(self.secondary_message_bits)

    @property
    def secondary_used_bits(self) -> int:
        return self.secondary_coded_bits * self.secondary.repetition

    @cached_property
    def basic_perm(self) -> np.ndarray:
        return block_interleaver(self.basic_coded_bits, self.interleaver_depth)

    @cached_property
    def secondary_perm(self) -> np.ndarray:
        return block_interleaver(self.secondary_used_bits, self.interleaver_depth)

    def encode(self, basic_message, secondary_message, rng: np.random.Generator
               ) -> tuple[np.ndarray, np.ndarray]:
        """Return the (basic, secondary) channel bit streams for one frame."""
        n = self.n_channel_bits
        basic = rng.integers(0, 2, n, dtype=np.int8)
        secondary = rng.integers(0, 2, n, dtype=np.int8)
        coded_b = conv_encode(basic_message, self.basic)
        basic[: coded_b.size] = coded_b[self.basic_perm]
        coded_s = np.repeat(conv_encode(secondary_message, self.secondary.code), self.secondary.repetition)
        secondary[: coded_s.size] = coded_s[self.secondary_perm]
        return basic, secondary

    def basic_llr(self, channel_llr: np.ndarray) -> np.ndarray:
        out = np.empty(self.basic_coded_bits)
        out[self.basic_perm] = channel_llr[: self.basic_coded_bits]
        return out

    def basic_prior(self, coded_llr: np.ndarray) -> np.ndarray:
        prior = np.zeros(self.n_channel_bits)
        prior[: self.basic_coded_bits] = coded_llr[self.basic_perm]
        return prior

    def secondary_copies(self, channel_llr: np.ndarray) -> np.ndarray:
        """(coded_bits, repetition) matrix of per-copy LLRs."""
        stream = np.empty(self.secondary_used_bits)
        stream[self.secondary_perm] = channel_llr[: self.secondary_used_bits]
        return stream.reshape(self.secondary_coded_bits, self.secondary.repetition)

    def secondary_llr(self, channel_llr: np.ndarray) -> np.ndarray:
        """Repetition combining: product of the copies' likelihoods."""
        return self.secondary_copies(channel_llr).sum(axis=1)

    def secondary_prior(self, coded_llr: np.ndarray, channel_llr: Optional[np.ndarray] = None) -> np.ndarray:
        """Spread coded-bit LLRs back onto the repeated channel positions.

        With ``channel_llr`` given, each copy's prior also gets the evidence
        of the other copies (extrinsic with respect to that copy alone).
        """
        per_copy = np.repeat(coded_llr[:, None], self.secondary.repetition, axis=1)
        if channel_llr is not None:
            copies = self.secondary_copies(channel_llr)
            per_copy = per_copy + copies.sum(axis=1, keepdims=True) - copies
        prior = np.zeros(self.n_channel_bits)
        prior[: self.secondary_used_bits] = per_copy.ravel()[self.secondary_perm]
        return prior
