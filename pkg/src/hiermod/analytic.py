"""Closed-form penalty, BER and rate expressions for QPSK/16QAM hierarchies.

All CNR arguments are carrier-to-noise ratios Es/N0 of the full hierarchical
constellation. ``OperatingPoint`` carries CNR in dB; the functions convert.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from scipy.optimize import brentq
from scipy.special import erfc, erfcinv

from .constellation import Mapping
from .channel import db_to_linear, linear_to_db


@dataclass(frozen=True)
class OperatingPoint:
    lam: float
    cnr_db: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 0.5:
            raise ValueError(f"lambda must lie in [0, 1/2], got {self.lam}")
        if not math.isfinite(self.cnr_db):
            raise ValueError("cnr_db must be finite")

    @property
    def cnr(self) -> float:
        return db_to_linear(self.cnr_db)


def q_function(x: float) -> float:
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


def q_inverse(p: float) -> float:
    """Inverse of the Gaussian tail function.

    The upper half is computed from 1 - p so that both tails keep full
    relative precision in their small argument.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse needs 0 < p < 1, got {p}")
    if p <= 0.5:
        x = math.sqrt(2.0) * float(erfcinv(2.0 * p))
    else:
        x = -math.sqrt(2.0) * float(erfcinv(2.0 * (1.0 - p)))
    # one Newton step on Q(x) - p; Q'(x) = -phi(x)
    phi = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if phi > 0.0:
        x += (q_function(x) - p) / phi
    return x


def _scaled_arg(coef: float, pt: OperatingPoint) -> float:
    return coef / math.sqrt(1.0 + pt.lam**2) * math.sqrt(pt.cnr)


def mnr(pt: OperatingPoint) -> float:
    return pt.cnr / (1.0 + pt.lam**2 * (1.0 + pt.cnr))


def penalty_mnr(pt: OperatingPoint) -> float:
    """MNR penalty CNR/MNR in dB."""
    return linear_to_db(1.0 + pt.lam**2 * (1.0 + pt.cnr))


def ber_qpsk(cnr: float) -> float:
    if not cnr > 0:
        raise ValueError("cnr must be positive")
    return q_function(math.sqrt(cnr))


def ber_basic_conditional(pt: OperatingPoint, secondary_bit: int,
                          mapping: Mapping = Mapping.KARNAUGH_GRAY) -> float:
    """Raw basic-bit BER given the secondary bit on the same dimension.

    For the balanced mapping the conditioning is pooled over I and Q, where
    the inner/outer roles of the secondary bit cancel.
    """
    if secondary_bit not in (0, 1):
        raise ValueError("secondary_bit must be 0 or 1")
    inner = q_function(_scaled_arg(1.0 - pt.lam, pt))
    outer = q_function(_scaled_arg(1.0 + pt.lam, pt))
    if Mapping(mapping) is Mapping.BALANCED:
        return 0.5 * inner + 0.5 * outer
    return inner if secondary_bit == 1 else outer


def ber_basic_raw(pt: OperatingPoint) -> float:
    return 0.5 * q_function(_scaled_arg(1.0 - pt.lam, pt)) + 0.5 * q_function(_scaled_arg(1.0 + pt.lam, pt))


def ber_secondary_raw(pt: OperatingPoint) -> float:
    if not pt.lam > 0:
        raise ValueError("secondary BER is undefined for lambda = 0")
    lam = pt.lam
    return (q_function(_scaled_arg(lam, pt))
            + 0.5 * q_function(_scaled_arg(2.0 - lam, pt))
            - 0.5 * q_function(_scaled_arg(2.0 + lam, pt)))


def penalty_ber(pt: OperatingPoint) -> float:
    """BER penalty in dB: the CNR loss at which QPSK matches the hierarchical raw BER."""
    ber = ber_basic_raw(pt)
    if ber >= 0.5:
        raise ValueError(f"raw BER {ber} >= 1/2 has no equivalent QPSK CNR")
    return linear_to_db(pt.cnr / q_inverse(ber) ** 2)


def cnr_db_for_basic_ber(lam: float, target: float, lo_db: float = -20.0, hi_db: float = 40.0) -> float:
    """Solve ber_basic_raw(lam, cnr) = target for cnr in dB."""
    return brentq(lambda c: ber_basic_raw(OperatingPoint(lam, c)) - target, lo_db, hi_db, xtol=1e-13)


def rate_ratio(lam: float) -> float:
    """Secondary/basic effective bit-rate ratio lam^2/(1-lam)^2."""
    if not 0.0 < lam < 1.0:
        raise ValueError("rate_ratio needs 0 < lambda < 1")
    return lam**2 / (1.0 - lam) ** 2


def default_repetition(lam: float) -> int:
    """Repetition factor realizing the symbol-time stretch (1-lam)^2/lam^2."""
    if lam <= 0.0:
        return 1
    return max(1, round(1.0 / rate_ratio(lam)))


def awgn_capacity(snr: float) -> float:
    if snr < 0:
        raise ValueError("snr must be non-negative")
    return math.log2(1.0 + snr)


@dataclass(frozen=True)
class RateEstimate:
    lam: float
    ratio: float
    basic_rate: Optional[float] = None

    @property
    def secondary_rate(self) -> Optional[float]:
        return None if self.basic_rate is None else self.ratio * self.basic_rate


def rate_estimate(lam: float, basic_rate: Optional[float] = None) -> RateEstimate:
    return RateEstimate(lam, rate_ratio(lam), basic_rate)


class PenaltyKind(str, enum.Enum):
    MNR = "mnr"
    BER = "ber"


@dataclass
class PenaltyCurve:
    lam: float
    kind: PenaltyKind
    samples: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        cnrs = [c for c, _ in self.samples]
        if any(b <= a for a, b in zip(cnrs, cnrs[1:])):
            raise ValueError("cnr_db samples must be strictly increasing")


def penalty_curve(kind, lam: float, cnr_dbs: Sequence[float]) -> PenaltyCurve:
    kind = PenaltyKind(kind)
    fn = penalty_mnr if kind is PenaltyKind.MNR else penalty_ber
    return PenaltyCurve(lam, kind, [(c, fn(OperatingPoint(lam, c))) for c in cnr_dbs])
