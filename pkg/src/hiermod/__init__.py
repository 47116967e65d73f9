"""Hierarchical QPSK/16QAM modulation: analytic penalties and link simulation."""

from .constellation import BitQuad, HierarchyConfig, IqSymbol, Mapping
from .channel import ChannelSpec
from .analytic import OperatingPoint
from .coding import CODE_K3, CODE_K7, ConvCode, SoftBit, SoftSequence
from .receiver import IterationSchedule, PriorMode
from .montecarlo import CodesConfig, LinkStats, RunSpec

__all__ = [
    "BitQuad", "HierarchyConfig", "IqSymbol", "Mapping", "ChannelSpec", "OperatingPoint",
    "CODE_K3", "CODE_K7", "ConvCode", "SoftBit", "SoftSequence", "IterationSchedule",
    "PriorMode", "CodesConfig", "LinkStats", "RunSpec",
]
