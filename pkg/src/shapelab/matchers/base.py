"""Fixed-to-fixed distribution matcher contract.

A matcher maps ``num_bits`` uniform information bits to ``num_amplitudes``
shaped amplitudes from a fixed positive odd-integer alphabet, and is exactly
invertible.  All rank/Count arithmetic uses Python's unbounded integers:
multinomials and trellis counts overflow 64-bit words well before the block
lengths of interest.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np

__all__ = ["DistributionMatcher", "bits_to_int", "int_to_bits", "matcher_from_descriptor"]


def bits_to_int(bits) -> int:
    """MSB-first bit vector -> unbounded integer."""
    value = 0
    for b in np.asarray(bits, dtype=np.uint8):
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    """Unbounded integer -> MSB-first bit vector of the given width."""
    if value < 0 or value >> width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)],
                    dtype=np.uint8)


class DistributionMatcher(ABC):
    """Invertible bits -> amplitudes mapper with a fixed block length."""

    alphabet: np.ndarray
    num_amplitudes: int
    num_bits: int

    @property
    def rate(self) -> Fraction:
        """Bits per amplitude as an exact rational."""
        return Fraction(self.num_bits, self.num_amplitudes)

    @abstractmethod
    def encode(self, bits: np.ndarray) -> np.ndarray:
        """Map ``num_bits`` bits to ``num_amplitudes`` alphabet values."""

    @abstractmethod
    def decode(self, amplitudes: np.ndarray) -> np.ndarray:
        """Exact inverse of :meth:`encode`."""

    @abstractmethod
    def descriptor(self) -> dict:
        """Serializable construction parameters (type, sizes, alphabet, ...)."""

    def amplitude_pmf(self) -> np.ndarray:
        """Aggregate amplitude distribution over the used codeword set.

        Subclasses with a closed form override this; the default samples.
        """
        raise NotImplementedError

    def _check_bits(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.uint8).ravel()
        if bits.size != self.num_bits:
            raise ValueError(f"expected {self.num_bits} bits, got {bits.size}")
        if bits.max(initial=0) > 1:
            raise ValueError("bits must be 0/1")
        return bits

    def _check_amplitudes(self, amplitudes) -> np.ndarray:
        amps = np.asarray(amplitudes, dtype=np.int64).ravel()
        if amps.size != self.num_amplitudes:
            raise ValueError(
                f"expected {self.num_amplitudes} amplitudes, got {amps.size}")
        if not np.all(np.isin(amps, self.alphabet)):
            raise ValueError("amplitude outside the matcher alphabet")
        return amps


def matcher_from_descriptor(desc: dict) -> DistributionMatcher:
    """Rebuild a matcher from its :meth:`DistributionMatcher.descriptor`."""
    from .ccdm import ConstantCompositionMatcher
    from .spheres import SphereShapingMatcher
    from .hierarchical import HierarchicalMatcher, LayerSpec

    kind = desc.get("type")
    alphabet = np.asarray(desc["alphabet"], dtype=np.int64)
    if kind == "ccdm":
        return ConstantCompositionMatcher(np.asarray(desc["composition"]), alphabet)
    if kind == "spsh":
        return SphereShapingMatcher(desc["num_amplitudes"], desc["num_bits"], alphabet)
    if kind == "hidm":
        layers = [LayerSpec(*row) for row in desc["layers"]]
        return HierarchicalMatcher(layers, alphabet)
    raise ValueError(f"unknown matcher type {kind!r}")
