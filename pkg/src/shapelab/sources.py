"""Unbiased block sources feeding selection and the channel harness.

A source emits i.i.d. blocks of n 4D symbols and knows its own decoder
prior, information rate and finite-blocklength rate loss, which the
evaluation stage needs for AIR accounting.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np

from .constellation import (
    Constellation,
    SymbolSequence,
    assemble_4d,
    mb_amplitude_pmf,
    pmf_entropy,
)
from .framing import PasFramer
from .metrics.information import prior_from_amplitude_pmf

__all__ = ["BlockSource", "UniformSource", "MbSource", "MatcherSource"]


class BlockSource(ABC):
    constellation: Constellation
    n: int

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> SymbolSequence:
        """One i.i.d. block of n 4D symbols."""

    @abstractmethod
    def amplitude_pmf(self) -> np.ndarray:
        """Marginal amplitude distribution the decoder assumes."""

    def prior(self) -> np.ndarray:
        return prior_from_amplitude_pmf(self.constellation, self.amplitude_pmf())

    def rate_loss_per_amplitude(self) -> float:
        return 0.0

    def rate_4d(self) -> float:
        """Information bits carried per 4D symbol."""
        return 4.0 * (pmf_entropy(self.amplitude_pmf())
                      - self.rate_loss_per_amplitude() + 1.0)

    def _uniform_signs(self, rng: np.random.Generator) -> np.ndarray:
        return rng.choice([-1, 1], size=4 * self.n).astype(np.int8)


class UniformSource(BlockSource):
    """Uniform i.i.d. QAM symbols."""

    def __init__(self, constellation: Constellation, n: int):
        self.constellation = constellation
        self.n = n

    def sample(self, rng: np.random.Generator) -> SymbolSequence:
        amps = rng.choice(self.constellation.amplitude_alphabet, size=4 * self.n)
        return assemble_4d(amps, self._uniform_signs(rng))

    def amplitude_pmf(self) -> np.ndarray:
        k = self.constellation.amplitude_alphabet.size
        return np.full(k, 1.0 / k)


class MbSource(BlockSource):
    """Ideal i.i.d. Maxwell-Boltzmann-shaped symbols (no rate loss)."""

    def __init__(self, constellation: Constellation, n: int, lam: float):
        self.constellation = constellation
        self.n = n
        self.lam = lam
        self._pmf = mb_amplitude_pmf(lam, constellation.amplitude_alphabet).pmf

    def sample(self, rng: np.random.Generator) -> SymbolSequence:
        amps = rng.choice(self.constellation.amplitude_alphabet,
                          size=4 * self.n, p=self._pmf)
        return assemble_4d(amps, self._uniform_signs(rng))

    def amplitude_pmf(self) -> np.ndarray:
        return self._pmf.copy()


class MatcherSource(BlockSource):
    """PAS blocks: random bits through a matcher bank, uniform signs."""

    def __init__(self, framer: PasFramer):
        self.framer = framer
        self.constellation = framer.constellation
        self.n = framer.config.n
        pmfs = np.stack([m.amplitude_pmf() for m in framer.matchers])
        weights = np.array([m.num_amplitudes for m in framer.matchers], dtype=float)
        self._pmf = (pmfs * weights[:, None]).sum(axis=0) / weights.sum()
        self._rate = sum(m.num_bits for m in framer.matchers) / (4.0 * self.n)

    def sample(self, rng: np.random.Generator) -> SymbolSequence:
        dm_bits = rng.integers(0, 2, size=self.framer.config.dm_input_bits,
                               dtype=np.uint8)
        amps = self.framer.shape_amplitudes(dm_bits)
        return assemble_4d(amps, self._uniform_signs(rng))

    def amplitude_pmf(self) -> np.ndarray:
        return self._pmf.copy()

    def rate_loss_per_amplitude(self) -> float:
        return pmf_entropy(self._pmf) - self._rate

    def rate_4d(self) -> float:
        return float(4 * (Fraction(sum(m.num_bits for m in self.framer.matchers),
                                   4 * self.n) + 1))
