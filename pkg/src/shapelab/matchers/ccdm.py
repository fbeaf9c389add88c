"""Constant-composition matcher via exact enumerative (ranking) coding.

Every codeword is a permutation of a fixed multiset of amplitudes (the
composition).  Codewords are indexed in lexicographic order with the
alphabet sorted ascending; encoding walks the composition tree keeping the
exact number of completions with unbounded integers, so the mapping is
bit-exact and carry-free for any block length.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from ..constellation import mb_amplitude_pmf
from .base import DistributionMatcher, bits_to_int, int_to_bits

__all__ = ["ConstantCompositionMatcher", "multinomial", "composition_for_rate"]


def multinomial(counts) -> int:
    """Exact multinomial coefficient of the composition."""
    counts = [int(c) for c in counts]
    total = factorial(sum(counts))
    for c in counts:
        total //= factorial(c)
    return total


class ConstantCompositionMatcher(DistributionMatcher):
    def __init__(self, composition, alphabet):
        alphabet = np.asarray(alphabet, dtype=np.int64)
        composition = np.asarray(composition, dtype=np.int64)
        if composition.shape != alphabet.shape:
            raise ValueError("composition must give one count per alphabet value")
        if np.any(composition < 0):
            raise ValueError("composition counts must be nonnegative")
        if np.any(np.diff(alphabet) <= 0):
            raise ValueError("alphabet must be strictly increasing")
        self.alphabet = alphabet
        self.composition = composition
        self.num_amplitudes = int(composition.sum())
        self._size = multinomial(composition)
        self.num_bits = self._size.bit_length() - 1  # floor(log2(size))
        if self.num_bits < 0:
            raise ValueError("empty composition")

    @classmethod
    def for_rate(cls, num_amplitudes: int, num_bits: int, alphabet) -> "ConstantCompositionMatcher":
        comp = composition_for_rate(num_amplitudes, num_bits, alphabet)
        matcher = cls(comp, alphabet)
        if matcher.num_bits < num_bits:
            raise ValueError(
                f"no composition of size {num_amplitudes} supports {num_bits} bits")
        matcher.num_bits = num_bits
        return matcher

    def encode(self, bits: np.ndarray) -> np.ndarray:
        bits = self._check_bits(bits)
        index = bits_to_int(bits)
        counts = self.composition.copy()
        remaining = self.num_amplitudes
        size = self._size
        out = np.empty(self.num_amplitudes, dtype=np.int64)
        for pos in range(self.num_amplitudes):
            for a_idx, a in enumerate(self.alphabet):
                if counts[a_idx] == 0:
                    continue
                branch = size * int(counts[a_idx]) // remaining
                if index < branch:
                    out[pos] = a
                    counts[a_idx] -= 1
                    size = branch
                    remaining -= 1
                    break
                index -= branch
            else:
                raise AssertionError("rank exceeded composition class size")
        return out

    def decode(self, amplitudes: np.ndarray) -> np.ndarray:
        amps = self._check_amplitudes(amplitudes)
        counts = self.composition.copy()
        remaining = self.num_amplitudes
        size = self._size
        index = 0
        value_to_idx = {int(a): i for i, a in enumerate(self.alphabet)}
        for a in amps:
            a_idx = value_to_idx[int(a)]
            if counts[a_idx] == 0:
                raise ValueError("amplitude sequence violates the composition")
            for b_idx in range(a_idx):
                if counts[b_idx]:
                    index += size * int(counts[b_idx]) // remaining
            size = size * int(counts[a_idx]) // remaining
            counts[a_idx] -= 1
            remaining -= 1
        if index >> self.num_bits:
            raise ValueError("codeword outside the used index range")
        return int_to_bits(index, self.num_bits)

    def amplitude_pmf(self) -> np.ndarray:
        """Every codeword has the same type, so the pmf is the composition."""
        return self.composition / self.num_amplitudes

    def descriptor(self) -> dict:
        return {
            "type": "ccdm",
            "num_amplitudes": self.num_amplitudes,
            "num_bits": self.num_bits,
            "alphabet": self.alphabet.tolist(),
            "composition": self.composition.tolist(),
        }


def composition_for_rate(num_amplitudes: int, num_bits: int, alphabet) -> np.ndarray:
    """Lowest-energy Maxwell-Boltzmann-quantized composition fitting 2**num_bits.

    Bisects the MB shaping parameter: larger lambda means lower energy but a
    smaller composition class.  Quantization uses largest remainders so the
    counts always sum to the block length.
    """
    alphabet = np.asarray(alphabet, dtype=np.int64)

    def quantize(lam: float) -> np.ndarray:
        pmf = mb_amplitude_pmf(lam, alphabet).pmf
        scaled = pmf * num_amplitudes
        counts = np.floor(scaled).astype(np.int64)
        order = np.argsort(-(scaled - counts), kind="stable")
        for i in order[: num_amplitudes - counts.sum()]:
            counts[i] += 1
        return counts

    def feasible(lam: float) -> bool:
        return multinomial(quantize(lam)) >= (1 << num_bits)

    if not feasible(0.0):
        raise ValueError(
            f"{num_bits} bits infeasible for any composition of size {num_amplitudes}")
    lo, hi = 0.0, 1.0
    while feasible(hi):
        lo, hi = hi, hi * 2
        if hi > 1e6:
            break
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    # bisection keeps lo feasible; lambda=0 is the uniform fallback
    while not feasible(lo):
        lo *= 0.5
        if lo < 1e-12:
            lo = 0.0
            break
    return quantize(lo)
