"""Enumerative sphere shaping: the 2**k lowest-energy amplitude sequences.

The codebook is the set of length-N sequences with total energy
``sum(a_i**2) <= e_max``, with ``e_max`` the smallest bound whose sphere
holds at least ``2**k`` sequences, indexed in lexicographic order.  Counting
uses a suffix trellis over normalized energies ``(a**2 - 1) / 8`` (exact for
odd alphabets, keeps tables dense and small) with unbounded integers.
"""

from __future__ import annotations

import numpy as np

from .base import DistributionMatcher, bits_to_int, int_to_bits

__all__ = ["SphereShapingMatcher"]


def _normalized_energies(alphabet: np.ndarray):
    """Integer energy steps rescaled by their gcd; returns (steps, base, step)."""
    energies = [int(a) ** 2 for a in alphabet]
    base = energies[0]
    step = np.gcd.reduce(np.diff(energies)) if len(energies) > 1 else 1
    return [(e - base) // int(step) for e in energies], base, int(step)


class SphereShapingMatcher(DistributionMatcher):
    def __init__(self, num_amplitudes: int, num_bits: int, alphabet):
        alphabet = np.asarray(alphabet, dtype=np.int64)
        if np.any(np.diff(alphabet) <= 0):
            raise ValueError("alphabet must be strictly increasing")
        if num_bits > num_amplitudes * int(np.log2(len(alphabet))):
            raise ValueError(
                f"{num_bits} bits infeasible for {num_amplitudes} amplitudes "
                f"over {len(alphabet)} values")
        self.alphabet = alphabet
        self.num_amplitudes = int(num_amplitudes)
        self.num_bits = int(num_bits)
        self._steps, self._e_base, self._e_step = _normalized_energies(alphabet)
        self._budget = self._find_min_budget()
        self._suffix = self._build_suffix_table(self._budget)

    # -- construction -------------------------------------------------------

    def _find_min_budget(self) -> int:
        """Smallest normalized energy budget with >= 2**k sequences."""
        target = 1 << self.num_bits
        n, steps = self.num_amplitudes, self._steps
        hard_cap = n * steps[-1]
        cap = min(max(n, steps[-1]), hard_cap)
        while True:
            # rolling exact-energy histogram, grown length by length
            hist = [0] * (cap + 1)
            hist[0] = 1
            for _ in range(n):
                nxt = [0] * (cap + 1)
                for s in steps:
                    if s == 0:
                        for e in range(cap + 1):
                            nxt[e] += hist[e]
                    else:
                        for e in range(s, cap + 1):
                            nxt[e] += hist[e - s]
                hist = nxt
            total = 0
            for budget in range(cap + 1):
                total += hist[budget]
                if total >= target:
                    return budget
            if cap == hard_cap:
                raise ValueError("energy budget search failed")  # pragma: no cover
            cap = min(cap * 2, hard_cap)

    def _build_suffix_table(self, budget: int) -> list[list[int]]:
        """``suffix[p][e]`` = number of length ``N - p`` tails with energy <= e."""
        n, steps = self.num_amplitudes, self._steps
        width = budget + 1
        table = [None] * (n + 1)
        table[n] = [1] * width
        for p in range(n - 1, -1, -1):
            prev = table[p + 1]
            row = [0] * width
            for e in range(width):
                acc = 0
                for s in steps:
                    if s > e:
                        break
                    acc += prev[e - s]
                row[e] = acc
            table[p] = row
        return table

    # -- properties ---------------------------------------------------------

    @property
    def max_energy(self) -> int:
        """Sphere bound on sum(a**2)."""
        return self._budget * self._e_step + self.num_amplitudes * self._e_base

    @property
    def sphere_size(self) -> int:
        """Number of admissible sequences (>= 2**num_bits)."""
        return self._suffix[0][self._budget]

    def sequence_energy(self, amplitudes) -> int:
        a = np.asarray(amplitudes, dtype=np.int64)
        return int(np.sum(a * a))

    # -- codec --------------------------------------------------------------

    def encode(self, bits: np.ndarray) -> np.ndarray:
        bits = self._check_bits(bits)
        index = bits_to_int(bits)
        out = np.empty(self.num_amplitudes, dtype=np.int64)
        budget = self._budget
        for pos in range(self.num_amplitudes):
            tails = self._suffix[pos + 1]
            for a_idx, a in enumerate(self.alphabet):
                rem = budget - self._steps[a_idx]
                if rem < 0:
                    break
                branch = tails[rem]
                if index < branch:
                    out[pos] = a
                    budget = rem
                    break
                index -= branch
            else:
                raise AssertionError("rank exceeded sphere size")
        return out

    def decode(self, amplitudes: np.ndarray) -> np.ndarray:
        amps = self._check_amplitudes(amplitudes)
        if self.sequence_energy(amps) > self.max_energy:
            raise ValueError("sequence energy exceeds the sphere bound")
        value_to_idx = {int(a): i for i, a in enumerate(self.alphabet)}
        index = 0
        budget = self._budget
        for pos, a in enumerate(amps):
            a_idx = value_to_idx[int(a)]
            tails = self._suffix[pos + 1]
            for b_idx in range(a_idx):
                rem = budget - self._steps[b_idx]
                if rem >= 0:
                    index += tails[rem]
            budget -= self._steps[a_idx]
        if index >> self.num_bits:
            raise ValueError("codeword outside the used index range")
        return int_to_bits(index, self.num_bits)

    # -- statistics ---------------------------------------------------------

    def amplitude_pmf(self) -> np.ndarray:
        """Exact aggregate amplitude distribution over the 2**k used codewords.

        Walks the enumeration tree once.  Fully included subtrees contribute
        in closed form: by permutation symmetry of the energy constraint, a
        full sphere of ``l`` positions and budget ``e`` contains each value
        ``a`` exactly ``l * count(l - 1, e - step_a)`` times.
        """
        occ = [0] * len(self.alphabet)
        remaining = 1 << self.num_bits
        budget = self._budget
        n = self.num_amplitudes
        for pos in range(n):
            tails = self._suffix[pos + 1]
            tail_len = n - pos - 1
            for a_idx in range(len(self.alphabet)):
                rem = budget - self._steps[a_idx]
                if rem < 0:
                    break
                branch = tails[rem]
                if remaining >= branch:
                    # whole subtree used: current value occurs `branch` times,
                    # plus the closed-form interior occurrences
                    occ[a_idx] += branch
                    if tail_len:
                        deeper = self._suffix[pos + 2]
                        for b_idx in range(len(self.alphabet)):
                            rem2 = rem - self._steps[b_idx]
                            if rem2 >= 0:
                                occ[b_idx] += tail_len * deeper[rem2]
                    remaining -= branch
                    if remaining == 0:
                        break
                else:
                    occ[a_idx] += remaining
                    budget = rem
                    break
            if remaining == 0:
                break
        total = sum(occ)
        expected = self.num_amplitudes * (1 << self.num_bits)
        assert total == expected, (total, expected)
        # int/int true division is correctly rounded even for huge operands
        return np.array([o / total for o in occ], dtype=np.float64)

    def descriptor(self) -> dict:
        return {
            "type": "spsh",
            "num_amplitudes": self.num_amplitudes,
            "num_bits": self.num_bits,
            "alphabet": self.alphabet.tolist(),
            "max_energy": self.max_energy,
        }
