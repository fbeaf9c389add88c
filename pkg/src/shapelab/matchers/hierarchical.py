"""Hierarchical LUT distribution matcher.

A stack of lookup-table layers, listed bottom-up.  The bottom layer emits
words of amplitudes; every layer above emits words of symbols, each of which
supplies the parent part of the address of one instance of the layer below.
With layer output lengths ``(L_0, L_1, ..., L_t)`` the tree has one top
instance and ``inst(l-1) = inst(l) * L_l`` instances below, so the block
length is ``inst(0) * L_0`` amplitudes and the bit rate is
``sum(inst(l) * k_l) / block_length``.

LUT contents are filled deterministically by greedy minimum-energy
assignment: each layer enumerates all candidate output words, sorts them by
expected downstream energy (ties by enumeration index), and keeps the
lowest-energy ``2**(k_l + parent_bits)`` words, addressed in that order.
Every LUT is injective, which makes the stack exactly invertible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .base import DistributionMatcher, bits_to_int, int_to_bits

__all__ = ["LayerSpec", "HierarchicalMatcher", "layer_stack", "layer_stack_for_block"]


@dataclass(frozen=True)
class LayerSpec:
    """One LUT layer: word length, fresh input bits, output symbol order."""

    output_len: int
    input_bits: int
    order: int

    def __post_init__(self):
        if self.order < 2 or self.order & (self.order - 1):
            raise ValueError(f"layer order must be a power of 2, got {self.order}")
        if self.output_len < 1 or self.input_bits < 0:
            raise ValueError("invalid layer dimensions")

    @property
    def symbol_bits(self) -> int:
        return int(self.order).bit_length() - 1


def layer_stack(output_lengths, input_bits, orders) -> list[LayerSpec]:
    if not len(output_lengths) == len(input_bits) == len(orders):
        raise ValueError("layer parameter lists must have equal length")
    return [LayerSpec(int(l), int(k), int(o))
            for l, k, o in zip(output_lengths, input_bits, orders)]


class HierarchicalMatcher(DistributionMatcher):
    def __init__(self, layers: list[LayerSpec], alphabet):
        alphabet = np.asarray(alphabet, dtype=np.int64)
        if not layers:
            raise ValueError("at least one layer required")
        if layers[0].order != len(alphabet):
            raise ValueError("bottom layer order must equal the alphabet size")
        self.alphabet = alphabet
        self.layers = list(layers)
        self._parent_bits = [layers[l + 1].symbol_bits for l in range(len(layers) - 1)]
        self._parent_bits.append(0)  # top layer
        inst = [1] * len(layers)
        for l in range(len(layers) - 1, 0, -1):
            inst[l - 1] = inst[l] * layers[l].output_len
        self._instances = inst
        self.num_amplitudes = inst[0] * layers[0].output_len
        self.num_bits = sum(i * s.input_bits for i, s in zip(inst, layers))
        self._luts, self._inverse, self._block_energy = self._build_luts()

    # -- construction -------------------------------------------------------

    def _build_luts(self):
        luts = []
        inverse = []
        block_energy = []
        child_energy = None  # expected downstream energy per symbol value
        for level, spec in enumerate(self.layers):
            addr_bits = spec.input_bits + self._parent_bits[level]
            n_words = 1 << addr_bits
            if level == 0:
                symbol_energy = (self.alphabet.astype(np.float64)) ** 2
            else:
                symbol_energy = child_energy
            if spec.output_len * spec.symbol_bits > 24:
                raise ValueError(
                    f"layer {level}: candidate space {spec.order}**{spec.output_len} "
                    "too large to enumerate")
            candidates = list(product(range(spec.order), repeat=spec.output_len))
            if n_words > len(candidates):
                raise ValueError(
                    f"layer {level}: {addr_bits} address bits exceed "
                    f"{spec.order}**{spec.output_len} candidate words")
            energies = np.array([sum(symbol_energy[v] for v in w) for w in candidates])
            keep = np.argsort(energies, kind="stable")[:n_words]
            words = [candidates[i] for i in keep]
            luts.append(words)
            inverse.append({w: a for a, w in enumerate(words)})
            # expected downstream energy of each parent symbol value feeding
            # this layer: mean word energy over its contiguous address block
            if level < len(self.layers) - 1:
                k = spec.input_bits
                parent_order = self.layers[level + 1].order
                blocks = np.empty(parent_order)
                for v in range(parent_order):
                    lo, hi = v << k, (v + 1) << k
                    blocks[v] = energies[keep[lo:hi]].mean()
                child_energy = blocks
            block_energy.append(energies[keep])
        return luts, inverse, block_energy

    # -- properties ---------------------------------------------------------

    @property
    def lut_memory_bits(self) -> int:
        """Total storage: entries x word length x bits per output symbol."""
        total = 0
        for level, spec in enumerate(self.layers):
            entries = 1 << (spec.input_bits + self._parent_bits[level])
            total += entries * spec.output_len * spec.symbol_bits
        return total

    def instance_counts(self) -> list[int]:
        return list(self._instances)

    # -- codec --------------------------------------------------------------

    def encode(self, bits: np.ndarray) -> np.ndarray:
        bits = self._check_bits(bits)
        pos = 0
        parent_values = [0]
        for level in range(len(self.layers) - 1, -1, -1):
            spec = self.layers[level]
            k = spec.input_bits
            outputs = []
            for parent in parent_values:
                fresh = bits_to_int(bits[pos:pos + k])
                pos += k
                addr = (parent << k) | fresh
                outputs.extend(self._luts[level][addr])
            parent_values = outputs
        return self.alphabet[np.asarray(parent_values)]

    def decode(self, amplitudes: np.ndarray) -> np.ndarray:
        amps = self._check_amplitudes(amplitudes)
        # bottom symbols are alphabet indices
        idx = np.searchsorted(self.alphabet, amps)
        values = [int(v) for v in idx]
        chunks: list[list[int]] = []  # per level, fresh-bit ints in instance order
        for level, spec in enumerate(self.layers):
            k = spec.input_bits
            fresh = []
            parents = []
            for i in range(self._instances[level]):
                word = tuple(values[i * spec.output_len:(i + 1) * spec.output_len])
                addr = self._inverse[level].get(word)
                if addr is None:
                    raise ValueError("amplitude block is not a valid LUT word")
                fresh.append(addr & ((1 << k) - 1))
                parents.append(addr >> k)
            chunks.append(fresh)
            values = parents
        out = []
        for level in range(len(self.layers) - 1, -1, -1):
            k = self.layers[level].input_bits
            for f in chunks[level]:
                out.append(int_to_bits(f, k))
        return np.concatenate(out) if out else np.zeros(0, dtype=np.uint8)

    # -- statistics ---------------------------------------------------------

    def amplitude_pmf(self) -> np.ndarray:
        """Exact aggregate amplitude distribution under uniform input bits.

        Marginals are propagated down the tree: with uniform fresh bits the
        address distribution of a layer is its (aggregated) parent-symbol
        marginal spread uniformly over each block.
        """
        top = self.layers[-1]
        q = self._word_marginal(len(self.layers) - 1,
                                np.full(1 << top.input_bits,
                                        1.0 / (1 << top.input_bits)))
        for level in range(len(self.layers) - 2, -1, -1):
            spec = self.layers[level]
            k = spec.input_bits
            addr_p = np.repeat(q / (1 << k), 1 << k)
            q = self._word_marginal(level, addr_p)
        return q

    def _word_marginal(self, level: int, addr_pmf: np.ndarray) -> np.ndarray:
        spec = self.layers[level]
        out = np.zeros(spec.order)
        for addr, word in enumerate(self._luts[level]):
            p = addr_pmf[addr] / spec.output_len
            for v in word:
                out[v] += p
        return out

    def descriptor(self) -> dict:
        return {
            "type": "hidm",
            "num_amplitudes": self.num_amplitudes,
            "num_bits": self.num_bits,
            "alphabet": self.alphabet.tolist(),
            "layers": [[s.output_len, s.input_bits, s.order] for s in self.layers],
        }


def layer_stack_for_block(block_length: int, total_bits: int,
                          alphabet_order: int = 4) -> list[LayerSpec]:
    """Synthesize a bottom-8 binary-tree stack hitting the exact bit total.

    Mirrors the shipped 6-layer shape: bottom words of 8 amplitudes, then
    length-2 layers of 64-ary symbols.  Fresh bits start at the usual
    (6 bottom, 4 middle) allocation and the remainder is pushed greedily into
    the top and the widest middle layers.
    """
    if block_length < 8 or block_length % 8 or (block_length // 8) & (block_length // 8 - 1):
        raise ValueError("block length must be 8 * 2**d")
    depth = (block_length // 8).bit_length()  # number of layers
    mid_order = alphabet_order ** 3  # one symbol addresses 3 amplitudes' worth
    insts = [block_length // (8 * (1 << l)) for l in range(depth)]
    bits = [6] + [4] * (depth - 1)
    bits[-1] = 0
    caps = [16 - 6] + [12 - 6] * (depth - 1)
    caps[-1] = 12
    remainder = total_bits - sum(i * b for i, b in zip(insts, bits))
    if remainder < 0:
        raise ValueError(f"total bits {total_bits} too small for this stack shape")
    for level in range(1, depth - 1):
        while remainder > caps[-1] and bits[level] < caps[level] and remainder - insts[level] >= 0:
            bits[level] += 1
            remainder -= insts[level]
    if not 0 <= remainder <= caps[-1]:
        raise ValueError(f"cannot place {remainder} bits in the top layer")
    bits[-1] = remainder
    lengths = [8] + [2] * (depth - 1)
    orders = [alphabet_order] + [mid_order] * (depth - 1)
    return layer_stack(lengths, bits, orders)
