"""PAS frame assembly: distribution-matcher bank, FEC surrogate, sign mapping.

Frame layout for a block of n 4D symbols over an M-QAM constellation with
FEC rate c (all counts exact integers, validated at construction):

  input bits  = [matcher-bank bits | unshaped bits]
  amplitudes  = bank of 4n/N_DM matchers, outputs concatenated in slot order
  sign slots  = first n_u slots carry the unshaped bits, the remaining
                4n - n_u carry surrogate parity over the systematic payload
                (amplitude labels then unshaped bits)

Sign-bit convention: bit 1 -> +1 (matches the Gray label MSB).  The parity
generator is a seeded SHAKE-256 stream keyed by the systematic bits: it is
not an error-correcting code (performance is measured via GMI under ideal
FEC) but has the right counts and single-bit avalanche behaviour.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2

import numpy as np

from .constellation import Constellation, SymbolSequence, assemble_4d
from .matchers.base import DistributionMatcher

__all__ = ["PasFrameConfig", "PasFramer", "surrogate_parity",
           "bits_to_signs", "signs_to_bits"]


def surrogate_parity(systematic_bits: np.ndarray, num_parity: int, seed: int = 0) -> np.ndarray:
    """Deterministic avalanche-complete parity stream for the given payload."""
    bits = np.asarray(systematic_bits, dtype=np.uint8)
    if num_parity == 0:
        return np.zeros(0, dtype=np.uint8)
    shake = hashlib.shake_256()
    shake.update(seed.to_bytes(8, "big", signed=True))
    shake.update(bits.size.to_bytes(8, "big"))
    shake.update(np.packbits(bits).tobytes())
    raw = np.frombuffer(shake.digest((num_parity + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw)[:num_parity]


def bits_to_signs(bits: np.ndarray) -> np.ndarray:
    return (2 * np.asarray(bits, dtype=np.int8) - 1).astype(np.int8)


def signs_to_bits(signs: np.ndarray) -> np.ndarray:
    return ((np.asarray(signs, dtype=np.int8) + 1) // 2).astype(np.uint8)


@dataclass(frozen=True)
class PasFrameConfig:
    """Exact bit accounting for one selection block of n 4D symbols."""

    modulation_order: int          # M
    fec_rate: Fraction             # c
    rate_4d: Fraction              # bits per 4D symbol incl. the DM rate
    dm_block: int                  # amplitudes per matcher (N_DM)
    n: int                         # 4D symbols per block
    num_candidates: int = 1        # N_t (drives the pilot count)

    def __post_init__(self):
        m = self.modulation_order
        if m < 4 or m & (m - 1) or int(log2(m)) % 2:
            raise ValueError(f"modulation order must be a power of 4, got {m}")
        c = Fraction(self.fec_rate)
        if not 0 < c <= 1:
            raise ValueError(f"FEC rate must be in (0, 1], got {c}")
        object.__setattr__(self, "fec_rate", c)
        object.__setattr__(self, "rate_4d", Fraction(self.rate_4d))
        if self.n < 1 or self.dm_block < 1:
            raise ValueError("n and dm_block must be positive")
        if self.num_candidates < 1:
            raise ValueError("need at least one candidate")
        if (4 * self.n) % self.dm_block:
            raise ValueError(f"4n = {4 * self.n} not a multiple of N_DM = {self.dm_block}")
        for name in ("unshaped_bits", "fec_input_bits", "parity_bits",
                     "info_bits", "dm_input_bits"):
            value = getattr(self, "_" + name)()
            if value.denominator != 1:
                raise ValueError(f"{name} = {value} is not an integer")
            if value < 0:
                raise ValueError(f"{name} = {value} is negative")
        if self._info_bits() <= 0:
            raise ValueError("frame carries no information bits")

    # exact-fraction forms -------------------------------------------------

    def _log2_m(self) -> int:
        return int(log2(self.modulation_order))

    def _unshaped_bits(self) -> Fraction:
        return 2 * self.n * (2 - (1 - self.fec_rate) * self._log2_m())

    def _fec_input_bits(self) -> Fraction:
        return 2 * self.n * self.fec_rate * self._log2_m()

    def _parity_bits(self) -> Fraction:
        return self._fec_input_bits() * (1 - self.fec_rate) / self.fec_rate

    def _info_bits(self) -> Fraction:
        return 2 * self.n * (self.rate_4d / 2 - (1 - self.fec_rate) * self._log2_m()) \
            - self.pilot_bits

    def _dm_input_bits(self) -> Fraction:
        return 4 * self.n * (self.rate_4d / 4 - 1)

    # public integer counts --------------------------------------------------

    @property
    def pilot_bits(self) -> int:
        return ceil(log2(self.num_candidates)) if self.num_candidates > 1 else 0

    @property
    def unshaped_bits(self) -> int:
        return int(self._unshaped_bits())

    @property
    def fec_input_bits(self) -> int:
        return int(self._fec_input_bits())

    @property
    def parity_bits(self) -> int:
        return int(self._parity_bits())

    @property
    def info_bits(self) -> int:
        return int(self._info_bits())

    @property
    def dm_input_bits(self) -> int:
        return int(self._dm_input_bits())

    @property
    def dm_count(self) -> int:
        return 4 * self.n // self.dm_block

    @property
    def parity_to_sign_ratio(self) -> Fraction:
        """nu = (1 - c) log2(M) / 2."""
        return (1 - self.fec_rate) * self._log2_m() / 2


class PasFramer:
    """Invertible bits -> SymbolSequence mapper for one block."""

    def __init__(self, constellation: Constellation,
                 matchers: list[DistributionMatcher],
                 fec_rate, n: int, num_candidates: int = 1, fec_seed: int = 0):
        total_amps = sum(m.num_amplitudes for m in matchers)
        if total_amps != 4 * n:
            raise ValueError(f"matcher bank outputs {total_amps} amplitudes, need {4 * n}")
        blocks = {m.num_amplitudes for m in matchers}
        if len(blocks) != 1:
            raise ValueError("bank matchers must share one block length")
        total_bits = sum(m.num_bits for m in matchers)
        rate_4d = 4 * (Fraction(total_bits, 4 * n) + 1)
        self.config = PasFrameConfig(
            modulation_order=constellation.order, fec_rate=Fraction(fec_rate),
            rate_4d=rate_4d, dm_block=blocks.pop(), n=n,
            num_candidates=num_candidates)
        self.constellation = constellation
        self.matchers = list(matchers)
        self.fec_seed = fec_seed

    @property
    def bits_in(self) -> int:
        """Total frame input: info bits plus pilot bits."""
        return self.config.dm_input_bits + self.config.unshaped_bits

    # -- amplitude path ------------------------------------------------------

    def shape_amplitudes(self, dm_bits: np.ndarray) -> np.ndarray:
        dm_bits = np.asarray(dm_bits, dtype=np.uint8)
        if dm_bits.size != self.config.dm_input_bits:
            raise ValueError(f"expected {self.config.dm_input_bits} matcher bits")
        out = []
        pos = 0
        for m in self.matchers:
            out.append(m.encode(dm_bits[pos:pos + m.num_bits]))
            pos += m.num_bits
        return np.concatenate(out)

    def unshape_amplitudes(self, amplitudes: np.ndarray) -> np.ndarray:
        amps = np.asarray(amplitudes, dtype=np.int64)
        out = []
        pos = 0
        for m in self.matchers:
            out.append(m.decode(amps[pos:pos + m.num_amplitudes]))
            pos += m.num_amplitudes
        return np.concatenate(out)

    def amplitude_label_bits(self, amplitudes: np.ndarray) -> np.ndarray:
        """Gray amplitude labels as a flat bit vector (FEC systematic part)."""
        labels = self.constellation.amplitude_label(np.asarray(amplitudes))
        width = self.constellation.amplitude_bits
        return ((labels[:, None] >> np.arange(width - 1, -1, -1)) & 1) \
            .astype(np.uint8).reshape(-1)

    # -- full frame ----------------------------------------------------------

    def parity_for(self, amplitudes: np.ndarray, carried_sign_bits: np.ndarray) -> np.ndarray:
        systematic = np.concatenate([self.amplitude_label_bits(amplitudes),
                                     np.asarray(carried_sign_bits, dtype=np.uint8)])
        return surrogate_parity(systematic, self.config.parity_bits, self.fec_seed)

    def frame(self, bits: np.ndarray) -> SymbolSequence:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.size != self.bits_in:
            raise ValueError(f"expected {self.bits_in} frame bits, got {bits.size}")
        cfg = self.config
        dm_bits = bits[:cfg.dm_input_bits]
        unshaped = bits[cfg.dm_input_bits:]
        amplitudes = self.shape_amplitudes(dm_bits)
        parity = self.parity_for(amplitudes, unshaped)
        sign_bits = np.concatenate([unshaped, parity])
        return assemble_4d(amplitudes, bits_to_signs(sign_bits),
                           alphabet=self.constellation.amplitude_alphabet)

    def deframe(self, seq: SymbolSequence, verify_parity: bool = False) -> np.ndarray:
        cfg = self.config
        if seq.n != cfg.n:
            raise ValueError(f"expected a block of {cfg.n} 4D symbols")
        sign_bits = signs_to_bits(seq.signs)
        unshaped = sign_bits[:cfg.unshaped_bits]
        if verify_parity:
            expect = self.parity_for(seq.amplitudes, unshaped)
            if not np.array_equal(expect, sign_bits[cfg.unshaped_bits:]):
                raise ValueError("parity mismatch in noiseless loopback")
        dm_bits = self.unshape_amplitudes(seq.amplitudes)
        return np.concatenate([dm_bits, unshaped])

    def frame_raw(self, amplitudes: np.ndarray, sign_bits: np.ndarray) -> SymbolSequence:
        """Assemble a block from explicit amplitudes and a full sign-bit plane."""
        sign_bits = np.asarray(sign_bits, dtype=np.uint8)
        if sign_bits.size != 4 * self.config.n:
            raise ValueError("need one sign bit per slot")
        return assemble_4d(np.asarray(amplitudes), bits_to_signs(sign_bits),
                           alphabet=self.constellation.amplitude_alphabet)
