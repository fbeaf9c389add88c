"""Sequence selection: ideal rejection sampling and the practical schemes.

All practical schemes build ``N_t`` candidate blocks from the same
information bits through invertible per-candidate transformations, score
them with a channel-quality metric and transmit the argmin (ties broken by
the lowest candidate index, which makes results independent of evaluation
order).  Scheme identifiers used by the harness config surface:

  bs         scrambled bits ahead of the full PAS block (FEC inside)
  si         post-modulation symbol interleaving with pilot symbols
  sbbs       FEC-independent scrambling; parity overwrites sign slots of the
             selected block afterwards
  mbbs       chained variant: parity predetermines sign slots of the next
             block (decoded back to front)
  list-ccdm  flipping-bit prefixes through a single whole-block CCDM
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2

import numpy as np

from .constellation import SymbolSequence, assemble_4d
from .framing import PasFramer, bits_to_signs, signs_to_bits, surrogate_parity
from .matchers.base import bits_to_int, int_to_bits
from .metrics.information import selection_penalty
from .seeding import derive_rng
from .sources import BlockSource

__all__ = [
    "SelectionStats",
    "TransmitRecord",
    "ScramblerBank",
    "BsSelector",
    "SiSelector",
    "SbBsSelector",
    "MbBsSelector",
    "ListCcdmSelector",
    "ideal_select",
    "IdealSelectionResult",
]

SIGN_REGIMES = ("shaped", "unshaped-unknown", "unshaped-known")


@dataclass(frozen=True)
class SelectionStats:
    proposed: int
    accepted: int
    block_len: int
    threshold: float | None = None

    @property
    def eta(self) -> float:
        return self.accepted / self.proposed

    @property
    def tested_per_accepted(self) -> float:
        """N_t = N_p / N_a."""
        return self.proposed / self.accepted

    @property
    def penalty_bits_per_4d(self) -> float:
        return selection_penalty(self.block_len, self.proposed, self.accepted)


@dataclass
class TransmitRecord:
    """One transmitted block plus the selection bookkeeping behind it."""

    sequence: SymbolSequence
    chosen: int
    costs: np.ndarray
    selected: SymbolSequence | None = None  # pre-overwrite block where it differs


class ScramblerBank:
    """N_t fixed pairwise-distinct masks; mask 0 is all-zero (identity)."""

    def __init__(self, num_candidates: int, num_bits: int, seed: int = 0):
        self.num_candidates = num_candidates
        self.num_bits = num_bits
        self.pilot_width = ceil(log2(num_candidates)) if num_candidates > 1 else 0
        masks = [np.zeros(num_bits, dtype=np.uint8)]
        seen = {masks[0].tobytes()}
        for k in range(1, num_candidates):
            attempt = 0
            while True:
                rng = derive_rng(seed, "scrambler-mask", k, attempt)
                m = rng.integers(0, 2, size=num_bits, dtype=np.uint8)
                if m.tobytes() not in seen:
                    break
                attempt += 1
            seen.add(m.tobytes())
            masks.append(m)
        self.masks = np.stack(masks)

    def pilot(self, k: int) -> np.ndarray:
        return int_to_bits(k, self.pilot_width)

    def scramble(self, k: int, bits: np.ndarray) -> np.ndarray:
        return np.bitwise_xor(np.asarray(bits, dtype=np.uint8), self.masks[k])


def _argmin_lowest(costs: np.ndarray) -> int:
    return int(np.argmin(costs))  # numpy argmin already returns the first minimum


# ---------------------------------------------------------------------------
# BS: scrambling ahead of the full PAS block


class BsSelector:
    def __init__(self, framer: PasFramer, num_candidates: int, metric,
                 seed: int = 0):
        if framer.config.num_candidates != num_candidates:
            raise ValueError("framer pilot accounting does not match N_t")
        self.framer = framer
        self.num_candidates = num_candidates
        self.metric = metric
        self.info_bits = framer.bits_in - framer.config.pilot_bits
        self.bank = ScramblerBank(num_candidates, self.info_bits, seed)

    def stats(self) -> SelectionStats:
        return SelectionStats(self.num_candidates, 1, self.framer.config.n)

    def candidates(self, info: np.ndarray) -> list[SymbolSequence]:
        info = self._check_info(info)
        out = []
        for k in range(self.num_candidates):
            bits = np.concatenate([self.bank.pilot(k), self.bank.scramble(k, info)])
            out.append(self.framer.frame(bits))
        return out

    def encode(self, info: np.ndarray) -> TransmitRecord:
        cands = self.candidates(info)
        costs = np.array([self.metric(c) for c in cands])
        k = _argmin_lowest(costs)
        return TransmitRecord(sequence=cands[k], chosen=k, costs=costs)

    def decode(self, seq: SymbolSequence) -> np.ndarray:
        bits = self.framer.deframe(seq)
        width = self.bank.pilot_width
        k = bits_to_int(bits[:width]) if width else 0
        return self.bank.scramble(k, bits[width:])

    def _check_info(self, info) -> np.ndarray:
        info = np.asarray(info, dtype=np.uint8).ravel()
        if info.size != self.info_bits:
            raise ValueError(f"expected {self.info_bits} info bits, got {info.size}")
        return info


# ---------------------------------------------------------------------------
# SI: post-modulation interleaving with pilot symbols


class SiSelector:
    """Selects among interleaved versions of one already-modulated block.

    Pilot symbols use the four outer-corner points per polarization, so one
    4D pilot symbol addresses 16 candidates and two address 256 (the cap).
    Interleaving runs over whole 4D symbols, either across the full block or
    independently inside each matcher-block span.
    """

    def __init__(self, constellation, n: int, num_candidates: int, metric,
                 seed: int = 0, mode: str = "whole",
                 dm_block_symbols: int | None = None):
        if mode not in ("whole", "per-dm-block"):
            raise ValueError(f"unknown interleaver mode {mode!r}")
        if mode == "per-dm-block":
            if not dm_block_symbols or n % dm_block_symbols:
                raise ValueError("per-dm-block mode needs a divisor block size")
        self.pilot_count = max(1, ceil(log2(num_candidates) / 4)) if num_candidates > 1 else 0
        if self.pilot_count > 2:
            raise ValueError(f"N_t = {num_candidates} needs more than 2 pilot symbols")
        self.constellation = constellation
        self.n = n
        self.num_candidates = num_candidates
        self.metric = metric
        self.mode = mode
        self.dm_block_symbols = dm_block_symbols
        self._perms = [self._permutation(k, seed) for k in range(num_candidates)]

    def _permutation(self, k: int, seed: int) -> np.ndarray:
        if k == 0:
            return np.arange(self.n)
        if self.mode == "whole":
            return derive_rng(seed, "interleaver", k).permutation(self.n)
        out = np.arange(self.n)
        span = self.dm_block_symbols
        for b in range(self.n // span):
            rng = derive_rng(seed, "interleaver", k, b)
            out[b * span:(b + 1) * span] = b * span + rng.permutation(span)
        return out

    @property
    def overhead_bits(self) -> int:
        """Uncoded bits displaced per block by the pilot symbols."""
        return 2 * self.constellation.bits_per_symbol * self.pilot_count

    def stats(self) -> SelectionStats:
        return SelectionStats(self.num_candidates, 1, self.n)

    def _apply_perm(self, seq: SymbolSequence, perm: np.ndarray) -> SymbolSequence:
        slots = (4 * perm[:, None] + np.arange(4)[None, :]).reshape(-1)
        return SymbolSequence(seq.amplitudes[slots], seq.signs[slots], seq.power_dbm)

    def _pilot_block(self, k: int):
        top = int(self.constellation.amplitude_alphabet[-1])
        amps = np.full(4 * self.pilot_count, top, dtype=np.int64)
        signs = np.empty(4 * self.pilot_count, dtype=np.int8)
        quad_signs = {0: (1, 1), 1: (1, -1), 2: (-1, 1), 3: (-1, -1)}
        for p in range(self.pilot_count):
            digit = (k >> (4 * (self.pilot_count - 1 - p))) & 0xF
            signs[4 * p:4 * p + 2] = quad_signs[digit >> 2]
            signs[4 * p + 2:4 * p + 4] = quad_signs[digit & 3]
        return amps, signs

    def encode(self, seq: SymbolSequence) -> TransmitRecord:
        if seq.n != self.n:
            raise ValueError(f"expected a block of {self.n} 4D symbols")
        cands = [self._apply_perm(seq, p) for p in self._perms]
        costs = np.array([self.metric(c) for c in cands])
        k = _argmin_lowest(costs)
        amps, signs = self._pilot_block(k)
        tx = SymbolSequence(np.concatenate([cands[k].amplitudes, amps]),
                            np.concatenate([cands[k].signs, signs]),
                            seq.power_dbm)
        return TransmitRecord(sequence=tx, chosen=k, costs=costs)

    def decode(self, seq: SymbolSequence) -> SymbolSequence:
        if seq.n != self.n + self.pilot_count:
            raise ValueError("block does not include the pilot symbols")
        data_slots = 4 * self.n
        k = 0
        top = int(self.constellation.amplitude_alphabet[-1])
        for p in range(self.pilot_count):
            base = data_slots + 4 * p
            if not np.all(seq.amplitudes[base:base + 4] == top):
                raise ValueError("pilot symbol amplitudes corrupted")
            s = seq.signs[base:base + 4]
            quad = {(1, 1): 0, (1, -1): 1, (-1, 1): 2, (-1, -1): 3}
            digit = (quad[(s[0], s[1])] << 2) | quad[(s[2], s[3])]
            k = (k << 4) | digit
        if k >= self.num_candidates:
            raise ValueError(f"pilot value {k} outside the candidate set")
        inv = np.argsort(self._perms[k])
        data = SymbolSequence(seq.amplitudes[:data_slots], seq.signs[:data_slots],
                              seq.power_dbm)
        return self._apply_perm(data, inv)


# ---------------------------------------------------------------------------
# FEC-independent BS (single-block and multi-block)


class _OverlayBase:
    """Shared machinery: scrambled candidates with a reserved sign-slot set."""

    def __init__(self, framer: PasFramer, outer_fec_rate, num_candidates: int,
                 metric, parity_mode: str = "consecutive", seed: int = 0):
        from fractions import Fraction

        if framer.config.fec_rate != 1:
            raise ValueError("FEC-independent schemes need a rate-1 inner frame")
        if parity_mode not in ("consecutive", "random"):
            raise ValueError(f"unknown parity mode {parity_mode!r}")
        c = Fraction(outer_fec_rate)
        cfg = framer.config
        nu = (1 - c) * cfg._log2_m() / 2
        if nu > 1:
            raise ValueError(f"parity-to-sign ratio nu = {nu} exceeds 1")
        parity = 4 * cfg.n * nu
        if parity.denominator != 1:
            raise ValueError(f"parity count {parity} is not an integer")
        self.parity_count = int(parity)
        self.nu = nu
        self.framer = framer
        self.num_candidates = num_candidates
        self.metric = metric
        self.seed = seed
        self.parity_mode = parity_mode
        self.parity_slots = self._parity_slots(parity_mode, cfg.n)
        free = np.setdiff1d(np.arange(4 * cfg.n), self.parity_slots)
        self.free_slots = free
        self.pilot_width = ceil(log2(num_candidates)) if num_candidates > 1 else 0
        self._banks: dict[int, ScramblerBank] = {}

    def _parity_slots(self, mode: str, n: int) -> np.ndarray:
        if self.parity_count == 0:
            return np.zeros(0, dtype=np.int64)
        if mode == "consecutive":
            if self.parity_count % 4:
                raise ValueError(
                    "consecutive mode needs nu * n whole 4D symbols per block")
            return np.arange(self.parity_count)
        rng = derive_rng(self.seed, "parity-slots")
        return np.sort(rng.choice(4 * n, size=self.parity_count, replace=False))

    def _bank(self, info_bits: int) -> ScramblerBank:
        if info_bits not in self._banks:
            self._banks[info_bits] = ScramblerBank(self.num_candidates, info_bits,
                                                   self.seed)
        return self._banks[info_bits]

    def _payload_bits(self, free_count: int) -> int:
        return self.framer.config.dm_input_bits + free_count - self.pilot_width

    def _build_candidates(self, info: np.ndarray, free: np.ndarray,
                          fixed_bits: np.ndarray | None):
        """Frame all candidates; reserved slots carry fixed or placeholder bits."""
        cfg = self.framer.config
        bank = self._bank(info.size)
        cands = []
        for k in range(self.num_candidates):
            bits = np.concatenate([bank.pilot(k), bank.scramble(k, info)])
            dm_bits = bits[:cfg.dm_input_bits]
            rest = bits[cfg.dm_input_bits:]
            sign_bits = np.zeros(4 * cfg.n, dtype=np.uint8)
            sign_bits[free] = rest
            if self.parity_slots.size:
                if fixed_bits is not None:
                    sign_bits[self.parity_slots] = fixed_bits
                else:
                    rng = derive_rng(self.seed, "placeholder", k)
                    sign_bits[self.parity_slots] = rng.integers(
                        0, 2, size=self.parity_slots.size, dtype=np.uint8)
            cands.append(self.framer.frame_raw(
                self.framer.shape_amplitudes(dm_bits), sign_bits))
        return cands, bank

    def _recover(self, seq: SymbolSequence, free: np.ndarray) -> np.ndarray:
        dm_bits = self.framer.unshape_amplitudes(seq.amplitudes)
        sign_bits = signs_to_bits(seq.signs)
        bits = np.concatenate([dm_bits, sign_bits[free]])
        bank = self._bank(bits.size - self.pilot_width)
        k = bits_to_int(bits[:self.pilot_width]) if self.pilot_width else 0
        return bank.scramble(k, bits[self.pilot_width:])

    def _parity_of(self, seq: SymbolSequence, free: np.ndarray) -> np.ndarray:
        carried = signs_to_bits(seq.signs)[free]
        systematic = np.concatenate([self.framer.amplitude_label_bits(seq.amplitudes),
                                     carried])
        return surrogate_parity(systematic, self.parity_count, self.framer.fec_seed)


class SbBsSelector(_OverlayBase):
    """Selection on fully-signed candidates; parity overwrites slots afterwards."""

    @property
    def info_bits(self) -> int:
        return self._payload_bits(self.free_slots.size)

    def stats(self) -> SelectionStats:
        return SelectionStats(self.num_candidates, 1, self.framer.config.n)

    def encode(self, info: np.ndarray) -> TransmitRecord:
        info = np.asarray(info, dtype=np.uint8).ravel()
        if info.size != self.info_bits:
            raise ValueError(f"expected {self.info_bits} info bits")
        cands, _ = self._build_candidates(info, self.free_slots, fixed_bits=None)
        costs = np.array([self.metric(c) for c in cands])
        k = _argmin_lowest(costs)
        chosen = cands[k]
        tx = chosen.copy()
        if self.parity_slots.size:
            parity = self._parity_of(chosen, self.free_slots)
            tx.signs[self.parity_slots] = bits_to_signs(parity)
        return TransmitRecord(sequence=tx, chosen=k, costs=costs, selected=chosen)

    def decode(self, seq: SymbolSequence) -> np.ndarray:
        return self._recover(seq, self.free_slots)


class MbBsSelector(_OverlayBase):
    """Chained scheme: block i's parity rides on block i+1's reserved slots.

    The reserved slots are fixed (and visible to the metric) while block
    i+1's candidates are scored; the first block has no predecessor, so all
    of its slots are free.  A trailing flush block carries the final parity
    and is excluded from rate accounting.  Decoding runs back to front.
    """

    @property
    def first_block_bits(self) -> int:
        return self._payload_bits(4 * self.framer.config.n)

    @property
    def chained_block_bits(self) -> int:
        return self._payload_bits(self.free_slots.size)

    def block_sizes(self, num_blocks: int) -> list[int]:
        return [self.first_block_bits] + [self.chained_block_bits] * (num_blocks - 1)

    def stats(self, num_blocks: int) -> SelectionStats:
        return SelectionStats(num_blocks * self.num_candidates, num_blocks,
                              self.framer.config.n)

    def encode_stream(self, info_blocks: list[np.ndarray]) -> list[TransmitRecord]:
        all_slots = np.arange(4 * self.framer.config.n)
        records = []
        parity = None
        for i, info in enumerate(info_blocks):
            info = np.asarray(info, dtype=np.uint8).ravel()
            free = all_slots if parity is None else self.free_slots
            expected = self._payload_bits(free.size)
            if info.size != expected:
                raise ValueError(f"block {i}: expected {expected} info bits")
            cands, _ = self._build_candidates(info, free, fixed_bits=parity)
            costs = np.array([self.metric(c) for c in cands])
            k = _argmin_lowest(costs)
            records.append(TransmitRecord(sequence=cands[k], chosen=k, costs=costs))
            parity = self._parity_of(cands[k], free) if self.parity_count else None
            if self.parity_count == 0:
                parity = np.zeros(0, dtype=np.uint8)
        records.append(self._flush_block(parity))
        return records

    def _flush_block(self, parity: np.ndarray | None) -> TransmitRecord:
        cfg = self.framer.config
        amps = self.framer.shape_amplitudes(
            np.zeros(cfg.dm_input_bits, dtype=np.uint8))
        sign_bits = np.zeros(4 * cfg.n, dtype=np.uint8)
        if parity is not None and self.parity_slots.size:
            sign_bits[self.parity_slots] = parity
        seq = self.framer.frame_raw(amps, sign_bits)
        return TransmitRecord(sequence=seq, chosen=0, costs=np.zeros(1))

    def decode_stream(self, sequences: list[SymbolSequence],
                      verify_parity: bool = False) -> list[np.ndarray]:
        if len(sequences) < 2:
            raise ValueError("stream must contain at least one block plus flush")
        all_slots = np.arange(4 * self.framer.config.n)
        out = []
        for i in range(len(sequences) - 2, -1, -1):
            free = all_slots if i == 0 else self.free_slots
            if verify_parity and self.parity_slots.size:
                expect = self._parity_of(sequences[i], free)
                got = signs_to_bits(sequences[i + 1].signs)[self.parity_slots]
                if not np.array_equal(expect, got):
                    raise ValueError(f"parity chain broken after block {i}")
            out.append(self._recover(sequences[i], free))
        return out[::-1]


# ---------------------------------------------------------------------------
# List-encoding CCDM


class ListCcdmSelector:
    """Flipping-bit prefixes through a single whole-block CCDM."""

    def __init__(self, framer: PasFramer, num_candidates: int, metric):
        if framer.config.dm_count != 1:
            raise ValueError(
                "list-ccdm ties the block to one matcher: need 4n == N_DM")
        if num_candidates & (num_candidates - 1):
            raise ValueError("N_t must be a power of 2")
        self.framer = framer
        self.num_candidates = num_candidates
        self.metric = metric
        self.flip_bits = int(log2(num_candidates)) if num_candidates > 1 else 0
        self.info_bits = framer.bits_in - self.flip_bits

    def stats(self) -> SelectionStats:
        return SelectionStats(self.num_candidates, 1, self.framer.config.n)

    def encode(self, info: np.ndarray) -> TransmitRecord:
        info = np.asarray(info, dtype=np.uint8).ravel()
        if info.size != self.info_bits:
            raise ValueError(f"expected {self.info_bits} info bits")
        cands = []
        for k in range(self.num_candidates):
            bits = np.concatenate([int_to_bits(k, self.flip_bits), info])
            cands.append(self.framer.frame(bits))
        costs = np.array([self.metric(c) for c in cands])
        k = _argmin_lowest(costs)
        return TransmitRecord(sequence=cands[k], chosen=k, costs=costs)

    def decode(self, seq: SymbolSequence) -> np.ndarray:
        bits = self.framer.deframe(seq)
        return bits[self.flip_bits:]


# ---------------------------------------------------------------------------
# Ideal rejection-sampling selection


@dataclass
class IdealSelectionResult:
    accepted: list[SymbolSequence]
    stats: SelectionStats
    threshold: float


def ideal_select(source: BlockSource, metric, num_accept: int, *,
                 threshold: float | None = None, target_eta: float | None = None,
                 calibration_size: int = 4096, sign_regime: str = "shaped",
                 seed: int = 0, max_proposals: int = 10**7) -> IdealSelectionResult:
    """Accept blocks whose metric falls at or below the threshold.

    Exactly one of ``threshold`` / ``target_eta`` must be given; with a
    target acceptance rate the threshold is frozen to the empirical quantile
    of a dedicated calibration batch.  Sign regimes:

      shaped            selection controls amplitudes and signs
      unshaped-unknown  pass a sign-independent (sign-averaged) metric; the
                        transmitted signs are drawn fresh after acceptance
      unshaped-known    signs are drawn once per output slot, visible to the
                        metric, and held fixed while amplitudes resample
    """
    if (threshold is None) == (target_eta is None):
        raise ValueError("give exactly one of threshold / target_eta")
    if sign_regime not in SIGN_REGIMES:
        raise ValueError(f"unknown sign regime {sign_regime!r}")
    if num_accept < 1:
        raise ValueError("need at least one accepted block")

    fixed_signs = None

    def fixed_for_slot(slot: int) -> np.ndarray:
        rng = derive_rng(seed, "fixed-signs", slot)
        return rng.choice([-1, 1], size=4 * source.n).astype(np.int8)

    def propose(tag: str, j: int, slot: int) -> SymbolSequence:
        rng = derive_rng(seed, tag, j)
        cand = source.sample(rng)
        if sign_regime == "unshaped-known":
            cand = SymbolSequence(cand.amplitudes, fixed_signs, cand.power_dbm)
        return cand

    if target_eta is not None:
        if calibration_size < 1:
            raise ValueError("empty calibration batch")
        if not 0 < target_eta <= 1:
            raise ValueError("target acceptance rate must be in (0, 1]")
        if sign_regime == "unshaped-known":
            fixed_signs = fixed_for_slot(-1)
        costs = [metric(propose("calibration", j, -1))
                 for j in range(calibration_size)]
        threshold = float(np.quantile(np.asarray(costs), target_eta,
                                      method="lower"))

    accepted: list[SymbolSequence] = []
    proposed = 0
    while len(accepted) < num_accept:
        if proposed >= max_proposals:
            raise RuntimeError(
                f"{max_proposals} proposals without reaching {num_accept} accepts")
        slot = len(accepted)
        if sign_regime == "unshaped-known":
            fixed_signs = fixed_for_slot(slot)
        cand = propose("proposal", proposed, slot)
        cost = metric(cand)
        proposed += 1
        if cost <= threshold:
            if sign_regime == "unshaped-unknown":
                rng = derive_rng(seed, "tx-signs", slot)
                cand = SymbolSequence(
                    cand.amplitudes,
                    rng.choice([-1, 1], size=4 * source.n).astype(np.int8),
                    cand.power_dbm)
            accepted.append(cand)
    stats = SelectionStats(proposed=proposed, accepted=len(accepted),
                           block_len=source.n, threshold=threshold)
    return IdealSelectionResult(accepted=accepted, stats=stats, threshold=threshold)
