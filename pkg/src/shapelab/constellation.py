"""Square-QAM constellations, Maxwell-Boltzmann shaping and 4D symbol blocks.

Conventions used throughout the package:

* Constellation points live on the odd-integer grid (..., -3, -1, 1, 3, ...)
  per quadrature.  Launch-power scaling happens once, at the modulator, so
  that all matcher / selection arithmetic stays integer-exact.
* Labels are ``m = log2(M)`` bits, MSB first, split as
  ``[I bits | Q bits]`` (serial mapping per quadrature).  Each quadrature
  uses the binary-reflected Gray code on the PAM level index, which makes the
  per-quadrature MSB a pure sign bit and the remaining bits an
  amplitude label shared by the two mirrored levels.
* A block of ``n`` dual-polarization 4D symbols is stored as flat arrays of
  ``4n`` amplitudes and ``4n`` signs in slot order
  (X-I, X-Q, Y-I, Y-Q) per symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Constellation",
    "MbDistribution",
    "SymbolSequence",
    "square_qam",
    "mb_pmf",
    "mb_amplitude_pmf",
    "pmf_entropy",
    "solve_lambda_for_entropy",
    "gray_map",
    "gray_demap",
    "assemble_4d",
    "decompose_4d",
]

LAMBDA_MAX = 50.0


def _gray_code(i: np.ndarray) -> np.ndarray:
    return i ^ (i >> 1)


def _gray_decode_int(g: int) -> int:
    out = 0
    while g:
        out ^= g
        g >>= 1
    return out


@dataclass(frozen=True)
class Constellation:
    """Gray-labelled square M-QAM on the odd-integer grid."""

    order: int
    points: np.ndarray            # complex128, shape (M,), index = label value
    amplitude_alphabet: np.ndarray  # positive odd ints {1, 3, ..., 2*M_dm - 1}

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @property
    def bits_per_quadrature(self) -> int:
        return self.bits_per_symbol // 2

    @property
    def amplitude_bits(self) -> int:
        return self.bits_per_quadrature - 1

    def labels(self) -> np.ndarray:
        """Label value of each point (identity by construction)."""
        return np.arange(self.order)

    def amplitude_label(self, amplitudes: np.ndarray) -> np.ndarray:
        """Gray amplitude-bit pattern (as int) of each amplitude value."""
        idx = np.searchsorted(self.amplitude_alphabet, amplitudes)
        half = len(self.amplitude_alphabet)
        return _gray_code(idx + half) & (half - 1)

    def amplitude_from_label(self, labels: np.ndarray) -> np.ndarray:
        half = len(self.amplitude_alphabet)
        lut = np.empty(half, dtype=np.int64)
        for a_idx in range(half):
            lut[_gray_code(a_idx + half) & (half - 1)] = a_idx
        return self.amplitude_alphabet[lut[np.asarray(labels)]]


def square_qam(order: int) -> Constellation:
    """Build a Gray-mapped square QAM constellation (order a power of 4)."""
    if order < 4 or (order & (order - 1)) or int(np.log2(order)) % 2:
        raise ValueError(f"order must be a power of 4, got {order}")
    m = int(np.log2(order))
    mq = m // 2
    levels_per_quad = 1 << mq
    labels = np.arange(order)
    i_bits = labels >> mq
    q_bits = labels & (levels_per_quad - 1)
    i_level = 2 * np.array([_gray_decode_int(b) for b in i_bits]) - (levels_per_quad - 1)
    q_level = 2 * np.array([_gray_decode_int(b) for b in q_bits]) - (levels_per_quad - 1)
    points = i_level.astype(np.float64) + 1j * q_level.astype(np.float64)
    amplitude_alphabet = np.arange(1, levels_per_quad, 2, dtype=np.int64)
    return Constellation(order=order, points=points, amplitude_alphabet=amplitude_alphabet)


# ---------------------------------------------------------------------------
# Maxwell-Boltzmann distributions


@dataclass(frozen=True)
class MbDistribution:
    """pmf proportional to exp(-lambda * energy) over a finite energy list."""

    lam: float
    energies: np.ndarray
    pmf: np.ndarray

    @property
    def mean_energy(self) -> float:
        return float(np.dot(self.pmf, self.energies))

    @property
    def entropy(self) -> float:
        return pmf_entropy(self.pmf)


def mb_pmf(lam: float, energies) -> MbDistribution:
    """Maxwell-Boltzmann pmf exp(-lam * E) / Z over the given energies."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    energies = np.asarray(energies, dtype=np.float64)
    if energies.size == 0:
        raise ValueError("energy alphabet must be nonempty")
    # subtract the minimum energy for numerical stability; cancels in the ratio
    w = np.exp(-lam * (energies - energies.min()))
    return MbDistribution(lam=float(lam), energies=energies, pmf=w / w.sum())


def mb_amplitude_pmf(lam: float, amplitudes) -> MbDistribution:
    """MB pmf over per-quadrature amplitudes, using energy = amplitude**2."""
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    return mb_pmf(lam, amplitudes**2)


def pmf_entropy(pmf) -> float:
    """Shannon entropy in bits."""
    p = np.asarray(pmf, dtype=np.float64)
    nz = p[p > 0]
    return float(-np.dot(nz, np.log2(nz)))


def solve_lambda_for_entropy(target_entropy: float, energies,
                             tol: float = 1e-9, lam_max: float = LAMBDA_MAX):
    """Find lambda with H(mb_pmf(lambda)) == target_entropy (bits).

    H is strictly decreasing in lambda, so plain bisection on
    ``[0, lam_max]`` converges.  Returns ``(lam, saturated)``; ``saturated``
    is True when the target lies below what ``lam_max`` can reach, in which
    case ``lam_max`` itself is returned.
    """
    energies = np.asarray(energies, dtype=np.float64)
    h_max = np.log2(energies.size)
    if not 0.0 < target_entropy <= h_max + 1e-12:
        raise ValueError(
            f"target entropy {target_entropy} outside (0, {h_max}] bits")
    if mb_pmf(lam_max, energies).entropy > target_entropy:
        return lam_max, True
    lo, hi = 0.0, lam_max
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mb_pmf(mid, energies).entropy > target_entropy:
            lo = mid
        else:
            hi = mid
        if abs(mb_pmf(mid, energies).entropy - target_entropy) <= tol:
            return mid, False
    return 0.5 * (lo + hi), False


# ---------------------------------------------------------------------------
# Gray mapping


def gray_map(constellation: Constellation, bits: np.ndarray) -> np.ndarray:
    """Map bits (..., m) or flat multiples of m to constellation points."""
    m = constellation.bits_per_symbol
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, m)
    weights = 1 << np.arange(m - 1, -1, -1)
    labels = bits @ weights
    return constellation.points[labels]


def gray_demap(constellation: Constellation, points: np.ndarray) -> np.ndarray:
    """Inverse of :func:`gray_map` for points exactly on the grid."""
    m = constellation.bits_per_symbol
    pts = np.asarray(points, dtype=np.complex128).ravel()
    idx = _nearest_label(constellation, pts)
    exact = constellation.points[idx]
    if not np.allclose(exact, pts, atol=1e-9):
        raise ValueError("points do not lie on the constellation grid")
    bits = ((idx[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    return bits.reshape(-1)


def _nearest_label(constellation: Constellation, points: np.ndarray) -> np.ndarray:
    """Label of the nearest constellation point (per-quadrature slicing)."""
    mq = constellation.bits_per_quadrature
    half = 1 << (mq - 1)
    levels = 1 << mq

    def level_index(v):
        i = np.rint((v + (levels - 1)) / 2).astype(np.int64)
        return np.clip(i, 0, levels - 1)

    i_idx = level_index(np.real(points))
    q_idx = level_index(np.imag(points))
    i_lab = _gray_code(i_idx)
    q_lab = _gray_code(q_idx)
    return (i_lab << mq) | q_lab


def hard_decision(constellation: Constellation, points: np.ndarray) -> np.ndarray:
    """Nearest grid point for each (arbitrary) complex sample."""
    return constellation.points[_nearest_label(constellation, np.asarray(points))]


# ---------------------------------------------------------------------------
# 4D symbol blocks


@dataclass
class SymbolSequence:
    """Block of n dual-polarization 4D symbols in slot order (XI, XQ, YI, YQ)."""

    amplitudes: np.ndarray       # int64, shape (4n,)
    signs: np.ndarray            # int8 in {-1, +1}, shape (4n,)
    power_dbm: float = 0.0       # per-channel launch power applied at modulation

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.int64)
        self.signs = np.asarray(self.signs, dtype=np.int8)
        if self.amplitudes.shape != self.signs.shape:
            raise ValueError("amplitudes and signs must have equal length")
        if self.amplitudes.size % 4:
            raise ValueError("sequence length must be a multiple of 4 slots")

    @property
    def n(self) -> int:
        return self.amplitudes.size // 4

    def levels(self) -> np.ndarray:
        return self.amplitudes * self.signs

    def x_pol(self) -> np.ndarray:
        lv = self.levels().reshape(-1, 4)
        return lv[:, 0] + 1j * lv[:, 1]

    def y_pol(self) -> np.ndarray:
        lv = self.levels().reshape(-1, 4)
        return lv[:, 2] + 1j * lv[:, 3]

    def symbol_energies(self) -> np.ndarray:
        """Per-4D-symbol energy on the integer grid."""
        return (self.amplitudes.astype(np.float64) ** 2).reshape(-1, 4).sum(axis=1)

    def copy(self) -> "SymbolSequence":
        return SymbolSequence(self.amplitudes.copy(), self.signs.copy(), self.power_dbm)


def assemble_4d(amplitudes, signs, alphabet=None, power_dbm: float = 0.0) -> SymbolSequence:
    """Build a :class:`SymbolSequence`, validating amplitudes against the alphabet."""
    amplitudes = np.asarray(amplitudes, dtype=np.int64)
    signs = np.asarray(signs, dtype=np.int8)
    if amplitudes.shape != signs.shape:
        raise ValueError("amplitudes and signs must have equal length")
    if not np.all(np.abs(signs) == 1):
        raise ValueError("signs must be +1 or -1")
    if alphabet is not None:
        alphabet = np.asarray(alphabet)
        if not np.all(np.isin(amplitudes, alphabet)):
            raise ValueError("amplitude outside the alphabet")
    return SymbolSequence(amplitudes=amplitudes, signs=signs, power_dbm=power_dbm)


def decompose_4d(seq: SymbolSequence):
    """Inverse of :func:`assemble_4d`."""
    return seq.amplitudes.copy(), seq.signs.copy()
