"""Sign-independent sequence statistics: energy dispersion index and kurtosis."""

from __future__ import annotations

import numpy as np

from ..constellation import SymbolSequence

__all__ = ["edi", "kurtosis"]


def edi(seq: SymbolSequence, window: int) -> float:
    """Variance-to-mean ratio of sliding-window sums of 4D-symbol energies.

    Depends on amplitudes only; zero for any constant-energy sequence.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > seq.n:
        raise ValueError(f"window {window} exceeds sequence length {seq.n}")
    e = seq.symbol_energies()
    sums = np.convolve(e, np.ones(window), mode="valid")
    mean = sums.mean()
    return float(sums.var() / mean)


def kurtosis(seq: SymbolSequence) -> float:
    """E|x|^4 / (E|x|^2)^2 over the 2D symbols of both polarizations."""
    pts = np.concatenate([seq.x_pol(), seq.y_pol()])
    p2 = np.abs(pts) ** 2
    mean2 = p2.mean()
    if mean2 == 0:
        raise ValueError("zero-power sequence")
    return float((p2**2).mean() / mean2**2)
