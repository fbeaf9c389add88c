"""Rate loss of finite-blocklength matchers.

Rate loss = H(induced amplitude distribution) - bits/amplitude, where the
induced distribution is the aggregate over the used codeword set.  All three
matcher families expose an exact closed form (composition type, sphere walk,
marginal propagation); a seeded sampling estimator is kept as an independent
cross-check.
"""

from __future__ import annotations

import numpy as np

from ..constellation import pmf_entropy
from ..seeding import derive_rng
from .base import DistributionMatcher

__all__ = ["induced_amplitude_pmf", "rate_loss", "sampled_amplitude_pmf"]


def induced_amplitude_pmf(matcher: DistributionMatcher) -> np.ndarray:
    """Exact aggregate amplitude pmf over the matcher's used codewords."""
    return matcher.amplitude_pmf()


def rate_loss(matcher: DistributionMatcher) -> float:
    """H(induced pmf) - k/N in bits per amplitude."""
    return pmf_entropy(matcher.amplitude_pmf()) - float(matcher.rate)


def sampled_amplitude_pmf(matcher: DistributionMatcher, num_words: int = 2000,
                          seed: int = 0) -> np.ndarray:
    """Monte-Carlo estimate of the induced pmf from random encodes."""
    rng = derive_rng(seed, "rateloss-sampling")
    counts = np.zeros(len(matcher.alphabet), dtype=np.int64)
    for _ in range(num_words):
        bits = rng.integers(0, 2, size=matcher.num_bits, dtype=np.uint8)
        amps = matcher.encode(bits)
        idx = np.searchsorted(matcher.alphabet, amps)
        counts += np.bincount(idx, minlength=len(matcher.alphabet))
    return counts / counts.sum()
