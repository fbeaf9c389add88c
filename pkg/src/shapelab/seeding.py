"""Hierarchical, order-independent random number derivation.

Every stochastic component receives its own ``numpy.random.Generator``
derived from a single root seed plus a path of labels, e.g.
``derive_rng(seed, "selection", candidate_index, draw_index)``.  Re-running
any subset of the work in any order (or on any number of threads) therefore
produces identical numbers: no global mutable RNG exists anywhere in the
package.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "derive_rng"]

_U32 = 2**32


def _label_to_int(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) % _U32
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def derive_seed(root_seed: int, *path) -> np.random.SeedSequence:
    """Deterministic child seed for the given derivation path."""
    key = tuple(_label_to_int(p) for p in path)
    return np.random.SeedSequence(entropy=int(root_seed), spawn_key=key)


def derive_rng(root_seed: int, *path) -> np.random.Generator:
    """Generator seeded from ``(root_seed, *path)``; independent across paths."""
    return np.random.Generator(np.random.PCG64(derive_seed(root_seed, *path)))
