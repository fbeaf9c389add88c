"""Split-step-based selection metrics.

The cost of a candidate block is the normalized mean squared error of its
symbols after a noiseless single-channel propagation, averaged over random
draws of the adjacent blocks.  Draw randomness derives from the context seed
and the draw index only, never from the candidate, so every candidate is
scored on the same neighbor realizations (paired comparisons) and results
are independent of evaluation order or threading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from ..constellation import SymbolSequence, assemble_4d
from ..channel import LinkConfig, WdmGrid, wdm_modulate, ssfm_propagate, rx_frontend
from ..seeding import derive_rng

__all__ = ["MetricContext", "AvgNliMetric", "SignAveragedNliMetric",
           "CprAwareNliMetric", "build_metric"]


def _uniform_neighbor(rng: np.random.Generator, n: int) -> SymbolSequence:
    amps = rng.choice([1, 3, 5, 7], size=4 * n)
    signs = rng.choice([-1, 1], size=4 * n).astype(np.int8)
    return assemble_4d(amps, signs)


@dataclass(frozen=True)
class MetricContext:
    """Single-channel noiseless emulation parameters for candidate scoring."""

    link: LinkConfig
    symbol_rate_gbd: float = 46.5
    rolloff: float = 0.05
    power_dbm: float = 1.0
    samples_per_symbol: int = 4
    num_draws: int = 8          # adjacent-block averaging count
    num_sign_draws: int = 16    # sign-averaged variant
    cpr_half_window: int = 140
    seed: int = 0
    neighbor_sampler: Callable[[np.random.Generator, int], SymbolSequence] = \
        field(default=_uniform_neighbor)

    def __post_init__(self):
        if self.num_draws < 1:
            raise ValueError("num_draws must be >= 1")
        if self.link.ase_enabled:
            object.__setattr__(self, "link", self.link.noiseless())

    def grid(self) -> WdmGrid:
        return WdmGrid(num_channels=1, symbol_rate_gbd=self.symbol_rate_gbd,
                       spacing_ghz=self.symbol_rate_gbd * (1 + self.rolloff),
                       rolloff=self.rolloff, power_dbm=self.power_dbm,
                       samples_per_symbol=self.samples_per_symbol)


class AvgNliMetric:
    """Average NLI cost: center-block MSE after least-squares rescaling."""

    def __init__(self, ctx: MetricContext):
        self.ctx = ctx
        self._grid = ctx.grid()

    def __call__(self, seq: SymbolSequence) -> float:
        total = 0.0
        for j in range(self.ctx.num_draws):
            total += self._one_draw(seq, j)
        return total / self.ctx.num_draws

    def _one_draw(self, seq: SymbolSequence, draw: int) -> float:
        rx_x, rx_y, tx_x, tx_y = self._propagate_center(seq, draw)
        return _normalized_mse(tx_x, tx_y, rx_x, rx_y)

    def _propagate_center(self, seq: SymbolSequence, draw: int):
        ctx = self.ctx
        rng = derive_rng(ctx.seed, "nli-draw", draw)
        pre = ctx.neighbor_sampler(rng, seq.n)
        post = ctx.neighbor_sampler(rng, seq.n)
        amps = np.concatenate([pre.amplitudes, seq.amplitudes, post.amplitudes])
        signs = np.concatenate([pre.signs, seq.signs, post.signs])
        block = SymbolSequence(amps, signs)
        wave = wdm_modulate([block], self._grid)
        out = ssfm_propagate(wave, ctx.link, seed=None)
        n = seq.n
        sl = slice(n, 2 * n)
        # least-squares fit runs on the scored center block only
        rx_x, rx_y, _ = rx_frontend(out, self._grid, ctx.link,
                                    block.x_pol(), block.y_pol())
        return rx_x[sl], rx_y[sl], seq.x_pol(), seq.y_pol()


def _normalized_mse(tx_x, tx_y, rx_x, rx_y) -> float:
    tx = np.concatenate([tx_x, tx_y])
    rx = np.concatenate([rx_x, rx_y])
    h = np.vdot(tx, rx) / np.vdot(tx, tx)
    ref = h * tx
    denom = np.sum(np.abs(ref) ** 2)
    return float(np.sum(np.abs(rx - ref) ** 2) / denom)


class SignAveragedNliMetric:
    """Sign-independent variant: averages the cost over random sign draws.

    Sign draws derive from the context seed alone, so the result depends only
    on the candidate's amplitudes.  ``num_sign_draws="all"`` enumerates every
    sign pattern (tiny blocks only).
    """

    def __init__(self, ctx: MetricContext, enumerate_all: bool = False):
        self.ctx = ctx
        self.enumerate_all = enumerate_all
        self._inner = AvgNliMetric(ctx)

    def __call__(self, seq: SymbolSequence) -> float:
        if self.enumerate_all:
            patterns = [np.array(p, dtype=np.int8)
                        for p in product((-1, 1), repeat=4 * seq.n)]
        else:
            patterns = []
            for s in range(self.ctx.num_sign_draws):
                rng = derive_rng(self.ctx.seed, "sign-draw", s)
                patterns.append(rng.choice([-1, 1], size=4 * seq.n).astype(np.int8))
        total = 0.0
        for signs in patterns:
            total += self._inner(SymbolSequence(seq.amplitudes, signs, seq.power_dbm))
        return total / len(patterns)


class CprAwareNliMetric(AvgNliMetric):
    """Average NLI cost after removing the windowed mean nonlinear phase.

    Emulates the effect of downstream carrier phase recovery: before the
    error is computed, each received symbol is de-rotated by the phase of
    rx * conj(tx) averaged over the surrounding window, per polarization.
    """

    def _one_draw(self, seq: SymbolSequence, draw: int) -> float:
        rx_x, rx_y, tx_x, tx_y = self._propagate_center(seq, draw)
        rx_x = _remove_windowed_phase(tx_x, rx_x, self.ctx.cpr_half_window)
        rx_y = _remove_windowed_phase(tx_y, rx_y, self.ctx.cpr_half_window)
        return _normalized_mse(tx_x, tx_y, rx_x, rx_y)


def _remove_windowed_phase(tx: np.ndarray, rx: np.ndarray, half_window: int) -> np.ndarray:
    r = rx * np.conj(tx)
    c = np.concatenate([[0.0 + 0.0j], np.cumsum(r)])
    n = r.size
    hi = np.minimum(np.arange(n) + half_window + 1, n)
    lo = np.maximum(np.arange(n) - half_window, 0)
    win = c[hi] - c[lo]
    phase = np.angle(win)
    return rx * np.exp(-1j * phase)


def build_metric(name: str, ctx: MetricContext):
    """Metric registry for the harness config surface."""
    from .stats import edi, kurtosis

    if name == "avg-nli":
        return AvgNliMetric(ctx)
    if name == "avg-nli-sign-averaged":
        return SignAveragedNliMetric(ctx)
    if name == "avg-nli-cpr":
        return CprAwareNliMetric(ctx)
    if name == "edi":
        return lambda seq: edi(seq, window=min(seq.n, 64))
    if name == "kurtosis":
        return kurtosis
    raise ValueError(f"unknown metric {name!r}")
