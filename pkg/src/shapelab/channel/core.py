"""Link, WDM-grid and waveform containers.

Internal units: time in ns, frequency in GHz, distance in km, power in W.
Waveforms are dual-polarization complex baseband sample streams; block
boundaries are periodic (circular convolution everywhere), so a waveform
represents one period of the transmitted signal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = ["LinkConfig", "WdmGrid", "FieldWaveform", "PLANCK_J_S", "LIGHTSPEED_KM_S"]

PLANCK_J_S = 6.62607015e-34
LIGHTSPEED_KM_S = 299792.458


@dataclass(frozen=True)
class LinkConfig:
    """Multi-span fiber link with lumped EDFA amplification."""

    num_spans: int = 30
    span_km: float = 80.0
    attenuation_db_km: float = 0.2
    dispersion_ps_nm_km: float = 17.0
    gamma_1_w_km: float = 1.3
    noise_figure_db: float = 5.0
    wavelength_nm: float = 1550.0
    steps_per_span: int = 100
    manakov_factor: float = 8.0 / 9.0
    ase_enabled: bool = True

    def __post_init__(self):
        for name in ("span_km", "attenuation_db_km", "dispersion_ps_nm_km",
                     "gamma_1_w_km", "wavelength_nm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.num_spans < 0 or self.steps_per_span < 1:
            raise ValueError("invalid span/step counts")

    @property
    def beta2_ns2_km(self) -> float:
        """Group-velocity dispersion from D; negative at 1550 nm."""
        c_nm_ps = LIGHTSPEED_KM_S * 1e-6 * 1e9  # nm/ps
        beta2_ps2 = -self.dispersion_ps_nm_km * self.wavelength_nm**2 / (2 * np.pi * c_nm_ps)
        return beta2_ps2 * 1e-6

    @property
    def alpha_np_km(self) -> float:
        return self.attenuation_db_km * np.log(10.0) / 10.0

    @property
    def span_gain_db(self) -> float:
        """EDFA gain exactly compensating span loss."""
        return self.attenuation_db_km * self.span_km

    @property
    def total_km(self) -> float:
        return self.num_spans * self.span_km

    @property
    def photon_energy_j(self) -> float:
        nu_hz = LIGHTSPEED_KM_S * 1e3 / (self.wavelength_nm * 1e-9)
        return PLANCK_J_S * nu_hz

    def noiseless(self, steps_per_span: int | None = None) -> "LinkConfig":
        """Clone with ASE off (and optionally a different step plan)."""
        return replace(self, ase_enabled=False,
                       steps_per_span=steps_per_span or self.steps_per_span)


@dataclass(frozen=True)
class WdmGrid:
    """Channel plan and modulation parameters."""

    num_channels: int = 5
    symbol_rate_gbd: float = 46.5
    spacing_ghz: float = 50.0
    rolloff: float = 0.05
    power_dbm: float = 1.0
    samples_per_symbol: int = 8

    def __post_init__(self):
        if self.num_channels < 1:
            raise ValueError("need at least one channel")
        if self.symbol_rate_gbd <= 0 or self.spacing_ghz <= 0:
            raise ValueError("rates must be positive")
        if not 0 <= self.rolloff <= 1:
            raise ValueError("rolloff must be in [0, 1]")
        if self.samples_per_symbol < 2:
            raise ValueError("need at least 2 samples per symbol")
        if self.num_channels > 1 and self.spacing_ghz < self.symbol_rate_gbd * (1 + self.rolloff):
            raise ValueError("channel spacing narrower than the occupied bandwidth")
        if self.occupied_band_ghz > self.sample_rate_ghz:
            raise ValueError(
                f"grid ({self.occupied_band_ghz:.1f} GHz) exceeds the simulation "
                f"bandwidth ({self.sample_rate_ghz:.1f} GHz); raise samples_per_symbol")

    @property
    def sample_rate_ghz(self) -> float:
        return self.samples_per_symbol * self.symbol_rate_gbd

    @property
    def occupied_band_ghz(self) -> float:
        return (self.num_channels - 1) * self.spacing_ghz + \
            self.symbol_rate_gbd * (1 + self.rolloff)

    @property
    def power_w(self) -> float:
        return 1e-3 * 10 ** (self.power_dbm / 10)

    def channel_offsets_ghz(self) -> np.ndarray:
        idx = np.arange(self.num_channels) - (self.num_channels - 1) / 2
        return idx * self.spacing_ghz

    @property
    def center_index(self) -> int:
        return (self.num_channels - 1) // 2


@dataclass
class FieldWaveform:
    """Dual-polarization complex baseband samples (one circular period)."""

    x: np.ndarray
    y: np.ndarray
    sample_rate_ghz: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.complex128)
        self.y = np.asarray(self.y, dtype=np.complex128)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("polarizations must be equal-length 1-D arrays")

    @property
    def num_samples(self) -> int:
        return self.x.size

    def mean_power_w(self) -> float:
        return float(np.mean(np.abs(self.x) ** 2 + np.abs(self.y) ** 2))

    def copy(self) -> "FieldWaveform":
        return FieldWaveform(self.x.copy(), self.y.copy(), self.sample_rate_ghz)

    def save_raw(self, path) -> None:
        """Debug dump: float64 records (x.re, x.im, y.re, y.im); not stable."""
        rec = np.empty((self.num_samples, 4))
        rec[:, 0], rec[:, 1] = self.x.real, self.x.imag
        rec[:, 2], rec[:, 3] = self.y.real, self.y.imag
        rec.tofile(path)
