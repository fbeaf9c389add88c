from .core import LinkConfig, WdmGrid, FieldWaveform
from .tx import wdm_modulate, rrc_spectrum
from .fiber import ssfm_propagate, edfa, dispersion_response
from .rx import (
    compensate_dispersion,
    rx_frontend,
    bps_cpr,
    least_squares_gain,
    effective_snr_db,
)

__all__ = [
    "LinkConfig",
    "WdmGrid",
    "FieldWaveform",
    "wdm_modulate",
    "rrc_spectrum",
    "ssfm_propagate",
    "edfa",
    "dispersion_response",
    "compensate_dispersion",
    "rx_frontend",
    "bps_cpr",
    "least_squares_gain",
    "effective_snr_db",
]
