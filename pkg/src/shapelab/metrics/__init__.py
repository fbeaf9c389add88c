from .nli import MetricContext, AvgNliMetric, SignAveragedNliMetric, CprAwareNliMetric, build_metric
from .stats import edi, kurtosis
from .information import (
    gmi_bits_per_4d,
    prior_from_amplitude_pmf,
    air_with_selection,
    selection_penalty,
    se_from_air,
)

__all__ = [
    "MetricContext",
    "AvgNliMetric",
    "SignAveragedNliMetric",
    "CprAwareNliMetric",
    "build_metric",
    "edi",
    "kurtosis",
    "gmi_bits_per_4d",
    "prior_from_amplitude_pmf",
    "air_with_selection",
    "selection_penalty",
    "se_from_air",
]
