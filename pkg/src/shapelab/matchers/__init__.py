from .base import DistributionMatcher, matcher_from_descriptor
from .ccdm import ConstantCompositionMatcher, composition_for_rate
from .spheres import SphereShapingMatcher
from .hierarchical import HierarchicalMatcher, LayerSpec, layer_stack
from .rateloss import rate_loss, induced_amplitude_pmf

__all__ = [
    "DistributionMatcher",
    "matcher_from_descriptor",
    "ConstantCompositionMatcher",
    "composition_for_rate",
    "SphereShapingMatcher",
    "HierarchicalMatcher",
    "LayerSpec",
    "layer_stack",
    "rate_loss",
    "induced_amplitude_pmf",
]
