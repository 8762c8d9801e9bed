from experiments.density import (common_spectrum, genericity_density,
                                 multi_seed, random_lengths)
from experiments.models import DensityReport, Property

__all__ = [
    "DensityReport",
    "Property",
    "common_spectrum",
    "genericity_density",
    "multi_seed",
    "random_lengths",
]
