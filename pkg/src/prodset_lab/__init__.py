"""prodset_lab: finite-instance calculus for sumsets, syndetic covers,
random walks, and circle dynamics on lattices, cyclic products, and free
groups."""

__version__ = "0.1.0"

from .groups import Ball, CyclicProduct, FreeGroup, IntegerLattice, parse_group
from .setcalc import BohrSpec, FiniteWindowSet, PeriodicIntSet

__all__ = [
    "Ball",
    "BohrSpec",
    "CyclicProduct",
    "FiniteWindowSet",
    "FreeGroup",
    "IntegerLattice",
    "PeriodicIntSet",
    "parse_group",
    "__version__",
]
