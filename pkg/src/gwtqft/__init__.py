"""Exact computations for relative modular categories built from abelian
Gaiotto-Witten Lie superalgebras at q = sqrt(-1), and the 3-manifold
invariants they define."""

from .gwdata import Convention, GWInput, check_input, effective_metric
from .invariants import (
    bethe_check,
    cgp_invariant,
    circle_bundle_presentation,
    euler_characteristic,
    gl11_chi,
    gl11_lattice,
    sphere_presentation,
    state_space_dimension,
    verlinde_partition,
)
from .relmod import HypothesisFailed, RelModStructure, build_structure, structure_constants
from .scalar import Cyclotomic, q_power, quantum_number

__version__ = "0.1.0"
