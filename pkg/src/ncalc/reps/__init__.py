from .bessel import bessel_k, bessel_k_array, bessel_k_series
from .grids import DEFAULTS, MANIFOLDS, GridSpec, make_grid
from .representation import (BoundaryWarning, DiscreteRepresentation, WaveFunction, apply_generator,
                             boundary_ratio, build_representation, commutator_residual,
                             commutator_residuals, inner_product, probe_set, vacuum_expectation,
                             vacuum_state)
