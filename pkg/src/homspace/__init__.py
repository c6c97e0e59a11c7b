"""Finite homogeneous metric spaces: construction, isometry groups,
epsilon-entropy, Gromov-Hausdorff distances and quasi-morphism certificates."""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .space import (FiniteMetricSpace, ValidationReport, CountBound, EntropyProfile,
                    validate, packing_number, covering_number, epsilon_net,
                    entropy_profile, scale, sup_product, quotient_by_partition,
                    space_to_json, space_from_json, save_space, load_space)
from .models import Circle, Torus, Sphere2, SolenoidTruncation, ModelNet, model_net
from .generators import (GraphSpace, graph_space, cycle_space, cayley_space, torus_grid,
                         solenoid_approximant, archimedean_vertices, girth,
                         small_catalogue, catalogue)
from .groups import FiniteGroup, cyclic_group, direct_product, symmetric_group
from .isometry import (IsometryGroup, isometry_group, permutation_subgroup,
                       is_homogeneous, is_distance_transitive, group_metric,
                       group_as_metric_space, verify_isometry_entropy_bound,
                       sphere_orbit_transitivity)
from .gh import (Correspondence, GhBounds, distortion, gh_exact, gh_lower_bounds,
                 gh_upper_from_map, gh_to_model, epsilon_equivalence, greedy_alignment)
from .quasimorph import (QuasiMap, FiniteMetricGroup, DensityEstimate, GroupAction,
                         defect, density, quasi_finiteness_witness, snap_to_subgroup,
                         limit_quasi_morphism)

__all__ = [name for name in dir() if not name.startswith("_")]
