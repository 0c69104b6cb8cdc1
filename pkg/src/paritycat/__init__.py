"""Parity complexes, the free strict omega-categories they generate,
simplicial nerves, and descent for finite strict n-categories."""

from .core import (DomainError, Element, ParityComplex, StructureError,
                   TriangleOrder, ValidationReport, Violation, triangle_order,
                   validate)
from .build import (cube, glob, interval, is_isomorphic, iso_map, join,
                    left_cone, point, product, right_cone, simplex)
from .cells import (CapacityError, ComposabilityError, ExcisionError,
                    FreeCell, Plan, atom, cell_dim, cell_key, compose,
                    enumerate_cells, excise, excise_plans, is_cell,
                    product_atom, replay, source, subset_search_cells, target)
from .ncat import (FiniteNCat, GroupTable, ProductNCat, auteq,
                   check_assignment, enumerate_functors, evaluate,
                   free_snapshot, is_equivalence, materialize, pi0, pi_n,
                   random_functor, validate_cat)
from .chains import (ChainComplex, chain_of, homology, product_iso_holds,
                     tensor, theta_cat)
from .simplicial import (SimplicialSetTrunc, classical_nerve, nerve,
                         nerve_matches_classical)
from .descent import (CosimplicialNCat, DescResult, constant_cosimplicial,
                      cosimp_hom, desc1, desc2, desc_general,
                      general_matches_desc1, general_matches_desc2)

__version__ = "0.1.0"
