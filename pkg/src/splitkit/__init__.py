"""Forward-backward and Douglas-Rachford splitting for monotone inclusions in R^n.

When ``0 in A x + B x`` has no solution, the minimal displacement vector v of
the fixed-point map measures the infeasibility and the v-perturbed problem
``v in A x + B(x - v)`` may still be solvable. The package estimates v,
solves the perturbed problem and reports divergence otherwise.
"""

from .convex_core import (AffineMap, AffineSubspace, Ball, Box, ConvexSet, Diagonal, Halfspace,
                          HyperbolaEpigraph, LinearMap, Orthant, Product, Ray, Translate, contains,
                          distance, grad_half_dist_sq, polar_recession_cone, project)
from .displacement import (DisplacementEstimate, NormalSolveReport, NormalStatus,
                           accelerated_estimate, accelerated_sequence, estimate_v_iterative,
                           knopp_tail_check, normal_solve, rate_fit, summability_check,
                           v_affine_closed_form, v_fb_vs_v_dr)
from .errors import (ConfigError, DimensionError, IterationError, NonConvergenceError,
                     NotSingleValuedError, NumericalError, ProjectionError, SplitkitError,
                     UnsupportedSetError)
from .operators import (AffineOp, Blockwise, ConstOp, DualInverse, GradHalfDistSq, InnerShift,
                        MonotoneOp, NormalCone, OuterShift, Scaled, apply, check_firmly_nonexpansive,
                        dual_resolvent, inverse_affine, reflected_resolvent, resolvent)
from .product_space import ProductProblem, build_lifted_problem, parallel_fb_solve
from .splitting import (DR, FB, MAP, IterationTrace, Shifted, Solution, SplitProblem, StopReason,
                        affine_form, iterate, map_problem, perturbed_residual, solve_primal, t_dr,
                        t_fb)
from .tolerances import DEFAULT_TOLERANCES, ToleranceConfig

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "AffineOp",
    "AffineSubspace",
    "Ball",
    "Blockwise",
    "Box",
    "ConfigError",
    "ConstOp",
    "ConvexSet",
    "DEFAULT_TOLERANCES",
    "DR",
    "Diagonal",
    "DimensionError",
    "DisplacementEstimate",
    "DualInverse",
    "FB",
    "GradHalfDistSq",
    "Halfspace",
    "HyperbolaEpigraph",
    "InnerShift",
    "IterationError",
    "IterationTrace",
    "LinearMap",
    "MAP",
    "MonotoneOp",
    "NonConvergenceError",
    "NormalCone",
    "NormalSolveReport",
    "NormalStatus",
    "NotSingleValuedError",
    "NumericalError",
    "Orthant",
    "OuterShift",
    "Product",
    "ProductProblem",
    "ProjectionError",
    "Ray",
    "Scaled",
    "Shifted",
    "Solution",
    "SplitProblem",
    "SplitkitError",
    "StopReason",
    "ToleranceConfig",
    "Translate",
    "UnsupportedSetError",
    "accelerated_estimate",
    "accelerated_sequence",
    "affine_form",
    "apply",
    "build_lifted_problem",
    "check_firmly_nonexpansive",
    "contains",
    "distance",
    "dual_resolvent",
    "estimate_v_iterative",
    "grad_half_dist_sq",
    "inverse_affine",
    "iterate",
    "knopp_tail_check",
    "map_problem",
    "normal_solve",
    "parallel_fb_solve",
    "perturbed_residual",
    "polar_recession_cone",
    "project",
    "rate_fit",
    "reflected_resolvent",
    "resolvent",
    "solve_primal",
    "summability_check",
    "t_dr",
    "t_fb",
    "v_affine_closed_form",
    "v_fb_vs_v_dr",
]
