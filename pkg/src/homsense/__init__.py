"""homsense: recover signals from shuffled, subsampled linear measurements.

Library layout:

* :mod:`homsense.numerics` -- validated dense linear-algebra primitives.
* :mod:`homsense.assign` -- optimal selection maps: the O(m*k) sorted
  alignment DP and an exact rectangular linear-assignment solver.
* :mod:`homsense.bnb` -- global branch-and-bound solver over x-space.
* :mod:`homsense.enum_solver` -- brute-force row-tuple enumeration solver.
* :mod:`homsense.baselines` -- comparison methods (alternating sort,
  l1 robust regression, order-preserving alternation).
* :mod:`homsense.registration` -- affine 2-d point-set registration.
* :mod:`homsense.theory` -- numerical checks of the recovery theory.
* :mod:`homsense.synth` -- synthetic instances and the benchmark harness.
* :mod:`homsense.cli` -- command-line entry point (``homsense``).
"""

from .assign import AlignResult, AssignmentMap, dp_align, lap_solve, recover_selection
from .baselines import altmin_order_preserving, altmin_sort, robust_l1
from .bnb import BnbConfig, SolveResult, altmin_upper, lower_bound, solve_bnb
from .enum_solver import solve_enum
from .errors import ParseError, PreconditionError
from .numerics import kernel_basis, lstsq, sigma_max, sort_desc_perm
from .registration import (
    AffineTransform,
    RegistrationProblem,
    RegistrationResult,
    register_altmin,
    register_bnb,
)
from .synth import BenchRecord, ProblemInstance, gen_instance, relative_error, run_benchmark
from .theory import (
    Endomorphism,
    SubspaceBasis,
    check_invertible_recovery_equivalence,
    check_permutation_eigen_bound,
    eigenspace_dims,
    enumerate_unlabeled_uniqueness,
    generic_intersection_dim,
    generic_point_recovery,
    pairwise_unique_recovery,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "AlignResult",
    "AssignmentMap",
    "BenchRecord",
    "BnbConfig",
    "Endomorphism",
    "ParseError",
    "PreconditionError",
    "ProblemInstance",
    "RegistrationProblem",
    "RegistrationResult",
    "SolveResult",
    "SubspaceBasis",
    "altmin_order_preserving",
    "altmin_sort",
    "altmin_upper",
    "check_invertible_recovery_equivalence",
    "check_permutation_eigen_bound",
    "dp_align",
    "eigenspace_dims",
    "enumerate_unlabeled_uniqueness",
    "gen_instance",
    "generic_intersection_dim",
    "generic_point_recovery",
    "kernel_basis",
    "lap_solve",
    "lower_bound",
    "lstsq",
    "pairwise_unique_recovery",
    "recover_selection",
    "register_altmin",
    "register_bnb",
    "relative_error",
    "robust_l1",
    "run_benchmark",
    "sigma_max",
    "solve_bnb",
    "solve_enum",
    "sort_desc_perm",
]
