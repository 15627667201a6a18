"""mechkit: solve and verify revenue-maximizing single-buyer menu mechanisms.

The toolkit represents selling mechanisms as finite menus of
(allocation, payment) offers over a compact allocation set, verifies
incentive compatibility, individual rationality, no-positive-transfer and
the monotone subclasses, computes optimal revenue for finite-support
valuation distributions with an internal exact-rational simplex, and runs a
numerical pipeline for pointwise limits of buyer payoff functions and
revenue upper-semicontinuity.
"""

from .allocation import (
    AllocationSet,
    contains,
    finite_set,
    gamma_norm,
    make_standard,
    polytope,
    support_max,
    valuation,
)
from .convexfn import (
    PWLConvex,
    SubgradientSet,
    check_supermodular,
    coordinatewise_max_subgradient,
    dir_derivative,
    direction_maximal_subgradients,
    evaluate,
    is_differentiable,
    is_in_B_gamma,
    pwl,
    subgradient_set,
)
from .convergence import (
    ConvergenceReport,
    MechanismSequence,
    approach_schedule,
    build_limit_mechanism,
    bundle_price_family,
    check_usc,
    default_grid,
    escaping_schedule,
    fixed_price_family,
    geometric_schedule,
    harmonic_tail_distribution,
    infinite_expectation_demo,
    limit_payoff,
    menu_list_family,
    monotone_limit_check,
    perturbed_menu_family,
    run_pipeline,
    scaled_menu_family,
    truncated_geometric_schedule,
    wrong_way_monotonicity_demo,
)
from .errors import CapExceededError, MechkitError, SchemaError
from .mechanism import (
    Mechanism,
    Menu,
    TabularMechanism,
    VerificationReport,
    bundle_price_menu,
    choose,
    choose_tie_favorable,
    fixed_price_menu,
    mechanism,
    menu,
    normalize_npt,
    null_menu,
    payoff,
    revenue,
    verify_ic,
    verify_ir,
    verify_monotone_allocation,
    verify_monotone_payment,
    verify_npt,
)
from .numeric import get_mode, numeric_mode, set_mode
from .solver import (
    DiscreteValuation,
    SolveResult,
    brev,
    discrete_valuation,
    myerson_price,
    solve_deterministic,
    solve_monotone,
    solve_rev,
    srev,
)

__version__ = "0.1.0"
