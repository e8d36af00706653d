"""Column subset selection maximizing the minimum singular value via interlacing polynomials."""

from .bounds import BoundReport, alpha, baseline_bounds, compare_report, corollary_bound, g1, g2, main_bound
from .expected import (
    FamilyParams,
    SelectionState,
    brute_force_average,
    conditional_poly,
    f_empty,
    f_empty_roots,
    g_empty,
    knh_identity_check,
    node_roots,
)
from .linalg import (
    IsotropicFrame,
    TargetMatrix,
    random_isotropic_frame,
    rational_isotropic_frame,
    sigma_min_sub,
    thin_svd,
)
from .poly import RealPoly, RootList, charpoly_gram, real_roots
from .selector import SelectionResult, select_brute_force, select_interlacing, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "FamilyParams",
    "IsotropicFrame",
    "RealPoly",
    "RootList",
    "SelectionResult",
    "SelectionState",
    "TargetMatrix",
    "alpha",
    "baseline_bounds",
    "brute_force_average",
    "charpoly_gram",
    "compare_report",
    "conditional_poly",
    "corollary_bound",
    "f_empty",
    "f_empty_roots",
    "g1",
    "g2",
    "g_empty",
    "knh_identity_check",
    "main_bound",
    "node_roots",
    "random_isotropic_frame",
    "rational_isotropic_frame",
    "real_roots",
    "select_brute_force",
    "select_interlacing",
    "sigma_min_sub",
    "thin_svd",
    "verify_certificate",
]
