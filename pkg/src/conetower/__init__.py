"""Exact envelope-membership workbench for homotopy categories of bounded
complexes of free modules, with certificate emission and verification.

Coefficients are either a finite-dimensional algebra over a prime field or
the integers; all computation is exact.  The compiled elimination kernel is
optional: conetower.kernels reports which implementation is active.
"""

from .algebra import (
    AlgebraPresentation,
    FieldContext,
    IntegerContext,
    QuiverPresentation,
    base_field_algebra,
    make_algebra,
    path_algebra,
)
from .complexes import (
    ChainMap,
    Complex,
    Homotopy,
    compose,
    cone,
    direct_sum,
    identity_map,
    reduce_complex,
    shift,
    stalk,
    two_term,
    zero_complex,
    zero_map,
)
from .envelope import (
    GeneratorSet,
    MembershipCertificate,
    TowerReport,
    check_membership,
    extract_certificate,
    functor_values,
    oracle_member,
    tower_step,
    verify_certificate,
)
from .exactlin import FgAbelianGroup, FieldSpec, abelian_group, rref_field, snf, solve_field
from .homspace import hom_space, is_contractible, null_homotopy, verify_retract
from .localize import (
    check_membership_local,
    is_zero_local,
    local_global_report,
    localize_group,
    relevant_primes,
)

__version__ = "0.1.0"
