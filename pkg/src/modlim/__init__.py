"""Exact finitely presented modules over Z/n: limits, satellites, Baer's criterion and D(A)."""

from .audit import AuditResult, Verdict
from .errors import (
    CapacityError,
    ContractError,
    InputError,
    InternalError,
    ModlimError,
    ParseError,
    PreconditionError,
    ValidationError,
)
from .functors import (
    FunctorSpec,
    SatelliteValue,
    ext1,
    hom_from,
    hom_into,
    identity_functor,
    is_L_sigma_star,
    is_R_sigma_star,
    map_system,
    satellite,
    satellite_functor,
    satellite_hom,
    satellite_iterate,
    sigma_hat,
    tensor_by,
    theorem1_contravariant_audit,
    theorem1_covariant_audit,
    theorem2_audit,
    tor1,
    xi_hat,
)
from .injectives import (
    DChain,
    DConstruction,
    PhiEntry,
    audit_D_iso_on_injective,
    baer_is_injective,
    build_D,
    check_D_left_exact,
    check_right_balanced,
    D_on_hom,
    ext_vanishing_criterion,
    extension_witness,
    injectivity_oracle,
    iterate_D,
    omega_truncation_colimit,
    phi_count,
    phi_index,
    retraction_for_injective,
)
from .limits import (
    ColimitData,
    DirectSystem,
    InverseSystem,
    LimitData,
    Poset,
    colimit,
    colimit_mediating,
    colimit_normal_form,
    colimit_vanishes,
    induced_colimit_map,
    induced_limit_map,
    limit,
    limit_mediating,
)
from .linalg import IntMatrix, egcd, kernel_mod, snf, solve_mod, span_membership
from .modules import (
    Element,
    FPModule,
    ModHom,
    cokernel,
    cyclic,
    direct_sum,
    free,
    free_presentation,
    from_factors,
    hom_module,
    image,
    kernel,
    tensor,
)

__version__ = "0.1.0"
