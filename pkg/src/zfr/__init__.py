"""Zero-free regions for L-functions of the de la Vallee Poussin class."""

from .dirichlet_chars import DirichletCharacter, characters_mod, conductor_of, kronecker_character
from .dlvp_certifier import (
    Branch,
    DlvpReport,
    ProofConstants,
    beta_bound,
    dlvp_combination,
    exceptional_zero_capacity,
    explicit_formula_residual,
    lambda_g,
    region_boundary,
    trig_kernel,
)
from .eval_engine import EvalConfig, hurwitz_zeta, l_value, log_deriv
from .instance_io import parse_instance
from .lfunc_model import (
    LFunctionInstance,
    analytic_conductor,
    analytic_conductor_at,
    catalog,
    dirichlet_coeff,
    lambda_coeff,
    validate_class_axioms,
)
from .zero_scanner import (
    CertificationReport,
    ComplexRectangle,
    Verdict,
    ZeroRecord,
    certify_region,
    count_zeros,
    real_segment_scan,
    refine_zero,
)

__version__ = "0.1.0"
