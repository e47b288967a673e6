"""Gap and exponential-density invariants of strictly increasing integer sequences."""

from .errors import (
    EmptyInput,
    EmptyStream,
    FloorUncertifiable,
    GapDensError,
    InvalidGrid,
    InvalidParam,
    InvalidSigma,
    LengthMismatch,
    NoBracket,
    NotIncreasing,
    NotStrictlyIncreasing,
    PrecisionUnderflow,
    SchemaError,
    TooShort,
)
from .estimators import (
    DensityProfile,
    Diagnostic,
    EstimateTrace,
    FunctionalKind,
    FunctionalStream,
    Mode,
    ProfileConfig,
    WindowPolicy,
    density_profile,
    functional_stream,
    stolz_eps_stream,
    tail_liminf,
    tail_limsup,
)
from .families import (
    FamilyKind,
    FamilySpec,
    FiniteSetReport,
    catalog_families,
    gen_arithmetic,
    gen_double_exp_union,
    gen_geometric,
    gen_interleave,
    gen_nonsquare_squares,
    gen_polynomial,
    gen_power,
    gen_product,
    gen_sqrt_exp,
    generate,
    parse_family_config,
)
from .probe import (
    ProbeThresholds,
    SumTrace,
    TauBracket,
    Verdict,
    bracket_tau,
    partial_sums,
)
from .sequences import (
    Domain,
    GapRatioSample,
    SequencePrefix,
    TermValue,
    build_log_prefix,
    build_prefix,
    gap_ratio_samples,
    read_terms,
    write_terms,
)
from .table import run_table
from .verify import (
    CheckReport,
    CheckStatus,
    GridSpec,
    check_analytic_inequalities,
    check_interval,
    check_rho_implies_tau_zero,
    check_sandwich,
    check_stolz,
    implied_density_interval,
    run_check,
    run_manifest,
    tau_zero_threshold,
)

__version__ = "0.1.0"
