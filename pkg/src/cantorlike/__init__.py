"""Exact constructions of Cantor-like sets, their measures, dimensions and staircases."""

__version__ = "0.1.0"

from .arith import DigitExpansion, Rational, as_rational, expansions, format_rational, from_digits, to_decimal, to_digits
from .errors import (
    BracketUnavailable,
    CantorError,
    CapExceeded,
    DomainError,
    NoLimit,
    NotApplicable,
    NotEmbeddable,
    SpecParseError,
    TranscriptionError,
    ValidationError,
)
from .families import (
    SVC,
    Custom,
    FamilySpec,
    GammaSeq,
    GeneralizedSVC,
    KAdic,
    LambdaFat,
    MiddleBeta,
    MiddleBetaSeq,
    Rescaling,
    Seq,
    SubdivisionTemplate,
    Ternary,
    TwoSequenceSpec,
    r_sequence,
    removal_length,
    spec_from_json,
    to_two_sequence,
    validate,
)
from .generation import (
    Generation,
    Interval,
    InAllChecked,
    RejectedAt,
    digit_member,
    generate,
    generate_direct,
    left_endpoints,
    member_up_to,
    midpoint_decompose,
    nearest_endpoint_distance,
)
from .measure import (
    Bracket,
    Dimension,
    LogRatio,
    box_count,
    box_estimator,
    generation_measure,
    hausdorff_dimension,
    limit_measure,
    measure_report,
    removed_mass_partial,
)
from .render import RenderConfig, render, render_bars, render_staircase
from .staircase import (
    EvalResult,
    StaircaseSpec,
    eval_classic_digit,
    eval_general,
    eval_iterative,
    sample_staircase,
    staircase,
)
