"""Operator means, positive maps, perspectives and the non-commutative f-divergence,
with a randomized Loewner-order harness for operator log-convexity inequalities."""

from .errors import (
    ConvergenceError,
    DimensionError,
    LoewnerLabError,
    NotHermitianError,
    NotIsometryError,
    NotPositiveError,
    NotUnitalError,
    ParseError,
    ProvisoError,
)
from .functions import (
    ScalarFunction,
    affine,
    apply_function,
    custom,
    eval_function,
    exp,
    inverse,
    logshift,
    negexp,
    parse_function,
    power,
)
from .linalg import (
    LoewnerVerdict,
    Relation,
    SpectralDecomposition,
    congruence,
    eig_hermitian,
    hermitian,
    inv,
    loewner_compare,
    sqrt_psd,
    strictly_positive,
)
from .maps import (
    Compression,
    DirectSumAverage,
    Kraus,
    MapField,
    OperatorField,
    Pinching,
    PositiveLinearMap,
    apply_map,
    compression,
    dilation_pair,
    direct_sum_average,
    integrate_field,
    kraus_map,
    pinching,
)
from .means import kubo_ando_mean, mean_arithmetic, mean_geometric, mean_harmonic, perspective
from .divergence import field_nabla, theta
from .campaign import CampaignConfig, CheckResult, ClassifierVerdict, classify, run_campaign, sweep_function

__version__ = "0.1.0"
