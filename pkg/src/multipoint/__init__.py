"""Multi-point Metropolis sampling with user-chosen weight functions."""

from .core import (
    ConfigurationError,
    DegenerateWeightsError,
    FunctionProposalSequence,
    MultipointError,
    NumericError,
    PointSet,
    ProposalSequence,
    SharedProposal,
    TargetDensity,
    UnboundedWeightError,
    log_joint_proposal,
    normalize_log_weights,
    sample_categorical,
)
from .diagnostics import (
    CSV_HEADER,
    DiagnosticsReport,
    acceptance_rate,
    averaged_metrics,
    lag1_correlation,
    normalized_histogram,
)
from .models import (
    BIMODAL_QUARTIC,
    GaussianSequentialProposal,
    bimodal_quartic_log,
    gaussian_random_walk,
    make_target,
)
from .samplers import (
    ChainTrace,
    MultiPointConfig,
    StepOutcome,
    build_reference_set,
    iid_generic_step,
    liu_mtm_step,
    mh_step,
    mp_generic_step,
    qin_mp_step,
    run_chain,
)
from .verification import (
    DiscreteModel,
    DiscreteProposal,
    check_detailed_balance,
    check_reduction_to_qin,
    enumerate_kernel,
    random_discrete_proposal,
    stationary_distribution,
    uniform_discrete_proposal,
)
from .weights import (
    UNIT_LAMBDA,
    LambdaFunction,
    WeightFamily,
    check_sequential_symmetry,
    make_weight_family,
    weight_custom,
    weight_lambda,
    weight_ratio_product,
    weight_ratio_theta,
    weight_w1,
    weight_w2,
    weight_w3,
)

__version__ = "0.1.0"
