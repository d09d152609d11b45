"""Rademacher and sub-gaussian complexities of vector-valued function classes."""

from .bounds import (
    BoundResult,
    frobenius_bound,
    kmeans_bound,
    kmeans_chain,
    ltl_reduction_bound,
    operator_kernel_bound,
    theorem1_bound,
)
from .classes import (
    FeatureMapFinite,
    FiniteClass,
    KMeansCenters,
    LinearNormBall,
    MetaSample,
    OperatorProjection,
    ProductClass,
    Sample,
    kmeans_lipschitz_check,
    kmeans_psi,
    loss_weighted_sup,
    ltl_psi,
    weighted_sup,
)
from .contraction import (
    Verdict,
    VerificationReport,
    product_identity_check,
    theorem1_coverage_experiment,
    verify_single_variable,
    verify_vector_contraction,
)
from .classfile import ClassFileError, load_class_file, save_class_file
from .counterexample import counterexample_instance, counterexample_mc_crosscheck, refute_conjecture
from .estimator import (
    ComplexityEstimate,
    Exactness,
    ExpectationEngine,
    Method,
    complexity_scalar,
    complexity_vector,
    rademacher_sum_norm,
)
from .lipschitz import LipschitzLoss, empirical_lipschitz
from .subgaussian import (
    SubgaussianDist,
    khintchine_constant,
    khintchine_lower_check,
    partial_sum_convergence,
    tail_bound,
)

__version__ = "0.1.0"
