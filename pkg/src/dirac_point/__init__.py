"""One-dimensional Dirac point interactions.

Boundary matrices Lambda and their generator logarithms, exact Krein
resolvent kernels, the Hilbert-Schmidt operator K with its spectral
toolkit, the regularized (Kato/Birman-Schwinger) resolvent, and
norm-resolvent convergence experiments.
"""

from .approx_resolvent import (
    BSAssembly,
    ConvergenceRow,
    approx_kernel,
    assemble,
    box_tail_estimate,
    converge_table,
    factorized_correction,
    hs_distance,
    vq_closed_form,
    vq_identity,
)
from .errors import (
    DiracPointError,
    GridMismatch,
    NearPole,
    NonIdentityWithNonzeroM,
    NonRealNuSquared,
    NotAdmissible,
    NotNormalized,
    NumericalError,
    Overflow,
    ParityMismatch,
    PoleOfTan,
    PoleOfW,
    SingularDenominator,
    SingularSystem,
    UnsupportedClass,
    ValidationError,
)
from .exact_resolvent import (
    ResolventKernelField,
    SpectralPoint,
    free_kernel,
    m_closed,
    m_lambda,
    point_kernel,
)
from .kernel_ops import (
    DiscreteOperator,
    PotentialProfile,
    QuadratureGrid,
    bernoulli_number,
    build_k,
    eta_closed,
    eta_numeric,
    eta_odd_pair,
    grid_for,
    indicator01,
    k_eigenvalue_targets,
    k_spectrum,
    midpoint_grid,
    moment,
    moment_closed,
    odd_term,
    profile_from_csv,
    psi_k,
    table_profile,
    trapezoid_grid,
    truncated_gaussian,
)
from .lambda_bridge import (
    GENERAL,
    PHASE,
    TRACELESS,
    AdmissibleLambda,
    BranchSelector,
    GeneratorA,
    coupling_scale,
    electrostatic_lambda,
    generator_a,
    generator_from_matrix,
    log_branches,
    scalar_multiple,
    tan_coupling,
    w_matrix,
)
from .matrix_core import (
    IDENT2,
    IMAGINARY,
    PI_MULTIPLE,
    REAL_NON_PI,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    Mat2,
    NuBranch,
    check_admissible,
    check_generator,
    exp2,
    mats_close,
    nu_of,
    tilde,
)

__version__ = "0.1.0"
