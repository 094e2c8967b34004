"""Discrete fractional Sturm-Liouville operators.

Riemann-Liouville nabla and Grunwald-Letnikov delta fractional differences are
realized as triangular Toeplitz matrices on a finite grid, composed into
symmetric Sturm-Liouville operators and solved as weighted eigenproblems.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, ValidationError
from .kernels import (
    FractionalOrder,
    KernelKind,
    ToeplitzKernel,
    falling,
    gl_weights,
    log_gamma,
    rising,
    rl_diff_kernel,
    rl_sum_kernel,
)
from .fracops import (
    Grid,
    OperatorMatrix,
    Side,
    apply_operator,
    delta_left_diff_matrix,
    delta_right_diff_matrix,
    nabla_left_diff_matrix,
    nabla_left_sum_matrix,
    nabla_right_diff_matrix,
    sbp_residual,
)
from .assembly import (
    Coefficients,
    Form,
    SLProblem,
    assemble,
    assemble_L1,
    assemble_L2,
    sample_coefficients,
    weighted_inner,
)
from .eigensolve import (
    EigenDecomposition,
    generalized_symmetric_eigen,
    jacobi_eigen,
    residual_check,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "DomainError",
    "ValidationError",
    "FractionalOrder",
    "KernelKind",
    "ToeplitzKernel",
    "falling",
    "gl_weights",
    "log_gamma",
    "rising",
    "rl_diff_kernel",
    "rl_sum_kernel",
    "Grid",
    "OperatorMatrix",
    "Side",
    "apply_operator",
    "delta_left_diff_matrix",
    "delta_right_diff_matrix",
    "nabla_left_diff_matrix",
    "nabla_left_sum_matrix",
    "nabla_right_diff_matrix",
    "sbp_residual",
    "Coefficients",
    "Form",
    "SLProblem",
    "assemble",
    "assemble_L1",
    "assemble_L2",
    "sample_coefficients",
    "weighted_inner",
    "EigenDecomposition",
    "generalized_symmetric_eigen",
    "jacobi_eigen",
    "residual_check",
]
