"""Variable T-product tensor algebra and low-rank tensor completion.

Third-order tensors are dense numpy arrays of shape (m, n, p) with
frontal slices A[:, :, k] and mode-3 fibers A[i, j, :].  All math in
the docstrings is 1-based; code indexes are 0-based (entry a(k) of a
tube is ``a[k-1]``).
"""

from .tubal import (
    tubal_modulus,
    tubal_transpose,
    tubal_unit,
    variable_product_direct,
)
from .spectral import (
    SpectralTensor,
    build_zdft,
    forward_transform,
    inverse_transform,
    phi,
    phi_adjoint,
    variable_product_fft,
)
from .tensor_ops import (
    classical_t_product,
    h_product,
    truncated_product_check,
    variable_t_product,
    variable_tubal_rank,
    zero_pad_mode3,
)
from .tv_ops import (
    DctDiagonalization,
    apply_D1,
    apply_D2,
    build_H,
    build_L,
    build_dct_diagonalization,
    diff_tensor,
)
from .solver import (
    ObservationMask,
    SolverConfig,
    SolverResult,
    evaluate_objective,
    make_mask,
    soft_threshold,
    solve_vtctf,
    solve_vtctf_tv,
)
from .metrics import MetricsReport, psnr, ssim

__all__ = [
    "variable_product_direct",
    "tubal_transpose",
    "tubal_modulus",
    "tubal_unit",
    "build_zdft",
    "phi",
    "phi_adjoint",
    "variable_product_fft",
    "SpectralTensor",
    "forward_transform",
    "inverse_transform",
    "variable_t_product",
    "classical_t_product",
    "zero_pad_mode3",
    "h_product",
    "variable_tubal_rank",
    "truncated_product_check",
    "build_L",
    "build_H",
    "build_dct_diagonalization",
    "DctDiagonalization",
    "diff_tensor",
    "apply_D1",
    "apply_D2",
    "SolverConfig",
    "SolverResult",
    "ObservationMask",
    "make_mask",
    "soft_threshold",
    "evaluate_objective",
    "solve_vtctf_tv",
    "solve_vtctf",
    "psnr",
    "ssim",
    "MetricsReport",
]
