"""Tensor products built on the zero-padding transform.

A real (m, q, p) tensor is a tubal matrix whose (i, l) entry is the
mode-3 fiber A[i, l, :].  The variable T-product A *_v B sums tube
products a_il (*) b_lj; in the spectral domain it is a plain matrix
product per frontal slice, which is how it is computed here.
"""

import numpy as np

from .spectral import (
    IMAG_RESIDUE_TOL,
    SpectralTensor,
    forward_transform,
    inverse_transform,
)


def _check_operands(A: np.ndarray, B: np.ndarray):
    if A.ndim != 3 or B.ndim != 3:
        raise ValueError("operands must be 3-D tensors")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimension mismatch: {A.shape} x {B.shape}")
    if A.shape[2] != B.shape[2]:
        raise ValueError(f"tubal length mismatch: {A.shape[2]} vs {B.shape[2]}")


def _slicewise_matmul(Abar: np.ndarray, Bbar: np.ndarray) -> np.ndarray:
    # (m, q, v) x (q, n, v) -> (m, n, v), matrix product per slice l
    return np.einsum("ilk,ljk->ijk", Abar, Bbar)


def variable_t_product(A: np.ndarray, B: np.ndarray, v: int) -> np.ndarray:
    """Variable T-product of A (m, q, p) and B (q, n, p), result (m, n, p)."""
    _check_operands(A, B)
    p = A.shape[2]
    if v < p:
        raise ValueError(f"v={v} must be >= p={p}")
    Abar = forward_transform(A, v)
    Bbar = forward_transform(B, v)
    Cbar = SpectralTensor(_slicewise_matmul(Abar.data, Bbar.data), p)
    return inverse_transform(Cbar)


def classical_t_product(A0: np.ndarray, B0: np.ndarray) -> np.ndarray:
    """T-product with the square DFT: the v = p case of the variable product."""
    _check_operands(A0, B0)
    return variable_t_product(A0, B0, A0.shape[2])


def zero_pad_mode3(A: np.ndarray, v: int) -> np.ndarray:
    """Append all-zero frontal slices so the tubal length becomes v."""
    A = np.asarray(A)
    if A.ndim != 3:
        raise ValueError("expected a 3-D tensor")
    p = A.shape[2]
    if v < p:
        raise ValueError(f"v={v} must be >= p={p}")
    out = np.zeros(A.shape[:2] + (v,), dtype=A.dtype)
    out[:, :, :p] = A
    return out


def h_product(Abar: SpectralTensor, Bbar: SpectralTensor) -> SpectralTensor:
    """Slice-wise matrix product of two spectra (the H-product)."""
    if Abar.data.shape[1] != Bbar.data.shape[0]:
        raise ValueError(f"inner dimension mismatch: {Abar.data.shape} x {Bbar.data.shape}")
    if Abar.v != Bbar.v:
        raise ValueError(f"spectral length mismatch: {Abar.v} vs {Bbar.v}")
    return SpectralTensor(_slicewise_matmul(Abar.data, Bbar.data), Abar.p)


def variable_tubal_rank(C: np.ndarray, v: int, tol: float = 1e-8) -> int:
    """Max numerical rank over the frontal slices of the (m, n, v) spectrum.

    A singular value counts when it exceeds ``tol`` times the largest
    singular value over all slices.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    Cbar = forward_transform(C, v)
    svals = [np.linalg.svd(Cbar.data[:, :, l], compute_uv=False) for l in range(v)]
    smax = max((s[0] for s in svals if s.size), default=0.0)
    if smax == 0.0:
        return 0
    return max(int(np.count_nonzero(s > tol * smax)) for s in svals)


def truncated_product_check(A: np.ndarray, B: np.ndarray, v: int, tol: float = 1e-9) -> bool:
    """Verify A *_v B == (A0 * B0)[:, :, :p] with A0, B0 zero-padded to v.

    Verification utility, not a production path; raises with the max
    deviation on failure.
    """
    _check_operands(A, B)
    p = A.shape[2]
    lhs = variable_t_product(A, B, v)
    rhs = classical_t_product(zero_pad_mode3(A, v), zero_pad_mode3(B, v))[:, :, :p]
    dev = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    if dev > tol:
        raise AssertionError(f"truncated-product identity violated: max deviation {dev:.3e}")
    return True
