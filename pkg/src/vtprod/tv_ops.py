"""Total-variation difference operators and their cosine diagonalization.

L_m is the forward-difference matrix with an all-zero first row, and
H_m = L_m^T L_m is the tridiagonal (1, 2, ..., 2, 1) Laplacian-like
matrix.  H_m is diagonalized by the orthogonal cosine basis K_m with
eigenvalues 4 sin^2((i-1) pi / (2m)), which turns the coupled linear
system in the completion solver's C step into elementwise divisions.

The vertical difference tensor D1 has L_m as its first frontal slice
and zeros elsewhere (D2: L_n^T); since its tubes are multiples of the
unit tube, its spectrum is L_m in every slice, so applying D1 under
any variable T-product reduces to multiplying each frontal slice of C
by L_m on the left (D2: by L_n^T on the right).
"""

from dataclasses import dataclass

import numpy as np


def build_L(m: int) -> np.ndarray:
    """Forward-difference matrix: zero first row, then -1/+1 pairs."""
    if m < 1:
        raise ValueError("m must be >= 1")
    L = np.eye(m)
    L[0, 0] = 0.0
    idx = np.arange(1, m)
    L[idx, idx - 1] = -1.0
    return L


def build_H(m: int) -> np.ndarray:
    """Tridiagonal L_m^T L_m with diagonal (1, 2, ..., 2, 1), off-diagonals -1."""
    L = build_L(m)
    return L.T @ L


@dataclass(frozen=True)
class DctDiagonalization:
    """Orthogonal factor K and eigenvalues of H_m = K diag(lam) K^T."""

    K: np.ndarray
    lam: np.ndarray

    @property
    def m(self) -> int:
        return self.lam.size


def build_dct_diagonalization(m: int) -> DctDiagonalization:
    """Cosine eigenbasis of H_m.

    K[i, j] = sqrt(2/m) sqrt(1/(1 + delta_{j,1})) cos(pi (2i-1)(j-1) / (2m)),
    lam[i] = 4 sin^2((i-1) pi / (2m)), both 1-based in the formulas.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    i = np.arange(1, m + 1)[:, None]
    j = np.arange(1, m + 1)[None, :]
    K = np.sqrt(2.0 / m) * np.cos(np.pi * (2 * i - 1) * (j - 1) / (2 * m))
    K[:, 0] /= np.sqrt(2.0)
    lam = 4.0 * np.sin((i.ravel() - 1) * np.pi / (2 * m)) ** 2
    return DctDiagonalization(K, lam)


def diff_tensor(kind: str, size: int, p: int) -> np.ndarray:
    """Materialized difference tensor: first slice L (or L^T), rest zero.

    ``kind`` is "vertical" (L_size in slice 1, shape size x size x p) or
    "horizontal" (L_size^T in slice 1).  Used by tests to cross-check the
    fast slice-wise application against the generic variable T-product.
    """
    if kind not in ("vertical", "horizontal"):
        raise ValueError("kind must be 'vertical' or 'horizontal'")
    D = np.zeros((size, size, p))
    L = build_L(size)
    D[:, :, 0] = L if kind == "vertical" else L.T
    return D


def apply_D1(C: np.ndarray, v: int) -> np.ndarray:
    """Vertical differences D1 *_v C; v-independent since D1's tubes are unit multiples."""
    C = np.asarray(C)
    if C.ndim != 3:
        raise ValueError("expected a 3-D tensor")
    if v < C.shape[2]:
        raise ValueError(f"v={v} must be >= p={C.shape[2]}")
    L = build_L(C.shape[0])
    return np.einsum("ab,bjk->ajk", L, C)


def apply_D2(C: np.ndarray, v: int) -> np.ndarray:
    """Horizontal differences C *_v D2, with D2's first slice L_n^T."""
    C = np.asarray(C)
    if C.ndim != 3:
        raise ValueError("expected a 3-D tensor")
    if v < C.shape[2]:
        raise ValueError(f"v={v} must be >= p={C.shape[2]}")
    Lt = build_L(C.shape[1]).T
    return np.einsum("iak,ab->ibk", C, Lt)
