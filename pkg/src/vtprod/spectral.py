"""Zero-padding DFT: the v x p transform matrix and tensor transforms.

The transform matrix T consists of the first p columns of the v x v
DFT matrix, so T a equals the length-v DFT of a zero-padded to length
v, and T^H T = v I_p.  The tensor-level forward transform maps every
mode-3 fiber of a real (m, n, p) tensor through T, producing a complex
(m, n, v) spectrum; the inverse applies (1/v) T^H fiber-wise.

Production transforms use numpy's FFT (zero-pad then length-v FFT);
the explicit matrix multiply is available through :func:`phi` /
:func:`phi_adjoint` and serves as the test oracle.
"""

from dataclasses import dataclass

import numpy as np

#: Default absolute tolerance on the imaginary residue discarded when
#: mapping spectra of real tensors back to the real domain.
IMAG_RESIDUE_TOL = 1e-9


class ImaginaryResidueError(ValueError):
    """Imaginary part left after an inverse transform exceeds tolerance."""


def build_zdft(v: int, p: int) -> np.ndarray:
    """Explicit v x p zero-padding DFT matrix, entry (l, k) = w_v^{(l-1)(k-1)}."""
    if not (v >= p >= 1):
        raise ValueError(f"need v >= p >= 1, got v={v}, p={p}")
    l = np.arange(v)[:, None]
    k = np.arange(p)[None, :]
    return np.exp(-2j * np.pi * l * k / v)


def phi(a, T: np.ndarray) -> np.ndarray:
    """Forward map of a length-p tube: T @ a."""
    a = np.asarray(a)
    if a.shape != (T.shape[1],):
        raise ValueError(f"expected length {T.shape[1]}, got shape {a.shape}")
    return T @ a


def phi_adjoint(c, T: np.ndarray) -> np.ndarray:
    """Adjoint map of a length-v spectrum: T^H @ c."""
    c = np.asarray(c)
    if c.shape != (T.shape[0],):
        raise ValueError(f"expected length {T.shape[0]}, got shape {c.shape}")
    return T.conj().T @ c


def variable_product_fft(a, b, v: int, residue_tol: float = IMAG_RESIDUE_TOL) -> np.ndarray:
    """Variable product via FFT: (1/v) T^H [ (T a) o (T b) ].

    Equivalent to the direct double summation; O(v log v) instead of
    O(p^2).  The result of real inputs is real up to rounding; the
    imaginary residue is checked against ``residue_tol`` and dropped.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a.size
    if b.size != p:
        raise ValueError(f"dimension mismatch: {p} vs {b.size}")
    if v < p:
        raise ValueError(f"v={v} must be >= p={p}")
    c = np.fft.ifft(np.fft.fft(a, n=v) * np.fft.fft(b, n=v))[:p]
    resid = np.max(np.abs(c.imag)) if p else 0.0
    if resid > residue_tol:
        raise ImaginaryResidueError(f"imaginary residue {resid:.3e} > {residue_tol:.1e}")
    return c.real.copy()


@dataclass(frozen=True)
class SpectralTensor:
    """Complex (m, n, v) spectrum of a real (m, n, p) tensor.

    ``data[:, :, l]`` is the l-th frontal slice of the transformed
    tensor; ``p`` records the tubal length of the real-domain original
    so the inverse transform knows where to truncate.
    """

    data: np.ndarray
    p: int

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError("spectral data must be 3-D (m, n, v)")
        if not (self.data.shape[2] >= self.p >= 1):
            raise ValueError(f"need v >= p >= 1, got v={self.data.shape[2]}, p={self.p}")

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def v(self) -> int:
        return self.data.shape[2]

    def slice(self, l: int) -> np.ndarray:
        return self.data[:, :, l]


def forward_transform(C: np.ndarray, v: int) -> SpectralTensor:
    """Transform every mode-3 fiber through T (zero-pad to v, then FFT)."""
    C = np.asarray(C)
    if C.ndim != 3:
        raise ValueError("expected a 3-D tensor")
    p = C.shape[2]
    if v < p:
        raise ValueError(f"v={v} must be >= p={p}")
    return SpectralTensor(np.fft.fft(C, n=v, axis=2), p)


def inverse_transform(S: SpectralTensor, residue_tol: float = IMAG_RESIDUE_TOL) -> np.ndarray:
    """Map every fiber through (1/v) T^H, returning the real tensor.

    (1/v) T^H applied to a length-v spectrum equals the first p entries
    of the length-v inverse FFT.  Raises when the imaginary residue
    exceeds ``residue_tol``.
    """
    out = np.fft.ifft(S.data, axis=2)[:, :, : S.p]
    resid = np.max(np.abs(out.imag)) if out.size else 0.0
    if resid > residue_tol:
        raise ImaginaryResidueError(f"imaginary residue {resid:.3e} > {residue_tol:.1e}")
    return np.ascontiguousarray(out.real)
