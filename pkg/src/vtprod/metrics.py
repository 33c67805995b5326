"""Recovery quality metrics: PSNR and a global-statistics SSIM.

PSNR = 10 log10( m n p ||C_true||_inf^2 / ||C - C_true||_F^2 ).

The SSIM here plugs whole-tensor means, standard deviations and the
covariance into a single scalar formula; it is NOT the windowed SSIM
of image libraries.  The first numerator factor is (2 mu mu_true)
without a stabilizing constant; pass ``standard_ssim=True`` to add the
conventional +c1 there.
"""

import time
from dataclasses import dataclass

import numpy as np

#: Conventional constants for data in [0, 1]: (0.01 L)^2 and (0.03 L)^2.
DEFAULT_C1 = 1e-4
DEFAULT_C2 = 9e-4


def psnr(C: np.ndarray, C_true: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the tensors coincide."""
    C = np.asarray(C, dtype=float)
    C_true = np.asarray(C_true, dtype=float)
    if C.shape != C_true.shape:
        raise ValueError("shape mismatch")
    err = float(np.sum((C - C_true) ** 2))
    if err == 0.0:
        return float("inf")
    peak = float(np.max(np.abs(C_true)))
    return 10.0 * np.log10(C.size * peak**2 / err)


def ssim(
    C: np.ndarray,
    C_true: np.ndarray,
    c1: float = DEFAULT_C1,
    c2: float = DEFAULT_C2,
    standard_ssim: bool = False,
) -> float:
    """Global-statistics structural similarity.

    (2 mu mu_t)(2 cov + c2) / ((mu^2 mu_t^2 + c1)(var + var_t + c2)),
    with population (ddof=0) moments over the whole tensor.
    """
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    C = np.asarray(C, dtype=float)
    C_true = np.asarray(C_true, dtype=float)
    if C.shape != C_true.shape:
        raise ValueError("shape mismatch")
    mu = C.mean()
    mu_t = C_true.mean()
    var = C.var()
    var_t = C_true.var()
    cov = ((C - mu) * (C_true - mu_t)).mean()
    num1 = 2.0 * mu * mu_t + (c1 if standard_ssim else 0.0)
    return float((num1 * (2.0 * cov + c2)) / ((mu**2 * mu_t**2 + c1) * (var + var_t + c2)))


@dataclass
class MetricsReport:
    psnr: float
    ssim: float
    cpu_seconds: float
    band_psnr: list | None = None
    band_ssim: list | None = None


def score(C: np.ndarray, C_true: np.ndarray, cpu_seconds: float = 0.0, per_band: bool = False) -> MetricsReport:
    """Score a recovery; optionally include per-frontal-slice metrics."""
    band_psnr = band_ssim = None
    if per_band:
        p = C.shape[2]
        band_psnr = [psnr(C[:, :, k : k + 1], C_true[:, :, k : k + 1]) for k in range(p)]
        band_ssim = [ssim(C[:, :, k : k + 1], C_true[:, :, k : k + 1]) for k in range(p)]
    return MetricsReport(psnr(C, C_true), ssim(C, C_true), cpu_seconds, band_psnr, band_ssim)


class Stopwatch:
    """Process-CPU-time capture for experiment timing columns."""

    def __enter__(self):
        self._t0 = time.process_time()
        return self

    def __exit__(self, *exc):
        self.seconds = time.process_time() - self._t0
        return False
