"""Tubal scalars: length-p vectors under the variable product.

A tubal scalar is a real vector a of length p.  The variable product
with parameter v >= p keeps the result in dimension p:

    (a (*) b)(k) = sum{ a(i) b(j) : i + j - k - 1 = 0 mod v },

indices 1-based, i, j, k in 1..p.  At v = p this is circular
convolution; at v = 2p-1 it is the first p entries of the linear
convolution.  The double-summation implementation here is the O(p^2)
reference oracle for the FFT path and is kept deliberately plain.
"""

import numpy as np


def _as_tube(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("tubal scalar must be a 1-D vector of length >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("tubal scalar entries must be finite")
    return a


def variable_product_direct(a, b, v: int) -> np.ndarray:
    """Variable product of two length-p tubal scalars by direct summation.

    Parameters
    ----------
    a, b : array_like, shape (p,)
    v : int
        Product parameter, v >= p.

    Returns
    -------
    ndarray, shape (p,)
    """
    a = _as_tube(a)
    b = _as_tube(b)
    p = a.size
    if b.size != p:
        raise ValueError(f"dimension mismatch: {p} vs {b.size}")
    if v < p:
        raise ValueError(f"v={v} must be >= p={p}")
    c = np.zeros(p)
    # 0-based: condition i + j - k - 1 = 0 mod v on 1-based indices
    # becomes (i + j - k) % v == 0 on 0-based ones.
    for k in range(p):
        s = 0.0
        for i in range(p):
            for j in range(p):
                if (i + j - k) % v == 0:
                    s += a[i] * b[j]
        c[k] = s
    return c


def tubal_transpose(a) -> np.ndarray:
    """Tubal transpose: b(1) = a(1), b(k) = a(p+2-k) for k >= 2."""
    a = _as_tube(a)
    b = np.empty_like(a)
    b[0] = a[0]
    b[1:] = a[:0:-1]
    return b


def tubal_modulus(a) -> float:
    """Euclidean modulus sqrt(sum_k a(k)^2)."""
    return float(np.linalg.norm(_as_tube(a)))


def tubal_unit(p: int) -> np.ndarray:
    """Multiplicative unit e: e(1) = 1, remaining entries 0."""
    if p < 1:
        raise ValueError("p must be >= 1")
    e = np.zeros(p)
    e[0] = 1.0
    return e
