"""Shared definitional oracles, kept independent of the production paths."""

import numpy as np
import pytest

from vtprod.tubal import variable_product_direct


def tubal_product_oracle(A, B, v):
    """Variable T-product by the definitional tubal summation."""
    m, q, p = A.shape
    n = B.shape[1]
    C = np.zeros((m, n, p))
    for i in range(m):
        for j in range(n):
            for l in range(q):
                C[i, j, :] += variable_product_direct(A[i, l, :], B[l, j, :], v)
    return C


def circular_product_oracle(A, B):
    """Classical T-product: tube-wise circular convolution summation."""
    m, q, p = A.shape
    n = B.shape[1]
    C = np.zeros((m, n, p))
    for i in range(m):
        for j in range(n):
            for l in range(q):
                for k in range(p):
                    C[i, j, k] += np.sum(A[i, l, :] * B[l, j, (k - np.arange(p)) % p])
    return C


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
