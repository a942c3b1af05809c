"""Minimal dense complex-matrix helpers shared by the rest of the package.

Matrices are plain numpy arrays: 2-D, complex128, row-major. Problem sizes are
tiny (d <= ~16), so there is no need for anything beyond products, adjoints
and entrywise moduli.
"""

import numpy as np

__all__ = ["as_complex_matrix", "multiply", "adjoint", "unitarity_defect"]


def as_complex_matrix(a):
    """Coerce `a` to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def multiply(a, b):
    """Matrix product a @ b with an explicit conformability check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def adjoint(a):
    """Conjugate transpose, returned as a fresh row-major array."""
    a = as_complex_matrix(a)
    return np.ascontiguousarray(a.conj().T)


def unitarity_defect(a):
    """Max-entry absolute deviation of adjoint(a) @ a from the identity.

    Zero for exactly unitary matrices; ~1e-15 for matrices assembled from
    products of rotations in double precision.
    """
    a = as_complex_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"unitarity defect requires a square matrix, got {a.shape}")
    return float(np.max(np.abs(a.conj().T @ a - np.eye(n))))
