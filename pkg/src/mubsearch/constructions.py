"""Closed-form constructions: Fourier matrices and prime-dimension MUB sets.

For prime d a complete set of d + 1 mutually unbiased bases is known
explicitly, which gives the search something exact to be checked against.
No such set is known for d = 6, which is what makes that dimension worth
a numerical search in the first place.
"""

import math

import numpy as np

from .objective import BasisSet

__all__ = ["is_prime", "fourier_matrix", "identity_basis", "prime_mub_set"]


def is_prime(n):
    if n < 2:
        return False
    for p in range(2, int(math.isqrt(n)) + 1):
        if n % p == 0:
            return False
    return True


def identity_basis(d):
    """The computational basis of C^d as a matrix (columns are e_1..e_d)."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return np.eye(d, dtype=np.complex128)


def fourier_matrix(d):
    """Unitary Fourier matrix, entry (l, m) = exp(2*pi*i*l*m/d) / sqrt(d).

    Indices run 0..d-1. Every entry has modulus 1/sqrt(d), so the Fourier
    basis is unbiased with respect to the computational basis in any d.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    l = np.arange(d)
    phase = 2.0 * np.pi * np.outer(l, l) / d
    return np.exp(1j * phase) / math.sqrt(d)


def _odd_prime_basis(d, b):
    """Basis b of the standard odd-prime family.

    Column k has components exp(2*pi*i*(b*l^2 + k*l)/d) / sqrt(d) at row l.
    """
    l = np.arange(d)
    exponent = (b * l * l)[:, None] + np.outer(l, np.arange(d))
    return np.exp(2j * np.pi * exponent / d) / math.sqrt(d)


def prime_mub_set(d):
    """Complete set of d + 1 mutually unbiased bases for prime d.

    Basis 1 is the computational basis. For odd primes the remaining d bases
    come from the quadratic-exponent family (basis b + 2 uses curvature b);
    d = 2 is special-cased with the eigenbases of the three Pauli matrices.
    """
    if not is_prime(d):
        raise ValueError(f"construction requires a prime dimension, got d={d}")
    mats = [identity_basis(d)]
    if d == 2:
        s = 1.0 / math.sqrt(2.0)
        mats.append(np.array([[s, s], [s, -s]], dtype=np.complex128))
        mats.append(np.array([[s, s], [1j * s, -1j * s]], dtype=np.complex128))
    else:
        for b in range(d):
            mats.append(_odd_prime_basis(d, b))
    return BasisSet(d=d, m=d + 1, gauge_fixed=True, bases=tuple(mats))
