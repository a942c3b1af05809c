"""Euler-angle (Hurwitz) parameterization of U(N) and Haar sampling.

An N x N unitary is written as a global phase times a product of composite
transformations, each of which is a product of elementary two-level
rotations::

    U = e^{i alpha} * E_1 * E_2 * ... * E_{N-1}

    E_k = E^{N-k,N-k+1}(phi_{k-1,k}, psi_{k-1,k}, 0)
          * E^{N-k+1,N-k+2}(phi_{k-2,k}, psi_{k-2,k}, 0)
          * ...
          * E^{N-1,N}(phi_{0,k}, psi_{0,k}, chi_k)

where E^{i,j}(phi, psi, chi) acts on rows/columns i < j (1-based) as the
block [[cos(phi) e^{i psi}, sin(phi) e^{i chi}],
       [-sin(phi) e^{-i chi}, cos(phi) e^{-i psi}]]
and is the identity elsewhere. Only the last (rightmost) factor of each
composite carries a nonzero chi. Angle subscripts are 0-based pairs (r, s)
with 0 <= r < s <= N-1, matching the composite schedule above; matrix
superscripts are 1-based. The total parameter count is N^2: N(N-1)/2 phi
angles, N(N-1)/2 psi angles, N-1 chi angles, and alpha.

Flat vector layout (the optimizer coordinate system and the on-disk order,
part of the public contract)::

    [alpha,
     phi_{0,1}, psi_{0,1}, chi_1,                        # composite E_1
     phi_{1,2}, psi_{1,2}, phi_{0,2}, psi_{0,2}, chi_2,  # composite E_2
     ...,
     phi_{N-2,N-1}, psi_{N-2,N-1}, ..., phi_{0,N-1}, psi_{0,N-1}, chi_{N-1}]

i.e. alpha first, then each composite's (phi, psi) pairs in factor order
with chi appended after the last pair. Haar sampling consumes one uniform
draw per angle in exactly this order, so a seeded generator reproduces the
same vector on replay.

Haar measure: alpha, psi and chi are uniform on [0, 2*pi). The phi angle of
a pair (r, s) is distributed so that (sin phi)^(2r+2) is uniform on [0, 1],
i.e. phi = arcsin(u^(1/(2r+2))); for r = 0 this reduces to sin^2(phi)
uniform. Drawing phi uniformly instead (the "uniform" mode) does NOT give
Haar-distributed unitaries; it is provided for comparison only.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .matrixcore import unitarity_defect

__all__ = [
    "HurwitzAngles",
    "angle_count",
    "angle_pairs",
    "elementary_rotation",
    "composite_transformation",
    "compose_unitary",
    "compose_unitary_from_vector",
    "sample_haar_angles",
    "sample_uniform_angles",
    "sample_haar_vector",
    "sample_uniform_vector",
    "sample_unitaries",
    "qr_haar_sample",
]

TWO_PI = 2.0 * math.pi


def angle_count(n):
    """Number of independent real parameters of U(n): n**2."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return n * n


def angle_pairs(n):
    """All (r, s) angle subscript pairs, 0 <= r < s <= n-1, in vector order.

    Vector order means: pairs of composite E_1, then E_2, etc., each
    composite's pairs listed with descending first index.
    """
    return [(s - 1 - t, s) for s in range(1, n) for t in range(s)]


@dataclass(frozen=True)
class HurwitzAngles:
    """The n^2 Euler angles of one unitary matrix.

    phi and psi are keyed by the 0-based pair (r, s); chi is keyed by s alone
    (it belongs to composite E_s). Values are radians and may lie outside the
    nominal Haar-sampling ranges: the construction is periodic and stays
    unitary for any real angles, which is what lets optimizers move freely.
    """

    n: int
    alpha: float
    phi: dict = field(default_factory=dict)
    psi: dict = field(default_factory=dict)
    chi: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")
        pairs = set(angle_pairs(self.n))
        if set(self.phi) != pairs or set(self.psi) != pairs:
            raise ValueError("phi/psi index pairs must be exactly "
                             "{(r, s): 0 <= r < s <= n-1}")
        if set(self.chi) != set(range(1, self.n)):
            raise ValueError("chi must be indexed by s = 1..n-1")
        values = [self.alpha, *self.phi.values(), *self.psi.values(),
                  *self.chi.values()]
        if not np.all(np.isfinite(values)):
            raise ValueError("angles must be finite")

    def to_vector(self):
        """Serialize to the flat layout documented in the module docstring."""
        x = np.empty(self.n * self.n)
        x[0] = self.alpha
        pos = 1
        for s in range(1, self.n):
            for t in range(s):
                r = s - 1 - t
                x[pos] = self.phi[(r, s)]
                x[pos + 1] = self.psi[(r, s)]
                pos += 2
            x[pos] = self.chi[s]
            pos += 1
        return x

    @classmethod
    def from_vector(cls, n, x):
        """Rebuild from a flat vector; exact inverse of `to_vector`."""
        x = np.asarray(x, dtype=float)
        if x.shape != (n * n,):
            raise ValueError(f"angle vector for n={n} must have length {n * n}, "
                             f"got shape {x.shape}")
        phi, psi, chi = {}, {}, {}
        pos = 1
        for s in range(1, n):
            for t in range(s):
                r = s - 1 - t
                phi[(r, s)] = float(x[pos])
                psi[(r, s)] = float(x[pos + 1])
                pos += 2
            chi[s] = float(x[pos])
            pos += 1
        return cls(n=n, alpha=float(x[0]), phi=phi, psi=psi, chi=chi)


def elementary_rotation(i, j, phi, psi, chi, n):
    """The elementary two-level rotation E^{i,j}(phi, psi, chi) in U(n).

    i and j are 1-based with 1 <= i < j <= n. The returned matrix is the
    identity outside the (i, j) block.
    """
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    e = np.eye(n, dtype=np.complex128)
    c, s = math.cos(phi), math.sin(phi)
    e[i - 1, i - 1] = c * np.exp(1j * psi)
    e[i - 1, j - 1] = s * np.exp(1j * chi)
    e[j - 1, i - 1] = -s * np.exp(-1j * chi)
    e[j - 1, j - 1] = c * np.exp(-1j * psi)
    return e


def composite_transformation(k, angles):
    """The composite E_k, a product of k elementary rotations.

    Factor t (t = 0..k-1, left to right) is E^{n-k+t, n-k+t+1} with angles
    (phi_{k-1-t,k}, psi_{k-1-t,k}); only the last factor carries chi_k.
    """
    n = angles.n
    if not (1 <= k <= n - 1):
        raise ValueError(f"composite index must satisfy 1 <= k <= n-1, got {k}")
    e = np.eye(n, dtype=np.complex128)
    for t in range(k):
        r = k - 1 - t
        chi = angles.chi[k] if t == k - 1 else 0.0
        e = e @ elementary_rotation(n - k + t, n - k + t + 1,
                                    angles.phi[(r, k)], angles.psi[(r, k)],
                                    chi, n)
    return e


def compose_unitary(angles):
    """Assemble U = e^{i alpha} E_1 E_2 ... E_{N-1} from a HurwitzAngles.

    This is the readable reference path (explicit matrix products); the
    compiled kernel used in optimization loops is checked against it.
    """
    n = angles.n
    u = np.eye(n, dtype=np.complex128)
    for k in range(1, n):
        u = u @ composite_transformation(k, angles)
    return np.exp(1j * angles.alpha) * u


def compose_unitary_from_vector(x, n):
    """Fast assembly straight from a flat angle vector."""
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape != (n * n,):
        raise ValueError(f"angle vector for n={n} must have length {n * n}")
    return _kernels.compose_unitary_kernel(x, n)


def sample_haar_vector(n, rng):
    """Draw one Haar-distributed flat angle vector.

    One uniform draw per angle, consumed in vector order. The phi draw of
    pair (r, s) is mapped through arcsin(u^(1/(2r+2))).
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    x = np.empty(n * n)
    x[0] = rng.random() * TWO_PI
    pos = 1
    for s in range(1, n):
        for t in range(s):
            r = s - 1 - t
            x[pos] = math.asin(rng.random() ** (1.0 / (2.0 * r + 2.0)))
            x[pos + 1] = rng.random() * TWO_PI
            pos += 2
        x[pos] = rng.random() * TWO_PI
        pos += 1
    return x


def sample_uniform_vector(n, rng):
    """Draw angles uniformly over their nominal ranges (phi on [0, pi/2]).

    Comparison mode only: the resulting matrices are not Haar-distributed.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    x = np.empty(n * n)
    x[0] = rng.random() * TWO_PI
    pos = 1
    for s in range(1, n):
        for t in range(s):
            x[pos] = rng.random() * (math.pi / 2.0)
            x[pos + 1] = rng.random() * TWO_PI
            pos += 2
        x[pos] = rng.random() * TWO_PI
        pos += 1
    return x


def sample_haar_angles(n, rng):
    """Haar-distributed HurwitzAngles (see `sample_haar_vector`)."""
    return HurwitzAngles.from_vector(n, sample_haar_vector(n, rng))


def sample_uniform_angles(n, rng):
    """Uniform-angle HurwitzAngles, the non-Haar comparison mode."""
    return HurwitzAngles.from_vector(n, sample_uniform_vector(n, rng))


def sample_unitaries(n, count, rng, mode="haar"):
    """Draw `count` unitaries; returns (vectors (count, n^2), matrices (count, n, n)).

    mode is "haar" or "uniform". Uses the compiled assembly kernel, so this
    is the right entry point for bulk statistics.
    """
    if mode == "haar":
        sampler = sample_haar_vector
    elif mode == "uniform":
        sampler = sample_uniform_vector
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    vectors = np.empty((count, n * n))
    matrices = np.empty((count, n, n), dtype=np.complex128)
    for s in range(count):
        vectors[s] = sampler(n, rng)
        matrices[s] = _kernels.compose_unitary_kernel(vectors[s], n)
    return vectors, matrices


def qr_haar_sample(n, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    Independent of the Euler-angle route; used to cross-validate its
    statistics. The R-diagonal phase fix makes the distribution exactly
    Haar rather than merely unitary.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    if unitarity_defect(q) > 1e-12:
        raise RuntimeError("QR sample failed the unitarity check")
    return q
