"""The mutual-unbiasedness residual objective and basis-set diagnostics.

Two orthonormal bases, represented by unitaries whose columns are the basis
vectors, are mutually unbiased when every entry of their overlap Gram matrix
G = A^dag B has modulus 1/sqrt(d). The residual of a single entry is
(|G_lm|^2 - 1/d)^2; summing over all d^2 entries and all m(m-1)/2 basis
pairs gives the objective minimized by the search. A set of m mutually
unbiased bases exists iff the minimum is exactly zero.

Fixing the first basis to the identity (an overall unitary rotation changes
nothing measurable) removes d^2 redundant coordinates per search; with that
gauge the overlap of basis 1 with basis j is just U_j itself, and the
mutual-unbiasedness condition says U_j must be a complex Hadamard matrix.

Index conventions in reports: bases are numbered 1..m and overlap entries
(l, m) are 1-based, matching the usual mathematical notation.
"""

from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from . import _kernels
from .hurwitz import compose_unitary_from_vector
from .matrixcore import adjoint, as_complex_matrix, unitarity_defect

__all__ = [
    "BasisSet",
    "ResidualReport",
    "WorstEntry",
    "MubObjective",
    "overlap_matrix",
    "pair_residual",
    "objective",
    "residual_report",
    "verify_mub",
    "is_hadamard_like",
    "max_mu_subset",
    "max_modulus_deviation",
]

#: default tolerance on overlap-entry moduli when declaring bases unbiased
DEFAULT_ENTRY_TOL = 1e-7


@dataclass(frozen=True)
class BasisSet:
    """A collection of m candidate bases of C^d, stored as d x d matrices.

    `gauge_fixed` records that basis 1 is pinned to the identity (the bases
    tuple still holds all m matrices, identity included). Construction checks
    structure only; whether the matrices are actually unitary is a question
    for `verify_mub`, so that near-miss and deliberately broken sets can
    still be loaded and diagnosed.
    """

    d: int
    m: int
    gauge_fixed: bool
    bases: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got d={self.d}")
        if self.m < 1:
            raise ValueError(f"basis count must be >= 1, got m={self.m}")
        mats = tuple(as_complex_matrix(b) for b in self.bases)
        if len(mats) != self.m:
            raise ValueError(f"expected {self.m} bases, got {len(mats)}")
        for b in mats:
            if b.shape != (self.d, self.d):
                raise ValueError(f"every basis must be {self.d}x{self.d}, "
                                 f"got {b.shape}")
        if self.gauge_fixed and not np.array_equal(mats[0], np.eye(self.d)):
            raise ValueError("gauge_fixed requires basis 1 to be the identity")
        object.__setattr__(self, "bases", mats)

    @classmethod
    def from_angle_vectors(cls, d, m, gauge_fixed, vectors):
        """Assemble a BasisSet from flat angle vectors (one per free basis)."""
        vectors = _normalize_vectors(vectors, d, m, gauge_fixed)
        mats = []
        if gauge_fixed:
            mats.append(np.eye(d, dtype=np.complex128))
        for v in vectors:
            mats.append(compose_unitary_from_vector(v, d))
        return cls(d=d, m=m, gauge_fixed=gauge_fixed, bases=tuple(mats))

    def max_unitarity_defect(self):
        return max(unitarity_defect(b) for b in self.bases)


@dataclass(frozen=True)
class WorstEntry:
    """Location and size of the largest single-entry residual deviation."""

    pair: tuple      # (i, j), 1-based basis indices
    entry: tuple     # (l, m), 1-based overlap-entry indices
    value: float     # | |G_lm|^2 - 1/d |


@dataclass(frozen=True)
class ResidualReport:
    """Residual breakdown for one basis set.

    total is the full objective; per_pair maps each 1-based pair (i, j) to
    its d^2-entry residual sum, and total is exactly the sum of those values.
    """

    total: float
    per_pair: dict
    worst_entry: WorstEntry | None
    pair_count: int

    def __post_init__(self):
        if self.pair_count != len(self.per_pair):
            raise ValueError("pair_count must match per_pair")


def overlap_matrix(a, b, check=True):
    """Gram matrix adjoint(a) @ b of column overlaps between two bases.

    Entry (l, m) is the inner product of column l of `a` with column m of
    `b`. With check=True both inputs must be square, equal-sized and unitary
    to 1e-10.
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"bases must be square and equal-sized, "
                         f"got {a.shape} and {b.shape}")
    if check:
        for mat in (a, b):
            defect = unitarity_defect(mat)
            if defect > 1e-10:
                raise ValueError(f"basis is not unitary (defect {defect:.2e})")
    return adjoint(a) @ b


def _residuals_from_overlap(g, d):
    """Entrywise |G|^2 - 1/d deviations of an overlap matrix."""
    return np.abs(g) ** 2 - 1.0 / d


def pair_residual(a, b, check=True):
    """Sum over all d^2 overlap entries of (|G_lm|^2 - 1/d)^2.

    Zero exactly when the two bases are mutually unbiased. For a == b == I_d
    the value is d - 1 in closed form (d diagonal entries contribute
    (1 - 1/d)^2 each, the rest 1/d^2 each).
    """
    g = overlap_matrix(a, b, check=check)
    dev = _residuals_from_overlap(g, g.shape[0])
    return float(np.sum(dev * dev))


def _normalize_vectors(vectors, d, m, gauge_fixed):
    """Validate and reshape angle vectors to a (n_free, d^2) float array."""
    n_free = m - 1 if gauge_fixed else m
    k = d * d
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim == 1:
        if arr.size != n_free * k:
            raise ValueError(
                f"expected {n_free} angle vectors of length {k} "
                f"(flat length {n_free * k}), got length {arr.size}")
        arr = arr.reshape(n_free, k)
    elif arr.ndim == 2:
        if arr.shape != (n_free, k):
            raise ValueError(f"expected angle vectors of shape ({n_free}, {k}), "
                             f"got {arr.shape}")
    else:
        raise ValueError("angle vectors must be a vector, a list of vectors, "
                         "or a 2-D array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("angle vectors must be finite")
    return arr


def objective(vectors, d, m, gauge_fixed=True):
    """Total residual of the basis set encoded by `vectors`.

    `vectors` holds one flat angle vector of length d^2 per free basis
    (m - 1 of them when gauge_fixed, else m), either as a list, a 2-D array,
    or a single stacked 1-D array. Reference implementation built from
    explicit matrix products; deterministic for identical input.
    """
    if m < 2:
        raise ValueError(f"need at least two bases, got m={m}")
    arr = _normalize_vectors(vectors, d, m, gauge_fixed)
    mats = []
    if gauge_fixed:
        mats.append(np.eye(d, dtype=np.complex128))
    from .hurwitz import HurwitzAngles, compose_unitary
    for v in arr:
        mats.append(compose_unitary(HurwitzAngles.from_vector(d, v)))
    total = 0.0
    for i, j in combinations(range(m), 2):
        total += pair_residual(mats[i], mats[j], check=False)
    return total


class MubObjective:
    """Callable objective on stacked angle vectors, wired to the fast kernel.

    Instances are what the optimizers evaluate millions of times; the
    annealer also recognizes them and runs its proposal loop inside compiled
    code. Values agree with `objective` to floating-point accumulation order.
    """

    def __init__(self, d, m, gauge_fixed=True):
        if d < 2 or m < 2:
            raise ValueError(f"need d >= 2 and m >= 2, got d={d}, m={m}")
        self.d = d
        self.m = m
        self.gauge_fixed = gauge_fixed
        self.n_free = m - 1 if gauge_fixed else m
        self.n_vars = self.n_free * d * d

    def __call__(self, x):
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.n_vars,):
            raise ValueError(f"expected a flat vector of length {self.n_vars}, "
                             f"got shape {x.shape}")
        return float(_kernels.objective_kernel(x, self.d, self.m, self.gauge_fixed))

    def kernel_args(self):
        return self.d, self.m, self.gauge_fixed


def residual_report(basis_set):
    """Full ResidualReport for a BasisSet (no unitarity requirement)."""
    d, m = basis_set.d, basis_set.m
    per_pair = {}
    worst = None
    for i, j in combinations(range(m), 2):
        g = adjoint(basis_set.bases[i]) @ basis_set.bases[j]
        dev = _residuals_from_overlap(g, d)
        per_pair[(i + 1, j + 1)] = float(np.sum(dev * dev))
        flat = np.argmax(np.abs(dev))
        l, mm = divmod(int(flat), d)
        value = float(np.abs(dev)[l, mm])
        if worst is None or value > worst.value:
            worst = WorstEntry(pair=(i + 1, j + 1), entry=(l + 1, mm + 1),
                               value=value)
    return ResidualReport(total=float(sum(per_pair.values())),
                          per_pair=per_pair, worst_entry=worst,
                          pair_count=len(per_pair))


def verify_mub(basis_set, tol=DEFAULT_ENTRY_TOL):
    """Check the mutual-unbiasedness conditions; returns (ok, report).

    ok is True iff every basis is unitary to `tol` (orthonormality) and every
    cross-pair overlap entry has modulus within `tol` of 1/sqrt(d). The
    report is produced either way.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    report = residual_report(basis_set)
    if basis_set.max_unitarity_defect() >= tol:
        return False, report
    target = 1.0 / math.sqrt(basis_set.d)
    for i, j in combinations(range(basis_set.m), 2):
        g = adjoint(basis_set.bases[i]) @ basis_set.bases[j]
        if np.max(np.abs(np.abs(g) - target)) >= tol:
            return False, report
    return True, report


def is_hadamard_like(h, tol=DEFAULT_ENTRY_TOL):
    """True iff every entry of the square matrix h has modulus 1/sqrt(d) to tol."""
    h = as_complex_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got {h.shape}")
    d = h.shape[0]
    return bool(np.max(np.abs(np.abs(h) - 1.0 / math.sqrt(d))) < tol)


def max_modulus_deviation(basis_set):
    """Largest | |G_lm| - 1/sqrt(d) | over all cross-pair overlap entries.

    This is the quantity the unbiasedness branch of `verify_mub` compares
    against the tolerance (on the modulus scale, not the squared scale used
    by the residual objective). Returns 0.0 for single-basis sets.
    """
    target = 1.0 / math.sqrt(basis_set.d)
    worst = 0.0
    for i, j in combinations(range(basis_set.m), 2):
        g = adjoint(basis_set.bases[i]) @ basis_set.bases[j]
        worst = max(worst, float(np.max(np.abs(np.abs(g) - target))))
    return worst


def _pairwise_unbiased(basis_set, tol):
    """Boolean matrix: pair (i, j) passes the cross-pair overlap test."""
    m, d = basis_set.m, basis_set.d
    target = 1.0 / math.sqrt(d)
    ok = np.zeros((m, m), dtype=bool)
    for i, j in combinations(range(m), 2):
        g = adjoint(basis_set.bases[i]) @ basis_set.bases[j]
        ok[i, j] = ok[j, i] = np.max(np.abs(np.abs(g) - target)) < tol
    return ok

def max_mu_subset(basis_set, tol=DEFAULT_ENTRY_TOL):
    """Largest subset of bases that is pairwise unbiased at tolerance tol.

    Returns 1-based indices; among subsets of maximal size the
    lexicographically smallest index list wins. Exhaustive search, fine for
    the m <= ~8 sets this package produces.
    """
    m = basis_set.m
    ok = _pairwise_unbiased(basis_set, tol)
    for size in range(m, 0, -1):
        for subset in combinations(range(m), size):
            if all(ok[i, j] for i, j in combinations(subset, 2)):
                return [i + 1 for i in subset]
    return []
