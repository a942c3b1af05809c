import math

import numpy as np
import pytest

from mubsearch.constructions import fourier_matrix, identity_basis, is_prime, \
    prime_mub_set
from mubsearch.matrixcore import unitarity_defect
from mubsearch.objective import is_hadamard_like, max_mu_subset, \
    overlap_matrix, residual_report, verify_mub


def test_is_prime_small_values():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23}
    for n in range(-3, 25):
        assert is_prime(n) == (n in primes)


def test_fourier_base_cases():
    assert np.array_equal(fourier_matrix(1), np.ones((1, 1)))
    expected = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    assert np.max(np.abs(fourier_matrix(2) - expected)) < 1e-15


def test_fourier_d6():
    f = fourier_matrix(6)
    assert unitarity_defect(f) < 1e-14
    assert np.max(np.abs(np.abs(f) - 1.0 / math.sqrt(6.0))) < 1e-15
    assert is_hadamard_like(f, 1e-12)


def test_fourier_columns_orthonormal_up_to_64():
    for d in (8, 17, 64):
        assert unitarity_defect(fourier_matrix(d)) < 1e-13


def test_identity_basis():
    assert np.array_equal(identity_basis(1), np.ones((1, 1)))
    i6 = identity_basis(6)
    assert unitarity_defect(i6) == 0.0
    assert np.array_equal(overlap_matrix(i6, fourier_matrix(6)),
                          fourier_matrix(6))


@pytest.mark.parametrize("d", [2, 3, 5, 7, 11])
def test_prime_mub_set_is_complete_and_unbiased(d):
    s = prime_mub_set(d)
    assert s.m == d + 1
    ok, rep = verify_mub(s, tol=1e-10)
    assert ok
    assert rep.total < 1e-20
    # every cross pair individually Hadamard-like
    for i in range(s.m):
        for j in range(i + 1, s.m):
            g = overlap_matrix(s.bases[i], s.bases[j])
            assert is_hadamard_like(g, 1e-10), (d, i, j)


@pytest.mark.parametrize("d", [2, 3, 7])
def test_prime_mub_subset_is_everything(d):
    assert max_mu_subset(prime_mub_set(d), tol=1e-8) == list(range(1, d + 2))


def test_prime_mub_rejects_composite_dimension():
    for d in (1, 4, 6, 9, 12):
        with pytest.raises(ValueError):
            prime_mub_set(d)


def test_d2_bases_are_the_pauli_eigenbases():
    s = prime_mub_set(2)
    z, x, y = s.bases
    assert np.array_equal(z, np.eye(2))
    r2 = 1.0 / math.sqrt(2.0)
    assert np.max(np.abs(x - np.array([[r2, r2], [r2, -r2]]))) < 1e-15
    assert np.max(np.abs(y - np.array([[r2, r2], [1j * r2, -1j * r2]]))) < 1e-15


def test_identity_and_fourier_are_unbiased_for_primes():
    from mubsearch.objective import BasisSet
    for d in (2, 3, 5, 7):
        pair = BasisSet(d=d, m=2, gauge_fixed=True,
                        bases=(identity_basis(d), fourier_matrix(d)))
        ok, _ = verify_mub(pair, tol=1e-10)
        assert ok


def test_report_totals_on_oracle_sets():
    for d in (3, 5):
        rep = residual_report(prime_mub_set(d))
        assert rep.total < 1e-20
        assert rep.pair_count == (d + 1) * d // 2
