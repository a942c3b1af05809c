import numpy as np
import pytest

from mubsearch.matrixcore import adjoint, as_complex_matrix, multiply, \
    unitarity_defect
from mubsearch.hurwitz import qr_haar_sample, sample_haar_vector, \
    compose_unitary_from_vector


def multiply_oracle(a, b):
    """Entry-by-entry triple loop, deliberately naive."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


def test_multiply_identity():
    eye = np.eye(3, dtype=complex)
    assert np.array_equal(multiply(eye, eye), eye)


def test_multiply_rotation_block_times_adjoint():
    c, s = np.cos(np.pi / 2), np.sin(np.pi / 2)
    e = np.array([[c, s], [-s, c]], dtype=complex)
    assert np.allclose(multiply(e, adjoint(e)), np.eye(2), atol=1e-15)


def test_multiply_matches_triple_loop_oracle():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.max(np.abs(multiply(a, b) - multiply_oracle(a, b))) < 1e-14


def test_multiply_rectangular_and_mismatch():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((2, 4)) + 0j
    b = rng.standard_normal((4, 3)) + 0j
    assert multiply(a, b).shape == (2, 3)
    with pytest.raises(ValueError):
        multiply(b, a[:, :3])


def test_adjoint_examples():
    assert np.array_equal(adjoint(np.eye(4, dtype=complex)), np.eye(4))
    m = np.array([[0.0, 1j], [0.0, 0.0]])
    expected = np.array([[0.0, 0.0], [-1j, 0.0]])
    assert np.array_equal(adjoint(m), expected)


def test_adjoint_is_involution_exactly():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    assert np.array_equal(adjoint(adjoint(a)), a)


def test_adjoint_of_haar_sample_inverts_it():
    u = qr_haar_sample(4, np.random.default_rng(10))
    assert np.max(np.abs(multiply(adjoint(u), u) - np.eye(4))) < 1e-12


def test_unitarity_defect_values():
    assert unitarity_defect(np.eye(5, dtype=complex)) == 0.0
    # adjoint(2I) @ 2I has diagonal 4, so the worst deviation is 3
    assert unitarity_defect(2.0 * np.eye(2)) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        unitarity_defect(np.ones((2, 3)))


def test_unitarity_defect_of_assembled_unitary():
    rng = np.random.default_rng(11)
    u = compose_unitary_from_vector(sample_haar_vector(6, rng), 6)
    assert unitarity_defect(u) < 1e-12


def test_adjoint_of_product_rule():
    rng = np.random.default_rng(12)
    for _ in range(5):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        lhs = adjoint(multiply(a, b))
        rhs = multiply(adjoint(b), adjoint(a))
        assert np.max(np.abs(lhs - rhs)) < 1e-14


def test_multiply_associative_on_unit_norm_triples():
    rng = np.random.default_rng(13)
    for _ in range(5):
        mats = []
        for _ in range(3):
            z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            mats.append(z / np.linalg.norm(z))
        a, b, c = mats
        lhs = multiply(multiply(a, b), c)
        rhs = multiply(a, multiply(b, c))
        assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_as_complex_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_complex_matrix(np.array([1.0, 2.0]))  # not 2-D
    with pytest.raises(ValueError):
        as_complex_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
