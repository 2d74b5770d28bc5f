"""
Tests for the dense matrix kernel

This file tests:
- Max-entry norm and singular values
- Exterior square: diagonal action, functoriality, lexicographic order
- Matrix exponential on nilpotent and diagonal input
- Wedge derivation against wedge_square of expm
- Nilpotency degrees and scale-guarded log-norms

Run: python -m pytest tests/test_linalg.py -v
"""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from services.errors import ScaleOverflowError
from services.linalg import (
    expm,
    log_norms,
    max_abs_norm,
    nilpotency_degree,
    null_rows,
    orthonormal_rows,
    rank,
    singular_values,
    wedge_derivation,
    wedge_index,
    wedge_pairs,
    wedge_square,
)

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

bounded_4x4 = arrays(np.float64, (4, 4), elements=st.floats(min_value=-3.0, max_value=3.0))


@pytest.mark.unit
class TestNormsAndSingularValues:
    """Max-entry norm and LAPACK singular values"""

    def test_norm_of_identity_and_diagonal(self):
        assert max_abs_norm(np.eye(5)) == 1.0
        assert max_abs_norm(np.diag([4, 2, 1, 0.5, 0.25])) == 4.0
        print("✅ Max-entry norms")

    def test_unipotent_singular_values(self):
        m = np.eye(3)
        m[0, 1] = 1.0
        np.testing.assert_allclose(singular_values(m), [GOLDEN, 1.0, 1.0 / GOLDEN], rtol=1e-12)

    def test_diagonal_singular_values_are_sorted(self):
        sigma = singular_values(np.diag([0.25, 2.0, 1.0, 0.5, 4.0]))
        np.testing.assert_allclose(sigma, [4, 2, 1, 0.5, 0.25])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            singular_values(np.ones((2, 3)))

    @seed(1)
    @settings(max_examples=60, deadline=None)
    @given(m=bounded_4x4)
    def test_norm_sandwich(self, m):
        sigma1 = singular_values(m)[0]
        norm = max_abs_norm(m)
        assert norm <= sigma1 * (1 + 1e-12) + 1e-300
        assert sigma1 <= 4 * norm * (1 + 1e-12) + 1e-300

    @seed(2)
    @settings(max_examples=60, deadline=None)
    @given(m=bounded_4x4)
    def test_product_of_singular_values_is_abs_det(self, m):
        sigma = singular_values(m)
        assert np.all(np.diff(sigma) <= 1e-12)
        det = abs(np.linalg.det(m))
        assert np.prod(sigma) == pytest.approx(det, rel=1e-8, abs=1e-10)


@pytest.mark.unit
class TestWedgeSquare:
    """Exterior square and its index convention"""

    def test_lexicographic_pairs(self):
        assert wedge_pairs(4) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        for k, (i, j) in enumerate(wedge_pairs(5)):
            assert wedge_index(5, i, j) == k

    def test_identity_and_diagonal(self):
        np.testing.assert_allclose(wedge_square(np.eye(4)), np.eye(6))
        a = np.array([2.0, 3.0, 5.0, 7.0])
        expected = [a[i] * a[j] for i, j in wedge_pairs(4)]
        np.testing.assert_allclose(np.diag(wedge_square(np.diag(a))), expected)

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            wedge_index(4, 2, 2)

    @seed(3)
    @settings(max_examples=100, deadline=None)
    @given(a=bounded_4x4, b=bounded_4x4)
    def test_functoriality(self, a, b):
        np.testing.assert_allclose(wedge_square(a @ b), wedge_square(a) @ wedge_square(b), atol=1e-9)

    def test_derivation_exponentiates_to_wedge(self, rng):
        for _ in range(10):
            m = rng.normal(scale=0.7, size=(5, 5))
            np.testing.assert_allclose(expm(wedge_derivation(m)), wedge_square(expm(m)), rtol=1e-9, atol=1e-9)
        print("✅ ∧²exp(m) = exp(D(m))")


@pytest.mark.unit
class TestExpm:
    """Matrix exponential"""

    def test_zero_is_identity(self):
        np.testing.assert_array_equal(expm(np.zeros((4, 4))), np.eye(4))

    def test_terminating_series(self):
        n = np.zeros((4, 4))
        n[0, 1], n[1, 2], n[0, 2] = 2.0, 3.0, 5.0
        assert np.allclose(n @ n @ n, 0.0)
        np.testing.assert_array_equal(expm(n), np.eye(4) + n + n @ n / 2.0)

    def test_diagonal(self):
        np.testing.assert_allclose(expm(np.diag([1.0, 0.0, 0.0, 0.0, -1.0])), np.diag([np.e, 1, 1, 1, 1 / np.e]))

    def test_inverse_pair(self, rng):
        for _ in range(20):
            m = rng.normal(size=(5, 5))
            np.testing.assert_allclose(expm(m) @ expm(-m), np.eye(5), atol=1e-9)

    def test_overflow(self):
        with pytest.raises(ScaleOverflowError):
            expm(np.diag([5000.0, 0.0, -5000.0]))


@pytest.mark.unit
class TestHelpers:
    """Nilpotency degree, null spaces, log-norms"""

    def test_nilpotency_degree(self):
        n = np.zeros((4, 4))
        assert nilpotency_degree(n) == 0
        n[0, 1] = 1.0
        assert nilpotency_degree(n) == 1
        n[1, 2] = n[2, 3] = 1.0
        assert nilpotency_degree(n) == 3

    def test_null_rows_and_rank(self):
        m = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        c = null_rows(m)
        assert c.shape == (1, 3)
        np.testing.assert_allclose(c @ m, 0.0, atol=1e-12)
        assert rank(m) == 2
        assert orthonormal_rows(np.zeros((0, 3))).shape == (0, 3)

    def test_log_norms_match_direct_evaluation(self, rng):
        g = expm(rng.normal(size=(4, 4)))
        n1, n2, s1, s12 = log_norms(g)
        sigma = singular_values(g)
        assert n1 == pytest.approx(np.log(max_abs_norm(g)))
        assert n2 == pytest.approx(np.log(max_abs_norm(wedge_square(g))))
        assert s1 == pytest.approx(np.log(sigma[0]))
        assert s12 == pytest.approx(np.log(sigma[0] * sigma[1]))
        # norm sandwich on both representations
        assert 0.0 <= s1 - n1 <= np.log(4) + 1e-12
        assert 0.0 <= s12 - n2 <= np.log(6) + 1e-12

    def test_log_norms_reject_zero(self):
        with pytest.raises(ScaleOverflowError):
            log_norms(np.zeros((3, 3)))
