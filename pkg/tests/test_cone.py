"""
Tests for the cone test on root semidirect products

This file tests:
- The closed-form SL(3,R) condition for ℝ·diag(p, q, −p−q) ⊕ 𝔲_α
- cone_test agreement with it, scale invariance and boundary flags
- Input rejection

Run: python -m pytest tests/test_cone.py -v
"""

import numpy as np
import pytest

from services.cone import coroot_direction, cone_test, single_root_space, sl3_rootsemi_condition
from services.liealg import root_vector
from tests.helpers import so2n_vec

CASES = [
    ((1.0, -0.9), False),
    ((1.0, 1.0), True),
    ((1.0, -0.5), True),
    ((1.0, -3.0), True),
    ((2.0, 1.0), True),
    ((-1.0, 1.0), False),
]


def diag_row(p: float, q: float) -> np.ndarray:
    return np.array([[p, q, -p - q]])


@pytest.mark.unit
class TestSl3Condition:
    """sl3_rootsemi_condition on fixed (p, q)"""

    @pytest.mark.parametrize("pq,expected", CASES)
    def test_examples(self, pq, expected):
        assert sl3_rootsemi_condition(*pq) is expected

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            sl3_rootsemi_condition(0.0, 0.0)


@pytest.mark.unit
class TestConeTest:
    """cone_test against the closed form"""

    @pytest.mark.parametrize("pq,expected", CASES)
    def test_agrees_with_closed_form(self, sl3, pq, expected):
        u = root_vector(sl3, "alpha")[None, :]
        assert cone_test(sl3, diag_row(*pq), u).is_cds is expected

    @pytest.mark.parametrize("factor", [3.0, 0.01, -1.0, -7.5])
    def test_scale_invariance(self, sl3, factor):
        u = root_vector(sl3, "alpha")[None, :]
        for pq, expected in CASES:
            assert cone_test(sl3, factor * diag_row(*pq), u).is_cds is expected
        print(f"✅ Cone test invariant under t -> {factor}·t")

    def test_boundary_flag(self, sl3):
        u = root_vector(sl3, "alpha")[None, :]
        result = cone_test(sl3, diag_row(1.0, -0.5), u)
        assert result.is_cds and result.boundary
        assert not cone_test(sl3, diag_row(1.0, -3.0), u).boundary

    def test_region_is_inside_the_chamber(self, sl3):
        result = cone_test(sl3, diag_row(1.0, -0.9), root_vector(sl3, "alpha")[None, :])
        assert 0.5 - 1e-12 <= result.region.slope_low <= result.region.slope_high <= 2.0 + 1e-12

    def test_so2n_on_the_wall(self, so25):
        # t = (1, 0) sits on the wall β = 0 of the cone over 𝔲_{α+2β}
        t = np.array([so2n_vec(so25, t=(1.0, 0.0))])
        u = np.array([so2n_vec(so25, eta=1.0)])
        result = cone_test(so25, t, u)
        assert result.is_cds and result.boundary

    def test_so2n_interior(self, so25):
        t = np.array([[1.0, 1.0]])
        u = np.array([so2n_vec(so25, eta=1.0)])
        assert not cone_test(so25, t, u).is_cds


@pytest.mark.unit
class TestInputs:
    """single_root_space and argument checks"""

    def test_single_root_space(self, so25):
        assert single_root_space(so25, np.array([so2n_vec(so25, x={0: 1.0}), so2n_vec(so25, x={2: 2.0})])) == "alpha+beta"
        assert single_root_space(so25, np.array([so2n_vec(so25, x={0: 1.0}, y={0: 1.0})])) is None
        assert single_root_space(so25, np.zeros((0, so25.coord_dim))) is None

    def test_coroot(self, sl3):
        np.testing.assert_array_equal(coroot_direction(sl3, "alpha"), [1.0, -1.0, 0.0])

    def test_rejections(self, sl3):
        u = root_vector(sl3, "alpha")[None, :]
        with pytest.raises(ValueError):
            cone_test(sl3, np.zeros((1, 3)), u)
        with pytest.raises(ValueError):
            cone_test(sl3, np.vstack([diag_row(1, 0), diag_row(0, 1)]), u)
        with pytest.raises(ValueError):
            cone_test(sl3, diag_row(1, 0), np.array([root_vector(sl3, "alpha") + root_vector(sl3, "beta")]))
