"""
Tests for the coordinate model of 𝔞+𝔫

This file tests:
- coord_to_matrix / matrix_to_coord layouts
- Brackets and subalgebra validation with failure witnesses
- Closed-form exponential on 𝔫 against expm
- Group elements of H as products of exponentials
- Parts, weight projections and the compatibility check
- Lie closure and Ad(g) on subalgebras

Run: python -m pytest tests/test_liealg.py -v
"""

import numpy as np
import pytest

from models.algebra import SO2nCoord, Subalgebra
from services.errors import NotASubalgebraError
from services.group import is_member, make_group
from services.linalg import expm, orthonormal_rows, wedge_square
from services.liealg import (
    adjoint_conjugate,
    array_to_coord,
    as_rows,
    bracket,
    check_subalgebra,
    coord_to_matrix,
    decompose_parts,
    exp_n_closed,
    group_sample_element,
    group_sample_pair,
    is_a_normalized,
    is_abelian,
    is_compatible,
    matrix_to_coord,
    nilpotent_part,
    require_subalgebra,
    root_vector,
    span_residual,
    subalgebra_closure,
    weight_project,
)
from tests.helpers import sl3_vec, so2n_vec


def same_span(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    a, b = orthonormal_rows(a), orthonormal_rows(b)
    if a.shape[0] != b.shape[0]:
        return False
    return all(span_residual(v, b) < tol for v in a)


@pytest.mark.unit
class TestCoordinates:
    """Matrix layouts of 𝔰𝔬(2,n) and 𝔰𝔩(3,ℝ)"""

    def test_zero(self, so23, sl3):
        np.testing.assert_array_equal(coord_to_matrix(so23, np.zeros(so23.coord_dim)), np.zeros((5, 5)))
        np.testing.assert_array_equal(coord_to_matrix(sl3, np.zeros(6)), np.zeros((3, 3)))

    def test_toral_part(self, so23):
        M = coord_to_matrix(so23, so2n_vec(so23, t=(1.0, 2.0)))
        np.testing.assert_array_equal(M, np.diag([1.0, 2.0, 0.0, -2.0, -1.0]))

    def test_phi_positions(self, so23):
        M = coord_to_matrix(so23, so2n_vec(so23, phi=1.0))
        expected = np.zeros((5, 5))
        expected[0, 1], expected[3, 4] = 1.0, -1.0
        np.testing.assert_array_equal(M, expected)

    def test_elements_preserve_the_form(self, so25, rng):
        J = so25.J
        for _ in range(10):
            M = coord_to_matrix(so25, rng.normal(size=so25.coord_dim))
            np.testing.assert_allclose(M.T @ J + J @ M, 0.0, atol=1e-12)

    def test_matrix_to_coord_inverts(self, so25, rng):
        v = rng.normal(size=so25.coord_dim)
        np.testing.assert_allclose(matrix_to_coord(so25, coord_to_matrix(so25, v)), v)

    def test_matrix_outside_an_rejected(self, sl3):
        M = np.zeros((3, 3))
        M[2, 0] = 1.0
        with pytest.raises(ValueError):
            matrix_to_coord(sl3, M)

    def test_named_coordinates(self, so25):
        v = so2n_vec(so25, t=(1.0, -1.0), phi=2.0, x={0: 3.0}, y={2: 4.0}, eta=5.0)
        coord = array_to_coord(so25, v)
        assert isinstance(coord, SO2nCoord)
        assert coord.x == [3.0, 0.0, 0.0] and coord.y == [0.0, 0.0, 4.0] and coord.eta == 5.0
        sub = Subalgebra(spec=so25, basis=[coord])
        np.testing.assert_array_equal(as_rows(so25, sub), v[None, :])


@pytest.mark.unit
class TestBracket:
    """Commutators in coordinates"""

    def test_antisymmetry(self, so25, rng):
        v = rng.normal(size=so25.coord_dim)
        np.testing.assert_allclose(bracket(so25, v, v), 0.0, atol=1e-12)

    def test_phi_with_y_gives_x(self, so23):
        phi, y = so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})
        np.testing.assert_allclose(bracket(so23, phi, y), so2n_vec(so23, x={0: 1.0}))

    def test_x_with_y_gives_eta(self, so23):
        x, y = so2n_vec(so23, x={0: 1.0}), so2n_vec(so23, y={0: 1.0})
        np.testing.assert_allclose(bracket(so23, x, y), so2n_vec(so23, eta=-1.0))

    def test_sl3_simple_roots(self, sl3):
        np.testing.assert_allclose(bracket(sl3, sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 1, 0))), sl3_vec(u=(0, 0, 1)))

    def test_toral_action_is_the_root(self, sl3):
        t = sl3_vec(d=(1.0, 1.0, -2.0))
        np.testing.assert_allclose(bracket(sl3, t, sl3_vec(u=(0, 0, 1))), sl3_vec(u=(0, 0, 3)))


@pytest.mark.unit
class TestSubalgebraCheck:
    """check_subalgebra and its failure witness"""

    def test_eta_axis(self, so23):
        assert check_subalgebra(so23, [so2n_vec(so23, eta=1.0)]).ok

    def test_phi_and_y_not_closed(self, so23):
        check = check_subalgebra(so23, [so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})])
        assert not check.ok
        assert check.reason == "not_closed"
        assert check.pair == (0, 1)
        with pytest.raises(NotASubalgebraError) as info:
            require_subalgebra(so23, [so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})])
        assert info.value.exit_code == 3
        print("✅ Non-closed basis rejected with its witness pair")

    def test_dependent_basis(self, sl3):
        u = sl3_vec(u=(1, 0, 0))
        check = check_subalgebra(sl3, [u, 2 * u])
        assert check.reason == "dependent"

    def test_empty_basis(self, sl3):
        with pytest.raises(ValueError):
            check_subalgebra(sl3, np.zeros((0, 6)))

    def test_abelian(self, sl3):
        assert is_abelian(sl3, np.array([sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 0, 1))]))
        assert not is_abelian(sl3, np.array([sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 1, 0))]))

    def test_closure(self, sl3, so23):
        closed = subalgebra_closure(sl3, [sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 1, 0))])
        assert closed.shape[0] == 3
        closed = subalgebra_closure(so23, [so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})])
        assert closed.shape[0] == 4
        assert span_residual(root_vector(so23, "alpha+2beta"), closed) < 1e-10
        assert check_subalgebra(so23, closed).ok


@pytest.mark.unit
class TestExponentials:
    """exp_n_closed and group elements of H"""

    def test_zero_is_identity(self, so23):
        np.testing.assert_array_equal(exp_n_closed(so23, 0.0, [0.0], [0.0], 0.0), np.eye(5))

    def test_eta_only(self, so23):
        expected = np.eye(5)
        expected[0, 3], expected[1, 4] = 1.0, -1.0
        np.testing.assert_array_equal(exp_n_closed(so23, 0.0, [0.0], [0.0], 1.0), expected)

    def test_matches_expm(self, rng):
        spec = make_group("SO2n", 6)
        for _ in range(10):
            phi, eta = rng.normal(size=2)
            x, y = rng.normal(size=4), rng.normal(size=4)
            v = np.concatenate([[0.0, 0.0, phi], x, y, [eta]])
            np.testing.assert_allclose(exp_n_closed(spec, phi, x, y, eta), expm(coord_to_matrix(spec, v)), atol=1e-9)
        print("✅ Closed-form exponential agrees with expm on 𝔫")

    def test_wrong_group(self, sl3):
        with pytest.raises(ValueError):
            exp_n_closed(sl3, 0.0, [0.0], [0.0], 0.0)

    def test_product_of_commuting_exponentials(self, sl3):
        basis = np.array([sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 0, 1))])
        g = group_sample_element(sl3, basis, [2.0, -3.0])
        np.testing.assert_allclose(g, expm(coord_to_matrix(sl3, 2.0 * basis[0] - 3.0 * basis[1])), atol=1e-12)
        np.testing.assert_array_equal(group_sample_element(sl3, basis, [0.0, 0.0]), np.eye(3))

    def test_elements_are_members(self, so25, rng):
        basis = rng.normal(size=(3, so25.coord_dim))
        for _ in range(5):
            assert is_member(so25, group_sample_element(so25, basis, rng.normal(size=3)))

    def test_pair_carries_the_wedge(self, so23, rng):
        basis = rng.normal(size=(2, so23.coord_dim))
        g, wedge = group_sample_pair(so23, basis, [0.7, -1.1])
        np.testing.assert_allclose(wedge, wedge_square(g), rtol=1e-9, atol=1e-9)

    def test_coefficient_count(self, sl3):
        with pytest.raises(ValueError):
            group_sample_element(sl3, np.array([sl3_vec(u=(1, 0, 0))]), [1.0, 2.0])


@pytest.mark.unit
class TestParts:
    """h∩𝔞, h∩𝔫, weight projections and compatibility"""

    def test_inside_n(self, so23):
        rows = np.array([so2n_vec(so23, eta=1.0), so2n_vec(so23, x={0: 1.0})])
        parts = decompose_parts(so23, rows)
        assert parts.cap_a.shape[0] == 0
        assert parts.cap_n.shape[0] == 2
        assert parts.torus.shape[0] == 0

    def test_cartan_subalgebra(self, so23):
        rows = np.array([so2n_vec(so23, t=(1.0, 0.0)), so2n_vec(so23, t=(0.0, 1.0))])
        parts = decompose_parts(so23, rows)
        assert (parts.cap_a.shape[0], parts.cap_n.shape[0], parts.torus.shape[0]) == (2, 0, 2)

    def test_graph_algebra(self, sl3):
        rows = np.array([sl3_vec(d=(1, 1, -2), u=(0.7, 0, 0)), sl3_vec(u=(0, 0, 1))])
        parts = decompose_parts(sl3, rows)
        assert parts.cap_a.shape[0] == 0
        assert parts.cap_n.shape[0] == 1
        np.testing.assert_allclose(np.abs(parts.cap_n[0]), sl3_vec(u=(0, 0, 1)), atol=1e-12)
        np.testing.assert_allclose(np.abs(parts.torus[0]), np.array([1, 1, 2]) / np.sqrt(6), atol=1e-12)

    def test_weight_projection(self, sl3):
        rows = np.array([sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 0, 1))])
        projected = weight_project(sl3, rows, "alpha")
        assert projected.shape[0] == 1
        np.testing.assert_allclose(np.abs(projected[0]), sl3_vec(u=(1, 0, 0)))
        assert weight_project(sl3, rows, None).shape[0] == 0
        assert is_a_normalized(sl3, rows)

    def test_graph_algebra_is_not_a_normalized(self, sl3):
        rows = np.array([sl3_vec(d=(1, 1, -2), u=(0.7, 0, 0)), sl3_vec(u=(0, 0, 1))])
        assert weight_project(sl3, rows, None).shape[0] == 1
        assert not is_a_normalized(sl3, rows)

    def test_compatibility(self, sl3, so25):
        assert is_compatible(so25, np.array([so2n_vec(so25, phi=1.0, y={0: 1.0})])).ok
        semidirect = np.array([sl3_vec(d=(1, -1, 0)), sl3_vec(d=(0, 1, -1)), sl3_vec(u=(1, 0, 0))])
        assert is_compatible(sl3, semidirect).ok
        check = is_compatible(sl3, np.array([sl3_vec(d=(1, 0, -1), u=(1, 0, 0))]))
        assert not check.ok
        assert check.defect == pytest.approx(1.0)

    def test_compatibility_certificate(self, so24):
        rows = np.array([so2n_vec(so24, t=(1.0, 1.0), phi=1.0), so2n_vec(so24, eta=1.0)])
        check = is_compatible(so24, rows)
        assert check.ok
        # U = η, and φ spans the root spaces centralized by t = (1, 1)
        assert check.span.shape == (2, so24.coord_dim)
        assert check.coefficients.shape == (2, 2)
        nil = np.array([nilpotent_part(so24, r) for r in rows])
        np.testing.assert_allclose(check.coefficients @ check.span, nil, atol=1e-12)
        np.testing.assert_allclose(check.residuals, 0.0, atol=1e-12)

    def test_incompatible_certificate_leaves_a_residual(self, sl3):
        rows = np.array([sl3_vec(d=(1, 0, -1), u=(1, 0, 0))])
        check = is_compatible(sl3, rows)
        assert check.span.shape[0] == 0
        assert check.coefficients.shape == (1, 0)
        assert check.residuals[0] == pytest.approx(1.0)


@pytest.mark.unit
class TestAdjoint:
    """Ad(g) for g in AN"""

    def test_conjugation_keeps_subalgebras(self, so25, rng):
        rows = np.array([
            so2n_vec(so25, t=(1.0, 1.0), phi=0.5),
            so2n_vec(so25, eta=1.0),
        ])
        assert check_subalgebra(so25, rows).ok
        g = expm(coord_to_matrix(so25, rng.normal(size=so25.coord_dim)))
        conj = adjoint_conjugate(so25, rows, g)
        assert check_subalgebra(so25, conj).ok
        back = adjoint_conjugate(so25, conj, np.linalg.inv(g))
        assert same_span(back, rows)
        print("✅ Ad(g) then Ad(g⁻¹) returns the same subalgebra")

    def test_identity(self, sl3):
        rows = np.array([sl3_vec(u=(1, 2, 3))])
        np.testing.assert_allclose(adjoint_conjugate(sl3, rows, np.eye(3)), rows)
