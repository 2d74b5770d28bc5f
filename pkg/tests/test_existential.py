"""
Tests for the existential coordinate conditions on h ⊆ 𝔫 in 𝔰𝔬(2,n)

This file tests:
- E1 (φ and y both nonzero) and the η-axis check
- E2 rank-one pairs via the matrix pencil, including the y = 0 direction
- E3 independent pairs and the identically vanishing wedge
- E4 isotropy of Q = ‖x‖² + 2φη on h ∩ {y = 0}

Run: python -m pytest tests/test_existential.py -v
"""

import numpy as np
import pytest

from services.existential import (
    contains_eta_axis,
    independent_pair_exists,
    pair_rank,
    parallel_pair_exists,
    phi_y_element,
    quadric_isotropy,
    quadric_value,
    quadric_vanishes,
    wedge_vanishes_identically,
    y_free_part,
)
from tests.helpers import so2n_vec


@pytest.mark.unit
class TestPhiYAndEta:
    """E1 witness and η-axis membership"""

    def test_phi_y_witness(self, so23):
        rows = np.array([so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})])
        v = phi_y_element(so23, rows)
        assert v is not None
        assert v[2] != 0.0 and v[4] != 0.0

    def test_no_phi(self, so23):
        assert phi_y_element(so23, np.array([so2n_vec(so23, x={0: 1.0}, y={0: 1.0})])) is None

    def test_eta_axis(self, so23):
        assert contains_eta_axis(so23, np.array([so2n_vec(so23, eta=1.0), so2n_vec(so23, x={0: 1.0})]))
        assert not contains_eta_axis(so23, np.array([so2n_vec(so23, phi=1.0, eta=1.0)]))

    def test_sl3_rejected(self, sl3):
        with pytest.raises(ValueError):
            contains_eta_axis(sl3, np.zeros((1, 6)))


@pytest.mark.unit
class TestParallelPair:
    """E2 via the pencil A − λB"""

    def test_pair_rank(self, so23):
        assert pair_rank(so23, so2n_vec(so23, eta=1.0)) == 0
        assert pair_rank(so23, so2n_vec(so23, x={0: 1.0}, y={0: 1.0})) == 1
        assert pair_rank(so23, so2n_vec(so23, phi=1.0, y={0: 1.0})) == 2

    def test_x_equals_y(self, so23):
        result = parallel_pair_exists(so23, np.array([so2n_vec(so23, x={0: 1.0}, y={0: 1.0})]))
        assert result.witness is not None
        assert result.certainty == "exact"
        assert pair_rank(so23, result.witness) == 1

    def test_y_only(self, so23):
        result = parallel_pair_exists(so23, np.array([so2n_vec(so23, y={0: 1.0})]))
        assert result.witness is not None

    def test_y_free_direction(self, so25):
        rows = np.array([so2n_vec(so25, phi=1.0, y={0: 1.0}), so2n_vec(so25, x={1: 1.0})])
        result = parallel_pair_exists(so25, rows)
        assert result.witness is not None
        assert np.abs(result.witness[3 + 3:3 + 6]).max() < 1e-12

    def test_no_witness(self, so23):
        result = parallel_pair_exists(so23, np.array([so2n_vec(so23, phi=1.0, y={0: 1.0})]))
        assert result.witness is None
        assert result.certainty == "exact"
        print("✅ φ + y has no rank-one element")

    def test_eta_only(self, so23):
        result = parallel_pair_exists(so23, np.array([so2n_vec(so23, eta=1.0)]))
        assert result.witness is None
        assert result.certainty == "exact"

    def test_witness_is_in_h(self, so25):
        rows = np.array([
            so2n_vec(so25, phi=1.0, y={0: 1.0}),
            so2n_vec(so25, x={0: 1.0}, y={1: 2.0}),
            so2n_vec(so25, x={1: 1.0}, y={2: 1.0}),
        ])
        result = parallel_pair_exists(so25, rows, seed=3)
        if result.witness is not None:
            coeffs, *_ = np.linalg.lstsq(rows.T, result.witness, rcond=None)
            np.testing.assert_allclose(coeffs @ rows, result.witness, atol=1e-9)
            assert pair_rank(so25, result.witness) == 1


@pytest.mark.unit
class TestIndependentPair:
    """E3"""

    def test_phi_plus_y(self, so23):
        v = independent_pair_exists(so23, np.array([so2n_vec(so23, phi=1.0, y={0: 1.0})]))
        assert v is not None
        assert pair_rank(so23, v) == 2

    def test_parallel_rows(self, so23):
        assert wedge_vanishes_identically(so23, np.array([so2n_vec(so23, x={0: 1.0}, y={0: 1.0})]))
        assert wedge_vanishes_identically(so23, np.array([so2n_vec(so23, phi=1.0), so2n_vec(so23, eta=1.0)]))

    def test_needs_a_combination(self, so24):
        # each basis vector is rank one, their sum is not
        rows = np.array([so2n_vec(so24, x={0: 1.0}), so2n_vec(so24, y={1: 1.0}), so2n_vec(so24, eta=1.0)])
        v = independent_pair_exists(so24, rows)
        assert v is not None
        assert pair_rank(so24, v) == 2


@pytest.mark.unit
class TestQuadric:
    """E4: Q = ‖x‖² + 2φη on h ∩ {y = 0}"""

    def test_value(self, so23):
        assert quadric_value(so23, so2n_vec(so23, phi=1.0, x={0: 2.0}, eta=3.0)) == pytest.approx(10.0)

    def test_indefinite(self, so23):
        v = quadric_isotropy(so23, np.array([so2n_vec(so23, phi=1.0), so2n_vec(so23, eta=1.0)]))
        assert v is not None
        assert np.linalg.norm(v) > 0.0
        assert quadric_value(so23, v) == pytest.approx(0.0, abs=1e-12)

    def test_definite(self, so23):
        assert quadric_isotropy(so23, np.array([so2n_vec(so23, x={0: 1.0})])) is None
        assert quadric_isotropy(so23, np.array([so2n_vec(so23, phi=1.0, eta=1.0)])) is None
        assert quadric_isotropy(so23, np.array([so2n_vec(so23, phi=1.0, eta=-1.0)])) is None
        rows = np.array([so2n_vec(so23, x={0: 1.0}), so2n_vec(so23, phi=1.0, eta=1.0)])
        assert quadric_isotropy(so23, rows) is None

    def test_degenerate(self, so23):
        v = quadric_isotropy(so23, np.array([so2n_vec(so23, eta=1.0)]))
        assert v is not None
        assert quadric_vanishes(so23, np.array([so2n_vec(so23, eta=1.0)]))
        assert not quadric_vanishes(so23, np.array([so2n_vec(so23, x={0: 1.0})]))

    def test_mixed_signature(self, so23):
        rows = np.array([so2n_vec(so23, x={0: 1.0}), so2n_vec(so23, phi=1.0, eta=-1.0)])
        v = quadric_isotropy(so23, rows)
        assert v is not None
        assert quadric_value(so23, v) == pytest.approx(0.0, abs=1e-12)

    def test_y_free_part(self, so24):
        rows = np.array([so2n_vec(so24, phi=1.0, y={0: 1.0}), so2n_vec(so24, x={0: 1.0}, y={0: 1.0})])
        h0 = y_free_part(so24, rows)
        assert h0.shape[0] == 1
        np.testing.assert_allclose(h0[0, 5:7], 0.0, atol=1e-12)
        assert abs(h0[0, 2]) == pytest.approx(abs(h0[0, 3]))

    def test_empty(self, so23):
        assert quadric_isotropy(so23, np.zeros((0, so23.coord_dim))) is None
