"""
Tests for the Cartan-decomposition subgroup classifier

This file tests:
- Dispatcher shortcuts (dimension, toral rank two, one-parameter subgroups)
- SL(3,R) rules and shapes
- SO(2,n) rules for h ⊆ 𝔫, semidirect products and graph forms
- Witnesses backing existential verdicts
- ClassificationCapability round trip through named coordinates

Run: python -m pytest tests/test_classification.py -v
"""

from fractions import Fraction

import numpy as np
import pytest

from capabilities.classification import ClassificationCapability, classify, explain
from models.capabilities import ClassificationInputs
from models.config import GroupConfig
from models.shapes import Band, ConeRegion, Curve, FullChamber, LogCurve, Ray, RayPair
from services.errors import NotASubalgebraError
from services.existential import pair_rank, quadric_value
from services.liealg import array_to_coord, span_residual
from services.linalg import orthonormal_rows
from tests.helpers import sl3_vec, so2n_vec


def assert_curve(shape, p):
    assert isinstance(shape, Curve)
    assert shape.growth.p == Fraction(p)
    assert shape.growth.q == 0


@pytest.mark.unit
class TestDispatcher:
    """Shortcuts before the per-group rules"""

    def test_cartan_subalgebra_sl3(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(d=(1, -1, 0)), sl3_vec(d=(0, 1, -1))]))
        assert verdict.is_cds
        assert verdict.rule == "SL3-CDS(2)"
        assert isinstance(verdict.shape, FullChamber)

    def test_cartan_subalgebra_so2n(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 0.0)), so2n_vec(so25, t=(0.0, 1.0))]))
        assert verdict.rule == "SO2n-semiprod(1)"

    def test_three_dimensional_sl3(self, sl3):
        rows = np.array([sl3_vec(d=(1, 1, -2), u=(1, 0, 0)), sl3_vec(u=(0, 1, 0)), sl3_vec(u=(0, 0, 1))])
        assert classify(sl3, rows).rule == "SL3-CDS(1)"

    def test_conjugate_of_a(self, sl3):
        rows = np.array([sl3_vec(d=(1, -1, 0), u=(-2, 0, 0)), sl3_vec(d=(0, 1, -1), u=(1, 0, 0))])
        verdict = classify(sl3, rows)
        assert verdict.is_cds
        assert verdict.rule == "HN=AN"

    def test_not_a_subalgebra(self, so23):
        with pytest.raises(NotASubalgebraError):
            classify(so23, np.array([so2n_vec(so23, phi=1.0), so2n_vec(so23, y={0: 1.0})]))


@pytest.mark.unit
class TestOneParameter:
    """dim h = 1"""

    def test_sl3_root_line(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(u=(0, 0, 1))]))
        assert not verdict.is_cds
        assert verdict.rule == "SL3notCDS(1)"
        assert isinstance(verdict.shape, Ray)
        assert verdict.shape.direction == pytest.approx([1.0, 0.0, -1.0])

    def test_eta_line(self, so23):
        verdict = classify(so23, np.array([so2n_vec(so23, eta=1.0)]))
        assert verdict.rule == "HinN-notCDS(1)"
        assert verdict.shape.direction == pytest.approx([1.0, 1.0])

    def test_toral_line(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 0.5))]))
        assert verdict.rule == "SO2n-semi-notCDS(1)"
        assert isinstance(verdict.shape, RayPair)

    def test_graph_line(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 1.0), phi=1.0)]))
        assert isinstance(verdict.shape, LogCurve)
        assert verdict.shape.k == 1
        print("✅ t + ψ(t) gives a logarithmic curve")


@pytest.mark.unit
class TestSl3:
    """SL(3,R) rules"""

    def test_root_plane_with_alpha(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(u=(1, 0, 0)), sl3_vec(u=(0, 0, 1))]))
        assert verdict.rule == "SL3notCDS(2)"
        assert_curve(verdict.shape, 1)

    def test_generic_plane_in_n(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(u=(1, 1, 0)), sl3_vec(u=(0, 0, 1))]))
        assert verdict.is_cds
        assert verdict.rule == "SL3-CDS(3)"

    def test_ker_alpha_minus_beta(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(d=(1, 0, -1)), sl3_vec(u=(1, 1, 0))]))
        assert verdict.rule == "SL3notCDS(3)"
        assert_curve(verdict.shape, 1)

    def test_ker_alpha(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(d=(1, 1, -2)), sl3_vec(u=(0, 1, 1))]))
        assert verdict.rule == "SL3-CDS(4)"

    def test_ker_beta(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(d=(2, -1, -1)), sl3_vec(u=(1, 0, 1))]))
        assert verdict.rule == "SL3-CDS(5)"

    def test_graph(self, sl3):
        verdict = classify(sl3, np.array([sl3_vec(d=(1, 1, -2), u=(0.7, 0, 0)), sl3_vec(u=(0, 0, 1))]))
        assert verdict.rule == "SL3notCDS(4)"
        assert isinstance(verdict.shape, Band)
        assert verdict.shape.lower.p == Fraction(1, 2)
        assert verdict.shape.upper.p == 2

    def test_root_semidirect(self, sl3):
        u = sl3_vec(u=(1, 0, 0))
        verdict = classify(sl3, np.array([sl3_vec(d=(1, -0.9, -0.1)), u]))
        assert verdict.rule == "SL3notCDS(5)"
        assert isinstance(verdict.shape, ConeRegion)
        verdict = classify(sl3, np.array([sl3_vec(d=(1, 1, -2)), u]))
        assert verdict.rule == "SL3-CDS(6)"
        assert not verdict.boundary
        verdict = classify(sl3, np.array([sl3_vec(d=(1, -0.5, -0.5)), u]))
        assert verdict.rule == "SL3-CDS(6)"
        assert verdict.boundary
        assert "boundary" in explain(verdict)


@pytest.mark.unit
class TestSo2nInsideN:
    """h ⊆ 𝔫"""

    def test_phi_y_with_eta(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, phi=1.0, y={0: 1.0}), so2n_vec(so25, eta=1.0)]))
        assert verdict.rule == "SO2n-HinN-CDS(1)"
        assert [w.condition for w in verdict.witnesses] == ["E1", "Eta"]

    def test_parallel_and_independent(self, so25):
        rows = np.array([so2n_vec(so25, x={0: 1.0}), so2n_vec(so25, phi=1.0, y={1: 1.0})])
        verdict = classify(so25, rows)
        assert verdict.rule == "SO2n-HinN-CDS(2)"
        span = orthonormal_rows(rows)
        by_condition = {w.condition: w.vector.to_array() for w in verdict.witnesses}
        assert set(by_condition) == {"E2", "E3"}
        for v in by_condition.values():
            assert span_residual(v, span) < 1e-9
        assert pair_rank(so25, by_condition["E2"]) == 1
        assert pair_rank(so25, by_condition["E3"]) == 2
        print("✅ E2/E3 witnesses lie in h and re-verify")

    def test_parallel_and_isotropic(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, x={0: 1.0}), so2n_vec(so25, phi=1.0)]))
        assert verdict.rule == "SO2n-HinN-CDS(2)"
        e4 = [w for w in verdict.witnesses if w.condition == "E4"]
        assert len(e4) == 1
        assert quadric_value(so25, e4[0].vector.to_array()) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_has_no_parallel_pair(self, so24):
        rows = np.array([
            so2n_vec(so24, x={1: 1.0}, y={0: 1.0}),
            so2n_vec(so24, x={0: -1.0}, y={1: 1.0}),
            so2n_vec(so24, eta=1.0),
        ])
        verdict = classify(so24, rows)
        assert verdict.rule == "HinN-notCDS(2)"
        assert_curve(verdict.shape, 2)

    def test_parallel_without_wedge(self, so24):
        rows = np.array([so2n_vec(so24, x={0: 1.0}, y={0: 1.0}), so2n_vec(so24, x={1: 1.0}, y={1: 1.0})])
        verdict = classify(so24, rows)
        assert verdict.rule == "HinN-notCDS(3)"
        assert_curve(verdict.shape, 1)

    def test_inside_so1n(self, so24):
        verdict = classify(so24, np.array([so2n_vec(so24, phi=1.0, x={0: 1.0}), so2n_vec(so24, x={1: 1.0})]))
        assert verdict.rule == "HinN-notCDS(4)"
        assert_curve(verdict.shape, 1)


@pytest.mark.unit
class TestSo2nSemidirect:
    """h = 𝔱 ⊕ 𝔲"""

    def test_ker_alpha_minus_beta(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(2.0, 1.0)), so2n_vec(so25, phi=1.0, y={0: 1.0})]))
        assert verdict.rule == "SO2n-semi-notCDS(6)"
        assert_curve(verdict.shape, Fraction(3, 2))

    def test_ker_alpha_with_x(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 1.0)), so2n_vec(so25, x={0: 1.0})]))
        assert verdict.rule == "SO2n-semiprod(3)"

    def test_ker_beta_with_eta(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 0.0)), so2n_vec(so25, eta=1.0)]))
        assert verdict.rule == "SO2n-semiprod(4)"

    def test_cone_cds(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, -2.0)), so2n_vec(so25, x={0: 1.0})]))
        assert verdict.rule == "SO2n-semiprod(5)"

    def test_cone_not_cds(self, so25):
        verdict = classify(so25, np.array([so2n_vec(so25, t=(1.0, 0.5)), so2n_vec(so25, x={0: 1.0})]))
        assert verdict.rule == "SO2n-semi-notCDS(8)"
        assert isinstance(verdict.shape, ConeRegion)

    def test_cds_unipotent_part(self, so25):
        rows = np.array([
            so2n_vec(so25, t=(1.0, 0.5)),
            so2n_vec(so25, phi=1.0, y={0: 1.0}),
            so2n_vec(so25, x={0: 1.0}),
            so2n_vec(so25, eta=1.0),
        ])
        verdict = classify(so25, rows)
        assert verdict.rule == "SO2n-semiprod(2)"


@pytest.mark.unit
class TestSo2nGraph:
    """h = ℝ(t + ψ(t)) ⊕ 𝔲"""

    def test_alpha_over_eta(self, so23):
        verdict = classify(so23, np.array([so2n_vec(so23, t=(1.0, 1.0), phi=0.5), so2n_vec(so23, eta=1.0)]))
        assert verdict.rule == "SO2n-notsemi-notCDS(2)"
        assert isinstance(verdict.shape, Band)

    def test_beta_over_eta(self, so23):
        verdict = classify(so23, np.array([so2n_vec(so23, t=(1.0, 0.0), y={0: 1.0}), so2n_vec(so23, eta=1.0)]))
        assert verdict.rule == "SO2n-notsemi-notCDS(7)"

    def test_abelian_beta_graph(self, so24):
        verdict = classify(so24, np.array([so2n_vec(so24, t=(1.0, 0.0), y={0: 1.0}), so2n_vec(so24, y={1: 1.0})]))
        assert verdict.is_cds
        assert verdict.rule == "SO2n-notsemi-CDS"


@pytest.mark.integration
class TestClassificationCapability:
    """Named-coordinate round trip"""

    def test_execute(self, so25):
        basis = [array_to_coord(so25, so2n_vec(so25, phi=1.0, y={0: 1.0})), array_to_coord(so25, so2n_vec(so25, eta=1.0))]
        result = ClassificationCapability().execute(ClassificationInputs(group=GroupConfig(kind="SO2n", n=5), basis=basis))
        assert result.success
        assert result.verdict.rule == "SO2n-HinN-CDS(1)"
        assert result.standard_form.form == "InsideN"
        assert result.metadata["group"] == "SO(2,5)"
        assert "CDS" in result.explanation

    def test_describe(self):
        description = ClassificationCapability().describe()
        assert description.name == "classification"
