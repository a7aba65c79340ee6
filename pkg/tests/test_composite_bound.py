"""
Tests for the model amplitude, the partition of unity over the four
regions, the composite bound audit and the T = c log(lambda) law.
"""

import math

import numpy as np
import pytest

from hyperfold.exceptions import DomainError, PreconditionError
from hyperfold.models.geometry_models import PhaseParams, RegionLabel
from hyperfold.services import composite_bound as cb
from hyperfold.services import phase_audits


class TestModelAmplitude:
    def test_requires_admissible_horizon(self):
        with pytest.raises(DomainError):
            cb.ModelAmplitude(1.5, 100.0)
        with pytest.raises(DomainError):
            cb.ModelAmplitude(8.0, 0.0)

    def test_window(self):
        model = cb.ModelAmplitude(8.0, 64.0)
        assert np.array_equal(model.window(np.array([0.5, 1.0, 9.0, 12.0])), np.zeros(4))
        assert np.array_equal(model.window(np.array([2.0, 5.0, 8.0])), np.ones(3))

    def test_values_on_the_plateau(self):
        model = cb.ModelAmplitude(8.0, 64.0)
        r = np.array([2.0, 4.0, 7.5])
        assert np.allclose(model(r), 64.0 / 8.0 / (1.0 + r), rtol=1e-15)

    def test_derivative_constants_are_bounded(self):
        constants = cb.ModelAmplitude(8.0, 64.0).derivative_constants()
        assert set(constants) == {0, 1, 2}
        assert constants[0] <= 1.0
        assert all(math.isfinite(v) for v in constants.values())

    def test_derivative_constants_do_not_grow_with_lambda(self):
        small = cb.ModelAmplitude(8.0, 16.0).derivative_constants()
        large = cb.ModelAmplitude(8.0, 4096.0).derivative_constants()
        for j in small:
            assert large[j] == pytest.approx(small[j], rel=1e-10)


class TestPartition:
    def test_sums_to_one(self, generic_tilt, right_angle):
        for p in (generic_tilt, right_angle):
            assert cb.partition_error(p, 0.1, 96) <= 1e-12

    def test_weights_are_in_the_unit_interval(self, generic_tilt):
        tt, ss = phase_audits.audit_grid(generic_tilt, 64)
        for values in cb.partition_weights(tt, ss, generic_tilt, 0.1).values():
            assert np.all(values >= -1e-15)
            assert np.all(values <= 1.0 + 1e-15)

    def test_empty_zero_set(self, no_zero_set):
        tt, ss = phase_audits.audit_grid(no_zero_set, 16)
        weights = cb.partition_weights(tt, ss, no_zero_set, 0.1)
        assert np.all(weights[RegionLabel.NON_STATIONARY.value] == 1.0)
        for label in (RegionLabel.LEFT_FOLD, RegionLabel.RIGHT_FOLD, RegionLabel.YOUNG_PART):
            assert np.all(weights[label.value] == 0.0)

    def test_weights_follow_the_labels_away_from_ramps(self, right_angle):
        t0 = 0.5 * math.log(right_angle.d1_sq)
        weights = cb.partition_weights(np.array([t0, 0.05, 0.0]), np.array([0.0, 0.0, 0.45]), right_angle, 0.1)
        assert weights[RegionLabel.YOUNG_PART.value][0] == pytest.approx(1.0)
        assert weights[RegionLabel.RIGHT_FOLD.value][1] == pytest.approx(1.0)
        assert weights[RegionLabel.NON_STATIONARY.value][2] == pytest.approx(1.0)

    def test_piece_references(self):
        refs = cb.piece_references(256.0, 0.1)
        assert refs[RegionLabel.YOUNG_PART.value] == pytest.approx(25.6)
        assert refs[RegionLabel.LEFT_FOLD.value] == refs[RegionLabel.RIGHT_FOLD.value]
        assert refs[RegionLabel.LEFT_FOLD.value] == pytest.approx(100.0 * 64.0)
        assert refs[RegionLabel.NON_STATIONARY.value] == pytest.approx(1e4 * 16.0)


class TestCompositeAudit:
    def test_crossing_geometry(self, generic_tilt):
        audit = cb.composite_bound_audit(generic_tilt, 64.0, 8.0, 0.1, grid_n=64)
        assert [piece.region for piece in audit.pieces] == [label.value for label in RegionLabel]
        assert audit.total == pytest.approx(sum(piece.norm for piece in audit.pieces))
        assert all(piece.norm >= 0.0 for piece in audit.pieces)
        assert audit.piece(RegionLabel.NON_STATIONARY.value).norm > 0.0
        assert audit.partition_error <= 1e-12
        assert audit.implied_C is not None and math.isfinite(audit.implied_C)

    def test_right_angle_has_all_four_pieces(self, right_angle):
        audit = cb.composite_bound_audit(right_angle, 64.0, 8.0, 0.1, grid_n=64)
        for label in RegionLabel:
            piece = audit.piece(label.value)
            assert piece.norm > 0.0, label
            assert piece.implied_C is not None
        assert audit.total == pytest.approx(sum(piece.norm for piece in audit.pieces))

    def test_empty_zero_set_has_a_single_piece(self, no_zero_set):
        audit = cb.composite_bound_audit(no_zero_set, 64.0, 8.0, 0.1, grid_n=64)
        for label in (RegionLabel.LEFT_FOLD, RegionLabel.RIGHT_FOLD, RegionLabel.YOUNG_PART):
            piece = audit.piece(label.value)
            assert piece.norm == 0.0
            assert piece.implied_C is None
        assert audit.total == audit.piece(RegionLabel.NON_STATIONARY.value).norm

    def test_eps_range(self, generic_tilt):
        with pytest.raises(DomainError):
            cb.composite_bound_audit(generic_tilt, 64.0, 8.0, 0.25, grid_n=64)

    def test_preconditions(self):
        p = PhaseParams(a=0.5, r=1.0, beta=math.pi / 3, s_offset=-0.5)
        with pytest.raises(PreconditionError):
            cb.composite_bound_audit(p, 64.0, 8.0, 0.1, grid_n=32)


class TestParameterLaw:
    def test_default_constant(self):
        audit = cb.parameter_law_audit(2.0)
        assert audit.c == pytest.approx(1.0 / 48.0)
        assert audit.passed
        assert audit.spread <= cb.LAW_SPREAD

    def test_large_c_breaks_the_law(self):
        audit = cb.parameter_law_audit(1.0, 0.5)
        assert not audit.passed
        assert audit.spread > cb.LAW_SPREAD

    def test_law_bound_fields(self):
        row = cb.law_bound(1024.0, 1.0, 1.0 / 24.0)
        assert row["T"] == pytest.approx(math.log(1024.0) / 24.0)
        assert row["eps"] == pytest.approx(math.exp(-row["T"]) / row["T"])
        assert row["ratio"] == pytest.approx(row["bound"] * math.log(1024.0) / 1024.0)

    def test_positive_constant_required(self):
        with pytest.raises(DomainError):
            cb.parameter_law_audit(0.0)
