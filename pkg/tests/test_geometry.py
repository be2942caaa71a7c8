"""Curve sampling, frames, arc length, and the polarization tensor."""

import math

import numpy as np
import pytest

from conftest import parabola_curve
from thinscan.errors import DegenerateCurveError, DomainError
from thinscan.geometry import (
    Background,
    InclusionSpec,
    SupportingCurve,
    arc_length,
    equal_arclength_frames,
    polarization_tensor,
    rayleigh_point_count,
    sample_curve,
)


def unit_segment() -> SupportingCurve:
    return SupportingCurve.polynomial([0.0, 1.0], [0.0], (0.0, 1.0))


class TestSampleCurve:
    def test_unit_speed_line(self):
        frames = sample_curve(unit_segment(), 101)
        total = sum(f.weight for f in frames)
        assert total == pytest.approx(1.0, abs=1e-9)
        for f in frames:
            assert np.allclose(f.tangent, [1.0, 0.0])
            assert np.allclose(f.normal, [0.0, 1.0])

    def test_parabola_arclength_stable_under_doubling(self):
        coarse = sum(f.weight for f in sample_curve(parabola_curve(), 2001))
        fine = sum(f.weight for f in sample_curve(parabola_curve(), 4001))
        assert abs(coarse - fine) <= 1e-6

    def test_parabola_arclength_analytic(self):
        # speed is sqrt(1 + z^2); the antiderivative is (z sqrt(1+z^2) + asinh z)/2
        def exact(z):
            return 0.5 * (z * math.sqrt(1 + z * z) + math.asinh(z))

        assert arc_length(parabola_curve()) == pytest.approx(
            exact(0.5) - exact(-0.5), abs=1e-8
        )

    def test_halfcircle_point_list(self):
        zs = np.linspace(0.0, math.pi, 4001)
        curve = SupportingCurve.from_points(
            np.column_stack([np.cos(zs), np.sin(zs)]), (0.0, math.pi)
        )
        total = sum(f.weight for f in sample_curve(curve, 4001))
        assert total == pytest.approx(math.pi, abs=1e-6)

    def test_trapezoid_second_order_convergence(self):
        reference = arc_length(parabola_curve(), 32001)
        err_n = abs(arc_length(parabola_curve(), 251) - reference)
        err_2n = abs(arc_length(parabola_curve(), 501) - reference)
        assert err_n / err_2n == pytest.approx(4.0, rel=0.15)

    def test_frame_orthonormality(self):
        for f in sample_curve(parabola_curve(), 257):
            assert abs(np.linalg.norm(f.tangent) - 1.0) <= 1e-12
            assert abs(np.linalg.norm(f.normal) - 1.0) <= 1e-12
            assert abs(f.tangent @ f.normal) <= 1e-12

    def test_degenerate_derivative_raises(self):
        # x(z) = [z^2, 0] has a vanishing derivative at z = 0
        curve = SupportingCurve.polynomial([0.0, 0.0, 1.0], [0.0], (-1.0, 1.0))
        with pytest.raises(DegenerateCurveError):
            sample_curve(curve, 101)

    def test_count_validation(self):
        with pytest.raises(DomainError):
            sample_curve(unit_segment(), 1)


class TestEqualArclengthFrames:
    def test_weights_and_spacing(self):
        frames = equal_arclength_frames(parabola_curve(), 6)
        total = arc_length(parabola_curve())
        assert sum(f.weight for f in frames) == pytest.approx(total, rel=1e-9)
        # consecutive midpoints should be roughly one segment apart
        gaps = [
            np.linalg.norm(frames[i + 1].point - frames[i].point) for i in range(5)
        ]
        assert max(gaps) / min(gaps) < 1.2


class TestRayleighPointCount:
    def test_unit_length_examples(self):
        seg = unit_segment()
        assert rayleigh_point_count(seg, 2 * math.pi / 0.5) == 4
        assert rayleigh_point_count(seg, 2 * math.pi / 0.3) == 7

    def test_parabola_matches_arclength_rule(self):
        curve = parabola_curve()
        omega = 2 * math.pi / 0.5
        expected = math.ceil(arc_length(curve) / 0.25 - 1e-12)
        assert rayleigh_point_count(curve, omega) == expected

    def test_rejects_bad_frequency(self):
        with pytest.raises(DomainError):
            rayleigh_point_count(unit_segment(), 0.0)


class TestPolarizationTensor:
    def test_no_contrast_gives_zero(self):
        frame = sample_curve(parabola_curve(), 11)[5]
        bg = Background(1.0, 1.0)
        spec = InclusionSpec(curve=parabola_curve(), h=0.015, eps=5.0, mu=1.0)
        assert np.allclose(polarization_tensor(frame, bg, spec), 0.0)

    def test_diagonal_for_axis_aligned_frame(self):
        frame = sample_curve(unit_segment(), 11)[3]
        bg = Background(1.0, 1.0)
        spec = InclusionSpec(curve=unit_segment(), h=0.015, eps=1.0, mu=5.0)
        tensor = polarization_tensor(frame, bg, spec)
        assert np.allclose(tensor, np.diag([2 * (1 / 5 - 1), 2 * (1 - 5)]), atol=1e-14)

    def test_symmetry_and_eigenstructure(self):
        bg = Background(1.0, 1.0)
        spec = InclusionSpec(curve=parabola_curve(), h=0.015, eps=5.0, mu=5.0)
        along = 2 * (1 / 5 - 1)
        across = 2 * (1 - 5)
        for frame in sample_curve(parabola_curve(), 33):
            tensor = polarization_tensor(frame, bg, spec)
            assert np.max(np.abs(tensor - tensor.T)) <= 1e-14
            assert np.allclose(tensor @ frame.tangent, along * frame.tangent, atol=1e-12)
            assert np.allclose(tensor @ frame.normal, across * frame.normal, atol=1e-12)

    def test_numeric_eigendecomposition_recovers_frame(self):
        frame = sample_curve(parabola_curve(), 33)[7]
        bg = Background(1.0, 1.0)
        spec = InclusionSpec(curve=parabola_curve(), h=0.015, eps=5.0, mu=5.0)
        tensor = polarization_tensor(frame, bg, spec)
        eigvals, eigvecs = np.linalg.eigh(tensor)
        # eigh sorts ascending: the normal eigenvalue 2(1 - mu) = -8 comes first
        assert eigvals[0] == pytest.approx(-8.0, abs=1e-12)
        assert eigvals[1] == pytest.approx(-1.6, abs=1e-12)
        assert abs(abs(eigvecs[:, 0] @ frame.normal) - 1.0) <= 1e-10
        assert abs(abs(eigvecs[:, 1] @ frame.tangent) - 1.0) <= 1e-10


class TestCurveConstruction:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            SupportingCurve(kind="spline")

    def test_point_list_needs_two_points(self):
        with pytest.raises(ValueError):
            SupportingCurve.from_points([[0.0, 0.0]])

    def test_point_list_roundtrip_evaluation(self):
        pts = np.array([[0.0, 0.0], [0.5, 0.1], [1.0, 0.0]])
        curve = SupportingCurve.from_points(pts, (0.0, 1.0))
        assert np.allclose(curve.evaluate(np.array([0.0, 0.5, 1.0])), pts)
