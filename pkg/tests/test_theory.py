"""Closed-form predictors and the comparison utilities."""

import math

import numpy as np
import pytest

from thinscan.errors import DomainError
from thinscan.forward_model import make_directions
from thinscan.quadrature import adaptive_quadrature
from thinscan.special_functions import bessel_j, phi, psi_terms
from thinscan.theory import (
    PredictionConfig,
    RadialProfile,
    j1_peak_argument,
    predict_ghost_small_q,
    predict_permeability_ghost_radius,
    predict_plain,
    predict_profile,
    predict_weighted,
    profile_match_score,
    profiles_to_csv,
)

OMEGA_1 = 2 * math.pi / 0.7
OMEGA_K = 2 * math.pi / 0.3


def cfg(n=0, include_tail=True, k=10):
    return PredictionConfig(
        omega_1=OMEGA_1, omega_k=OMEGA_K, k_count=k, n=n, include_j1_tail=include_tail
    )


class TestPredictPlain:
    def test_exactly_k_at_zero(self):
        assert predict_plain(0.0, cfg()) == 10.0

    def test_tail_equals_independent_quadrature(self):
        r = 0.5
        gap = predict_plain(r, cfg()) - predict_plain(r, cfg(include_tail=False))
        tail = adaptive_quadrature(
            lambda w: bessel_j(1, w * r) ** 2, OMEGA_1, OMEGA_K, 1e-11
        )
        assert gap > 0.0
        assert gap == pytest.approx(10.0 * tail / (OMEGA_K - OMEGA_1), rel=1e-8)

    def test_large_distance_decay(self):
        assert predict_plain(20.0 / OMEGA_1, cfg()) <= 0.1 * 10.0

    def test_requires_exponent_zero(self):
        with pytest.raises(DomainError):
            predict_plain(0.1, cfg(n=1))


class TestPredictWeighted:
    def test_value_at_zero_n1(self):
        assert predict_weighted(0.0, cfg(n=1)) == pytest.approx(
            10.0 * (OMEGA_K + OMEGA_1), rel=1e-13
        )

    def test_sidelobes_below_plain_with_tail(self):
        radii = np.linspace(0.0, 1.0, 101)
        plain = predict_profile(radii, cfg(n=0))
        weighted = predict_profile(radii, cfg(n=1))
        band = (radii >= 0.3) & (radii <= 1.0)
        mean_plain = np.mean(plain.values[band] / plain.values[0])
        mean_weighted = np.mean(weighted.values[band] / weighted.values[0])
        assert mean_weighted < mean_plain

    def test_n2_close_to_n1(self):
        radii = np.linspace(0.0, 1.0, 101)
        p1 = predict_profile(radii, cfg(n=1))
        p2 = predict_profile(radii, cfg(n=2))
        gap = np.max(np.abs(p1.values / p1.values[0] - p2.values / p2.values[0]))
        assert gap < 0.15

    def test_scaling_invariance(self):
        # the PhiHat difference alone scales like scale^(n+1); the predictor
        # divides by (omega_k - omega_1), which contributes one inverse power
        scale = 2.0
        for n in (1, 2, 3):
            base = PredictionConfig(omega_1=OMEGA_1, omega_k=OMEGA_K, k_count=7, n=n)
            scaled = PredictionConfig(
                omega_1=scale * OMEGA_1, omega_k=scale * OMEGA_K, k_count=7, n=n
            )
            for r in (0.0, 0.2, 0.55, 1.3):
                hat_base = phi_hat(r, OMEGA_K, n) - phi_hat(r, OMEGA_1, n)
                hat_scaled = phi_hat(r / scale, scale * OMEGA_K, n) - phi_hat(
                    r / scale, scale * OMEGA_1, n
                )
                assert hat_scaled == pytest.approx(scale ** (n + 1) * hat_base, rel=1e-10)
                lhs = predict_weighted(r / scale, scaled)
                rhs = scale**n * predict_weighted(r, base)
                assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_requires_positive_exponent(self):
        with pytest.raises(DomainError):
            predict_weighted(0.1, cfg(n=0))


class TestPsiDominance:
    def test_psi1_dominates_on_band(self):
        ts = np.linspace(0.3, 1.0, 50)
        dominated = 0
        for t in ts:
            psi1, psi2, psi3 = psi_terms(float(t), OMEGA_K, OMEGA_1, 1)
            if max(abs(psi2), abs(psi3)) < abs(psi1):
                dominated += 1
        assert dominated >= 0.9 * len(ts)


class TestTailSmallness:
    def test_tail_small_and_shrinking_with_band_top(self):
        r = 0.3
        ratios = []
        for omega_k in (OMEGA_K, 2 * OMEGA_K, 4 * OMEGA_K):
            tail = adaptive_quadrature(
                lambda w: bessel_j(1, w * r) ** 2, OMEGA_1, omega_k, 1e-11
            )
            ratios.append(tail / phi(r, omega_k))
        assert all(ratio < 0.5 for ratio in ratios)
        assert ratios[0] > ratios[1] > ratios[2]


class TestGhostSmallQ:
    def test_unaligned_direction_sum(self):
        dirs = make_directions(8, 4)
        target = np.zeros(2)
        z = np.array([math.cos(math.pi / 4), math.sin(math.pi / 4)])
        expected = sum(
            1.0 / abs(math.sin(math.pi / 4 - math.atan2(t[1], t[0])))
            for t in dirs.incidents
        )
        assert predict_ghost_small_q(z, target, dirs) == pytest.approx(expected, rel=1e-12)

    def test_aligned_ray_is_clamped(self):
        dirs = make_directions(8, 4)
        z = 1.0 * dirs.incidents[0]
        value = predict_ghost_small_q(z, np.zeros(2), dirs)
        assert value >= 1.0 / math.sqrt(1e-6)

    def test_rejects_target_point(self):
        dirs = make_directions(8, 4)
        with pytest.raises(DomainError):
            predict_ghost_small_q((0.0, 0.0), (0.0, 0.0), dirs)


class TestGhostRadius:
    def test_first_maximum_location(self):
        peak = j1_peak_argument()
        assert peak == pytest.approx(1.8412, abs=2e-4)
        # derivative changes sign there
        d = 1e-6
        assert bessel_j(1, peak + d) < bessel_j(1, peak) + 1e-12

    def test_example_frequency(self):
        omega = 2 * math.pi / 0.5
        assert predict_permeability_ghost_radius(omega) == pytest.approx(
            1.8412 / omega, abs=2e-5
        )

    def test_exact_halving_when_frequency_doubles(self):
        omega = 2 * math.pi / 0.5
        assert predict_permeability_ghost_radius(2 * omega) == (
            predict_permeability_ghost_radius(omega) / 2
        )


class TestProfileMatchScore:
    def test_identical_profiles(self):
        radii = np.linspace(0.0, 1.0, 11)
        profile = RadialProfile(radii=radii, values=np.exp(-radii))
        assert profile_match_score(profile, profile) == 0.0

    def test_scaled_copy_scores_zero(self):
        radii = np.linspace(0.0, 1.0, 11)
        a = RadialProfile(radii=radii, values=np.exp(-radii))
        b = RadialProfile(radii=radii, values=2.0 * np.exp(-radii))
        assert profile_match_score(a, b) == 0.0

    def test_zero_center_rejected(self):
        radii = np.linspace(0.0, 1.0, 5)
        a = RadialProfile(radii=radii, values=np.ones(5))
        b = RadialProfile(radii=radii, values=np.array([0.0, 1, 1, 1, 1]))
        with pytest.raises(DomainError):
            profile_match_score(a, b)

    def test_mismatched_radii_rejected(self):
        a = RadialProfile(radii=np.linspace(0, 1, 5), values=np.ones(5))
        b = RadialProfile(radii=np.linspace(0, 2, 5), values=np.ones(5))
        with pytest.raises(DomainError):
            profile_match_score(a, b)


class TestProfileCsv:
    def test_header_and_rows(self, tmp_path):
        radii = np.linspace(0.0, 1.0, 5)
        computed = RadialProfile(radii=radii, values=np.exp(-radii))
        predicted = RadialProfile(radii=radii, values=np.exp(-1.1 * radii))
        path = tmp_path / "profile.csv"
        profiles_to_csv(computed, predicted, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "r,computed,predicted,abs_diff"
        assert len(lines) == 6
        r, c, p, d = (float(x) for x in lines[2].split(","))
        assert d == pytest.approx(abs(c - p))


class TestRadialProfileValidation:
    def test_must_start_at_zero_and_increase(self):
        with pytest.raises(DomainError):
            RadialProfile(radii=np.array([0.1, 0.2]), values=np.array([1.0, 2.0]))
        with pytest.raises(DomainError):
            RadialProfile(radii=np.array([0.0, 0.0]), values=np.array([1.0, 2.0]))
