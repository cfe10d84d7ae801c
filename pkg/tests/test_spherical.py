import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from symgeo import spherical as sph
from symgeo.rootdata import build_rank_one, build_sln, rho


def sl2_phi_oracle(s: float, t: float) -> float:
    """Closed-form 1-D integral for SL(2): phi at exponent weight s.

    E_theta[(e^{2t} sin^2 + e^{-2t} cos^2)^{-s}] equals phi for the spectral
    parameter with (rho - lambda) = 2 s rho.
    """
    val, _ = quad(
        lambda th: (math.exp(2 * t) * math.sin(th) ** 2
                    + math.exp(-2 * t) * math.cos(th) ** 2) ** (-s),
        0.0,
        2 * math.pi,
        limit=200,
    )
    return val / (2 * math.pi)


class TestHaar:
    def test_orthogonality_and_det(self):
        for n in (2, 3, 5):
            q = sph.haar_orthogonal(n, seed=42)
            assert np.abs(q @ q.T - np.eye(n)).max() <= 1e-12
            assert np.linalg.det(q) == pytest.approx(1.0, abs=1e-12)

    def test_column_mean_small(self):
        rng = np.random.default_rng(0)
        qs = sph._haar_batch(3, 100_000, rng)
        means = qs.mean(axis=0)
        sigma = 4.0 / math.sqrt(3 * 100_000)
        assert np.abs(means).max() <= sigma

    def test_n2_angle_distribution(self):
        rng = np.random.default_rng(7)
        qs = sph._haar_batch(2, 20_000, rng)
        entries = qs[:, 0, 0]
        # cos of a uniform angle has CDF 1 - arccos(x)/pi
        stat = kstest(entries, lambda x: 1.0 - np.arccos(np.clip(x, -1, 1)) / np.pi)
        assert stat.pvalue > 0.01

    def test_determinism(self):
        a = sph.haar_orthogonal(4, seed=123)
        b = sph.haar_orthogonal(4, seed=123)
        assert np.array_equal(a, b)


class TestPhiLambda:
    def test_phi_rho_exact_one(self):
        rd = build_sln(3)
        est = sph.phi_lambda(3, rho(rd), [1.0, 0.0, -1.0], N=1000, seed=1)
        assert est.value == 1.0
        assert est.stderr == 0.0

    def test_phi_minus_rho_is_one(self):
        for n, H, seed in [(2, [1.0, -1.0], 5), (3, [1.5, 0.2, -1.7], 6)]:
            rd = build_sln(n)
            lam = Fraction(-1) * rho(rd)
            est = sph.phi_lambda(n, lam, H, N=100_000, seed=seed)
            assert abs(est.value - 1.0) <= 4 * est.stderr
            assert est.stderr > 0

    def test_identity_argument(self):
        est = sph.phi_lambda(2, np.zeros(2), [0.0, 0.0], N=100, seed=3)
        assert est.value == pytest.approx(1.0, abs=1e-15)

    def test_matches_sl2_closed_form(self):
        # lambda = 0 corresponds to s = 1/2
        t = 0.9
        est = sph.phi_lambda(2, np.zeros(2), [t, -t], N=200_000, seed=11)
        oracle = sl2_phi_oracle(0.5, t)
        assert abs(est.value - oracle) <= 4 * est.stderr

    def test_weyl_flip_invariance(self):
        # rank-one sign flip: phi_lambda = phi_{-lambda} within noise
        rd = build_sln(2)
        lam = rd.covector([Fraction(1, 3)])
        a = sph.phi_lambda(2, lam, [0.8, -0.8], N=150_000, seed=21)
        b = sph.phi_lambda(2, Fraction(-1) * lam, [0.8, -0.8], N=150_000, seed=22)
        assert abs(a.value - b.value) <= 4 * math.hypot(a.stderr, b.stderr)

    def test_imaginary_parameter_real_estimate(self):
        est = sph.phi_lambda(2, np.array([0.5j, -0.5j]), [1.0, -1.0],
                             N=50_000, seed=9)
        assert est.imag_value is not None
        assert abs(est.imag_value) <= 4 * max(est.imag_stderr, 1e-12)
        assert 0 < est.value <= 1.0 + 4 * est.stderr

    def test_determinism_bit_for_bit(self):
        a = sph.phi_lambda(3, np.zeros(3), [1.0, 0.0, -1.0], N=10_000, seed=77)
        b = sph.phi_lambda(3, np.zeros(3), [1.0, 0.0, -1.0], N=10_000, seed=77)
        assert (a.value, a.stderr) == (b.value, b.stderr)

    def test_positivity_and_decay(self):
        est = sph.phi_lambda(3, np.zeros(3), [2.0, 0.0, -2.0], N=50_000, seed=13)
        assert 0.0 < est.value < 1.0

    def test_stderr_scaling(self):
        lam = np.zeros(2)
        small = sph.phi_lambda(2, lam, [1.0, -1.0], N=10_000, seed=40)
        large = sph.phi_lambda(2, lam, [1.0, -1.0], N=100_000, seed=41)
        ratio = small.stderr / large.stderr
        assert ratio == pytest.approx(math.sqrt(10.0), rel=0.2)

    def test_rejects_bad_H(self):
        with pytest.raises(ValueError):
            sph.phi_lambda(2, np.zeros(2), [1.0, 1.0], N=10, seed=0)


class TestPhiZeroBound:
    def test_sl2_bound(self):
        report = sph.phi_zero_bound_check(2, [2.0, -2.0], N=100_000, seed=2)
        assert report.passed, report.to_json_dict()

    def test_sl3_rho_direction(self):
        H = np.array([1.0, 0.0, -1.0])
        report = sph.phi_zero_bound_check(3, H, N=100_000, seed=4)
        assert report.passed

    def test_trivial_at_identity(self):
        report = sph.phi_zero_bound_check(2, [0.0, 0.0], N=100, seed=5)
        assert report.passed
        assert report.detail["bound"] == pytest.approx(1.0)


class TestLogConvexity:
    def test_segment_zero_to_rho_sl2(self):
        rd = build_sln(2)
        report = sph.logconvexity_check(
            2, [1.2, -1.2], rd.zero(), rho(rd),
            grid=[0.0, 0.25, 0.5, 0.75, 1.0], N=60_000, seed=8,
        )
        assert report.passed, report.to_json_dict()

    def test_degenerate_segment(self):
        rd = build_sln(2)
        report = sph.logconvexity_check(
            2, [1.0, -1.0], rho(rd), rho(rd),
            grid=[0.0, 0.5, 1.0], N=1000, seed=10,
        )
        assert report.passed
        assert max(abs(v) for v in report.detail["log_values"]) <= 1e-12

    def test_interior_below_endpoints(self):
        # endpoints +-rho both give 1; convexity pushes the interior below 1
        rd = build_sln(2)
        report = sph.logconvexity_check(
            2, [1.5, -1.5], Fraction(-1) * rho(rd), rho(rd),
            grid=[0.0, 0.25, 0.5, 0.75, 1.0], N=60_000, seed=12,
        )
        assert report.passed
        logs = report.detail["log_values"]
        assert logs[2] <= 1e-2  # middle point at lambda = 0, phi <= 1ish


class TestCFunction:
    def test_at_rho_is_one(self):
        for rd in (build_rank_one("HnR", 3), build_rank_one("H2O", 2), build_sln(3)):
            assert sph.c_function(rd, rho(rd)) == pytest.approx(1.0)

    def test_conjugation_symmetry_imaginary(self):
        rd = build_rank_one("HnR", 3)
        lam = np.array([1.0j])
        a = sph.c_function(rd, -lam)
        b = np.conj(sph.c_function(rd, lam))
        assert abs(a - b) <= 1e-12

    def test_octonionic_at_two_rho(self):
        rd = build_rank_one("H2O", 2)
        val = sph.c_function(rd, Fraction(2) * rho(rd))
        assert np.isfinite(val)
        assert val != 0

    def test_rank_one_real_oracle(self):
        # independent evaluation of the Beta-factor product for H2O
        rd = build_rank_one("H2O", 2)
        from scipy.special import beta as beta_fn

        lam = rd.covector([5])

        def I(s):
            return beta_fn(4.0, s) * beta_fn(3.5, 4.0 + s / 2.0)

        expected = I(5.0) / I(11.0)
        assert sph.c_function(rd, lam) == pytest.approx(expected, rel=1e-12)

    def test_pole_detection(self):
        rd = build_rank_one("HnR", 3)
        with pytest.raises(sph.PoleError):
            sph.c_function(rd, rd.covector([0]))  # Beta(m/2, 0) pole
