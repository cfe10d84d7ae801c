import itertools
from fractions import Fraction

import numpy as np
import pytest

from symgeo import rootdata
from symgeo.rootdata import (
    build_rank_one,
    build_sln,
    norm_sq,
    pair,
    rho,
    strongly_orthogonal_set,
    theta_so,
)


def killing_pair_oracle(n, xi, eta):
    """Independent pairing oracle: realize H_xi as a traceless diagonal matrix
    via B(X, Y) = 2n tr(XY) and evaluate eta on it, in floating point."""
    c = np.array([float(x) for x in xi.e_coords()])
    d = np.array([float(x) for x in eta.e_coords()])
    h = (c - c.mean()) / (2 * n)
    return float(d @ h)


class TestBuildRankOne:
    @pytest.mark.parametrize(
        "family,n,m_a,m_2a,dim",
        [
            ("H2O", 2, 8, 7, 16),
            ("HnR", 2, 1, 0, 2),
            ("HnH", 3, 8, 3, 12),
            ("HnC", 4, 6, 1, 8),
        ],
    )
    def test_multiplicities(self, family, n, m_a, m_2a, dim):
        rd = build_rank_one(family, n)
        assert (rd.m_alpha, rd.m_2alpha, rd.dim_X) == (m_a, m_2a, dim)

    def test_unit_simple_root(self):
        for family in rootdata.RANK_ONE_FAMILIES:
            rd = build_rank_one(family, 2)
            assert norm_sq(rd, rd.alpha) == 1

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            build_rank_one("H2O", 3)
        with pytest.raises(ValueError):
            build_rank_one("HnC", 1)
        with pytest.raises(ValueError):
            build_rank_one("HnH", 0)
        with pytest.raises(ValueError):
            build_rank_one("E8", 2)

    def test_dimension_identity_sweep(self):
        for family in ("HnR", "HnC", "HnH"):
            for n in range(2, 9):
                rd = build_rank_one(family, n)
                assert rd.dim_X == rd.rank + sum(m for _, m in rd.positive_roots)
        rd = build_rank_one("H2O", 2)
        assert rd.dim_X == 1 + 8 + 7


class TestBuildSLn:
    def test_counts(self):
        for n, n_roots, rank, dim in [(2, 1, 1, 2), (4, 6, 3, 9), (16, 120, 15, 135)]:
            rd = build_sln(n)
            assert len(rd.positive_roots) == n_roots
            assert rd.rank == rank
            assert rd.dim_X == dim
            assert all(m == 1 for _, m in rd.positive_roots)

    def test_sl2_killing_norm(self):
        # hand computation: H_alpha = diag(1,-1)/4 under B(X,Y) = 4 tr(XY),
        # so <alpha, alpha> = alpha(H_alpha) = 1/2
        rd = build_sln(2, "Killing")
        assert norm_sq(rd, rd.simple_roots[0]) == Fraction(1, 2)

    def test_positive_roots_are_nonneg_simple_combinations(self):
        rd = build_sln(5)
        for root, _ in rd.positive_roots:
            assert all(c in (0, 1) for c in root.coords)
            assert any(c == 1 for c in root.coords)

    def test_e_coords_roundtrip(self):
        rd = build_sln(4)
        xi = rd.covector([3, 4, 3])  # 2 rho
        assert xi.e_coords() == (3, 1, -1, -3)

    def test_gram_positive_definite(self):
        rd = build_sln(6)
        g = np.array([[float(x) for x in row] for row in rd.dual_gram])
        assert np.allclose(g, g.T)
        assert np.linalg.eigvalsh(g).min() > 0

    def test_pair_against_killing_matrix_oracle(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 5):
            rd = build_sln(n, "Killing")
            for _ in range(5):
                xi = rd.covector(rng.integers(-4, 5, size=rd.rank).tolist())
                eta = rd.covector(rng.integers(-4, 5, size=rd.rank).tolist())
                exact = float(pair(rd, xi, eta))
                assert abs(exact - killing_pair_oracle(n, xi, eta)) <= 1e-12

    def test_owner_mismatch_rejected(self):
        rd1, rd2 = build_sln(3), build_sln(3)
        with pytest.raises(ValueError):
            pair(rd1, rd1.covector([1, 0]), rd2.covector([1, 0]))


class TestRho:
    def test_octonionic(self):
        rd = build_rank_one("H2O", 2)
        assert rho(rd).coords == (Fraction(11),)

    def test_real_hyperbolic_3(self):
        rd = build_rank_one("HnR", 3)
        assert rho(rd).coords == (Fraction(1),)

    def test_sl4(self):
        rd = build_sln(4)
        two_rho = Fraction(2) * rho(rd)
        assert two_rho.e_coords() == (3, 1, -1, -3)

    def test_self_pairing_identity(self):
        # sum over positive roots of <alpha, 2 rho> equals <2 rho, 2 rho>
        for n in range(2, 8):
            rd = build_sln(n, "TraceForm")
            two_rho = Fraction(2) * rho(rd)
            total = sum(pair(rd, root, two_rho) for root, _ in rd.positive_roots)
            assert total == norm_sq(rd, two_rho)


class TestTheta:
    def test_sl4(self):
        rd = build_sln(4)
        assert (Fraction(2) * theta_so(rd)).e_coords() == (1, 1, -1, -1)

    def test_sl3(self):
        rd = build_sln(3)
        assert (Fraction(2) * theta_so(rd)).e_coords() == (1, 0, -1)

    def test_rejects_rank_one(self):
        with pytest.raises(ValueError):
            theta_so(build_sln(2))
        with pytest.raises(ValueError):
            theta_so(build_rank_one("H2O", 2))

    @pytest.mark.parametrize("n", range(3, 10))
    def test_strong_orthogonality(self, n):
        rd = build_sln(n)
        members = strongly_orthogonal_set(rd)
        assert len(members) == n // 2
        roots = {r.coords for r, _ in rd.positive_roots}
        roots |= {tuple(-c for c in r) for r in roots}
        for a, b in itertools.combinations(members, 2):
            assert tuple(x + y for x, y in zip(a.coords, b.coords)) not in roots
            assert tuple(x - y for x, y in zip(a.coords, b.coords)) not in roots

    def test_gap_pairing_example(self):
        # <alpha_{1,4}, 2 rho - theta> = 2*3 - 1 = 5 in the trace form
        rd = build_sln(4, "TraceForm")
        xi = Fraction(2) * rho(rd) - theta_so(rd)
        alpha_14 = rd.covector([1, 1, 1])
        assert pair(rd, alpha_14, xi) == 5


class TestBilinearity:
    def test_zero_and_symmetry(self):
        rd = build_sln(5)
        xi = rd.covector([1, 2, 0, -1])
        eta = rd.covector([0, 1, 1, 3])
        assert pair(rd, xi, rd.zero()) == 0
        assert pair(rd, xi, eta) == pair(rd, eta, xi)
        assert pair(rd, xi + eta, eta) == pair(rd, xi, eta) + pair(rd, eta, eta)


def test_json_roundtrip_shape():
    rd = build_rank_one("H2O", 2)
    doc = rd.to_json_dict()
    assert doc["family"] == "H2O"
    assert doc["roots"][0]["mult"] == 8
    assert doc["gram"] == [["1"]]
