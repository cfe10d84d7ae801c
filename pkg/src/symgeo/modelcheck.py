"""Numerical verification of the closed-form spectra in explicit matrix models.

The SL(n,R) model realizes the horospherical coordinate H(g) through the
factorization g = n e^H k (n unit upper triangular, e^H positive diagonal,
k orthogonal), computed from an orthogonal-triangular decomposition of the
transpose with row/column reversal.  The polar coordinate a(g) is the vector
of singular value logarithms.  Hessians are differenced along the geodesics
t -> exp(tY) K, which are exact in the model, against an orthonormal frame of
symmetric traceless matrices for the form <X, Y> = 2n tr(XY).

The hyperboloid model supplies horofunction values for the real hyperbolic
family, and a one-dimensional quadrature reproduces the mass growth profile
of totally geodesic subspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .hesspec import iwasawa_exp_spectrum, iwasawa_linear_spectrum
from .rootdata import Covector, RootDatum, build_sln

DEFAULT_STEP = 1e-3


class QuadratureError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# matrix points and frames
# ---------------------------------------------------------------------------


def _minkowski_form(n: int) -> np.ndarray:
    J = np.eye(n + 1)
    J[0, 0] = -1.0
    return J


@dataclass(frozen=True)
class MatrixPoint:
    """A group element in a concrete matrix model, membership-checked."""

    entries: np.ndarray
    group: str = "SLn"
    membership_tol: float = 1e-9

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("matrix point must be square")
        if self.group == "SLn":
            defect = abs(np.linalg.det(g) - 1.0)
        elif self.group == "SOn1":
            J = _minkowski_form(g.shape[0] - 1)
            defect = np.abs(g.T @ J @ g - J).max()
        else:
            raise ValueError(f"unknown group tag {self.group!r}")
        if defect > self.membership_tol:
            raise ValueError(f"{self.group} membership defect {defect:.3e}")


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal basis of the symmetric part of sl(n) under 2n tr(XY)."""

    n: int
    vectors: tuple[np.ndarray, ...]
    labels: tuple[tuple, ...]

    def gram_defect(self) -> float:
        worst = 0.0
        for i, x in enumerate(self.vectors):
            for j, y in enumerate(self.vectors):
                val = 2 * self.n * np.trace(x @ y)
                worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
        return worst


def sl_frame(n: int) -> TangentFrame:
    """Cartan directions first, then one symmetric vector per root (i, j)."""
    vectors: list[np.ndarray] = []
    labels: list[tuple] = []
    # orthonormal basis of traceless diagonals: partial-sum (Jacobi-like) vectors
    for i in range(1, n):
        d = np.zeros(n)
        d[:i] = 1.0
        d[i] = -float(i)
        d /= math.sqrt(2 * n * (i + i * i))
        vectors.append(np.diag(d))
        labels.append(("H", i))
    for i in range(n):
        for j in range(i + 1, n):
            s = np.zeros((n, n))
            s[i, j] = s[j, i] = 1.0 / (2.0 * math.sqrt(n))
            vectors.append(s)
            labels.append(("E", (i + 1, j + 1)))
    return TangentFrame(n, tuple(vectors), tuple(labels))


# ---------------------------------------------------------------------------
# Iwasawa and polar coordinates
# ---------------------------------------------------------------------------


def iwasawa_nak(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor g = n e^H k; returns (n, H, k) with H the diagonal log vector."""
    g = np.asarray(g, dtype=float)
    n_mat, H, k = _nak_batch(g[None, :, :])
    return n_mat[0], H[0], k[0]


def iwasawa_H(g) -> np.ndarray:
    """The abelian coordinate H(g) of g = n e^{H(g)} k, as a vector of logs."""
    if isinstance(g, MatrixPoint):
        g = g.entries
    g = np.asarray(g, dtype=float)
    if abs(np.linalg.det(g)) < 1e-300:
        raise ValueError("input matrix is singular")
    return _nak_batch(g[None, :, :])[1][0]


def iwasawa_H_batch(gs: np.ndarray) -> np.ndarray:
    """H(g) for a stack of matrices (..., n, n) -> (..., n)."""
    return _nak_batch(np.asarray(gs, dtype=float))[1]


def _nak_batch(gs: np.ndarray):
    n = gs.shape[-1]
    rev = np.arange(n)[::-1]
    # g^T = Q L (L lower triangular, positive diagonal); reversal turns the
    # QL problem into a QR problem.
    m = np.swapaxes(gs, -1, -2)[..., :, rev]
    q, r = np.linalg.qr(m)
    sign = np.sign(np.einsum("...ii->...i", r))
    sign[sign == 0] = 1.0
    q = q * sign[..., None, :]
    r = r * sign[..., :, None]
    L = r[..., rev, :][..., :, rev]
    a = np.einsum("...ii->...i", L)
    n_mat = np.swapaxes(L, -1, -2) / a[..., None, :]
    k = np.swapaxes(q, -1, -2)[..., rev, :]
    return n_mat, np.log(a), k


def cartan_a(g) -> np.ndarray:
    """Polar coordinate: singular value logarithms, sorted descending."""
    if isinstance(g, MatrixPoint):
        g = g.entries
    s = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    return np.log(s)


# ---------------------------------------------------------------------------
# finite-difference Hessians along geodesics
# ---------------------------------------------------------------------------


def _expm_sym(y: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(y)
    return (v * np.exp(w)) @ v.T


def fd_hessian(F: Callable[[np.ndarray], float], frame: TangentFrame,
               h: float = DEFAULT_STEP) -> np.ndarray:
    """Second-order central differences of F along exp(tY) geodesics.

    Diagonal entries use the 3-point second difference, off-diagonal entries
    the polarization (q(Y_a + Y_b) - q(Y_a - Y_b)) / 4, so the whole matrix
    carries an O(h^2) error and is symmetric by construction.
    """
    if not 1e-5 <= h <= 1e-2:
        raise ValueError(f"step h = {h} outside [1e-5, 1e-2]")
    f0 = F(np.eye(frame.n))
    if not np.isfinite(f0):
        raise ValueError("F returned a non-finite value at the base point")

    def second_diff(y):
        val = (F(_expm_sym(h * y)) - 2.0 * f0 + F(_expm_sym(-h * y))) / (h * h)
        if not np.isfinite(val):
            raise ValueError("F returned a non-finite value during differencing")
        return val

    d = len(frame.vectors)
    M = np.zeros((d, d))
    for a in range(d):
        M[a, a] = second_diff(frame.vectors[a])
    for a in range(d):
        for b in range(a + 1, d):
            plus = second_diff(frame.vectors[a] + frame.vectors[b])
            minus = second_diff(frame.vectors[a] - frame.vectors[b])
            M[a, b] = M[b, a] = (plus - minus) / 4.0
    return M


def linear_coordinate_function(xi: Covector) -> Callable[[np.ndarray], float]:
    """g -> xi(H(g)) for a covector on an SLn datum."""
    w = np.array([float(c) for c in xi.e_coords()])

    def F(g):
        return float(iwasawa_H(g) @ w)

    return F


def exp_coordinate_function(xi: Covector) -> Callable[[np.ndarray], float]:
    w = np.array([float(c) for c in xi.e_coords()])

    def F(g):
        return math.exp(float(iwasawa_H(g) @ w))

    return F


@dataclass(frozen=True)
class VerifyReport:
    check: str
    params: dict
    max_abs_err: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "max_abs_err": self.max_abs_err,
            "pass": self.passed,
            **({"detail": self.detail} if self.detail else {}),
        }


def spectrum_error(fd_eigs: np.ndarray, expected: Sequence[float]) -> float:
    """Scale-aware distance between sorted spectra."""
    exp_sorted = np.sort(np.array([float(v) for v in expected]))
    fd_sorted = np.sort(np.asarray(fd_eigs))
    scale = max(1.0, float(np.abs(exp_sorted).max(initial=0.0)))
    return float(np.abs(fd_sorted - exp_sorted).max() / scale)


def fd_model_hessian(n: int, xi: Covector, h: float = DEFAULT_STEP,
                     exp: bool = False) -> tuple[np.ndarray, TangentFrame]:
    """FD Hessian matrix of xi(H) (or e^{xi(H)}) at the base point of SL(n)."""
    if not 2 <= n <= 6:
        raise ValueError("matrix-model verification supports 2 <= n <= 6")
    frame = sl_frame(n)
    F = exp_coordinate_function(xi) if exp else linear_coordinate_function(xi)
    return fd_hessian(F, frame, h), frame


def verify_iwasawa_spectrum(n: int, xi: Covector, h: float = DEFAULT_STEP,
                            tol: float = 1e-3, exp: bool = False) -> VerifyReport:
    """Compare the FD Hessian of xi(H) or e^{xi(H)} with the closed form.

    Also checks the mixed flat/root block of the FD matrix, which the closed
    form predicts to vanish identically.
    """
    rd = build_sln(n, "Killing")
    xi_k = rd.covector(list(xi.coords))
    M, frame = fd_model_hessian(n, xi_k, h, exp=exp)
    closed = iwasawa_exp_spectrum(rd, xi_k) if exp else iwasawa_linear_spectrum(rd, xi_k)
    err = spectrum_error(np.linalg.eigvalsh(M), closed.values())

    n_flat = rd.rank
    cross = np.abs(M[:n_flat, n_flat:]).max(initial=0.0)
    worst = None
    if err > tol:
        fd_sorted = np.sort(np.linalg.eigvalsh(M))
        exp_sorted = np.sort([float(v) for v in closed.values()])
        idx = int(np.abs(fd_sorted - exp_sorted).argmax())
        worst = {"index": idx, "fd": float(fd_sorted[idx]), "expected": float(exp_sorted[idx])}
    passed = bool(err <= tol and cross <= tol)
    return VerifyReport(
        check="iwasawa_exp_spectrum" if exp else "iwasawa_linear_spectrum",
        params={"n": n, "xi": [str(c) for c in xi.coords], "h": h, "tol": tol},
        max_abs_err=max(err, float(cross)),
        passed=passed,
        detail={"spectrum_err": err, "cross_block_max": float(cross),
                **({"worst": worst} if worst else {})},
    )


# ---------------------------------------------------------------------------
# hyperboloid model
# ---------------------------------------------------------------------------


def hyperboloid_point(t: float, direction: Sequence[float]) -> np.ndarray:
    """Point at distance t from the base point along a unit direction."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return np.concatenate([[math.cosh(t)], math.sinh(t) * d])


def busemann_hyperboloid(x: Sequence[float], theta: Sequence[float]) -> float:
    """Horofunction of the boundary direction theta, zero at the base point."""
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(theta) - 1.0) > 1e-9:
        raise ValueError("boundary direction must be a unit vector")
    mink = -x[0] * x[0] + float(x[1:] @ x[1:])
    if abs(mink + 1.0) > 1e-9 or x[0] <= 0:
        raise ValueError("point is not on the upper hyperboloid sheet")
    return math.log(x[0] - float(x[1:] @ theta))


# ---------------------------------------------------------------------------
# monotonicity profile by quadrature
# ---------------------------------------------------------------------------


def cutoff_chi(u: float) -> float:
    """Quintic smoothstep cutoff: 1 below 0, 0 above 1, slope >= -15/8."""
    if u <= 0.0:
        return 1.0
    if u >= 1.0:
        return 0.0
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)


def smooth_distance(t: float) -> float:
    """(1/2) log(2 cosh 2t), the smooth radial surrogate at unit root length."""
    a = abs(2.0 * t)
    return 0.5 * (a + math.log1p(math.exp(-2.0 * a)))


def smooth_distance_inverse(s: float) -> float:
    """Radius where the surrogate reaches s (0 when s is below its minimum)."""
    x = math.exp(2.0 * s) / 2.0
    if x <= 1.0:
        return 0.0
    return 0.5 * math.acosh(x)


def sphere_area(k: int) -> float:
    """Surface area of the unit (k-1)-sphere."""
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def monotonicity_profile(rd: RootDatum, k: int, r_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Smoothed mass profile of a totally geodesic k-subspace of H^n.

    v(r) integrates the cutoff of the smooth radial surrogate against the
    polar density sinh^{k-1}(t) of the subspace; the subspace is area
    minimizing, so v must grow at rate at least kappa(k) = k - 1.
    """
    if rd.family != "HnR":
        raise ValueError("the quadrature profile is implemented for HnR only")
    if not 2 <= k < rd.n:
        raise ValueError(f"need 2 <= k < n, got k = {k}, n = {rd.n}")
    area = sphere_area(k)
    out = []
    for r in r_grid:
        upper = smooth_distance_inverse(r + 1.0) + 1e-9
        val, abserr = quad(
            lambda t: cutoff_chi(smooth_distance(t) - r) * math.sinh(t) ** (k - 1),
            0.0,
            upper,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=300,
        )
        if abserr > 1e-8 * max(1.0, abs(val)):
            raise QuadratureError(f"quadrature did not converge at r = {r}")
        out.append((float(r), area * val))
    return out


def sharp_cutoff_mass(k: int, r: float) -> float:
    """Closed-form mass with a sharp cutoff at radius f^{-1}(r), k = 2, 3."""
    T = smooth_distance_inverse(r)
    if k == 2:
        return sphere_area(2) * (math.cosh(T) - 1.0)
    if k == 3:
        return sphere_area(3) * (math.sinh(T) * math.cosh(T) - T) / 2.0
    raise ValueError("closed form implemented for k = 2, 3")


def monotonicity_margins(profile: Sequence[tuple[float, float]], rate: float) -> list[float]:
    """log v(r) - log v(s) - rate (r - s) over all grid pairs s < r."""
    margins = []
    for i, (s, vs) in enumerate(profile):
        for r, vr in profile[i + 1:]:
            margins.append(math.log(vr) - math.log(vs) - rate * (r - s))
    return margins
