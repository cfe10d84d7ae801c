"""Monte-Carlo evaluation of elementary spherical functions and the
meromorphic normalization factor of the spherical Plancherel density.

The spherical function is computed as the compact-group average

    phi_lambda(g) = E_k [ exp((rho - lambda)(H(k g))) ],

with k Haar-distributed in SO(n) and H the horospherical coordinate of the
g = n e^H k factorization.  With that convention phi_{rho} is identically one
with zero variance (the exponent vanishes) and phi_{-rho} is one by the Haar
averaging identity, which pins down the sign of the exponent; the identity is
exercised by the test suite.

Estimators are deterministic functions of (seed, N): samples are drawn in
fixed-size chunks from a PCG64 stream and reduced in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import loggamma

from .modelcheck import VerifyReport, iwasawa_H_batch
from .rootdata import Covector, RootDatum, rho

_CHUNK = 1 << 15


class PoleError(ValueError):
    pass


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    imag_value: float | None = None
    imag_stderr: float | None = None

    @property
    def variance_flag(self) -> bool:
        """True when the estimate is too noisy to be meaningful."""
        return self.value != 0 and self.stderr / abs(self.value) > 0.5

    def to_json_dict(self) -> dict:
        out = {"value": self.value, "stderr": self.stderr,
               "N": self.samples, "seed": self.seed}
        if self.imag_value is not None:
            out["imag_value"] = self.imag_value
            out["imag_stderr"] = self.imag_stderr
        return out


def haar_orthogonal(n: int, seed) -> np.ndarray:
    """One Haar-distributed element of SO(n)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _haar_batch(n, 1, rng)[0]


def _haar_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(z)
    sign = np.sign(np.einsum("...ii->...i", r))
    sign[sign == 0] = 1.0
    q = q * sign[..., None, :]
    # force determinant +1 by flipping the last column of reflections
    dets = np.linalg.det(q)
    q[dets < 0, :, -1] *= -1.0
    return q


def _e_coords(lam, n: int) -> np.ndarray:
    if isinstance(lam, Covector):
        if lam.owner.family != "SLn" or lam.owner.n != n:
            raise ValueError("covector does not belong to an SLn datum of this size")
        arr = np.array([complex(c) for c in lam.e_coords()])
    else:
        arr = np.asarray(lam, dtype=complex)
        if arr.shape != (n,):
            raise ValueError(f"expected {n} e-coordinates")
    if np.abs(arr.imag).max(initial=0.0) == 0.0:
        return arr.real
    return arr


def _rho_e(n: int) -> np.ndarray:
    return np.array([(n + 1 - 2 * i) / 2.0 for i in range(1, n + 1)])


def phi_lambda(n: int, lam, H: Sequence[float], N: int, seed: int) -> MCEstimate:
    """Monte-Carlo estimate of phi_lambda(e^H) on SL(n,R).

    ``lam`` is a Covector on an SLn datum or a length-n array of
    e-coordinates (complex allowed; for purely imaginary spectral parameters
    the estimate is real and the imaginary part is reported as a diagnostic).
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (n,) or abs(H.sum()) > 1e-9:
        raise ValueError("H must be a traceless coordinate vector of length n")
    w = _rho_e(n) - _e_coords(lam, n)
    diag = np.exp(H)
    rng = np.random.default_rng(seed)
    vals = np.empty(N, dtype=complex if np.iscomplexobj(w) else float)
    done = 0
    while done < N:
        count = min(_CHUNK, N - done)
        ks = _haar_batch(n, count, rng)
        hs = iwasawa_H_batch(ks * diag[None, None, :])
        vals[done:done + count] = np.exp(hs @ w)
        done += count
    re = vals.real if np.iscomplexobj(vals) else vals
    value = float(re.mean())
    stderr = float(re.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    imag_value = imag_stderr = None
    if np.iscomplexobj(vals):
        imag_value = float(vals.imag.mean())
        imag_stderr = float(vals.imag.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return MCEstimate(value, stderr, N, seed, imag_value, imag_stderr)


def reduced_root_count(n: int) -> int:
    return n * (n - 1) // 2


def phi_zero_bound_check(n: int, H: Sequence[float], N: int, seed: int) -> VerifyReport:
    """Check phi_0(e^H) <= exp(-rho(a)) (1 + |a|)^d within Monte-Carlo noise."""
    H = np.asarray(H, dtype=float)
    est = phi_lambda(n, np.zeros(n), H, N, seed)
    a = np.sort(H)[::-1]
    bound = math.exp(-float(_rho_e(n) @ a)) * (1.0 + float(np.linalg.norm(a))) ** reduced_root_count(n)
    slack = bound + 4.0 * est.stderr - est.value
    return VerifyReport(
        check="phi_zero_bound",
        params={"n": n, "H": H.tolist(), "N": N, "seed": seed},
        max_abs_err=float(max(0.0, -slack)),
        passed=slack >= 0.0,
        detail={"estimate": est.to_json_dict(), "bound": bound},
    )


def logconvexity_check(n: int, H: Sequence[float], lam1, lam2,
                       grid: Sequence[float], N: int, seed: int) -> VerifyReport:
    """Discrete convexity of s -> log phi_{(1-s) lam1 + s lam2}(e^H).

    Second differences on the grid must stay above -4 times the propagated
    standard error of the log-estimates.
    """
    if len(grid) < 3:
        raise ValueError("need at least three grid points")
    l1, l2 = _e_coords(lam1, n), _e_coords(lam2, n)
    if np.iscomplexobj(l1) or np.iscomplexobj(l2):
        raise ValueError("log-convexity is checked for real spectral parameters")
    seeds = np.random.SeedSequence(seed).spawn(len(grid))
    logs, sigmas = [], []
    for s, sub in zip(grid, seeds):
        lam = (1.0 - s) * l1.real + s * l2.real
        est = phi_lambda(n, lam, H, N, int(sub.generate_state(1)[0]))
        logs.append(math.log(est.value))
        sigmas.append(est.stderr / est.value)
    margins = []
    for i in range(1, len(grid) - 1):
        d2 = logs[i + 1] - 2.0 * logs[i] + logs[i - 1]
        noise = math.sqrt(sigmas[i + 1] ** 2 + 4.0 * sigmas[i] ** 2 + sigmas[i - 1] ** 2)
        margins.append(d2 + 4.0 * noise)
    worst = min(margins)
    return VerifyReport(
        check="log_convexity",
        params={"n": n, "H": list(map(float, H)), "N": N, "seed": seed,
                "grid": list(map(float, grid))},
        max_abs_err=float(max(0.0, -worst)),
        passed=worst >= 0.0,
        detail={"log_values": logs, "stderr_log": sigmas},
    )


# ---------------------------------------------------------------------------
# the meromorphic normalization factor (Beta-factor product)
# ---------------------------------------------------------------------------


def _beta(z1: complex, z2: complex) -> complex:
    return np.exp(loggamma(z1) + loggamma(z2) - loggamma(z1 + z2))


def _near_gamma_pole(z: complex, tol: float = 1e-8) -> bool:
    k = round(z.real)
    return k <= 0 and abs(z - k) < tol


def _simple_coords(lam, rank: int) -> np.ndarray:
    if isinstance(lam, Covector):
        return np.array([complex(c) for c in lam.coords])
    arr = np.asarray(lam, dtype=complex)
    if arr.shape != (rank,):
        raise ValueError(f"expected {rank} simple-root coordinates")
    return arr


def c_function(rd: RootDatum, lam) -> complex:
    """Beta-factor product normalization c(lambda) = I(lambda) / I(rho).

    I(nu) runs over the distinct positive roots alpha and multiplies
    Beta(m_alpha / 2, m_{alpha/2} / 2 + <nu, alpha> / <alpha, alpha>), where
    m_{alpha/2} is zero when alpha/2 is not a root.  Arguments within 1e-8 of
    a nonpositive integer raise :class:`PoleError`.
    """
    nu = _simple_coords(lam, rd.rank)
    rho_coords = np.array([complex(c) for c in rho(rd).coords])
    gram = np.array([[float(x) for x in row] for row in rd.dual_gram])
    mult = {root.coords: m for root, m in rd.positive_roots}

    def I(coords: np.ndarray) -> complex:
        total = complex(1.0)
        for root, m in rd.positive_roots:
            half = tuple(c / 2 for c in root.coords)
            m_half = mult.get(half, 0)
            rvec = np.array([float(c) for c in root.coords])
            ratio = (coords @ (gram @ rvec)) / (rvec @ (gram @ rvec))
            z1 = m / 2.0
            z2 = m_half / 2.0 + ratio
            if _near_gamma_pole(complex(z2)):
                raise PoleError(f"Beta argument {z2} is at a pole")
            total *= _beta(z1, complex(z2))
        return total

    return complex(I(nu) / I(rho_coords))
