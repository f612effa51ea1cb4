"""Modal analysis linking plane waves to the spherical-wave basis.

The central identity is the complex-direction Jacobi-Anger expansion

    EW_y(x) = sum_{l,m} [4 pi i^l beta_l^{-1} conj(Dvec_l^m(theta, psi)
              . Pvec_l(zeta))] b_l^m(x),

where Dvec_l^m is the m-th column of the Wigner D-matrix and

    Pvec_l(zeta)[m] = gamma_l^m i^m P_l^m(1 + zeta/2k).

Equivalently EW_y = sum tau_l conj(a_l^m(y)) b_l^m with the Herglotz
densities a_l^m = alpha_l Dvec_l^m . Pvec_l and tau_l = 4 pi i^l /
(alpha_l beta_l).  All magnitudes that grow super-exponentially in l
(P_l^m, beta_l, alpha_l) are carried as logs; each degree's coefficients
are stored as a scaled complex vector plus one log offset, and offsets are
summed before any exponentiation.

The zeta-dependence enters only through gamma_l^m P_l^m(1 + zeta/2k), whose
log magnitude is symmetric in m -> -m; only the phase i^m differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from .specfun import (
    log_legendre_ext_table,
    log_upper_gamma,
    sph_harm_table,
    spherical_jn_log_many,
    wigner_d_blocks,
)
from .waves import EpwParams, check_kappa, direction, epw_eval, log_beta_table

_LN_4PI = math.log(4.0 * math.pi)
_I_POW = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


class QuadratureError(RuntimeError):
    """Raised when the adaptive quadrature fails its relative tolerance."""


def _i_pow(m) -> np.ndarray:
    return _I_POW[np.mod(m, 4)]


def _logsumexp(a: np.ndarray, axis=None) -> np.ndarray | float:
    amax = np.max(a, axis=axis, keepdims=True)
    amax = np.where(np.isfinite(amax), amax, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - amax), axis=axis)) + np.squeeze(amax, axis=axis)
    return out


# ---------------------------------------------------------------------------
# The vector Pvec_l(zeta)
# ---------------------------------------------------------------------------


def log_gamma_p_table(lmax: int, zeta, kappa: float) -> np.ndarray:
    """log(gamma_l^m P_l^m(1 + zeta/2k)) for 0 <= m <= l <= lmax.

    Shape (lmax+1, lmax+1, n) for array zeta of length n; by the reflection
    identities the value is even in m, so negative orders reuse these rows.
    """
    check_kappa(kappa)
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if np.any(zeta < 0.0):
        raise ValueError("evanescence parameter must be >= 0")
    z = 1.0 + zeta / (2.0 * kappa)
    table = log_legendre_ext_table(lmax, z)
    ells = np.arange(lmax + 1)[:, None]
    ms = np.arange(lmax + 1)[None, :]
    log_gamma = 0.5 * (
        np.log(2 * ells + 1) - math.log(4.0 * math.pi)
        + gammaln(ells - ms + 1) - gammaln(ells + ms + 1)
    )
    log_gamma = np.where(ms <= ells, log_gamma, -np.inf)
    return table + log_gamma[:, :, None]


@dataclass(frozen=True)
class PVector:
    """Pvec_l(zeta): log magnitudes by order plus the i^m phases.

    log_mag[m + ell] = log |gamma_l^m P_l^m(1 + zeta/2k)|; the complex entry
    is phase[m + ell] * exp(log_mag[m + ell]).
    """

    ell: int
    zeta: float
    kappa: float
    log_mag: np.ndarray
    phase: np.ndarray

    @property
    def entries(self) -> np.ndarray:
        """Plain complex entries (may under/overflow for extreme parameters)."""
        return self.phase * np.exp(self.log_mag)

    @property
    def log_norm(self) -> float:
        """log |Pvec_l(zeta)| (Euclidean norm over orders)."""
        return 0.5 * float(_logsumexp(2.0 * self.log_mag))


def p_vector(ell: int, zeta: float, kappa: float) -> PVector:
    """The degree-l coefficient vector of the Jacobi-Anger expansion."""
    table = log_gamma_p_table(ell, zeta, kappa)
    ms = np.arange(-ell, ell + 1)
    log_mag = table[ell, np.abs(ms), 0]
    return PVector(ell, float(zeta), float(kappa), log_mag, _i_pow(ms))


def log_p_norm_table(lmax: int, zeta, kappa: float) -> np.ndarray:
    """log |Pvec_l(zeta_j)| for all l <= lmax; shape (lmax+1, n)."""
    table = log_gamma_p_table(lmax, zeta, kappa)
    n = table.shape[2]
    out = np.empty((lmax + 1, n))
    for ell in range(lmax + 1):
        rows = 2.0 * table[ell, : ell + 1, :]
        rows = rows + np.where(np.arange(ell + 1) > 0, math.log(2.0), 0.0)[:, None]
        out[ell] = 0.5 * _logsumexp(rows, axis=0)
    return out


# ---------------------------------------------------------------------------
# Jacobi-Anger coefficients of one EPW
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModalCoefficients:
    """Coefficients (EW_y, b_l^m)_B for l <= L, stored per degree as a scaled
    complex vector and a log offset."""

    y: EpwParams
    kappa: float
    L: int
    scaled: tuple[np.ndarray, ...]   # scaled[l][m + l], complex
    log_shift: np.ndarray            # (L+1,), true value = scaled * e^shift

    def coefficient(self, ell: int, m: int) -> complex:
        return complex(self.scaled[ell][m + ell] * math.exp(self.log_shift[ell]))

    def dense(self) -> np.ndarray:
        """All coefficients in flat (l, m) order (underflow degrades to 0)."""
        out = np.empty((self.L + 1) ** 2, dtype=complex)
        for ell in range(self.L + 1):
            out[ell * ell: (ell + 1) ** 2] = self.scaled[ell] * math.exp(self.log_shift[ell])
        return out

    def log_degree_norm(self, ell: int) -> float:
        """log of the l2 norm of the degree-l coefficients."""
        v = self.scaled[ell]
        return 0.5 * math.log(float(np.sum(np.abs(v) ** 2))) + self.log_shift[ell]


def _scaled_degree_dots(y: EpwParams, kappa: float, lmax: int,
                        blocks=None) -> tuple[list[np.ndarray], np.ndarray]:
    """For each degree, the vector over m of Dvec_l^m . Pvec_l in scaled form.

    Returns (dots, shifts): the true dot is dots[l] * e^{shifts[l]}.
    """
    if blocks is None:
        blocks = wigner_d_blocks(lmax, y.theta1)
    gp = log_gamma_p_table(lmax, y.zeta, kappa)[:, :, 0]
    dots: list[np.ndarray] = []
    shifts = np.empty(lmax + 1)
    for ell in range(lmax + 1):
        ms = np.arange(-ell, ell + 1)
        log_mag = gp[ell, np.abs(ms)]
        big = float(np.max(log_mag))
        shifts[ell] = big
        pvec = _i_pow(ms) * np.exp(1j * ms * y.psi) * np.exp(log_mag - big)
        dot = blocks[ell].T @ pvec            # sum over m' of d^{m',m} pvec[m']
        dots.append(np.exp(1j * ms * y.theta2) * dot)
    return dots, shifts


def jacobi_anger_coeffs(y: EpwParams, kappa: float, L: int) -> ModalCoefficients:
    """Coefficients of EW_y on the b_l^m basis up to degree L:
    4 pi i^l beta_l^{-1} conj(Dvec_l^m . Pvec_l)."""
    check_kappa(kappa)
    if L < 0:
        raise ValueError("truncation degree must be >= 0")
    dots, shifts = _scaled_degree_dots(y, kappa, L)
    log_beta = log_beta_table(L, kappa)
    scaled = []
    for ell in range(L + 1):
        scaled.append(4.0 * math.pi * _I_POW[ell % 4] * np.conj(dots[ell]))
    return ModalCoefficients(y, kappa, L, tuple(scaled), shifts - log_beta)


def epw_modal_eval(y: EpwParams, kappa: float, L: int, x, blocks=None,
                   return_scale: bool = False):
    """Partial sum of the modal expansion of EW_y up to degree L at x.

    beta_l cancels between the coefficient and the spherical wave, so the
    combined per-degree magnitude is e^{shift_l} j_l(k r), assembled in log
    form with compensated degree summation.  Converges to epw_eval(y, kappa,
    x) as L grows.

    With return_scale=True also returns sum_l |term_l(x)|, the expansion's
    own magnitude scale at each point (the natural denominator for relative
    accuracy at points where the wave has decayed far below the terms).
    """
    check_kappa(kappa)
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    dots, shifts = _scaled_degree_dots(y, kappa, L, blocks=blocks)

    r = np.linalg.norm(pts, axis=1)
    theta = np.zeros_like(r)
    phi = np.zeros_like(r)
    safe = r > 0.0
    theta[safe] = np.arccos(np.clip(pts[safe, 2] / r[safe], -1.0, 1.0))
    phi[safe] = np.arctan2(pts[safe, 1], pts[safe, 0])
    harm = sph_harm_table(L, theta, phi)

    jsigns, jlogs = spherical_jn_log_many(L, kappa * r)
    total = np.zeros(pts.shape[0], dtype=complex)
    comp = np.zeros(pts.shape[0], dtype=complex)
    scale = np.zeros(pts.shape[0])
    for ell in range(L + 1):
        block = slice(ell * ell, (ell + 1) ** 2)
        angular = (4.0 * math.pi * _I_POW[ell % 4]
                   * np.conj(dots[ell]) @ harm[block])
        term = angular * jsigns[ell] * np.exp(shifts[ell] + jlogs[ell])
        scale += np.abs(term)
        yk = term - comp
        t = total + yk
        comp = (t - total) - yk
        total = t
    single = np.asarray(x).ndim == 1
    if return_scale:
        return (complex(total[0]), float(scale[0])) if single else (total, scale)
    return complex(total[0]) if single else total


def addition_theorem_check(ell: int, x, y: EpwParams, kappa: float) -> float:
    """Residual of the generalized Legendre addition theorem at degree ell:

        | sum_m conj(Dvec_l^m . Pvec_l) Y_l^m(x)
          - (2l+1)/(4 pi) P_l(d(y) . x) |.

    Exposed as a validation utility; x must be a unit vector.
    """
    x = np.asarray(x, dtype=float)
    dots, shifts = _scaled_degree_dots(y, kappa, ell)
    theta = math.acos(np.clip(x[2], -1.0, 1.0))
    phi = math.atan2(x[1], x[0])
    harm = sph_harm_table(ell, theta, phi)[ell * ell: (ell + 1) ** 2, 0]
    lhs = np.conj(dots[ell]) @ harm * math.exp(shifts[ell])

    w = complex(np.sum(direction(y, kappa).d * x))
    p_prev, p_cur = 1.0 + 0.0j, w
    if ell == 0:
        p_cur = p_prev
    else:
        for q in range(1, ell):
            p_prev, p_cur = p_cur, ((2 * q + 1) * w * p_cur - q * p_prev) / (q + 1)
    rhs = (2 * ell + 1) / (4.0 * math.pi) * p_cur
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Herglotz densities, alpha and tau
# ---------------------------------------------------------------------------


def alpha_table(lmax: int, kappa: float, mode: str = "quadrature") -> np.ndarray:
    """log alpha_l for l <= lmax.

    mode "quadrature": exact Gauss-Laguerre evaluation of
        alpha_l^{-2} = 8 pi^2 / (2l+1) * sum_m integral of
        [gamma_l^m P_l^m(1 + zeta/2k)]^2 zeta^{1/2} e^{-zeta} dzeta;
    the integrand is a polynomial of degree 2l times the weight, so the rule
    with n >= l+1 nodes is exact.  Adaptivity: two node counts must agree to
    1e-10 relative or QuadratureError is raised.

    mode "approx": the incomplete-Gamma closed-form approximation
        alpha_l ~ k^l e^{-k} [2 sqrt(pi)/l! Gamma(l+1/2)
                  Gamma(2l+3/2, 2k)]^{-1/2}.
    """
    check_kappa(kappa)
    if mode == "approx":
        ells = np.arange(lmax + 1)
        out = np.empty(lmax + 1)
        for ell in ells:
            out[ell] = (
                ell * math.log(kappa) - kappa
                - 0.5 * (
                    math.log(2.0) + 0.5 * math.log(math.pi)
                    + gammaln(ell + 0.5) - gammaln(ell + 1.0)
                    + log_upper_gamma(2.0 * ell + 1.5, 2.0 * kappa)
                )
            )
        return out
    if mode != "quadrature":
        raise ValueError(f"unknown alpha mode {mode!r}")

    results = []
    for extra in (6, 14):
        n = lmax + extra
        nodes, wts = roots_genlaguerre(n, 0.5)
        if np.any(wts <= 0.0) or np.any(~np.isfinite(np.log(wts))):
            raise QuadratureError("Gauss-Laguerre weights underflowed; "
                                  "degree out of supported range")
        gp = log_gamma_p_table(lmax, 2.0 * kappa * (nodes / (2.0 * kappa)), kappa)
        # gp[l, m, i] = log(gamma P(1 + nodes_i / 2k)); nodes are zeta values
        logw = np.log(wts)[None, None, :]
        log_b = _logsumexp(logw + 2.0 * gp, axis=2)       # (l, m)
        double_m = np.where(np.arange(lmax + 1) > 0, math.log(2.0), 0.0)[None, :]
        ells = np.arange(lmax + 1)
        log_sum = _logsumexp(log_b + double_m, axis=1)     # sum over m = -l..l
        log_alpha_inv_sq = (
            math.log(8.0 * math.pi ** 2) - np.log(2.0 * ells + 1.0) + log_sum
        )
        results.append(-0.5 * log_alpha_inv_sq)
    if np.max(np.abs(results[0] - results[1])) > 1e-10:
        raise QuadratureError("alpha quadrature failed 1e-10 relative agreement")
    return results[1]


def alpha(ell: int, kappa: float, mode: str = "quadrature") -> float:
    """log alpha_l (Herglotz-density normalization, log-scaled)."""
    if ell < 0:
        raise ValueError("degree must be >= 0")
    return float(alpha_table(ell, kappa, mode=mode)[ell])


def herglotz_density_eval(ell: int, m: int, y: EpwParams, kappa: float,
                          mode: str = "quadrature") -> complex:
    """a_l^m(y) = alpha_l Dvec_l^m(theta, psi) . Pvec_l(zeta)."""
    if abs(m) > ell:
        raise ValueError("order out of range")
    dots, shifts = _scaled_degree_dots(y, kappa, ell)
    log_alpha = alpha(ell, kappa, mode=mode)
    return complex(dots[ell][m + ell] * math.exp(shifts[ell] + log_alpha))


@dataclass(frozen=True)
class TauTable:
    """tau_l = 4 pi i^l (alpha_l beta_l)^{-1} for l <= L."""

    kappa: float
    L: int
    log_abs: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.log_abs)):
            raise ValueError("tau values must be finite and nonzero")


def tau_table(L: int, kappa: float, mode: str = "quadrature") -> TauTable:
    """The diagonal Jacobi-Anger factors linking densities to spherical waves."""
    log_alpha = alpha_table(L, kappa, mode=mode)
    log_beta = log_beta_table(L, kappa)
    log_abs = _LN_4PI - log_alpha - log_beta
    values = _I_POW[np.arange(L + 1) % 4] * np.exp(log_abs)
    return TauTable(kappa=float(kappa), L=L, log_abs=log_abs, values=values)


def classical_jacobi_anger_coeff(ell: int, m: int, theta1: float, theta2: float,
                                 kappa: float) -> complex:
    """PPW coefficient 4 pi i^l beta_l^{-1} conj(Y_l^m(theta)): the zeta = 0
    reduction of the generalized expansion (test oracle)."""
    from .specfun import spherical_harmonic

    lb = log_beta_table(ell, kappa)[ell]
    return (4.0 * math.pi * _I_POW[ell % 4] * math.exp(-lb)
            * np.conj(spherical_harmonic(ell, m, theta1, theta2)))
