"""Plane-wave and spherical-wave objects.

An evanescent plane wave (EPW) is x -> e^{i k d . x} with a complex direction
d, d . d = 1 (componentwise, no conjugation).  Directions are parametrized by
y = (theta1, theta2, psi, zeta): d(y) = R_{theta,psi} d_up(1 + zeta/2k) with
d_up(z) = (i sqrt(z^2 - 1), 0, z) and R_{theta,psi} = R_z(theta2) R_y(theta1)
R_z(psi).  Equivalently

    EW_y(x) = e^{i (zeta/2 + k) p . x} e^{-sqrt(zeta (zeta/4 + k)) q . x},

where p is the real propagation direction and q the unit evanescence
direction (first column of the rotation).  zeta = 0 recovers a propagative
plane wave (PPW), which does not depend on psi.

Spherical waves b_l^m = beta_l j_l(k |x|) Y_l^m(x/|x|) are normalized in the
k-weighted H^1 inner product (u, v) = (u, v)_{L2} + k^{-2} (grad u, grad v);
beta_l is evaluated from its closed form in spherical Bessel functions at k
and carried as a log magnitude (it grows super-exponentially past l ~ k).

Angles are radians, stored as given; no wrapping is performed (caller
contract).  Everything here is a pure function of its arguments and safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import (
    ModalIndex,
    flat_index,
    spherical_jn_log,
    spherical_jn_log_many,
    sph_harm_table,
)


def check_kappa(kappa: float) -> float:
    if not kappa > 0.0:
        raise ValueError(f"wavenumber must be positive, got {kappa}")
    return float(kappa)


@dataclass(frozen=True)
class EpwParams:
    """A point y = (theta1, theta2, psi, zeta) in the EPW parameter domain.

    theta1 in [0, pi], theta2 and psi in [0, 2 pi), zeta >= 0.
    """

    theta1: float
    theta2: float
    psi: float = 0.0
    zeta: float = 0.0

    def __post_init__(self) -> None:
        if self.zeta < 0.0:
            raise ValueError(f"evanescence parameter must be >= 0, got {self.zeta}")

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.psi, self.zeta])


@dataclass(frozen=True)
class ComplexDirection:
    """Complex direction d with d . d = 1; real and imaginary unit axes."""

    d: np.ndarray            # complex, shape (3,)
    propagation: np.ndarray  # Re(d) direction, unit
    evanescence: np.ndarray  # Im(d) direction, unit (zero vector when zeta = 0)


def rotation_matrix(theta1: float, theta2: float, psi: float) -> np.ndarray:
    """R_z(theta2) R_y(theta1) R_z(psi)."""

    def rz(a):
        c, s = math.cos(a), math.sin(a)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def ry(a):
        c, s = math.cos(a), math.sin(a)
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])

    return rz(theta2) @ ry(theta1) @ rz(psi)


def propagation_direction(theta1: float, theta2: float) -> np.ndarray:
    """Real unit direction (sin t1 cos t2, sin t1 sin t2, cos t1)."""
    s1 = math.sin(theta1)
    return np.array([s1 * math.cos(theta2), s1 * math.sin(theta2), math.cos(theta1)])


def direction(y: EpwParams, kappa: float) -> ComplexDirection:
    """Complex direction d(y) = R_{theta,psi} d_up(1 + zeta/2k)."""
    check_kappa(kappa)
    z = 1.0 + y.zeta / (2.0 * kappa)
    rot = rotation_matrix(y.theta1, y.theta2, y.psi)
    prop = rot[:, 2]
    evan = rot[:, 0]
    im_len = math.sqrt(max(z * z - 1.0, 0.0))
    d = z * prop + 1j * im_len * evan
    return ComplexDirection(d=d, propagation=prop,
                            evanescence=evan if im_len > 0.0 else np.zeros(3))


def epw_eval(y: EpwParams, kappa: float, x) -> complex | np.ndarray:
    """EW_y(x) = e^{i k d(y) . x}; x is one point or an (n, 3) array."""
    check_kappa(kappa)
    z = 1.0 + y.zeta / (2.0 * kappa)
    rot = rotation_matrix(y.theta1, y.theta2, y.psi)
    x = np.asarray(x, dtype=float)
    phase = (kappa * z) * (x @ rot[:, 2])
    decay = (kappa * math.sqrt(max(z * z - 1.0, 0.0))) * (x @ rot[:, 0])
    vals = np.exp(-decay + 1j * phase)
    return complex(vals) if x.ndim == 1 else vals


def ppw_eval(theta1: float, theta2: float, kappa: float, x) -> complex | np.ndarray:
    """PW_theta(x) = EW_{(theta,0,0)}(x); unit modulus everywhere."""
    return epw_eval(EpwParams(theta1, theta2, 0.0, 0.0), kappa, x)


def epw_matrix(params: np.ndarray, kappa: float, x: np.ndarray,
               log_scales: np.ndarray | None = None) -> np.ndarray:
    """Values of many (optionally rescaled) EPWs at many points.

    params has rows (theta1, theta2, psi, zeta); x is (n, 3).  Returns the
    (n, P) matrix with column p equal to e^{log_scales[p]} EW_{y_p}(x).  The
    scale is folded into the exponent before exponentiation, so large
    log-scaled normalizations never overflow intermediates.
    """
    check_kappa(kappa)
    params = np.atleast_2d(np.asarray(params, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t1, t2, psi, zeta = params.T
    z = 1.0 + zeta / (2.0 * kappa)
    s1, c1 = np.sin(t1), np.cos(t1)
    s2, c2 = np.sin(t2), np.cos(t2)
    sp, cp = np.sin(psi), np.cos(psi)
    prop = np.stack([s1 * c2, s1 * s2, c1], axis=1)                  # (P, 3)
    evan = np.stack(
        [c1 * c2 * cp - s2 * sp, c1 * s2 * cp + c2 * sp, -s1 * cp], axis=1
    )                                                                # (P, 3)
    phase = (x @ prop.T) * (kappa * z)                               # (n, P)
    decay = (x @ evan.T) * (kappa * np.sqrt(np.maximum(z * z - 1.0, 0.0)))
    if log_scales is not None:
        decay = decay - log_scales[None, :]
    return np.exp(-decay + 1j * phase)


# ---------------------------------------------------------------------------
# Spherical waves
# ---------------------------------------------------------------------------


def log_beta_table(lmax: int, kappa: float) -> np.ndarray:
    """log beta_l for 0 <= l <= lmax from the closed form

        beta_l^{-2} = (1 + l/k^2) j_l(k)^2 - (j_{l-1}(k) + j_l(k)/k) j_{l+1}(k),

    which is the k-weighted H^1 norm of j_l(k|x|) Y_l^m on the unit ball.
    Evaluated through Bessel ratios in the decayed regime so that squares of
    underflowing j_l never appear.
    """
    check_kappa(kappa)
    signs, logs = spherical_jn_log(lmax + 1, kappa)
    # j_{-1}(r) = cos(r)/r extends the recurrence downward
    jm1 = math.cos(kappa) / kappa
    ells = np.arange(lmax + 1, dtype=float)
    out = np.empty(lmax + 1)
    for ell in range(lmax + 1):
        lj = logs[ell]
        if 2.0 * lj > -600.0:
            j = signs[ell] * math.exp(lj)
            jm = jm1 if ell == 0 else signs[ell - 1] * math.exp(logs[ell - 1])
            jp = signs[ell + 1] * math.exp(logs[ell + 1])
            bracket = (1.0 + ells[ell] / kappa ** 2) * j * j - (jm + j / kappa) * jp
            out[ell] = -0.5 * math.log(bracket)
        else:
            # deep evanescent regime: j_{l-1}/j_l and j_{l+1}/j_l are finite
            # and positive, so factor j_l^2 out of the bracket
            rm = signs[ell - 1] * signs[ell] * math.exp(logs[ell - 1] - lj)
            rp = signs[ell + 1] * signs[ell] * math.exp(logs[ell + 1] - lj)
            c = (1.0 + ells[ell] / kappa ** 2) - (rm + 1.0 / kappa) * rp
            out[ell] = -0.5 * (2.0 * lj + math.log(c))
    return out


def beta(ell: int, kappa: float) -> float:
    """log beta_l (the spherical-wave normalization, log-scaled)."""
    if ell < 0:
        raise ValueError(f"degree must be nonnegative, got {ell}")
    return float(log_beta_table(ell, kappa)[ell])


@dataclass(frozen=True)
class SphericalWave:
    """Normalized spherical wave b_l^m for one (l, m) and wavenumber."""

    idx: ModalIndex
    kappa: float
    log_beta: float

    @classmethod
    def make(cls, ell: int, m: int, kappa: float) -> "SphericalWave":
        return cls(ModalIndex(ell, m), check_kappa(kappa), beta(ell, kappa))


def spherical_wave_eval(sw: SphericalWave, x) -> complex | np.ndarray:
    """b_l^m(x) = beta_l j_l(k |x|) Y_l^m(x/|x|) for |x| <= 1.

    At x = 0 only l = 0 survives (j_l(0) = delta_{l0}); the angular factor is
    irrelevant there and evaluated at the pole.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if np.any(np.linalg.norm(pts, axis=1) > 1.0 + 1e-12):
        raise ValueError("spherical waves are defined on the closed unit ball")
    vals = spherical_wave_matrix(sw.idx.ell, sw.kappa, pts)
    row = vals[flat_index(sw.idx.ell, sw.idx.m)]
    return complex(row[0]) if single else row


def spherical_wave_matrix(lmax: int, kappa: float, x: np.ndarray,
                          log_beta: np.ndarray | None = None) -> np.ndarray:
    """b_l^m(x_j) for all (l, m) with l <= lmax; shape ((lmax+1)^2, n).

    The log of beta_l and of j_l(k r) are combined before exponentiation.
    """
    check_kappa(kappa)
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    if log_beta is None:
        log_beta = log_beta_table(lmax, kappa)
    jsign, jlog = spherical_jn_log_many(lmax, kappa * r)
    radial = jsign * np.exp(jlog + log_beta[:, None])       # (lmax+1, n)

    safe = r > 0.0
    theta = np.zeros_like(r)
    phi = np.zeros_like(r)
    theta[safe] = np.arccos(np.clip(pts[safe, 2] / r[safe], -1.0, 1.0))
    phi[safe] = np.arctan2(pts[safe, 1], pts[safe, 0])
    harm = sph_harm_table(lmax, theta, phi)                 # ((lmax+1)^2, n)

    out = np.empty_like(harm)
    for ell in range(lmax + 1):
        block = slice(ell * ell, (ell + 1) * (ell + 1))
        out[block] = harm[block] * radial[ell][None, :]
    return out
