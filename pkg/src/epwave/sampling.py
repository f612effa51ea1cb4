"""Coherence-optimal construction of EPW approximation sets.

The truncated density space of degree L has dimension N = (L+1)^2.  Its
Christoffel function satisfies

    mu_N^{-1}(zeta) = sum_{l <= L} alpha_l^2 |Pvec_l(zeta)|^2,

independent of the angles by Wigner unitarity, so the induced sampling
density rho_N(y) = w(zeta) / (N mu_N(y)) is one-dimensional in zeta with
weight w(zeta) = zeta^{1/2} e^{-zeta}.  Instead of the exact cumulative
(available behind exact_cumulative for comparison runs) the inversion uses
the incomplete-Gamma surrogate

    UpsilonTilde_N(zeta) = 1 - (1/N) sum_{l <= L} (2l+1)
        Q(2l + 3/2, 2k + zeta) / Q(2l + 3/2, 2k),

inverted by bisection.  An EPW set of size P places propagation angles on a
near-uniform sphere point set (spherical Fibonacci by default, or a
user-provided "theta1 theta2 weight" file), drives (psi, zeta) through a 2-d
Sobol sequence mapped by (2 pi z, UpsilonTilde^{-1}(z)), and rescales each
wave by sqrt(mu_N(y_p) / P).  PPW sets use the same sphere directions with
psi = zeta = 0 and the uniform scale P^{-1/2}.

Set construction is deterministic for the deterministic and quasi-random
strategies; the random strategy derives everything from the configured seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.stats import qmc

from . import modal
from .specfun import upper_gamma_Q
from .waves import check_kappa


class InversionError(RuntimeError):
    """Raised when the cumulative bisection bracket cannot be established."""


@dataclass(frozen=True)
class TruncationParams:
    """Truncation degree L, space dimension N = (L+1)^2, and wavenumber."""

    L: int
    kappa: float

    def __post_init__(self) -> None:
        if self.L < 0:
            raise ValueError("truncation degree must be >= 0")
        check_kappa(self.kappa)

    @property
    def N(self) -> int:
        return (self.L + 1) ** 2


# ---------------------------------------------------------------------------
# Densities and cumulative
# ---------------------------------------------------------------------------

_CHUNK = 4096


def log_mu_inv(zeta, trunc: TruncationParams, alpha_mode: str = "approx"):
    """log mu_N^{-1}(zeta) = log sum_l alpha_l^2 |Pvec_l(zeta)|^2.

    The default approx-mode alpha matches the normalization path of
    build_epw_set, so density reporting and scales stay mutually consistent;
    pass alpha_mode="quadrature" for the exact density.
    """
    zeta_arr = np.atleast_1d(np.asarray(zeta, dtype=float))
    log_alpha = modal.alpha_table(trunc.L, trunc.kappa, mode=alpha_mode)
    out = np.empty(zeta_arr.shape[0])
    for start in range(0, zeta_arr.shape[0], _CHUNK):
        chunk = zeta_arr[start:start + _CHUNK]
        log_pn = modal.log_p_norm_table(trunc.L, chunk, trunc.kappa)
        out[start:start + _CHUNK] = modal._logsumexp(
            2.0 * (log_alpha[:, None] + log_pn), axis=0
        )
    return float(out[0]) if np.ndim(zeta) == 0 else out


def christoffel_mu_inv(zeta: float, trunc: TruncationParams,
                       alpha_mode: str = "approx") -> float:
    """log of the reciprocal Christoffel function at one zeta."""
    if zeta < 0.0:
        raise ValueError("zeta must be >= 0")
    return float(log_mu_inv(zeta, trunc, alpha_mode=alpha_mode))


def rho_hat(zeta, trunc: TruncationParams, alpha_mode: str = "quadrature"):
    """Marginal sampling density over zeta:
    rho_hat(zeta) = 8 pi^2 w(zeta) mu_N^{-1}(zeta) / N.

    With the default quadrature-mode alpha this integrates to 1 exactly (the
    approx mode distorts the per-degree weights by O(1) factors).
    """
    zeta_arr = np.atleast_1d(np.asarray(zeta, dtype=float))
    log_mu = log_mu_inv(zeta_arr, trunc, alpha_mode=alpha_mode)
    with np.errstate(divide="ignore"):
        log_w = 0.5 * np.log(zeta_arr) - zeta_arr
    vals = np.exp(math.log(8.0 * math.pi ** 2) - math.log(trunc.N) + log_w + log_mu)
    return float(vals[0]) if np.ndim(zeta) == 0 else vals


def cumulative_tilde(zeta, trunc: TruncationParams):
    """The incomplete-Gamma cumulative surrogate UpsilonTilde_N(zeta).

    Monotone nondecreasing, 0 at zeta = 0, -> 1 as zeta -> oo.
    """
    zeta_arr = np.atleast_1d(np.asarray(zeta, dtype=float))
    if np.any(zeta_arr < 0.0):
        raise ValueError("zeta must be >= 0")
    kappa = trunc.kappa
    acc = np.zeros_like(zeta_arr)
    for ell in range(trunc.L + 1):
        a = 2.0 * ell + 1.5
        denom = upper_gamma_Q(a, 2.0 * kappa)
        acc += (2.0 * ell + 1.0) * np.asarray(upper_gamma_Q(a, 2.0 * kappa + zeta_arr)) / denom
    vals = 1.0 - acc / trunc.N
    vals = np.clip(vals, 0.0, 1.0)
    return float(vals[0]) if np.ndim(zeta) == 0 else vals


def exact_cumulative(zeta: float, trunc: TruncationParams) -> float:
    """Upsilon_N(zeta) by adaptive quadrature of rho_hat (comparison only)."""
    if zeta == 0.0:
        return 0.0
    val, _ = quad(lambda t: rho_hat(t, trunc), 0.0, zeta,
                  epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def invert_cumulative(u: float, trunc: TruncationParams) -> float:
    """zeta = UpsilonTilde_N^{-1}(u) by bisection.

    Stops when |UpsilonTilde(zeta) - u| < 1e-12 or the bracket width falls
    below 1e-12 (1 + zeta).
    """
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    return float(invert_cumulative_many(np.array([u]), trunc)[0])


def invert_cumulative_many(u: np.ndarray, trunc: TruncationParams) -> np.ndarray:
    """Vectorized bisection for a batch of quantiles in [0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)):
        raise ValueError("u must lie in [0, 1)")
    lo = np.zeros_like(u)
    hi = np.full_like(u, trunc.kappa)
    for _ in range(64):
        vals = cumulative_tilde(hi, trunc)
        need = vals <= u
        if not np.any(need):
            break
        hi[need] *= 2.0
        if np.max(hi) > 1e6:
            raise InversionError(
                "bisection bracket exceeded zeta = 1e6; pathological parameters")
    else:
        raise InversionError(
            "bisection bracket exceeded zeta = 1e6; pathological parameters")

    out = np.where(u == 0.0, 0.0, np.nan)
    active = u > 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        vals = cumulative_tilde(mid, trunc)
        go_up = vals < u
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
        done = (np.abs(vals - u) < 1e-12) | ((hi - lo) < 1e-12 * (1.0 + mid))
        newly = active & done & np.isnan(out)
        out[newly] = mid[newly]
        if not np.any(active & np.isnan(out)):
            break
    remaining = np.isnan(out)
    out[remaining] = 0.5 * (lo + hi)[remaining]
    return out


# ---------------------------------------------------------------------------
# Low-discrepancy and sphere point sets
# ---------------------------------------------------------------------------


def sobol_2d(count: int, skip: int = 1) -> np.ndarray:
    """First `count` points of the standard 2-d Sobol sequence, the all-zero
    leading point skipped by default; shape (count, 2)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = qmc.Sobol(d=2, scramble=False)
    if skip:
        gen.fast_forward(skip)
    return gen.random(count)


def sphere_fibonacci(count: int) -> np.ndarray:
    """Spherical Fibonacci lattice as (theta1, theta2) rows, shape (count, 2)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    idx = np.arange(count, dtype=float)
    theta1 = np.arccos(1.0 - (2.0 * idx + 1.0) / count)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta2 = np.mod(idx * golden, 2.0 * math.pi)
    return np.stack([theta1, theta2], axis=1)


def sphere_directions(count: int, source: str = "fibonacci"):
    """Near-uniform sphere directions plus cubature weights.

    Returns (angles (count, 2), weights (count,)).  source is "fibonacci" or
    a path to a plain-text file with one "theta1 theta2 weight" record per
    line (the published extremal point systems can be dropped in this way);
    a file source ignores `count` in favor of the file's length.
    """
    if source == "fibonacci":
        return sphere_fibonacci(count), np.full(count, 4.0 * math.pi / count)
    return load_sphere_points(source)


def load_sphere_points(path: str | Path):
    """Parse a "theta1 theta2 weight" point-system file."""
    rows = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{line_no}: expected 'theta1 theta2 weight'")
        rows.append([float(p) for p in parts])
    if not rows:
        raise ValueError(f"{path}: no point records found")
    arr = np.asarray(rows)
    if np.any(arr[:, 2] <= 0.0):
        raise ValueError(f"{path}: weights must be positive")
    return arr[:, :2], arr[:, 2]


# ---------------------------------------------------------------------------
# Approximation sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    """How the parameter-domain samples are generated.

    strategy: "quasi-random" (Sobol, default), "random" (seeded uniforms) or
    "deterministic" (Cartesian grid).  sphere_points: "fibonacci" or a path
    to a point-system file.  four_dimensional switches to the full-cube ITS
    variant in which the sphere angles are also inverse-mapped instead of
    taken from a sphere point set.
    """

    strategy: str = "quasi-random"
    sphere_points: str = "fibonacci"
    seed: int = 0
    four_dimensional: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in ("deterministic", "quasi-random", "random"):
            raise ValueError(f"unknown strategy {self.strategy!r}")

    def to_kv(self) -> dict[str, str]:
        return {
            "strategy": self.strategy,
            "sphere_points": self.sphere_points,
            "seed": str(self.seed),
            "four_dimensional": str(self.four_dimensional).lower(),
        }

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "SamplerConfig":
        return cls(
            strategy=kv.get("strategy", "quasi-random"),
            sphere_points=kv.get("sphere_points", "fibonacci"),
            seed=int(kv.get("seed", "0")),
            four_dimensional=kv.get("four_dimensional", "false") == "true",
        )


@dataclass(frozen=True)
class ApproximationSet:
    """A finite, normalized plane-wave approximation set.

    params rows are (theta1, theta2, psi, zeta); log_scales holds the log of
    the per-element normalization (log sqrt(mu_N(y_p)/P) for EPW sets,
    -log(P)/2 for PPW sets).
    """

    kind: str                      # "epw" | "ppw"
    kappa: float
    params: np.ndarray
    log_scales: np.ndarray
    trunc: TruncationParams | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("epw", "ppw"):
            raise ValueError(f"unknown set kind {self.kind!r}")

    def __len__(self) -> int:
        return self.params.shape[0]

    @property
    def scales(self) -> np.ndarray:
        return np.exp(self.log_scales)

    def basis_matrix(self, x: np.ndarray) -> np.ndarray:
        """Values of every element at the points x, shape (len(x), P)."""
        from .waves import epw_matrix

        return epw_matrix(self.params, self.kappa, x, log_scales=self.log_scales)


def _unit_square_samples(count: int, dim: int, cfg: SamplerConfig) -> np.ndarray:
    if cfg.strategy == "quasi-random":
        gen = qmc.Sobol(d=dim, scramble=False)
        gen.fast_forward(1)
        return gen.random(count)
    if cfg.strategy == "random":
        return np.random.default_rng(cfg.seed).uniform(size=(count, dim))
    # deterministic: Cartesian product of equispaced cell midpoints, truncated
    per_axis = int(math.ceil(count ** (1.0 / dim)))
    axes = [(np.arange(per_axis) + 0.5) / per_axis] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    return grid[:count]


def build_epw_set(trunc: TruncationParams, count: int,
                  cfg: SamplerConfig = SamplerConfig()) -> ApproximationSet:
    """EPW approximation set of `count` waves per the sampling recipe."""
    if count < 1:
        raise ValueError("set size must be >= 1")
    if cfg.four_dimensional:
        z = _unit_square_samples(count, 4, cfg)
        theta1 = np.arccos(1.0 - 2.0 * z[:, 0])
        theta2 = 2.0 * math.pi * z[:, 1]
        z_psi, z_zeta = z[:, 2], z[:, 3]
    else:
        angles, _ = sphere_directions(count, cfg.sphere_points)
        if angles.shape[0] < count:
            raise ValueError("sphere point file has fewer points than requested")
        angles = angles[:count]
        theta1, theta2 = angles[:, 0], angles[:, 1]
        z = _unit_square_samples(count, 2, cfg)
        z_psi, z_zeta = z[:, 0], z[:, 1]
    psi = 2.0 * math.pi * z_psi
    zeta = invert_cumulative_many(z_zeta, trunc)
    params = np.stack([theta1, theta2, psi, zeta], axis=1)
    log_scales = -0.5 * (log_mu_inv(zeta, trunc) + math.log(count))
    return ApproximationSet("epw", trunc.kappa, params, log_scales, trunc)


def build_ppw_set(count: int, kappa: float,
                  cfg: SamplerConfig = SamplerConfig()) -> ApproximationSet:
    """PPW approximation set: sphere directions, psi = zeta = 0, scale P^{-1/2}."""
    if count < 1:
        raise ValueError("set size must be >= 1")
    check_kappa(kappa)
    angles, _ = sphere_directions(count, cfg.sphere_points)
    angles = angles[:count]
    params = np.concatenate([angles, np.zeros((count, 2))], axis=1)
    log_scales = np.full(count, -0.5 * math.log(count))
    return ApproximationSet("ppw", kappa, params, log_scales, None)


def tuning_rules(count: int, kappa: float) -> tuple[int, int, float]:
    """Default experiment parameters (L, S, epsilon) for a set of size P:
    L = max(ceil(kappa), floor(sqrt(P/10))), S = ceil(sqrt(2P))^2, eps = 1e-14.
    """
    if count < 1:
        raise ValueError("set size must be >= 1")
    check_kappa(kappa)
    L = max(math.ceil(kappa), math.floor(math.sqrt(count / 10.0)))
    S = math.ceil(math.sqrt(2.0 * count)) ** 2
    return L, S, 1e-14
