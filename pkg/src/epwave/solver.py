"""Regularized boundary-sampling solver.

Given an approximation set {phi_p}, boundary nodes x_s with positive cubature
weights w_s, and Dirichlet data g, the method solves the oversampled system
A xi = b with A_{s,p} = w_s^{1/2} phi_p(x_s), b_s = w_s^{1/2} g(x_s) through
a truncated-SVD pseudoinverse: A = U Sigma V*, singular values below
epsilon * sigma_max are zeroed, and

    xi = V Sigma_eps^+ (U* b),

applied right to left so small and large reciprocal singular values never
mix.  The epsilon-rank #{sigma_p >= epsilon sigma_max} is the dimension of
the stably reachable subspace; the quality metric is the relative residual
||A xi - b|| / ||b||.

Assembly is vectorized over rows (deterministic output ordering); a factored
solver object supports many right-hand sides against one decomposition.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sampling import ApproximationSet


@dataclass(frozen=True)
class BoundarySampling:
    """Cubature nodes and positive weights on a domain boundary."""

    nodes: np.ndarray    # (S, 3)
    weights: np.ndarray  # (S,)

    def __post_init__(self) -> None:
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes and weights must have equal length")
        if np.any(self.weights <= 0.0):
            raise ValueError("cubature weights must be positive")

    def __len__(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class SamplingMatrix:
    """Weighted sampling matrix A (S x P) and right-hand side b."""

    entries: np.ndarray
    rhs: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class RegularizedFit:
    """Result of one regularized solve."""

    xi: np.ndarray
    eps_rank: int
    sigma_max: float
    residual: float
    coeff_norm: float
    epsilon: float
    singular_values: np.ndarray
    wall_time: float


def weighted_basis_matrix(aset: ApproximationSet, bs: BoundarySampling) -> np.ndarray:
    """A = diag(w^{1/2}) Phi as a Fortran-ordered array, assembled in column
    blocks so the peak memory stays near one output matrix."""
    S, P = len(bs), len(aset)
    sw = np.sqrt(bs.weights)
    a = np.empty((S, P), dtype=complex, order="F")
    block = max(1, min(P, (1 << 24) // max(S, 1)))
    from .waves import epw_matrix

    for j0 in range(0, P, block):
        j1 = min(P, j0 + block)
        a[:, j0:j1] = epw_matrix(aset.params[j0:j1], aset.kappa, bs.nodes,
                                 log_scales=aset.log_scales[j0:j1]) * sw[:, None]
    return a


def assemble(aset: ApproximationSet, bs: BoundarySampling, g) -> SamplingMatrix:
    """Build A_{s,p} = w_s^{1/2} phi_p(x_s) and b_s = w_s^{1/2} g(x_s).

    g is a callable mapping an (S, 3) array to S complex values, or an
    (S,)-array of precomputed boundary data.  Oversampling S >= P required.
    """
    S, P = len(bs), len(aset)
    if S < P:
        raise ValueError(f"oversampling violated: S = {S} < P = {P}")
    sw = np.sqrt(bs.weights)
    a = weighted_basis_matrix(aset, bs)
    g_vals = g(bs.nodes) if callable(g) else np.asarray(g)
    if g_vals.shape != (S,):
        raise ValueError("boundary data must produce one value per node")
    return SamplingMatrix(entries=a, rhs=sw * g_vals.astype(complex))


class RegularizedSolver:
    """One SVD factorization reused across right-hand sides and epsilons.

    With overwrite=True a Fortran-contiguous matrix is destroyed in place
    (peak memory matters for the paper-scale spectra).  The residual is
    evaluated through the factorization, which is exact for the truncated-SVD
    solution and avoids the eps * ||A|| * ||xi|| noise a direct A @ xi
    recomputation would add exactly where the coefficients blow up.
    """

    def __init__(self, a: np.ndarray, overwrite: bool = False):
        if not np.all(np.isfinite(a)):
            raise ValueError("sampling matrix contains non-finite entries")
        if overwrite and a.flags.f_contiguous:
            self.u, self.sigma, self.vh = scipy.linalg.svd(
                a, full_matrices=False, overwrite_a=True, check_finite=False)
        else:
            self.u, self.sigma, self.vh = np.linalg.svd(a, full_matrices=False)

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[0]) if self.sigma.size else 0.0

    def eps_rank(self, epsilon: float) -> int:
        if self.sigma_max == 0.0:
            return 0
        return int(np.count_nonzero(self.sigma >= epsilon * self.sigma_max))

    def solve(self, b: np.ndarray, epsilon: float) -> RegularizedFit:
        if not 0.0 < epsilon <= 1.0:
            raise ValueError("regularization parameter must lie in (0, 1]")
        start = time.perf_counter()
        bnorm = float(np.linalg.norm(b))
        if bnorm == 0.0:
            xi = np.zeros(self.vh.shape[0], dtype=complex)
            return RegularizedFit(xi, self.eps_rank(epsilon), self.sigma_max,
                                  0.0, 0.0, epsilon, self.sigma.copy(),
                                  time.perf_counter() - start)
        rank = self.eps_rank(epsilon)
        # right-to-left: project b, divide by retained sigmas, map back
        ub = self.u.conj().T @ b
        xi = self.vh[:rank].conj().T @ (ub[:rank] / self.sigma[:rank])
        # ||A xi - b||^2 = ||discarded U* b|| ^2 + ||b - U U* b||^2
        outside = max(bnorm ** 2 - float(np.linalg.norm(ub) ** 2), 0.0)
        res = math.sqrt(float(np.linalg.norm(ub[rank:]) ** 2) + outside) / bnorm
        return RegularizedFit(xi, rank, self.sigma_max, res,
                              float(np.linalg.norm(xi)), epsilon,
                              self.sigma.copy(), time.perf_counter() - start)


def regularized_solve(mat: SamplingMatrix, epsilon: float) -> RegularizedFit:
    """Truncated-SVD solution of the weighted sampling system."""
    return RegularizedSolver(mat.entries).solve(mat.rhs, epsilon)


def epsilon_rank(mat: SamplingMatrix, epsilon: float) -> int:
    """#{sigma_p >= epsilon sigma_max} for the sampling matrix."""
    sigma = singular_values(mat.entries.copy())
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma >= epsilon * sigma[0]))


def residual(mat: SamplingMatrix, xi: np.ndarray) -> float:
    """Relative residual ||A xi - b|| / ||b||; b = 0 is signalled."""
    bnorm = float(np.linalg.norm(mat.rhs))
    if bnorm == 0.0:
        raise ZeroDivisionError("relative residual undefined for b = 0")
    return float(np.linalg.norm(mat.entries @ xi - mat.rhs)) / bnorm


def singular_values(a: np.ndarray, overwrite: bool = False) -> np.ndarray:
    """Singular values only (descending).  With overwrite=True a Fortran-
    contiguous input is destroyed in place, keeping the peak memory of large
    spectrum runs at a single matrix."""
    overwrite = overwrite and a.flags.f_contiguous
    return scipy.linalg.svdvals(a, overwrite_a=overwrite, check_finite=False)


def fit_report(fit: RegularizedFit, *, P: int, S: int, L: int | None) -> dict:
    """The structured fit summary emitted by every experiment."""
    return {
        "P": P,
        "S": S,
        "L": L,
        "epsilon": fit.epsilon,
        "eps_rank": fit.eps_rank,
        "residual": fit.residual,
        "coeff_norm": fit.coeff_norm,
        "wall_time": fit.wall_time,
    }


def write_sigma_csv(path, sigma: np.ndarray) -> None:
    """Dump singular values as "index,sigma" rows."""
    with open(path, "w") as fh:
        fh.write("index,sigma\n")
        for i, s in enumerate(sigma):
            fh.write(f"{i},{float(s)!r}\n")
