"""Entropy-regularized soft partitions and the regularized semi-discrete dual.

The soft membership of grid point y_alpha in cell i is the softmax over i
of (g_i - |y_alpha - x_i|^2) / epsilon. All exponentials are computed after
subtracting the per-point maximum logit, so small epsilon cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .grid import GridMeasure
from .power_diagram import DiagramParams, sq_dists


@dataclass(frozen=True)
class EntropicConfig:
    """Regularization strength epsilon, in squared-distance units."""

    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0.0 and np.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be a positive real, got {self.epsilon!r}")


@dataclass(frozen=True)
class SoftPartition:
    """Soft memberships chi (n, M^2) plus the raw logits they came from."""

    chi: np.ndarray
    logits: np.ndarray


@dataclass(frozen=True)
class SoftCellStats:
    """Regularized masses and barycenters of the soft cells."""

    masses: np.ndarray
    barycenters: np.ndarray


def _softmax_cols(logits: np.ndarray) -> np.ndarray:
    # softmax over axis 0, stabilized by per-column max subtraction
    shifted = logits - logits.max(axis=0, keepdims=True)
    w = np.exp(shifted)
    return w / w.sum(axis=0, keepdims=True)


def _stats_from_chi(
    chi: np.ndarray, grid: GridMeasure, sites: np.ndarray
) -> SoftCellStats:
    nu = grid.masses
    masses = chi @ nu
    first_moments = chi @ (nu[:, None] * grid.centers)
    # masses are strictly positive in exact arithmetic; guard float underflow
    safe = np.maximum(masses, np.finfo(float).tiny)
    barycenters = first_moments / safe[:, None]
    dead = masses <= 0.0
    if np.any(dead):
        barycenters = np.where(dead[:, None], sites, barycenters)
    return SoftCellStats(masses=masses, barycenters=barycenters)


def soft_partition(
    params: DiagramParams, grid: GridMeasure, cfg: EntropicConfig
) -> tuple[SoftPartition, SoftCellStats]:
    """Soft memberships and the induced masses/barycenters.

    chi[i, alpha] = softmax_i((g_i - |y_alpha - x_i|^2) / epsilon). Every
    column sums to one, and chi is invariant under a common shift of the
    weights.
    """
    logits = (params.weights[:, None] - sq_dists(params.sites, grid.centers)) / cfg.epsilon
    chi = _softmax_cols(logits)
    return SoftPartition(chi=chi, logits=logits), _stats_from_chi(chi, grid, params.sites)


def c_transform(
    params: DiagramParams,
    point: np.ndarray,
    cfg: EntropicConfig,
    density_value: float,
) -> float | np.ndarray:
    """Regularized C-transform of the weights at a point.

    Returns eps*log(density) - eps*log sum_j exp((g_j - |y - x_j|^2)/eps),
    the soft analogue of min_j(|y - x_j|^2 - g_j). Accepts a single point
    (shape (2,)) or a batch (k, 2); density_value must be positive and may
    broadcast against the batch.
    """
    dens = np.asarray(density_value, dtype=float)
    if np.any(dens <= 0.0):
        raise ValueError("density_value must be positive")
    pts = np.asarray(point, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    eps = cfg.epsilon
    logits = (params.weights[:, None] - sq_dists(params.sites, pts)) / eps
    top = logits.max(axis=0)
    lse = top + np.log(np.exp(logits - top[None, :]).sum(axis=0))
    out = eps * np.log(dens) - eps * lse
    return float(out[0]) if single and out.ndim > 0 and out.size == 1 else out


def _log_soft_masses(
    d2: np.ndarray, g: np.ndarray, log_nu: np.ndarray, live: np.ndarray, eps: float
) -> np.ndarray:
    # log m_i = logsumexp_alpha(log nu_alpha + logit_i - logsumexp_j logit_j)
    logits = (g[:, None] - d2[:, live]) / eps
    top = logits.max(axis=0)
    log_z = top + np.log(np.exp(logits - top[None, :]).sum(axis=0))
    a = log_nu[None, :] + logits - log_z[None, :]
    amax = a.max(axis=1)
    return amax + np.log(np.exp(a - amax[:, None]).sum(axis=1))


def sinkhorn_dual_solve(
    sites: np.ndarray,
    target_masses: np.ndarray,
    grid: GridMeasure,
    cfg: EntropicConfig,
    tol: float,
    max_iters: int = 20000,
) -> np.ndarray:
    """Weights whose soft cell masses match the targets.

    Runs the semi-discrete Sinkhorn fixed point in the log domain: the
    continuous potential is eliminated in closed form, and each sweep
    rescales g_i by eps*log(target_i / m_i^eps). Stops when the mass
    residual max_i |m_i^eps - target_i| drops below tol; the returned g is
    normalized so g[0] = 0.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    targets = np.asarray(target_masses, dtype=float)
    n = sites.shape[0]
    if targets.shape != (n,):
        raise ValueError("one target mass per site required")
    if np.any(targets <= 0.0):
        raise ValueError("target masses must be positive")
    if abs(targets.sum() - 1.0) > 1e-9:
        raise ValueError("target masses must sum to one")

    eps = cfg.epsilon
    live = grid.masses > 0.0
    log_nu = np.log(grid.masses[live])
    d2 = sq_dists(sites, grid.centers)
    log_targets = np.log(targets)
    g = np.zeros(n)
    residual = np.inf
    for _ in range(max_iters):
        log_m = _log_soft_masses(d2, g, log_nu, live, eps)
        residual = float(np.max(np.abs(np.exp(log_m) - targets)))
        if residual < tol:
            return g - g[0]
        g = g + eps * (log_targets - log_m)
    raise ConvergenceError(
        f"sinkhorn residual {residual:.3e} after {max_iters} iterations (tol {tol:.1e})",
        residual=residual,
    )


def dual_value(
    params: DiagramParams,
    target_masses: np.ndarray,
    grid: GridMeasure,
    cfg: EntropicConfig,
) -> float:
    """Regularized dual objective D^eps at the given weights.

    D^eps[g] = sum_alpha nu_alpha * g^{C,eps}(y_alpha) + g . targets - eps,
    with the grid density nu_alpha / cell_area. Its partial derivative in
    g_i is target_i - m_i^eps, which is what sinkhorn_dual_solve drives to
    zero; exposed mainly so that property can be tested directly.
    """
    targets = np.asarray(target_masses, dtype=float)
    live = grid.masses > 0.0
    dens = grid.masses[live] / grid.cell_area
    gc = c_transform(params, grid.centers[live], cfg, dens)
    return float(grid.masses[live] @ gc + params.weights @ targets - cfg.epsilon)


def soft_partition_grads(
    params: DiagramParams, grid: GridMeasure, cfg: EntropicConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Dense derivative tensors of the soft memberships.

    Returns (dchi_dx, dchi_dg) with

        dchi_dg[k, j, alpha]    = -(1/eps) (chi_j - delta_kj) chi_k
        dchi_dx[k, j, alpha, :] = (2 (x_k - y_alpha)/eps) (chi_j - delta_kj) chi_k

    evaluated at each grid point. These are O(n^2 M^2) tensors intended for
    verification at small sizes; the objective gradient uses a factored
    assembly instead and never materializes them.
    """
    part, _ = soft_partition(params, grid, cfg)
    chi = part.chi
    n, p = chi.shape
    eps = cfg.epsilon
    delta = np.eye(n)
    # factor[k, j, alpha] = (chi_j - delta_kj) * chi_k
    factor = (chi[None, :, :] - delta[:, :, None]) * chi[:, None, :]
    dchi_dg = -factor / eps
    diff = params.sites[:, None, :] - grid.centers[None, :, :]  # x_k - y_alpha
    dchi_dx = (2.0 / eps) * factor[:, :, :, None] * diff[:, None, :, :]
    return dchi_dx, dchi_dg
