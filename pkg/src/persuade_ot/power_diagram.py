"""Hard Laguerre (power) cells on a grid measure.

Assignment, exact cell masses and barycenters, Lloyd's centroidal
iteration, and the unregularized semi-discrete dual solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .grid import GridMeasure


def min_separation(sites: np.ndarray) -> float:
    """Smallest pairwise distance between sites (inf for a single site)."""
    n = sites.shape[0]
    if n < 2:
        return float("inf")
    diff = sites[:, None, :] - sites[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min()))


@dataclass(frozen=True)
class DiagramParams:
    """Sites and weights of a power diagram.

    Weights only matter up to a common additive shift. Sites must be
    pairwise distinct or the diagram is ill-defined.
    """

    sites: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "weights", weights)
        if sites.ndim != 2 or sites.shape[1] != 2:
            raise ValueError(f"sites must have shape (n, 2), got {sites.shape}")
        if sites.shape[0] < 1:
            raise ValueError("need at least one site")
        if weights.shape != (sites.shape[0],):
            raise ValueError(
                f"weights shape {weights.shape} does not match {sites.shape[0]} sites"
            )
        if not (np.all(np.isfinite(sites)) and np.all(np.isfinite(weights))):
            raise ValueError("sites and weights must be finite")
        if min_separation(sites) <= 0.0:
            raise ValueError("sites must be pairwise distinct")

    @property
    def n(self) -> int:
        return self.sites.shape[0]


@dataclass(frozen=True)
class HardAssignment:
    """Per-grid-point cell labels (0-based argmin indices)."""

    labels: np.ndarray
    n_cells: int
    grid: GridMeasure


@dataclass(frozen=True)
class CellStats:
    """Masses and barycenters per cell.

    Barycenter rows are NaN where the cell carries no mass; ``support``
    flags the cells with positive mass.
    """

    masses: np.ndarray
    barycenters: np.ndarray
    support: np.ndarray


def sq_dists(sites: np.ndarray, points: np.ndarray) -> np.ndarray:
    """(n, P) matrix of squared distances |y_alpha - x_i|^2."""
    diff = points[None, :, :] - sites[:, None, :]
    return np.einsum("ipk,ipk->ip", diff, diff)


def power_costs(params: DiagramParams, points: np.ndarray) -> np.ndarray:
    """(n, P) matrix of power costs |y - x_i|^2 - g_i."""
    return sq_dists(params.sites, points) - params.weights[:, None]


def hard_assign(params: DiagramParams, grid: GridMeasure) -> HardAssignment:
    """Label each grid point with its power-cost argmin cell.

    Ties break to the lowest cell index (argmin returns the first minimum),
    so the assignment is deterministic.
    """
    costs = power_costs(params, grid.centers)
    labels = np.argmin(costs, axis=0)
    return HardAssignment(labels=labels, n_cells=params.n, grid=grid)


def hard_cell_stats(assignment: HardAssignment, grid: GridMeasure) -> CellStats:
    """Exact masses and barycenters of the hard cells.

    Empty cells keep mass 0 and a NaN barycenter; they are flagged rather
    than silently zeroed.
    """
    n = assignment.n_cells
    labels = assignment.labels
    nu = grid.masses
    masses = np.bincount(labels, weights=nu, minlength=n)
    sx = np.bincount(labels, weights=nu * grid.centers[:, 0], minlength=n)
    sy = np.bincount(labels, weights=nu * grid.centers[:, 1], minlength=n)
    support = masses > 0.0
    barycenters = np.full((n, 2), np.nan)
    barycenters[support, 0] = sx[support] / masses[support]
    barycenters[support, 1] = sy[support] / masses[support]
    return CellStats(masses=masses, barycenters=barycenters, support=support)


def quantization_energy(params: DiagramParams, grid: GridMeasure) -> float:
    """Sum over grid points of nu_alpha |y_alpha - x_label(alpha)|^2."""
    a = hard_assign(params, grid)
    diff = grid.centers - params.sites[a.labels]
    return float(grid.masses @ np.einsum("pk,pk->p", diff, diff))


def _resolve_empty_cells(
    sites: np.ndarray, grid: GridMeasure
) -> tuple[np.ndarray, HardAssignment, CellStats]:
    """Reseed empty Voronoi cells until every cell has mass.

    Walks empty cells in index order; each is re-sited at the highest-mass
    grid point of the currently largest cell (skipping points occupied by
    other sites), then the assignment is recomputed. Deterministic.
    """
    sites = np.array(sites, dtype=float)
    n = sites.shape[0]
    zeros = np.zeros(n)
    for _ in range(4 * n):
        params = DiagramParams(sites, zeros)
        assignment = hard_assign(params, grid)
        stats = hard_cell_stats(assignment, grid)
        if stats.support.all():
            return sites, assignment, stats
        empty = int(np.flatnonzero(~stats.support)[0])
        largest = int(np.argmax(stats.masses))
        in_cell = np.flatnonzero(assignment.labels == largest)
        order = in_cell[np.argsort(-grid.masses[in_cell], kind="stable")]
        for alpha in order:
            candidate = grid.centers[alpha]
            if not np.any(np.all(sites == candidate, axis=1)):
                sites[empty] = candidate
                break
        else:
            raise RuntimeError("could not reseed an empty cell")
    raise RuntimeError("empty-cell reseeding did not terminate")


def lloyd_step(sites: np.ndarray, grid: GridMeasure) -> tuple[np.ndarray, float]:
    """One Lloyd iteration: move each site to its Voronoi cell barycenter.

    Returns the new sites and the largest site displacement. Empty cells
    are reseeded (deterministically) before the move.
    """
    sites, _, stats = _resolve_empty_cells(sites, grid)
    new_sites = stats.barycenters.copy()
    shift = float(np.max(np.linalg.norm(new_sites - sites, axis=1)))
    return new_sites, shift


def lloyd_solve(
    n: int,
    grid: GridMeasure,
    seed: int,
    max_iters: int = 200,
    tol: float = 1e-9,
) -> tuple[DiagramParams, CellStats]:
    """Centroidal Voronoi diagram by Lloyd's fixed-point iteration.

    Sites initialize at n distinct grid points drawn with probability
    proportional to the grid masses (seeded); weights stay zero. Iterates
    until the largest site-to-barycenter distance drops below ``tol`` or
    ``max_iters`` is reached.
    """
    if n < 1:
        raise ValueError("need at least one cell")
    p = grid.centers.shape[0]
    if n > p:
        raise ValueError(f"cannot place {n} distinct sites on {p} grid points")
    rng = np.random.default_rng(seed)
    idx = rng.choice(p, size=n, replace=False, p=grid.masses)
    sites = grid.centers[idx].copy()
    for _ in range(max_iters):
        sites, shift = lloyd_step(sites, grid)
        if shift < tol:
            break
    sites, _, stats = _resolve_empty_cells(sites, grid)
    return DiagramParams(sites, np.zeros(n)), stats


def _dual_value(d2: np.ndarray, g: np.ndarray, nu: np.ndarray, targets: np.ndarray) -> float:
    # D[g] = sum_alpha nu_alpha min_i (|y-x_i|^2 - g_i) + g . targets
    c = (d2 - g[:, None]).min(axis=0)
    return float(nu @ c + g @ targets)


def sd_dual_solve(
    sites: np.ndarray,
    target_masses: np.ndarray,
    grid: GridMeasure,
    tol: float,
    max_iters: int = 2000,
) -> np.ndarray:
    """Weights matching prescribed cell masses, by ascent on the dual.

    Maximizes the concave piecewise-linear dual D[g] with supergradient
    target - mass(g) and a doubling/halving line search on the dual value.
    Returns g normalized so g[0] = 0, with every |mass_i - target_i| < tol.
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
    if n == 1:
        return np.zeros(1)

    nu = grid.masses
    d2 = sq_dists(sites, grid.centers)
    g = np.zeros(n)
    value = _dual_value(d2, g, nu, targets)
    step = float(np.mean(d2))  # squared-distance scale of the instance
    residual = np.inf
    for _ in range(max_iters):
        costs = d2 - g[:, None]
        labels = np.argmin(costs, axis=0)
        masses = np.bincount(labels, weights=nu, minlength=n)
        grad = targets - masses
        residual = float(np.max(np.abs(grad)))
        if residual < tol:
            return g - g[0]
        # line search: grow while the dual improves, else shrink
        best_t, best_v = 0.0, value
        t = step
        for _ in range(60):
            v = _dual_value(d2, g + t * grad, nu, targets)
            if v > best_v:
                best_t, best_v = t, v
                t *= 2.0
            elif best_t > 0.0:
                break
            else:
                t *= 0.5
                if t < 1e-18 * step:
                    break
        if best_t == 0.0:
            # at a kink: take a small subgradient step anyway
            best_t = max(1e-6 * step, tol * step)
            best_v = _dual_value(d2, g + best_t * grad, nu, targets)
        g = g + best_t * grad
        value = best_v
        step = best_t
    raise ConvergenceError(
        f"dual ascent residual {residual:.3e} after {max_iters} iterations (tol {tol:.1e})",
        residual=residual,
    )
