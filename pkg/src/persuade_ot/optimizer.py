"""First-order ascent on diagram parameters.

Adam on the concatenated vector (sites, weights), seeded initialization,
an optional Monte Carlo gradient, and finalization pruning of dead cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropic import EntropicConfig, SoftCellStats, _softmax_cols, soft_partition
from .errors import NumericFailure
from .grid import GridMeasure
from .objective import ObjectiveConfig, ObjectiveReport, soft_objective, value_and_grad
from .payoffs import phi_eval, phi_grad
from .power_diagram import (
    DiagramParams,
    hard_assign,
    hard_cell_stats,
    min_separation,
    sq_dists,
)


@dataclass
class OptimizerConfig:
    n_init: int = 12
    max_iters: int = 1000
    learning_rate: float = 1e-2
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    grad_mode: str = "full-grid"  # "full-grid" | "monte-carlo"
    batch_size: int = 4096
    prune_mass_tol: float = 1e-4
    stop_grad_tol: float = 0.0
    init_strategy: str = "uniform-random"  # "uniform-random" | "jittered-grid"
    epsilon_final: float | None = None  # optional geometric anneal target, off by default

    def __post_init__(self):
        if self.n_init < 1:
            raise ValueError("n_init must be at least 1")
        if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
            raise ValueError("Adam betas must lie in [0, 1)")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.grad_mode not in ("full-grid", "monte-carlo"):
            raise ValueError(f"unknown grad_mode {self.grad_mode!r}")
        if self.grad_mode == "monte-carlo" and self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.init_strategy not in ("uniform-random", "jittered-grid"):
            raise ValueError(f"unknown init_strategy {self.init_strategy!r}")
        if self.epsilon_final is not None and self.epsilon_final <= 0.0:
            raise ValueError("epsilon_final must be positive when set")


@dataclass(frozen=True)
class OptResult:
    params: DiagramParams
    report: ObjectiveReport
    effective_n: int
    trajectory: list  # (value, grad_norm) per iteration
    seed_used: int
    best_iteration: int


def init_sites(
    n: int, grid: GridMeasure, seed: int, strategy: str = "uniform-random"
) -> DiagramParams:
    """n distinct sites inside bounds with zero weights, deterministic per seed.

    "uniform-random" samples the rectangle uniformly; "jittered-grid" lays a
    near-square lattice over the rectangle and jitters each site by at most a
    quarter cell, which keeps pairwise separations at half a lattice cell.
    """
    if n < 1:
        raise ValueError("need at least one site")
    rng = np.random.default_rng(seed)
    (a1, b1), (a2, b2) = grid.bounds
    if strategy == "uniform-random":
        for _ in range(100):
            sites = rng.uniform((a1, a2), (b1, b2), size=(n, 2))
            if min_separation(sites) > 0.0:
                break
    elif strategy == "jittered-grid":
        cols = math.ceil(math.sqrt(n))
        rows = math.ceil(n / cols)
        cw = (b1 - a1) / cols
        ch = (b2 - a2) / rows
        cells = [(i, j) for j in range(rows) for i in range(cols)][:n]
        base = np.array(
            [(a1 + (i + 0.5) * cw, a2 + (j + 0.5) * ch) for i, j in cells]
        )
        jitter = rng.uniform(-0.25, 0.25, size=(n, 2)) * np.array([cw, ch])
        sites = base + jitter
    else:
        raise ValueError(f"unknown init strategy {strategy!r}")
    return DiagramParams(sites, np.zeros(n))


def prune_cells(
    params: DiagramParams,
    stats: SoftCellStats,
    mass_tol: float,
    grid: GridMeasure,
) -> DiagramParams:
    """Drop cells that are dead both softly and hardly.

    A cell is removed when its soft mass is below mass_tol AND its hard
    mass is exactly zero. Never removes every cell; survivors keep their
    relative order.
    """
    hard = hard_cell_stats(hard_assign(params, grid), grid)
    keep = (stats.masses >= mass_tol) | (hard.masses > 0.0)
    if not np.any(keep):
        keep[int(np.argmax(stats.masses))] = True
    if np.all(keep):
        return params
    return DiagramParams(params.sites[keep], params.weights[keep])


def mc_gradient(
    params: DiagramParams,
    grid: GridMeasure,
    cfg: ObjectiveConfig,
    sampler_seed: int,
    batch: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of the objective gradient.

    Draws ``batch`` i.i.d. grid points from the prior and evaluates the
    same factored per-point integrand as the full-grid gradient, with
    masses and barycenters estimated from the same batch (ratio estimator;
    small finite-batch bias, vanishing as the batch grows).
    """
    if batch < 1:
        raise ValueError("batch must be at least 1")
    rng = np.random.default_rng(sampler_seed)
    idx = rng.choice(grid.centers.shape[0], size=batch, replace=True, p=grid.masses)
    pts = grid.centers[idx]
    sites = params.sites
    eps = cfg.entropic.epsilon
    eta = cfg.eta

    d2 = sq_dists(sites, pts)
    chi = _softmax_cols((params.weights[:, None] - d2) / eps)
    m = chi.mean(axis=1)
    s = (chi @ pts) / batch
    safe = np.maximum(m, np.finfo(float).tiny)
    b = np.where((m > 0.0)[:, None], s / safe[:, None], sites)

    phis = np.atleast_1d(phi_eval(cfg.payoff, b))
    gphis = np.atleast_2d(phi_grad(cfg.payoff, b))
    c = phis - np.einsum("jk,jk->j", gphis, b)
    psi = c[:, None] + gphis @ pts.T
    if eta > 0.0:
        if sites.shape[0] > 1:
            diff = sites[:, None, :] - sites[None, :, :]
            sep2 = np.einsum("ijk,ijk->ij", diff, diff)
            np.fill_diagonal(sep2, np.inf)
            r = 2.0 * (m[None, :] / sep2).sum(axis=1)
        else:
            r = np.zeros(1)
        psi = psi - eta * (d2 + r[:, None])

    psibar = np.einsum("jp,jp->p", chi, psi)
    core = chi * (psi - psibar[None, :]) / batch
    row_sum = core.sum(axis=1)
    dg = row_sum / eps
    dx = (2.0 / eps) * (core @ pts - row_sum[:, None] * sites)
    if eta > 0.0:
        quant_x = 2.0 * (m[:, None] * sites - s)
        if sites.shape[0] > 1:
            coef = m[:, None] * m[None, :] / sep2**2
            rep_x = -4.0 * (coef[:, :, None] * diff).sum(axis=1)
        else:
            rep_x = np.zeros_like(sites)
        dx = dx - eta * (quant_x + rep_x)
    return dx, dg


def optimize(
    init: DiagramParams,
    grid: GridMeasure,
    obj: ObjectiveConfig,
    opt: OptimizerConfig,
) -> OptResult:
    """Adam ascent on (X, g), returning the best iterate after pruning.

    Stops at max_iters or when the gradient infinity-norm drops below
    stop_grad_tol. The raw Adam trajectory is not monotone; the best-seen
    value is tracked separately and its iterate is what gets pruned and
    returned. NaN or infinite objective values abort with the last valid
    state attached.
    """
    n = init.n
    theta = np.concatenate([init.sites.ravel(), init.weights])
    m1 = np.zeros_like(theta)
    m2 = np.zeros_like(theta)
    beta1, beta2 = opt.adam_beta1, opt.adam_beta2
    lr = opt.learning_rate

    eps_run = obj.entropic.epsilon
    anneal = 1.0
    if opt.epsilon_final is not None and opt.max_iters > 1:
        anneal = (opt.epsilon_final / eps_run) ** (1.0 / (opt.max_iters - 1))

    mc_rng = np.random.default_rng(opt.seed)

    def unpack(vec: np.ndarray) -> DiagramParams:
        return DiagramParams(vec[: 2 * n].reshape(n, 2), vec[2 * n :])

    trajectory: list[tuple[float, float]] = []
    best_value = -np.inf
    best_theta = theta.copy()
    best_iteration = 0
    last_valid = unpack(theta)
    cfg_t = obj

    for it in range(opt.max_iters):
        if anneal != 1.0:
            cfg_t = ObjectiveConfig(
                eta=obj.eta,
                entropic=EntropicConfig(eps_run * anneal**it),
                payoff=obj.payoff,
            )
        params = unpack(theta)
        report, dx, dg = value_and_grad(params, grid, cfg_t)
        if opt.grad_mode == "monte-carlo":
            dx, dg = mc_gradient(
                params, grid, cfg_t, int(mc_rng.integers(2**63)), opt.batch_size
            )
        grad = np.concatenate([dx.ravel(), dg])
        if not (np.isfinite(report.value) and np.all(np.isfinite(grad))):
            raise NumericFailure(
                f"objective became non-finite at iteration {it}",
                last_params=last_valid,
                last_value=best_value if np.isfinite(best_value) else None,
                iteration=it,
            )
        last_valid = params
        gnorm = float(np.max(np.abs(grad)))
        trajectory.append((report.value, gnorm))
        if report.value > best_value:
            best_value = report.value
            best_theta = theta.copy()
            best_iteration = it
        if gnorm < opt.stop_grad_tol:
            break
        # ascent step
        m1 = beta1 * m1 + (1.0 - beta1) * grad
        m2 = beta2 * m2 + (1.0 - beta2) * grad * grad
        m1_hat = m1 / (1.0 - beta1 ** (it + 1))
        m2_hat = m2 / (1.0 - beta2 ** (it + 1))
        theta = theta + lr * m1_hat / (np.sqrt(m2_hat) + opt.adam_eps)

    final_cfg = obj if opt.epsilon_final is None else ObjectiveConfig(
        eta=obj.eta, entropic=EntropicConfig(opt.epsilon_final), payoff=obj.payoff
    )
    best_params = unpack(best_theta)
    report_before = soft_objective(best_params, grid, final_cfg)
    _, stats = soft_partition(best_params, grid, final_cfg.entropic)
    pruned = prune_cells(best_params, stats, opt.prune_mass_tol, grid)
    report_after = soft_objective(pruned, grid, final_cfg)

    if pruned.n < best_params.n:
        removed = float(stats.masses.sum() - stats.masses[
            _kept_mask(best_params, pruned)
        ].sum())
        scale = max(1.0, max(abs(v) for _, _, v in report_before.per_cell))
        bound = 10.0 * removed * scale + final_cfg.eta * abs(
            report_before.penalty_term - report_after.penalty_term
        ) + 1e-8
        assert abs(report_after.value - report_before.value) <= bound, (
            f"pruning moved the objective by "
            f"{abs(report_after.value - report_before.value):.3e} > bound {bound:.3e}"
        )

    return OptResult(
        params=pruned,
        report=report_after,
        effective_n=pruned.n,
        trajectory=trajectory,
        seed_used=opt.seed,
        best_iteration=best_iteration,
    )


def _kept_mask(original: DiagramParams, pruned: DiagramParams) -> np.ndarray:
    """Boolean mask of original cells surviving in the pruned params."""
    keep = np.zeros(original.n, dtype=bool)
    j = 0
    for i in range(original.n):
        if j < pruned.n and np.array_equal(original.sites[i], pruned.sites[j]) and (
            original.weights[i] == pruned.weights[j]
        ):
            keep[i] = True
            j += 1
    return keep
