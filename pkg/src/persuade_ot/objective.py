"""Persuasion objective, penalty, and its analytic gradient.

The soft objective is F = sum_i m_i Phi(b_i) over soft cells, minus
eta times the penalty R (site-to-cell second moment plus pairwise site
repulsion). The gradient is assembled in a factored adjoint form: for any
functional sum_{j,alpha} A_{j,alpha} chi_{j,alpha} the softmax derivative
identity collapses the chain rule to

    dF/dg_k = (1/eps) sum_alpha nu_a chi_ka (Psi_ka - Psibar_a)
    dF/dx_k = (2/eps) sum_alpha nu_a (y_a - x_k) chi_ka (Psi_ka - Psibar_a)
              + explicit penalty terms,

with Psi the per-cell adjoint and Psibar its chi-average per point. This
is O(n M^2) per evaluation and never materializes the dense dchi tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropic import EntropicConfig, SoftCellStats, _softmax_cols, _stats_from_chi
from .errors import SingularPenaltyError
from .grid import GridMeasure
from .payoffs import PayoffModel, phi_eval, phi_grad
from .power_diagram import DiagramParams, hard_assign, hard_cell_stats, sq_dists


@dataclass(frozen=True)
class ObjectiveConfig:
    """Penalty weight eta, entropic config, and the payoff surface."""

    eta: float
    entropic: EntropicConfig
    payoff: PayoffModel

    def __post_init__(self):
        if not (self.eta >= 0.0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be a nonnegative real, got {self.eta!r}")


@dataclass(frozen=True)
class ObjectiveReport:
    """Value decomposition plus per-cell (mass, barycenter, payoff) triples."""

    value: float
    payoff_term: float
    penalty_term: float
    per_cell: list

    @staticmethod
    def build(eta: float, masses, barycenters, phis, penalty_term: float) -> "ObjectiveReport":
        payoff_term = float(masses @ phis)
        value = payoff_term - eta * penalty_term
        per_cell = [
            (float(m), (float(b[0]), float(b[1])), float(v))
            for m, b, v in zip(masses, barycenters, phis)
        ]
        return ObjectiveReport(
            value=value,
            payoff_term=payoff_term,
            penalty_term=float(penalty_term),
            per_cell=per_cell,
        )


def hard_objective(params: DiagramParams, grid: GridMeasure, payoff: PayoffModel) -> float:
    """sum over supported hard cells of m_i * Phi(b_i); empty cells contribute 0."""
    stats = hard_cell_stats(hard_assign(params, grid), grid)
    if not np.any(stats.support):
        return 0.0
    phis = phi_eval(payoff, stats.barycenters[stats.support])
    return float(stats.masses[stats.support] @ phis)


def _separation_sq(sites: np.ndarray) -> np.ndarray:
    diff = sites[:, None, :] - sites[None, :, :]
    sep2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(sep2, np.inf)
    return sep2


def _penalty_terms(
    chi: np.ndarray, masses: np.ndarray, d2: np.ndarray, sites: np.ndarray, grid: GridMeasure
) -> float:
    quantization = float(np.einsum("ip,ip,p->", d2, chi, grid.masses))
    if sites.shape[0] == 1:
        return quantization
    sep2 = _separation_sq(sites)
    repulsion = masses[:, None] * masses[None, :] / sep2
    total = quantization + float(repulsion.sum())
    if not np.isfinite(total):
        raise SingularPenaltyError("sites too close: repulsion term is not finite")
    return total


def penalty_value(params: DiagramParams, grid: GridMeasure, cfg: EntropicConfig) -> float:
    """Quantization term + pairwise repulsion, with soft masses at cfg.epsilon."""
    d2 = sq_dists(params.sites, grid.centers)
    chi = _softmax_cols((params.weights[:, None] - d2) / cfg.epsilon)
    masses = chi @ grid.masses
    return _penalty_terms(chi, masses, d2, params.sites, grid)


def soft_objective(
    params: DiagramParams, grid: GridMeasure, cfg: ObjectiveConfig
) -> ObjectiveReport:
    """Penalized soft objective F - eta*R with its per-cell decomposition."""
    d2 = sq_dists(params.sites, grid.centers)
    chi = _softmax_cols((params.weights[:, None] - d2) / cfg.entropic.epsilon)
    stats = _stats_from_chi(chi, grid, params.sites)
    phis = np.atleast_1d(phi_eval(cfg.payoff, stats.barycenters))
    penalty = _penalty_terms(chi, stats.masses, d2, params.sites, grid)
    return ObjectiveReport.build(cfg.eta, stats.masses, stats.barycenters, phis, penalty)


def value_and_grad(
    params: DiagramParams, grid: GridMeasure, cfg: ObjectiveConfig
) -> tuple[ObjectiveReport, np.ndarray, np.ndarray]:
    """Objective report plus (dF/dX, dF/dg) in one pass.

    Shares the softmax between the value and the gradient; this is the
    workhorse the optimizer calls every iteration.
    """
    sites = params.sites
    eps = cfg.entropic.epsilon
    eta = cfg.eta
    nu = grid.masses
    y = grid.centers

    d2 = sq_dists(sites, y)
    chi = _softmax_cols((params.weights[:, None] - d2) / eps)
    stats = _stats_from_chi(chi, grid, sites)
    m, b = stats.masses, stats.barycenters

    phis = np.atleast_1d(phi_eval(cfg.payoff, b))
    gphis = np.atleast_2d(phi_grad(cfg.payoff, b))

    # payoff adjoint: Psi_ja = c_j + grad Phi(b_j) . y_a reproduces
    # d(m_j Phi(b_j))/dchi_ja = nu_a * Psi_ja via the quotient rule
    c = phis - np.einsum("jk,jk->j", gphis, b)
    psi = c[:, None] + gphis @ y.T

    # report carries the penalty value even when eta = 0
    penalty = _penalty_terms(chi, m, d2, sites, grid)
    if eta > 0.0:
        if sites.shape[0] > 1:
            sep2 = _separation_sq(sites)
            r = 2.0 * (m[None, :] / sep2).sum(axis=1)
        else:
            r = np.zeros(1)
        psi = psi - eta * (d2 + r[:, None])

    psibar = np.einsum("jp,jp->p", chi, psi)
    core = chi * (psi - psibar[None, :]) * nu[None, :]
    row_sum = core.sum(axis=1)
    dg = row_sum / eps
    dx = (2.0 / eps) * (core @ y - row_sum[:, None] * sites)

    if eta > 0.0:
        # explicit x-dependence of the penalty (chi held fixed)
        quant_x = 2.0 * ((chi * nu[None, :]).sum(axis=1)[:, None] * sites - chi @ (nu[:, None] * y))
        if sites.shape[0] > 1:
            diff = sites[:, None, :] - sites[None, :, :]
            sep2 = _separation_sq(sites)
            coef = m[:, None] * m[None, :] / sep2**2
            rep_x = -4.0 * (coef[:, :, None] * diff).sum(axis=1)
        else:
            rep_x = np.zeros_like(sites)
        dx = dx - eta * (quant_x + rep_x)

    report = ObjectiveReport.build(eta, m, b, phis, penalty)
    return report, dx, dg


def objective_gradient(
    params: DiagramParams, grid: GridMeasure, cfg: ObjectiveConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the penalized soft objective in (X, g)."""
    _, dx, dg = value_and_grad(params, grid, cfg)
    return dx, dg
