"""Moments of a surrogate (or any batch-evaluable map) under a product
density, plus a seeded Monte Carlo oracle for cross-checks.

Expectations are tensor Gauss sums built for the proposal density rho_hat;
a ratio callable reweights to the true density rho when the two differ
(importance form: E[u] = sum_k w_k u(q_k) rho(q_k)/rho_hat(q_k)). All
accumulations run over the deterministic tensor ordering with numpy pairwise
summation, so results do not depend on worker scheduling upstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .nodes1d import Density1D, gauss_nodes, uniform_density
from .sparse_grid import GridRule, Surrogate, evaluate_surrogate


@dataclass
class DensityModel:
    """Per-dimension proposal densities and an optional reweighting ratio.

    ratio maps a (P, dims) batch of points to rho/rho_hat values (P,);
    omitted means the proposal is the true density.
    """

    densities: list[Density1D]
    ratio: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def dims(self) -> int:
        return len(self.densities)


def uniform_model(dims: int) -> DensityModel:
    return DensityModel(densities=[uniform_density() for _ in range(dims)])


@dataclass(frozen=True)
class QuadraturePlan:
    """Tensor Gauss rule: one (nodes, weights) pair per dimension."""

    nodes: tuple[np.ndarray, ...]
    weights: tuple[np.ndarray, ...]

    @property
    def dims(self) -> int:
        return len(self.nodes)

    @property
    def n_points(self) -> int:
        return math.prod(len(n) for n in self.nodes)

    @cached_property
    def tensor(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened tensor grid: points (P, dims) and weights (P,)."""
        grids = np.meshgrid(*self.nodes, indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wts = np.ones(1)
        for w in self.weights:
            wts = np.multiply.outer(wts, w).ravel()
        return pts, wts


def quadrature_plan(model: DensityModel, orders: list[int]) -> QuadraturePlan:
    if len(orders) != model.dims:
        raise ValueError(f"got {len(orders)} orders for {model.dims} dimensions")
    pairs = [gauss_nodes(o, d) for o, d in zip(orders, model.densities)]
    return QuadraturePlan(
        nodes=tuple(p[0] for p in pairs), weights=tuple(p[1] for p in pairs)
    )


def default_orders(rule: GridRule, w: int, dims: int) -> list[int]:
    """Per-dimension Gauss order that integrates the surrogate's square.

    The largest 1D degree the plan can carry is 2^w (doubling) or w (linear);
    ceil(maxdeg / 2) + 1 Gauss points integrate products of two such factors
    exactly, so surrogate means and raw second moments are quadrature-exact.
    """
    max_degree = 2**w if rule.growth == "doubling" else w
    return [max_degree // 2 + (max_degree % 2) + 1] * dims


def _as_values(target, pts: np.ndarray) -> np.ndarray:
    if isinstance(target, Surrogate):
        return np.asarray(evaluate_surrogate(target, pts))
    vals = np.asarray(target(pts), dtype=float)
    if vals.shape[0] != pts.shape[0]:
        raise ValueError("target must map (P, dims) batches to P rows")
    return vals


def _effective_weights(model: DensityModel, plan: QuadraturePlan) -> tuple[np.ndarray, np.ndarray]:
    pts, wts = plan.tensor
    if model.ratio is not None:
        wts = wts * np.asarray(model.ratio(pts), dtype=float)
    return pts, wts


@dataclass(frozen=True)
class MomentEstimate:
    mean: float | np.ndarray
    variance: float | np.ndarray
    raw_variance: float | np.ndarray  # before clamping at zero


def expectation(target, model: DensityModel, plan: QuadraturePlan):
    pts, wts = _effective_weights(model, plan)
    return wts @ _as_values(target, pts)


def moment_estimates(target, model: DensityModel, plan: QuadraturePlan) -> MomentEstimate:
    """Mean and the two-term variance E[S^2 r] - E[S r]^2.

    Quadrature error can push the raw variance a hair negative; the clamped
    value is what downstream consumers use, the raw value stays visible here.
    """
    pts, wts = _effective_weights(model, plan)
    vals = _as_values(target, pts)
    mean = wts @ vals
    raw = wts @ (vals * vals) - mean * mean
    return MomentEstimate(mean=mean, variance=np.maximum(raw, 0.0), raw_variance=raw)


def variance(target, model: DensityModel, plan: QuadraturePlan):
    return moment_estimates(target, model, plan).variance


# --- Monte Carlo oracle -------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float | np.ndarray
    variance: float | np.ndarray
    se_mean: float | np.ndarray
    se_variance: float | np.ndarray
    count: int
    seed: int


def monte_carlo_oracle(
    f: Callable[[np.ndarray], np.ndarray],
    dims: int,
    count: int,
    seed: int,
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None,
) -> MonteCarloEstimate:
    """Seeded sample moments of f with standard errors for both moments.

    sampler(rng, n) draws n parameter rows from the true density; the default
    is uniform on [-1, 1]^dims. se_variance uses the delta-method estimate
    sqrt((m4 - s^4) / n) from the sample's central fourth moment.
    """
    rng = np.random.default_rng(seed)
    samples = sampler(rng, count) if sampler else rng.uniform(-1.0, 1.0, (count, dims))
    vals = np.asarray(f(samples), dtype=float)
    mean = vals.mean(axis=0)
    var = vals.var(axis=0, ddof=1)
    centered = vals - mean
    m4 = (centered**4).mean(axis=0)
    se_var = np.sqrt(np.maximum(m4 - var * var, 0.0) / count)
    return MonteCarloEstimate(
        mean=mean,
        variance=var,
        se_mean=np.sqrt(var / count),
        se_variance=se_var,
        count=count,
        seed=seed,
    )
