"""Discrete Wasserstein distances and worst-case distribution recovery.

The ground metric is the absolute difference between capacity values (the l2
norm of a scalar).  Both operations are transportation LPs solved with the
package's own simplex, which makes them an independent check on the robust
models: the worst-case expected cost recovered here must match the
``epsilon * alpha + sum_s p_s beta_s`` term of a solved robust model
whenever strong duality holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .domain import PROBABILITY_TOL, AmbiguitySpec, CapacityDistribution
from .milp import SENSE_EQ, SENSE_LE, MilpModel
from .simplex import solve_lp_arrays

__all__ = [
    "DiscreteDistribution",
    "TransportPlan",
    "wasserstein_distance",
    "worst_case_distribution",
]


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability distribution with finitely many integer-valued atoms."""

    atoms: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        atoms = tuple((int(v), float(p)) for v, p in self.atoms)
        if not atoms:
            raise ValueError("distribution needs at least one atom")
        values = [v for v, _ in atoms]
        if len(set(values)) != len(values):
            raise ValueError("atom values must be distinct")
        if any(p <= 0.0 for _, p in atoms):
            raise ValueError("atom probabilities must be strictly positive")
        total = sum(p for _, p in atoms)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "atoms", tuple(sorted(atoms)))

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.atoms)

    @classmethod
    def from_capacity(cls, dist: CapacityDistribution) -> "DiscreteDistribution":
        return cls(dist.atoms())


def _as_distribution(dist) -> DiscreteDistribution:
    if isinstance(dist, DiscreteDistribution):
        return dist
    if isinstance(dist, CapacityDistribution):
        return DiscreteDistribution.from_capacity(dist)
    raise TypeError(f"expected a distribution, got {type(dist).__name__}")


@dataclass(frozen=True)
class TransportPlan:
    """Mass moved from each source atom to each target support value.

    Rows follow the source atoms, columns the target values; row sums equal
    the source probabilities and column sums form the target marginal.
    """

    source_values: tuple[int, ...]
    source_probabilities: tuple[float, ...]
    target_values: tuple[int, ...]
    mass: np.ndarray

    def cost(self) -> float:
        """Total transport cost of the plan under the |difference| metric."""
        src = np.asarray(self.source_values, dtype=float)[:, None]
        tgt = np.asarray(self.target_values, dtype=float)[None, :]
        return float((np.abs(src - tgt) * self.mass).sum())

    def marginal(self, drop_tol: float = 1e-12) -> DiscreteDistribution:
        """Column-sum distribution over the target values.

        Entries at or below ``drop_tol`` are dropped and the remainder is
        renormalized, so tiny solver residue never produces zero-probability
        atoms.
        """
        col = self.mass.sum(axis=0)
        keep = [(v, float(p)) for v, p in zip(self.target_values, col) if p > drop_tol]
        total = sum(p for _, p in keep)
        return DiscreteDistribution(tuple((v, p / total) for v, p in keep))


def wasserstein_distance(p, q) -> float:
    """Minimum-cost transport between two discrete distributions.

    Accepts :class:`DiscreteDistribution` or :class:`CapacityDistribution`.
    Solves the transportation LP directly; for scalar supports this equals
    the classic CDF-area formula, which the test suite uses as an
    independent oracle.
    """
    p = _as_distribution(p)
    q = _as_distribution(q)
    n1, n2 = len(p.atoms), len(q.atoms)
    cost = np.abs(
        np.asarray(p.values, dtype=float)[:, None] - np.asarray(q.values, dtype=float)[None, :]
    ).reshape(-1)

    m = n1 + n2
    A = np.zeros((m, n1 * n2))
    b = np.zeros(m)
    for i in range(n1):
        A[i, i * n2:(i + 1) * n2] = 1.0
        b[i] = p.probabilities[i]
    for j in range(n2):
        A[n1 + j, j::n2] = 1.0
        b[n1 + j] = q.probabilities[j]
    senses = np.zeros(m, dtype=np.int8)  # all equalities; one row is redundant

    sol = solve_lp_arrays(
        cost, 0.0, A, senses, b,
        np.zeros(n1 * n2), np.full(n1 * n2, np.inf),
    )
    if sol.status != "optimal":  # pragma: no cover - balanced transport is always feasible
        raise RuntimeError(f"transport LP reported {sol.status}")
    return max(sol.objective, 0.0)


def worst_case_distribution(
    second_stage_costs: Mapping[int, float],
    amb: AmbiguitySpec,
) -> tuple[TransportPlan, float]:
    """Cost-maximizing distribution inside the Wasserstein ball.

    Maximizes ``sum_{s,xi} cost(xi) * u_s(xi)`` over transport plans ``u``
    whose rows sum to the empirical probabilities and whose total transport
    cost stays within the radius.  Returns the plan together with its
    expected cost; the plan's marginal is the worst-case capacity
    distribution.  ``second_stage_costs`` must cover every grid value.
    """
    grid = amb.grid.values
    missing = [xi for xi in grid if xi not in second_stage_costs]
    if missing:
        raise ValueError(f"second-stage costs missing for grid values {missing}")

    src = amb.empirical.support_points
    probs = amb.empirical.probabilities
    n, k = len(src), len(grid)

    model = MilpModel()
    u = [[model.add_continuous(f"u[{xi_hat},{xi}]") for xi in grid] for xi_hat in src]
    for s, xi_hat in enumerate(src):
        for j, xi in enumerate(grid):
            # maximization written as a minimization
            model.add_objective_term(u[s][j], -float(second_stage_costs[xi]))
    budget = [(u[s][j], float(abs(src[s] - grid[j]))) for s in range(n) for j in range(k)]
    model.add_row(budget, SENSE_LE, amb.radius, name="budget")
    for s in range(n):
        model.add_row([(u[s][j], 1.0) for j in range(k)], SENSE_EQ, probs[s], name=f"mass[{src[s]}]")
    model.freeze()

    a = model.to_arrays()
    sol = solve_lp_arrays(a.c, a.offset, a.A, a.senses, a.b, a.lower, a.upper)
    if sol.status != "optimal":
        raise RuntimeError(f"worst-case transport LP reported {sol.status}")

    mass = np.maximum(np.asarray(sol.values).reshape(n, k), 0.0)
    mass.setflags(write=False)
    plan = TransportPlan(src, probs, grid, mass)
    return plan, -sol.objective
