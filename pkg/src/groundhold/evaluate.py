"""Out-of-sample policy evaluation and radius-sweep orchestration.

The second stage has a closed form: with a fixed landing plan, the cheapest
airborne-queue response to a realized capacity is the greedy recursion
``y_t = max(0, y_{t-1} + arrivals_t - capacity)``, so policies are scored
without invoking the LP engine.  All sampling flows from an explicit seed;
identical seeds give identical results at any parallelism.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import accumulate
from typing import Sequence

from .domain import (
    AmbiguitySpec,
    CapacityDistribution,
    FlightSchedule,
    SupportGrid,
    default_support_grid,
)
from .milp import MilpModel
from .models import (
    GroundHoldingPolicy,
    build_d_saghp,
    build_dr_saghp,
    build_s_saghp,
    check_policy,
    extract_policy,
)
from .solver import SolverOptions, solve_milp

__all__ = [
    "PolicyEvaluation",
    "SweepRow",
    "SweepResult",
    "DEFAULT_OMEGA",
    "second_stage_cost",
    "arrivals_from_policy",
    "sample_capacities",
    "evaluate_policy",
    "expected_policy_cost",
    "deterministic_capacity",
    "epsilon_sweep",
]

# Default candidate radii for sweep experiments.
DEFAULT_OMEGA = (0.01, 0.1, 0.7, 0.74, 0.75, 0.80, 1.0, 10.0, 100.0)


def second_stage_cost(arrivals_per_slot: Sequence[int], capacity: int, airborne_cost: float) -> float:
    """Optimal airborne holding cost for one realized capacity.

    ``y_0 = 0`` and ``y_t = max(0, y_{t-1} + arrivals_t - capacity)``; the
    cost is ``airborne_cost * sum_t y_t``.  Equals the optimal value of the
    second-stage LP (exceeding arrivals queue and land as capacity frees up).
    """
    queue = 0
    held = 0
    for arrivals in arrivals_per_slot:
        queue = max(0, queue + arrivals - capacity)
        held += queue
    return float(airborne_cost) * held


def arrivals_from_policy(policy: GroundHoldingPolicy, schedule: FlightSchedule) -> list[int]:
    """Planned arrivals per slot under the policy's assignments."""
    counts = [0] * schedule.horizon.num_slots
    for f in schedule.flights:
        counts[policy.assignments[f.id] - 1] += 1
    return counts


def sample_capacities(dist: CapacityDistribution, n: int, seed: int) -> list[int]:
    """``n`` i.i.d. draws by inverse CDF over a seeded generator.

    Uses the stdlib Mersenne Twister, whose ``random()`` stream is stable
    across Python versions, so a seed pins the samples forever.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    rng = random.Random(seed)
    cumulative = list(accumulate(dist.probabilities))
    support = dist.support_points
    last = len(support) - 1
    return [support[min(bisect_left(cumulative, rng.random()), last)] for _ in range(n)]


@dataclass(frozen=True)
class PolicyEvaluation:
    """Per-sample total costs with their mean and population std dev."""

    per_sample_costs: tuple[float, ...]
    mean: float
    std_dev: float
    sample_size: int

    def __post_init__(self) -> None:
        costs = self.per_sample_costs
        if len(costs) != self.sample_size:
            raise ValueError("sample_size disagrees with per_sample_costs")
        mean = sum(costs) / len(costs)
        var = sum((c - mean) ** 2 for c in costs) / len(costs)
        if abs(mean - self.mean) > 1e-9 or abs(math.sqrt(var) - self.std_dev) > 1e-9:
            raise ValueError("mean/std_dev inconsistent with per_sample_costs")

    @classmethod
    def from_costs(cls, costs: Sequence[float]) -> "PolicyEvaluation":
        costs = tuple(float(c) for c in costs)
        mean = sum(costs) / len(costs)
        var = sum((c - mean) ** 2 for c in costs) / len(costs)
        return cls(costs, mean, math.sqrt(var), len(costs))


def _policy_cost(policy: GroundHoldingPolicy, schedule: FlightSchedule, capacity: int) -> float:
    arrivals = arrivals_from_policy(policy, schedule)
    return policy.ground_cost + second_stage_cost(arrivals, capacity, schedule.airborne_cost)


def _require_single_airport(schedule: FlightSchedule) -> None:
    if len(schedule.airports) > 1:
        raise ValueError("evaluation against a scalar capacity needs a single-airport schedule")


def evaluate_policy(
    policy: GroundHoldingPolicy,
    schedule: FlightSchedule,
    samples: Sequence[int],
) -> PolicyEvaluation:
    """Total cost (ground + airborne) of a fixed policy on sampled capacities."""
    _require_single_airport(schedule)
    problems = check_policy(policy, schedule)
    if problems:
        raise ValueError("policy does not fit schedule: " + "; ".join(str(v) for v in problems))
    return PolicyEvaluation.from_costs([_policy_cost(policy, schedule, k) for k in samples])


def expected_policy_cost(
    policy: GroundHoldingPolicy,
    schedule: FlightSchedule,
    dist: CapacityDistribution,
) -> tuple[float, float]:
    """Exact in-distribution mean and std dev of the policy's total cost.

    Enumerates the support instead of sampling, so comparisons against model
    optima carry no Monte Carlo noise.
    """
    _require_single_airport(schedule)
    costs = [_policy_cost(policy, schedule, xi) for xi in dist.support_points]
    mean = sum(p * c for p, c in zip(dist.probabilities, costs))
    var = sum(p * (c - mean) ** 2 for p, c in zip(dist.probabilities, costs))
    return mean, math.sqrt(var)


def deterministic_capacity(dist: CapacityDistribution) -> int:
    """Probability-weighted mean capacity, rounded half up to an integer."""
    return int(math.floor(dist.mean() + 0.5))


@dataclass(frozen=True)
class SweepRow:
    """One (model, epsilon, sample size) cell of a sweep."""

    model: str                    # det | sp | dr
    epsilon: float | None
    sample_size: int
    status: str
    mean_cost: float | None
    std_dev: float | None
    policy_summary: str
    per_sample_costs: tuple[float, ...] = ()

    def label(self) -> str:
        return self.model if self.epsilon is None else f"{self.model}_eps{self.epsilon!r}"


@dataclass(frozen=True)
class SweepResult:
    """All rows of a sweep, in deterministic (model, epsilon, size) order."""

    rows: tuple[SweepRow, ...]

    def to_table(self) -> str:
        """Line-oriented CSV rendering, stable byte-for-byte across runs."""
        lines = ["# schema: ghp-sweep/1",
                 "model,epsilon,sample_size,status,mean_cost,std_dev,policy"]
        for r in self.rows:
            eps = "" if r.epsilon is None else repr(float(r.epsilon))
            mean = "" if r.mean_cost is None else repr(float(r.mean_cost))
            std = "" if r.std_dev is None else repr(float(r.std_dev))
            lines.append(f"{r.model},{eps},{r.sample_size},{r.status},{mean},{std},{r.policy_summary}")
        return "\n".join(lines) + "\n"


def _solve_to_policy(model, schedule, options) -> tuple[str, GroundHoldingPolicy | None]:
    sol = solve_milp(model, options)
    if sol.status != "optimal":
        return sol.status, None
    return "optimal", extract_policy(model, sol, schedule)


def epsilon_sweep(
    schedule: FlightSchedule,
    empirical: CapacityDistribution,
    omegas: Sequence[float],
    eval_dist: CapacityDistribution,
    sample_sizes: Sequence[int],
    seed: int,
    *,
    grid: SupportGrid | None = None,
    options: SolverOptions | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Solve det/sp/dr models once each and score them out of sample.

    The deterministic model uses the rounded mean empirical capacity; one
    robust model is solved per radius in ``omegas``.  Every policy is
    evaluated on the same ``sample_capacities(eval_dist, n, seed)`` draw per
    sample size.  Solver failures annotate their rows and the sweep
    continues.  ``jobs`` fans the independent solves out over a thread pool;
    every cell is a pure function of its inputs and results merge in request
    order, so the output is identical at any setting.
    """
    if not omegas:
        raise ValueError("omega grid must be nonempty")
    if not sample_sizes:
        raise ValueError("need at least one sample size")
    grid = grid or default_support_grid(empirical)

    specs: list[tuple[str, float | None, MilpModel]] = [
        ("det", None, build_d_saghp(schedule, deterministic_capacity(empirical))),
        ("sp", None, build_s_saghp(schedule, empirical)),
    ]
    for eps in omegas:
        amb = AmbiguitySpec(empirical, float(eps), grid)
        specs.append(("dr", float(eps), build_dr_saghp(schedule, amb)))

    def run(spec):
        name, eps, model = spec
        status, policy = _solve_to_policy(model, schedule, options)
        return name, eps, status, policy

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            solved = list(pool.map(run, specs))
    else:
        solved = [run(spec) for spec in specs]

    samples_by_size = {n: sample_capacities(eval_dist, n, seed) for n in sample_sizes}
    rows: list[SweepRow] = []
    for model_name, eps, status, policy in solved:
        for n in sample_sizes:
            if policy is None:
                rows.append(SweepRow(model_name, eps, n, status, None, None, ""))
                continue
            ev = evaluate_policy(policy, schedule, samples_by_size[n])
            rows.append(SweepRow(
                model_name, eps, n, status, ev.mean, ev.std_dev,
                policy.summary(), ev.per_sample_costs,
            ))
    return SweepResult(tuple(rows))
