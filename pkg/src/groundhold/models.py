"""Model builders for the ground holding problem family.

Four formulations share one first stage (binary slot assignment with
connection coupling) and differ in how capacity enters:

* ``build_d_saghp``    - hard per-slot capacity ``K``;
* ``build_s_saghp``    - extensive-form two-stage program, one airborne-queue
  block per empirical capacity scenario, probability-weighted recourse cost;
* ``build_dr_saghp``   - worst case over a Wasserstein ball of radius
  ``epsilon`` around the empirical distribution, written as its finite
  deterministic equivalent: queue blocks over a discretized capacity grid
  plus multipliers ``alpha`` (transport budget) and ``beta[s]`` (per-scenario
  mass), linked by ``alpha * |xi_hat_s - xi| + beta_s >= airborne cost(xi)``;
* ``build_dr_maghp``   - per-airport copies of the robust blocks with
  connections allowed to span airports.

All builders are pure functions of their inputs and return frozen models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .domain import (
    AmbiguitySpec,
    CapacityDistribution,
    FlightSchedule,
    NetworkInstance,
    Violation,
    validate_schedule,
)
from .milp import SENSE_EQ, SENSE_GE, SENSE_LE, MilpModel, Solution, VariableRef

__all__ = [
    "GroundHoldingPolicy",
    "PolicyExtractionError",
    "DrDiagnostics",
    "build_d_saghp",
    "build_s_saghp",
    "build_dr_saghp",
    "build_dr_maghp",
    "extract_policy",
    "check_policy",
    "dr_diagnostics",
]


class PolicyExtractionError(RuntimeError):
    """Solution has no clean 0/1 slot assignment, or it contradicts the model."""


@dataclass(frozen=True)
class GroundHoldingPolicy:
    """First-stage decision: one landing slot per flight.

    ``ground_delays`` are slot counts ``t - r_f``; ``ground_cost`` is the
    delay cost ``sum_f C_f * delay_f`` implied by the assignments.
    """

    assignments: dict[str, int]
    ground_delays: dict[str, int]
    ground_cost: float

    def summary(self) -> str:
        """Compact ``flight@slot`` rendering in assignment order."""
        return ";".join(f"{fid}@{slot}" for fid, slot in self.assignments.items())


def _require_valid(schedule: FlightSchedule) -> None:
    violations = validate_schedule(schedule)
    if violations:
        raise ValueError("invalid schedule: " + "; ".join(str(v) for v in violations))


def _add_assignment_vars(model: MilpModel, schedule: FlightSchedule) -> dict[tuple[str, int], VariableRef]:
    x: dict[tuple[str, int], VariableRef] = {}
    for f in schedule.flights:
        for t in schedule.available_slots(f):
            x[f.id, t] = model.add_binary(f"x[{f.id},{t}]")
    return x


def _add_ground_objective(model: MilpModel, schedule: FlightSchedule,
                          x: dict[tuple[str, int], VariableRef]) -> None:
    for f in schedule.flights:
        for t in schedule.available_slots(f):
            model.add_objective_term(x[f.id, t], f.ground_cost * t)
        model.add_objective_offset(-f.ground_cost * f.scheduled_arrival)


def _add_assignment_rows(model: MilpModel, schedule: FlightSchedule,
                         x: dict[tuple[str, int], VariableRef]) -> None:
    for f in schedule.flights:
        terms = [(x[f.id, t], 1.0) for t in schedule.available_slots(f)]
        model.add_row(terms, SENSE_EQ, 1.0, name=f"assign[{f.id}]")


def _add_coupling_rows(model: MilpModel, schedule: FlightSchedule,
                       x: dict[tuple[str, int], VariableRef]) -> None:
    # delay(f1) - slack <= delay(f2), written on the time-weighted assignments
    by_id = schedule.flight_by_id
    for c in schedule.connections:
        f1 = by_id[c.predecessor]
        f2 = by_id[c.successor]
        terms = [(x[f1.id, t], float(t)) for t in schedule.available_slots(f1)]
        terms += [(x[f2.id, t], -float(t)) for t in schedule.available_slots(f2)]
        rhs = f1.scheduled_arrival - f2.scheduled_arrival + c.slack
        model.add_row(terms, SENSE_LE, rhs, name=f"couple[{f1.id},{f2.id}]")


def _add_queue_block(
    model: MilpModel,
    schedule: FlightSchedule,
    x: dict[tuple[str, int], VariableRef],
    flights: list,
    capacity: int,
    tag: str,
    zero_terminal_queue: bool,
) -> list[VariableRef]:
    """Airborne-queue recourse rows for one capacity realization.

    ``arrivals_t <= capacity - y_{t-1} + y_t`` with ``y_0 = 0``; returns the
    queue variables ``y_1..y_T``.
    """
    T = schedule.horizon.num_slots
    y = [model.add_continuous(f"y[{tag},{t}]") for t in range(1, T + 1)]
    for t in range(1, T + 1):
        terms = [(x[f.id, t], 1.0) for f in flights if t >= f.scheduled_arrival]
        terms.append((y[t - 1], -1.0))
        if t >= 2:
            terms.append((y[t - 2], 1.0))
        model.add_row(terms, SENSE_LE, float(capacity), name=f"recourse[{tag},{t}]")
    if zero_terminal_queue:
        model.add_row([(y[T - 1], 1.0)], SENSE_EQ, 0.0, name=f"terminal[{tag}]")
    return y


def build_d_saghp(schedule: FlightSchedule, capacity: int) -> MilpModel:
    """Deterministic single-airport model with hard per-slot capacity.

    Minimizes total ground delay cost subject to per-slot capacity, one slot
    per flight and connection coupling.  Infeasibility (more flights than the
    horizon can absorb) surfaces at solve time, not here.
    """
    _require_valid(schedule)
    if capacity < 0:
        raise ValueError("capacity must be nonnegative")
    model = MilpModel()
    x = _add_assignment_vars(model, schedule)
    _add_ground_objective(model, schedule, x)
    for t in schedule.horizon.slots():
        terms = [(x[f.id, t], 1.0) for f in schedule.flights if t >= f.scheduled_arrival]
        model.add_row(terms, SENSE_LE, float(capacity), name=f"cap[{t}]")
    _add_assignment_rows(model, schedule, x)
    _add_coupling_rows(model, schedule, x)
    return model.freeze()


def build_s_saghp(
    schedule: FlightSchedule,
    dist: CapacityDistribution,
    *,
    zero_terminal_queue: bool = False,
) -> MilpModel:
    """Extensive-form two-stage stochastic model on the empirical distribution.

    The hard capacity row is replaced by one airborne-queue block per
    scenario; the objective adds the probability-weighted airborne cost.
    With ``zero_terminal_queue`` every scenario queue must drain by the end
    of the horizon (the base model, like the queue recursion it mirrors,
    leaves end-of-horizon airborne flights unresolved).
    """
    _require_valid(schedule)
    model = MilpModel()
    x = _add_assignment_vars(model, schedule)
    _add_ground_objective(model, schedule, x)
    flights = list(schedule.flights)
    for xi, p in dist.atoms():
        y = _add_queue_block(model, schedule, x, flights, xi, str(xi), zero_terminal_queue)
        for yt in y:
            model.add_objective_term(yt, p * schedule.airborne_cost)
    _add_assignment_rows(model, schedule, x)
    _add_coupling_rows(model, schedule, x)
    return model.freeze()


def build_dr_saghp(
    schedule: FlightSchedule,
    amb: AmbiguitySpec,
    *,
    zero_terminal_queue: bool = False,
    alpha_cap: float | None = None,
) -> MilpModel:
    """Distributionally robust model, finite deterministic equivalent.

    Variables: assignment binaries, queue block ``y[xi,t]`` per grid value,
    a transport-budget multiplier ``alpha >= 0`` and free per-scenario
    multipliers ``beta[s]``.  The objective is ground cost plus
    ``epsilon * alpha + sum_s p_s * beta[s]``; rows
    ``alpha * |xi_hat_s - xi| + beta[s] >= sum_t C_h y[xi,t]`` for every
    (grid value, scenario) pair bound the worst-case airborne cost over the
    ball.  The scalar ground metric makes the l2 norm an absolute difference.

    ``alpha`` is unbounded by default; at ``epsilon = 0`` its objective
    coefficient is zero and the zero-cost ray is harmless.  ``alpha_cap``
    adds a guard bound for pathological pivoting.
    """
    _require_valid(schedule)
    model = MilpModel()
    x = _add_assignment_vars(model, schedule)
    _add_ground_objective(model, schedule, x)

    flights = list(schedule.flights)
    queue_cost: dict[int, list[VariableRef]] = {}
    for xi in amb.grid.values:
        queue_cost[xi] = _add_queue_block(model, schedule, x, flights, xi, str(xi), zero_terminal_queue)

    alpha = model.add_continuous("alpha", 0.0, math.inf if alpha_cap is None else alpha_cap)
    beta = {xi_hat: model.add_continuous(f"beta[{xi_hat}]", -math.inf, math.inf)
            for xi_hat in amb.empirical.support_points}

    model.add_objective_term(alpha, amb.radius)
    for xi_hat, p in amb.empirical.atoms():
        model.add_objective_term(beta[xi_hat], p)

    for xi in amb.grid.values:
        for xi_hat in amb.empirical.support_points:
            terms = [(alpha, float(abs(xi_hat - xi)))] if xi_hat != xi else []
            terms.append((beta[xi_hat], 1.0))
            terms += [(yt, -schedule.airborne_cost) for yt in queue_cost[xi]]
            model.add_row(terms, SENSE_GE, 0.0, name=f"dual[{xi},{xi_hat}]")

    _add_assignment_rows(model, schedule, x)
    _add_coupling_rows(model, schedule, x)
    return model.freeze()


def build_dr_maghp(
    net: NetworkInstance,
    *,
    zero_terminal_queue: bool = False,
    alpha_cap: float | None = None,
) -> MilpModel:
    """Multi-airport robust model: one dr block per airport, shared coupling.

    Every airport contributes its own queue blocks, budget multiplier
    ``alpha[z]`` and scenario multipliers ``beta[z,s]``; the objective sums
    the per-airport robust terms (radii may differ per airport, the shared
    radius of the single-epsilon formulation being the special case).
    Connections may span airports.
    """
    schedule = net.schedule
    _require_valid(schedule)
    model = MilpModel()
    x = _add_assignment_vars(model, schedule)
    _add_ground_objective(model, schedule, x)

    for z in net.airports:
        amb = net.ambiguities[z]
        flights = [f for f in schedule.flights if f.airport == z]
        queue_vars: dict[int, list[VariableRef]] = {}
        for xi in amb.grid.values:
            queue_vars[xi] = _add_queue_block(
                model, schedule, x, flights, xi, f"{z},{xi}", zero_terminal_queue)
        alpha = model.add_continuous(f"alpha[{z}]", 0.0, math.inf if alpha_cap is None else alpha_cap)
        beta = {xi_hat: model.add_continuous(f"beta[{z},{xi_hat}]", -math.inf, math.inf)
                for xi_hat in amb.empirical.support_points}
        model.add_objective_term(alpha, amb.radius)
        for xi_hat, p in amb.empirical.atoms():
            model.add_objective_term(beta[xi_hat], p)
        for xi in amb.grid.values:
            for xi_hat in amb.empirical.support_points:
                terms = [(alpha, float(abs(xi_hat - xi)))] if xi_hat != xi else []
                terms.append((beta[xi_hat], 1.0))
                terms += [(yt, -schedule.airborne_cost) for yt in queue_vars[xi]]
                model.add_row(terms, SENSE_GE, 0.0, name=f"dual[{z},{xi},{xi_hat}]")

    _add_assignment_rows(model, schedule, x)
    _add_coupling_rows(model, schedule, x)
    return model.freeze()


def extract_policy(model: MilpModel, sol: Solution, schedule: FlightSchedule) -> GroundHoldingPolicy:
    """Read the slot assignment out of an optimal solution.

    Each flight must have exactly one ``x[f,t]`` above 0.5; anything else
    signals an integrality failure.  The recomputed ground cost is checked
    against the solution's first-stage objective part within 1e-6.
    """
    if sol.status != "optimal":
        raise ValueError(f"cannot extract a policy from a {sol.status!r} solution")
    chosen: dict[str, list[int]] = {f.id: [] for f in schedule.flights}
    first_stage = model.objective_offset
    for j, defn in enumerate(model.variables):
        if not defn.name.startswith("x["):
            continue
        fid, _, slot = defn.name[2:-1].rpartition(",")
        value = float(sol.values[j])
        first_stage += model.objective_coefficient(j) * value
        if value > 0.5:
            if fid not in chosen:
                raise PolicyExtractionError(f"solution variable {defn.name!r} has no flight in schedule")
            chosen[fid].append(int(slot))

    assignments: dict[str, int] = {}
    delays: dict[str, int] = {}
    ground_cost = 0.0
    for f in schedule.flights:
        slots = chosen[f.id]
        if len(slots) != 1:
            raise PolicyExtractionError(
                f"flight {f.id!r} has {len(slots)} active slots; expected exactly one")
        t = slots[0]
        assignments[f.id] = t
        delays[f.id] = t - f.scheduled_arrival
        ground_cost += f.ground_cost * (t - f.scheduled_arrival)

    if abs(ground_cost - first_stage) > 1e-6:
        raise PolicyExtractionError(
            f"recomputed ground cost {ground_cost} disagrees with the solution's "
            f"first-stage objective {first_stage}")
    return GroundHoldingPolicy(assignments, delays, ground_cost)


def check_policy(policy: GroundHoldingPolicy, schedule: FlightSchedule) -> list[Violation]:
    """Policy-against-schedule invariants: slot windows, cost, coupling."""
    out: list[Violation] = []
    T = schedule.horizon.num_slots
    cost = 0.0
    for f in schedule.flights:
        t = policy.assignments.get(f.id)
        if t is None:
            out.append(Violation("missing-assignment", f"flight {f.id!r} has no assigned slot"))
            continue
        if t < f.scheduled_arrival or t > T:
            out.append(Violation(
                "slot-out-of-window", f"flight {f.id!r} assigned {t}, window {f.scheduled_arrival}..{T}"))
        cost += f.ground_cost * (t - f.scheduled_arrival)
    if abs(cost - policy.ground_cost) > 1e-6:
        out.append(Violation(
            "ground-cost-mismatch", f"stated {policy.ground_cost}, assignments imply {cost}"))
    for c in schedule.connections:
        d1 = policy.ground_delays.get(c.predecessor)
        d2 = policy.ground_delays.get(c.successor)
        if d1 is None or d2 is None:
            continue
        if d1 - c.slack > d2:
            out.append(Violation(
                "coupling-violated",
                f"{c.predecessor!r} delay {d1} exceeds slack {c.slack} over {c.successor!r} delay {d2}"))
    return out


@dataclass(frozen=True)
class DrDiagnostics:
    """Pieces of a solved robust model needed for primal-dual verification.

    ``second_stage_costs`` maps each grid value to the realized airborne cost
    ``sum_t C_h * y[xi,t]``; ``dual_term`` is ``epsilon * alpha + sum_s p_s
    beta_s``, the robust part of the objective.
    """

    alpha: float
    beta: dict[int, float]
    second_stage_costs: dict[int, float]
    dual_term: float


def dr_diagnostics(model: MilpModel, sol: Solution, amb: AmbiguitySpec,
                   schedule: FlightSchedule) -> DrDiagnostics:
    """Extract ``alpha``, ``beta`` and per-grid-value airborne costs from a
    solved single-airport robust model."""
    if sol.status != "optimal":
        raise ValueError(f"diagnostics need an optimal solution, got {sol.status!r}")
    alpha = 0.0
    beta: dict[int, float] = {}
    costs: dict[int, float] = {xi: 0.0 for xi in amb.grid.values}
    for j, defn in enumerate(model.variables):
        name = defn.name
        if name == "alpha":
            alpha = float(sol.values[j])
        elif name.startswith("beta["):
            beta[int(name[5:-1])] = float(sol.values[j])
        elif name.startswith("y["):
            xi_text, _, _ = name[2:-1].rpartition(",")
            costs[int(xi_text)] += schedule.airborne_cost * float(sol.values[j])
    dual_term = amb.radius * alpha + sum(
        p * beta[xi_hat] for xi_hat, p in amb.empirical.atoms())
    return DrDiagnostics(alpha, beta, costs, dual_term)
