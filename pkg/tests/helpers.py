"""Shared instance factories for the test suite."""

from __future__ import annotations

import random

import groundhold as gh


def one_flight_schedule(airborne_cost: float = 2.0) -> gh.FlightSchedule:
    """The hand-checked single-flight instance: r=1, T=2, C_f=1."""
    return gh.FlightSchedule(
        gh.TimeHorizon(2),
        (gh.Flight("f1", "A", 1, 1.0),),
        (),
        airborne_cost,
    )


def one_flight_ambiguity(epsilon: float) -> gh.AmbiguitySpec:
    """Point mass at capacity 1 with grid {0, 1}."""
    return gh.AmbiguitySpec(
        gh.CapacityDistribution((1,), (1.0,)),
        epsilon,
        gh.SupportGrid((0, 1)),
    )


def two_flight_schedule(horizon: int = 3, airborne_cost: float = 2.0) -> gh.FlightSchedule:
    """Two unit-cost flights both scheduled at slot 1."""
    return gh.FlightSchedule(
        gh.TimeHorizon(horizon),
        (gh.Flight("f1", "A", 1, 1.0), gh.Flight("f2", "A", 1, 1.0)),
        (),
        airborne_cost,
    )


def random_instance(
    rng: random.Random,
    max_flights: int = 4,
    max_slots: int = 6,
    max_atoms: int = 3,
    connect_prob: float = 0.4,
) -> tuple[gh.FlightSchedule, gh.CapacityDistribution]:
    """Small random single-airport instance with generic (tie-free) costs."""
    T = rng.randint(2, max_slots)
    nf = rng.randint(1, max_flights)
    flights = tuple(
        gh.Flight(f"f{i}", "A", rng.randint(1, T), round(rng.uniform(0.5, 3.0), 2))
        for i in range(nf)
    )
    connections = []
    if nf >= 2 and rng.random() < connect_prob:
        i, j = rng.sample(range(nf), 2)
        connections.append(gh.ConnectionPair(f"f{i}", f"f{j}", rng.randint(0, 2)))
    schedule = gh.FlightSchedule(
        gh.TimeHorizon(T), flights, tuple(connections), round(rng.uniform(3.0, 6.0), 2))

    n_atoms = rng.randint(1, max_atoms)
    support = tuple(sorted(rng.sample(range(0, 5), n_atoms)))
    counts = [rng.randint(1, 5) for _ in support]
    total = sum(counts)
    dist = gh.CapacityDistribution(support, tuple(c / total for c in counts))
    return schedule, dist


def random_distribution(rng: random.Random, max_atoms: int = 4, span: int = 9) -> gh.DiscreteDistribution:
    n = rng.randint(1, max_atoms)
    values = rng.sample(range(span + 1), n)
    counts = [rng.randint(1, 5) for _ in values]
    total = sum(counts)
    return gh.DiscreteDistribution(tuple((v, c / total) for v, c in zip(values, counts)))
