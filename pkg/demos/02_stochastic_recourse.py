"""Two-stage stochastic ground holding: soft capacity via airborne queues.

When capacity is a distribution instead of a constant, the hard per-slot cap
becomes a priced recourse: arrivals beyond the realized capacity enter an
airborne queue that costs more per slot than holding on the ground would
have.  The stochastic model weighs ground holding now against expected
airborne holding later.
"""

import groundhold as gh

schedule = gh.FlightSchedule(
    horizon=gh.TimeHorizon(4),
    flights=(
        gh.Flight("f1", "ATL", 1, 1.0),
        gh.Flight("f2", "ATL", 1, 1.2),
        gh.Flight("f3", "ATL", 2, 0.8),
        gh.Flight("f4", "ATL", 2, 1.1),
    ),
    connections=(),
    airborne_cost=4.0,
)

# an optimistic day (capacity 2) and a degraded day (capacity 1)
empirical = gh.CapacityDistribution((1, 2), (0.3, 0.7))
print(f"empirical capacity: {dict(empirical.atoms())}, mean {empirical.mean():.2f}")

det_model = gh.build_d_saghp(schedule, gh.deterministic_capacity(empirical))
det_sol = gh.solve_milp(det_model)
det_policy = gh.extract_policy(det_model, det_sol, schedule)

sp_model = gh.build_s_saghp(schedule, empirical)
sp_sol = gh.solve_milp(sp_model)
sp_policy = gh.extract_policy(sp_model, sp_sol, schedule)

print(f"\ndeterministic (mean capacity): ground cost {det_policy.ground_cost:.2f}, "
      f"policy {det_policy.summary()}")
print(f"stochastic: objective {sp_sol.objective:.2f} "
      f"(ground {sp_policy.ground_cost:.2f} + expected airborne), "
      f"policy {sp_policy.summary()}")

# score both policies by exact expectation over the empirical support
print("\nexact in-sample total cost (ground + queue recursion):")
for name, policy in (("det", det_policy), ("sp", sp_policy)):
    mean, std = gh.expected_policy_cost(policy, schedule, empirical)
    print(f"  {name}: mean {mean:.3f}, std {std:.3f}")

# the queue recursion that prices a realized capacity, by hand for capacity 1
arrivals = gh.arrivals_from_policy(det_policy, schedule)
cost = gh.second_stage_cost(arrivals, capacity=1, airborne_cost=schedule.airborne_cost)
print(f"\ndet policy against a capacity-1 day: arrivals {arrivals}, "
      f"airborne cost {cost:.2f}")
