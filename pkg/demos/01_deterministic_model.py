"""Deterministic ground holding: hard per-slot capacity.

Five flights want to land during a four-slot horizon at an airport that can
take two arrivals per slot.  The model picks the cheapest slots to push
flights into, respecting a connection between f2 and f4.
"""

import groundhold as gh

schedule = gh.FlightSchedule(
    horizon=gh.TimeHorizon(4),
    flights=(
        gh.Flight("f1", "ATL", 1, 3.0),
        gh.Flight("f2", "ATL", 1, 1.0),
        gh.Flight("f3", "ATL", 1, 2.0),
        gh.Flight("f4", "ATL", 2, 1.5),
        gh.Flight("f5", "ATL", 2, 0.5),
    ),
    connections=(gh.ConnectionPair("f2", "f4", 1),),
    airborne_cost=8.0,
)
assert gh.validate_schedule(schedule) == []

print("slot demand before optimization:")
for t in schedule.horizon.slots():
    waiting = [f.id for f in schedule.flights if f.scheduled_arrival == t]
    print(f"  slot {t}: {', '.join(waiting) or '-'}")

model = gh.build_d_saghp(schedule, capacity=2)
print(f"\nmodel: {model.num_variables} variables, {model.num_constraints} constraints")

solution = gh.solve_milp(model)
policy = gh.extract_policy(model, solution, schedule)
print(f"optimal ground cost: {solution.objective:.2f} "
      f"({solution.nodes} nodes, {solution.pivots} pivots)")
for fid, slot in policy.assignments.items():
    delay = policy.ground_delays[fid]
    note = f"held {delay} slot(s)" if delay else "on time"
    print(f"  {fid}: lands slot {slot} ({note})")

# the same model in fixed-format MPS, ready for an external solver cross-check
mps = gh.export_mps(model)
print("\nfirst MPS lines:")
for line in mps.splitlines()[:6]:
    print(" ", line)
