"""
Routing a single demand electrically
====================================

Build a small graph, push one unit of current between two vertices, and
look at the flow the resistor network chooses.
"""

import numpy as np

from ohmlab import (
    Multigraph,
    effective_resistance,
    flow_energy,
    route_electrical,
    solve_laplacian,
)

# A 4-cycle with one chord.  Edge order fixes the sign convention: flow is
# positive tail -> head.
g = Multigraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
print(f"graph: n={g.n}, m={g.m}")

# Demands are plain vectors summing to zero: +1 where current enters, -1
# where it leaves.
chi = np.zeros(g.n)
chi[0], chi[2] = 1.0, -1.0
f = route_electrical(g, chi)
v = solve_laplacian(g, chi).solution

print("\nedge  tail head  flow")
for e in range(g.m):
    print(f"{e:4d}  {g.tails[e]:4d} {g.heads[e]:4d}  {f[e]:+.6f}")

# Conservation: the flow meets the demand exactly (up to solver tolerance).
div = np.zeros(g.n)
np.add.at(div, g.tails, -f)
np.add.at(div, g.heads, f)
print(f"\nmax conservation error: {np.max(np.abs(div - chi)):.2e}")

# Energy, effective resistance, and the voltage gap all agree for a unit
# pair demand.
print(f"energy          {flow_energy(g, f):.6f}")
print(f"R_eff(0, 2)     {effective_resistance(g, 0, 2):.6f}")
print(f"v[0] - v[2]     {v[0] - v[2]:.6f}")

# The chord carries the most current: it is the shortest path in the
# resistance metric.  Removing it would force everything around the cycle.
chord = np.argmax(np.abs(f))
print(f"\nbusiest edge: {chord} ({g.tails[chord]}, {g.heads[chord]})")
