"""
Driving the competitive ratio up with a gadget
==============================================

Take a base graph, build a sparse high-girth companion (each edge becomes k
vertex-disjoint paths of k unit edges), and overlay the two.  Per edge the
gadget has the same effective resistance as the edge it replaces, so
electrically the union is just a doubled graph and every demand splits its
current evenly between the layers.  Congestion-wise the layers are very
different: the gadget's long paths get half the current at k times the
length, so the l1 cost, and with it rho_inf, grows linearly in k.
"""

import numpy as np

from ohmlab import (
    competitive_ratio_inf,
    conductance_bounds,
    demand_fraction,
    effective_resistance,
    gadget_subdivide,
    girth,
    graph_union,
    random_regular,
    route_electrical,
)

base = random_regular(10, 3, seed=1)
rho_base = competitive_ratio_inf(base)
print(f"base: n={base.n} m={base.m} girth={girth(base):.0f} rho_inf={rho_base:.4f}")

print("\n   k     n_union  girth(gadget)  rho_inf   base share  phi upper")
for k in (1, 2, 3, 4, 5):
    gad = gadget_subdivide(base, k)
    u = graph_union(base, gad)
    rho = competitive_ratio_inf(u)

    # Fraction of a pair demand's current carried by the base layer.
    chi = np.zeros(u.n)
    chi[int(base.tails[0])], chi[int(base.heads[0])] = 1.0, -1.0
    f = route_electrical(u, chi)
    share = demand_fraction(u, f, chi, np.arange(base.m))

    _, upper = conductance_bounds(u)
    print(f"  {k:2d}  {u.n:10d}  {girth(gad):13.0f}  {rho:8.4f}  "
          f"{share:10.4f}  {upper.phi:9.4f}")

# The share column sits at exactly one half for every k: resistance parity
# between the layers is what the gadget construction buys.  Meanwhile
# rho_inf tracks (1 + k)/2 times the base ratio.
print("\npredicted rho_inf = rho_base * (1 + k) / 2:")
for k in (1, 2, 3, 4, 5):
    print(f"  k={k}: {rho_base * (1 + k) / 2:.4f}")

# Resistance across an original edge is unchanged by adding layers, up to
# the factor-2 drop from doubling.
u = graph_union(base, gadget_subdivide(base, 4))
a, b = int(base.tails[0]), int(base.heads[0])
print(f"\nR_eff({a},{b}): base {effective_resistance(base, a, b):.4f}, "
      f"union {effective_resistance(u, a, b):.4f}")
