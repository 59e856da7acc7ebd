"""
Eliminating vertices and rounding extensions
============================================

Gaussian elimination of a vertex set F from a Laplacian leaves a smaller
Laplacian on the terminals C that answers the same boundary questions: the
Schur complement.  This script eliminates the interior of a path, then
compares the two natural ways of filling in values on F given 0/1 values
on C: the harmonic extension (minimizes energy) and the l1-optimal
extension (a min-cut, always achieved by 0/1 values).
"""

import numpy as np

from ohmlab import (
    Multigraph,
    Partition,
    discretize_minimizer,
    expected_cut_l1,
    extension_energy,
    harmonic_extension,
    l1_objective,
    min_l1_extension,
    path_graph,
    schur_edge_weights,
)

# Eliminating the middle of a 3-path leaves a single edge whose weight is
# the series formula 1/(1/1 + 1/1).
g = path_graph(3)
part = Partition.from_eliminated(3, [1])
print(f"path 0-1-2, eliminate 1: schur weights {schur_edge_weights(g, part)}")

# A less trivial instance: a 6-vertex graph, eliminate three vertices.
g = Multigraph.from_edges(
    6,
    [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4, 2.0)],
)
part = Partition.from_eliminated(6, [1, 3, 5])
print(f"\nterminals {part.terminals.tolist()}, eliminated {part.eliminated.tolist()}")
for pair, w in sorted(schur_edge_weights(g, part).items()):
    print(f"  schur edge {pair}: {w:.6f}")

# Boundary values 1, 0, 0 on the terminals.  Harmonic extension lands
# strictly inside [0, 1]; the l1 minimizer snaps to a cut.
x = np.array([1.0, 0.0, 0.0])
yh = harmonic_extension(g, part, x)
val, yc = min_l1_extension(g, part, x)
print(f"\nboundary x = {x.tolist()}")
print(f"harmonic   y = {np.round(yh, 6).tolist()}  "
      f"energy {extension_energy(g, part, x, yh):.6f}  "
      f"l1 {l1_objective(g, part, x, yh):.6f}")
print(f"l1-optimal y = {yc.tolist()}  l1 {val:.6f}")

# Threshold rounding connects the two: picking t uniform in (0, 1) and
# cutting {x >= t} gives an expected cut weight equal to the l1 objective,
# so some threshold of the harmonic extension does at least as well as its
# own l1 value, and the discretizer finds it.
closed, integrated = expected_cut_l1(g, np.concatenate([x, yh])[np.argsort(
    np.concatenate([part.terminals, part.eliminated]))])
print(f"\nexpected threshold cut of harmonic profile: {closed:.6f} "
      f"(integrated {integrated:.6f})")
yd = discretize_minimizer(g, part, x, yc)
print(f"discretized minimizer: {yd.tolist()} "
      f"l1 {l1_objective(g, part, x, yd):.6f}")
