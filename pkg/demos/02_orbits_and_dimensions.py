"""Quantum orbits, Mor-space ranks and minimal projections.

The spans of homomorphism matrices form the intertwiner spaces
Mor(n, m).  Their exact rational ranks recover the quantum orbit
structure of a graph, and the minimal projections at square arities
carry left and right dimensions whose ratio is the modular scaling.
"""

from qgs import morspace as ms
from qgs.graphs import cycle_graph, path_graph

for name, g in (("P3", path_graph(3)), ("C4", cycle_graph(4))):
    orb = ms.quantum_orbits(g, category="all")
    print("%s: quantum orbits %s (compact=%s, matches classical Aut "
          "orbits: %s)" % (name, orb.classes, orb.compact,
                           orb.matches_classical))
    b = ms.generate_mor(g, 1, 1, category="planar")
    print("  Mor(1,1) rank:", b.rank)
    for p in ms.minimal_projections(b):
        print("  atom on block %s: d_left=%s d_right=%s rho=%s exact=%s"
              % (p.block, p.d_left, p.d_right, p.rho, p.exact))
