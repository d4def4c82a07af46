"""The exact Haar functional model on a finite graph.

The left Haar functional phi_e is evaluated through the closed
kernel formula on the column ladder.  This demo checks positivity,
left invariance and the modular relations numerically on C4 and P3.
"""

import random

from qgs import algebra
from qgs.graphs import cycle_graph, path_graph

for name, g in (("C4", cycle_graph(4)), ("P3", path_graph(3))):
    hs = algebra.haar_system(g)
    print("%s: mu weights %s" % (name, dict(hs.mu)))

    rng = random.Random(0)
    worst = 0.0
    for _ in range(30):
        x = {}
        for _ in range(3):
            i = (rng.randrange(g.vertex_count), rng.randrange(
                g.vertex_count))
            j = (rng.randrange(g.vertex_count), rng.randrange(
                g.vertex_count))
            algebra.add_into(x, algebra.word(i, j, rng.choice((1, -1))))
        worst = min(worst, hs.phi_e(algebra.word_mul(
            x, algebra.word_star(x)), 0))
    print("  min phi_e(x* x) over 30 random x:", worst)

    print("  left-invariance residual (words up to length 2):",
          hs.left_invariance_residual(0, n_max=2))

    rep = algebra.delta_checks(g, 0, g.vertex_count - 1)
    print("  modular residual %.2e, base-change residual %.2e, "
          "unimodular: %s" % (rep["modular_residual"],
                              rep["base_change_residual"],
                              rep["unimodular"]))
