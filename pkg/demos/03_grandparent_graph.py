"""The grandparent graph: a non-unimodular infinite example.

The grandparent graph over the d-regular tree with a fixed end is
accessed through a lazy provider; all computations run in guarded
windows (balls around the base vertex).  The square-plus-diagonal
gadget takes one constant value on each of the three edge classes,
and the mu weight doubles from child to parent, so the modular
element is nontrivial.
"""

from qgs import bilabeled as B, hommat as H, morspace as ms
from qgs import graphs as G
from qgs.graphs import FiniteGraph

d = 3
gp = G.grandparent_graph(d)
window = {"radius": 4, "guard": 2}

gadget = B.BiLabeled(FiniteGraph(4, [(0, 1), (1, 3), (3, 2), (2, 0),
                                     (1, 2)]), (0,), (1,))
ball = G.ball(gp, gp.base_vertex, 4)
core = [v for v in ball.keys if ball.distances[v] <= 2]
rows = H.TupleWindow(1, [(v,) for v in core])
cols = H.TupleWindow(1, [(v,) for v in ball.keys])
hm = H.hom_matrix_windowed(gadget, gp, rows, cols)

seen = {}
for v in core:
    for w in gp.neighbors(v):
        seen.setdefault(gp.edge_class(v, w), set()).add(hm.entry((v,), (w,)))
print("gadget values by edge class (d=%d):" % d)
for cls, vals in sorted(seen.items()):
    print("  %-15s %s" % (cls, sorted(vals)))

mu = ms.mu_assignment(gp, window=window)
e = mu.e
parent = gp.parent_key(e)
print("\nmu(%s) = %s, mu(parent %s) = %s, cocycle consistent: %s"
      % (e, mu.mu[e], parent, mu.mu[parent], mu.cocycle_ok))

atoms = ms.minimal_projections(ms.generate_mor(gp, 1, 1, window=window))
print("\nedge atoms and their modular scaling:")
for a in atoms:
    (u, v) = next(iter(a.matrix))[0]
    cls = gp.edge_class(u, v) if u != v else "diagonal"
    print("  %-15s (d_l, d_r) = (%s, %s), rho = %s"
          % (cls, a.d_left, a.d_right, a.rho))
