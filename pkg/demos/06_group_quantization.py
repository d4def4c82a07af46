"""Quantizing a discrete group through its Cayley graph.

For a group with a finite symmetric generating set, the relation
vectors xi_n are supported on length-n generator words multiplying to
the identity, and the fiber matrices R^K of path-labeled bi-labeled
graphs act on them.  The span ranks at small arities match the count
of noncrossing partitions into even blocks.
"""

from qgs import quantization as qz
from qgs import graphs as G

spec = G.free_product_cyclic_group([2, 2, 2, 2])
print("group: free product of four copies of Z/2")

for rs in qz.relation_vectors(spec, 4):
    print("  xi_%d support size %d" % (rs.n, len(rs.support)))

for (n, m) in ((1, 1), (2, 2)):
    r = qz.fiber_span_rank(spec, n, m)
    print("fiber span rank at (%d, %d): %d (examined %d members)"
          % (n, m, r["rank"], r["members_examined"]))
print("noncrossing even-block partition counts of 2, 4, 6 points:",
      [qz.noncrossing_even_count(k) for k in (2, 4, 6)])

# a fiber matrix of a split cycle over the integers
z = G.integers_group()
k = qz.split_cycle(2, 0)
fm = qz.fiber_matrix(k, z)
print("\nsplit cycle (2,0) over Z: rows %s, entries %s"
      % (fm.row_names, fm.entries))
