"""
Colliding roots and dual equivalence
====================================

Contract the middle roots onto one point. Fiber points whose middle
subtableaux are dual equivalent land on the same limit, and the limit sits
in the Schubert cell of the rectification shape.
"""

import math

from wronski_jdt.jdt import rectify
from wronski_jdt.partitions import RectBound
from wronski_jdt.tableaux import ordinalize, restrict
from wronski_jdt.tracker import compress_fiber, limit_clusters, limit_points, schubert_at, separated_roots, solve_base_fiber

b = RectBound(2, 5)
roots = separated_roots(b)
pts, r3 = compress_fiber(solve_base_fiber(b, roots), roots)
block = [1, 2, 3]
c = math.sqrt(r3[block[0]] * r3[block[-1]])
lims = limit_points(pts, r3, block, c)

for group in limit_clusters(lims):
    print("cluster:")
    for i in group:
        sub = restrict(pts[i].label, [r3[j] for j in block])
        shape = rectify(sub).shape.outer
        print("   ", ordinalize(pts[i].label).as_dict(), "block rectifies to", shape.parts,
              "| limit in X at c:", [p.parts for p in schubert_at(lims[i].point, c, len(block))])
