"""
Fibers of the Wronski map over real roots
=========================================

Over widely separated real roots every fiber point is real and is labelled
by a standard tableau of the rectangle.
"""

import numpy as np

from wronski_jdt.partitions import RectBound, syt_count
from wronski_jdt.tableaux import ordinalize
from wronski_jdt.tracker import label_point, separated_roots, solve_fiber

for d, n in [(2, 4), (2, 5), (3, 6)]:
    b = RectBound(d, n)
    roots = separated_roots(b)
    pts = solve_fiber(b, roots)
    print(f"{d}x{n - d}: {len(pts)} points (hook-length count {syt_count(b.full())})")
    for q in pts[:3]:
        print("   ", ordinalize(label_point(q, roots)).as_dict(), f"residual {q.residual:.1e}")

# any real distinct roots give real points (up to one overall phase)
b = RectBound(2, 5)
rng = np.random.default_rng(1)
roots = list(rng.uniform(-5, 5, size=b.N))
pts = solve_fiber(b, roots)
worst = max(float(np.max(np.abs(q.p.imag))) for q in pts)
print(f"random real roots {np.round(roots, 2)}: largest imaginary part {worst:.1e}")
