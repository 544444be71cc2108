"""
Monodromy is jeu de taquin
==========================

Loops of root configurations permute the fiber. The permutation is read off
the labels and compared with the combinatorial prediction.
"""

import numpy as np

from wronski_jdt.jdt import evacuation_step, s_kL
from wronski_jdt.partitions import RectBound
from wronski_jdt.tableaux import ordinalize
from wronski_jdt.tracker import (
    expected_perm,
    label_point,
    loop_rotation,
    loop_skl,
    monodromy,
    predict_slide,
    random_real_path,
    separated_roots,
    solve_base_fiber,
    track,
)

b = RectBound(2, 5)
roots = separated_roots(b)
base = solve_base_fiber(b, roots)
names = {i: f"T{i + 1}" for i in range(len(base))}
for i, q in enumerate(base):
    print(names[i], ordinalize(q.label).as_dict())

for k in range(1, b.N):
    for L in (2, 3):
        got = monodromy(loop_skl(roots, k, L, b), base).perm
        want = expected_perm(base, lambda T: s_kL(T, k, L))
        print(f"s_({k},{L}): tracked {got}  predicted {want}")

got = monodromy(loop_rotation(roots), base).perm
print("rotation loop:", got, "evacuation:", expected_perm(base, evacuation_step))

# an open real path: labels at the end agree with sliding
rng = np.random.default_rng(4)
path = random_real_path(rng, roots, 1e3)
ends, report = track(path, base)
agree = all(label_point(e, path.end()) == predict_slide(q.label, path)[0] for q, e in zip(base, ends))
print(f"random real path: {report.steps} steps, labels agree with sliding: {agree}")
