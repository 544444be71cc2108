"""
Sliding tableaux by moving their values
=======================================

A valued tableau is slid by letting its entries move continuously. When
two norms cross, the entries either swap boxes or stay put.
"""

from fractions import Fraction as F

from wronski_jdt.jdt import ValuePath, rectify, slide_along, switch
from wronski_jdt.partitions import RectBound
from wronski_jdt.tableaux import ValuedTableau, ordinalize, restrict

b = RectBound(3, 7)
T = ValuedTableau.from_grid(
    [[None, 5, -7, -16], [1, -10, -13, -22], [2, -19]],
    b,
)
print("T:\n", T)

# the positive part and the negative part, switched past each other
small = restrict(T, [F(1), F(2), F(5)])
big = restrict(T, [F(v) for v in (-7, -10, -13, -16, -19, -22)])
slid_big, slid_small = switch(big, small)
print("negative part after the switch:\n", slid_big)
print("positive part after the switch:\n", slid_small)

# raising one entry past its neighbour in the same column moves it down
vals = T.values()
k = vals.index(1)
end, events = slide_along(T, ValuePath.moves(vals, [(k, F(3))]))
for e in events:
    print(f"t={e.t}: labels {e.label_a},{e.label_b} adjacent={e.adjacent} swapped={e.swapped}")

print("rectification of the negative part:\n", ordinalize(rectify(big)))
