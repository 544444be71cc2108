"""Small exact-arithmetic helpers shared by the algebraic modules."""

from __future__ import annotations

from fractions import Fraction
from typing import Any


def determinant(M: list[list]):
    """Gaussian elimination; exact for Fractions, partial pivoting otherwise."""
    A = [list(r) for r in M]
    n = len(A)
    det: Any = Fraction(1)
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(A[r][c]))
        if A[piv][c] == 0:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f != 0:
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det
