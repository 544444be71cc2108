"""Polynomial subspaces, their Pluckers and Wronskians, and the SL2 action.

Coefficient lists are lowest degree first. Exact work uses ``Fraction``;
numerical work uses ``complex``. A point of the Grassmannian is a
:class:`SubspaceBasis`; its Plucker vector is indexed by partitions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._exact import determinant
from .partitions import Partition, RectBound, all_partitions, column_set, partition_of_columns, partitions_of_size, q_weight
from .tableaux import INF, is_inf


@dataclass(frozen=True)
class Poly:
    """Polynomial of degree at most ``m``; ``coeffs[i]`` multiplies ``z**i``."""

    coeffs: tuple
    m: int

    def __post_init__(self) -> None:
        c = tuple(self.coeffs)
        if len(c) > self.m + 1:
            if any(x != 0 for x in c[self.m + 1 :]):
                raise ValueError(f"degree exceeds bound {self.m}")
            c = c[: self.m + 1]
        c = c + (0,) * (self.m + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def of(cls, coeffs: Iterable, m: int | None = None) -> "Poly":
        c = tuple(Fraction(x) if isinstance(x, (int, str)) else x for x in coeffs)
        return cls(c, len(c) - 1 if m is None else m)

    def degree(self) -> int:
        """Actual degree; -1 for the zero polynomial."""
        for i in range(self.m, -1, -1):
            if self.coeffs[i] != 0:
                return i
        return -1

    def is_zero(self) -> bool:
        return self.degree() < 0

    def __call__(self, z):
        out = 0
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def __add__(self, other: "Poly") -> "Poly":
        m = max(self.m, other.m)
        a = self.coeffs + (0,) * (m - self.m)
        b = other.coeffs + (0,) * (m - other.m)
        return Poly(tuple(x + y for x, y in zip(a, b)), m)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-x for x in self.coeffs), self.m)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(tuple(x * other for x in self.coeffs), self.m)
        out = [0] * (self.m + other.m + 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Poly(tuple(out), self.m + other.m)

    __rmul__ = __mul__

    def derivative(self) -> "Poly":
        if self.m == 0:
            return Poly((0,), 0)
        return Poly(tuple(i * self.coeffs[i] for i in range(1, self.m + 1)), self.m - 1)

    def reflect(self) -> "Poly":
        """``f(-z)``."""
        return Poly(tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)), self.m)

    def to_json(self) -> list:
        return [_num_json(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)}, m={self.m})"


def _num_json(c):
    if isinstance(c, (Fraction, int)):
        return str(Fraction(c))
    c = complex(c)
    return [c.real, c.imag]


class SubspaceBasis:
    """``d`` polynomials of degree below ``n``, i.e. a ``d x n`` coefficient matrix."""

    def __init__(self, rows: Iterable[Iterable], n: int):
        self.n = int(n)
        self.rows = [tuple(_coerce(x) for x in r) + (0,) * (self.n - len(tuple(r))) for r in rows]
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("each row needs at most n coefficients")
        self.d = len(self.rows)
        self.bound = RectBound(self.d, self.n)

    @classmethod
    def from_polys(cls, polys: Iterable[Poly], n: int) -> "SubspaceBasis":
        return cls([p.coeffs for p in polys], n)

    @classmethod
    def from_matrix(cls, A) -> "SubspaceBasis":
        A = np.asarray(A)
        return cls([list(row) for row in A], A.shape[1])

    def polys(self) -> list[Poly]:
        return [Poly(r, self.n - 1) for r in self.rows]

    def matrix(self, dtype=complex) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=dtype)

    def is_exact(self) -> bool:
        return all(isinstance(x, (Fraction, int)) for r in self.rows for x in r)

    def rank(self) -> int:
        if self.is_exact():
            return _exact_rank(self.rows)
        return int(np.linalg.matrix_rank(self.matrix()))

    def __repr__(self) -> str:
        return f"SubspaceBasis({self.rows}, n={self.n})"


def _coerce(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, np.generic):
        return complex(x)
    return x


def _exact_rank(rows) -> int:
    A = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((r for r in range(rank, len(A)) if A[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(len(A)):
            if r != rank and A[r][col] != 0:
                f = A[r][col] / A[rank][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        rank += 1
        col += 1
    return rank


class RankDeficient(ValueError):
    pass


def _require_rank(b: SubspaceBasis) -> None:
    if b.rank() < b.d:
        raise RankDeficient("basis does not have rank d")


def wronskian_det(b: SubspaceBasis) -> Poly:
    """Determinant of the matrix of derivatives ``f_j^{(i)}``, expanded over permutations."""
    _require_rank(b)
    d, N = b.d, b.bound.N
    derivs = []
    for f in b.polys():
        col = [f]
        for _ in range(d - 1):
            col.append(col[-1].derivative())
        derivs.append(col)
    total = Poly((0,), 0)
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        term = Poly((sign,), 0)
        for i, j in enumerate(perm):
            term = term * derivs[j][i]
        total = total + term
    if total.degree() > N:
        raise AssertionError("Wronskian degree exceeds N")
    return Poly(total.coeffs[: N + 1], N)


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


class PluckerVector(dict):
    """Map partition -> coordinate, defined up to a global scalar."""

    def __init__(self, data: Mapping[Partition, Any], bound: RectBound):
        super().__init__(data)
        self.bound = bound
        for lam in all_partitions(bound):
            self.setdefault(lam, 0)

    def normalized(self) -> "PluckerVector":
        """Scaled so the largest coordinate has modulus 1 (and that one is real positive)."""
        top = max(self.values(), key=abs)
        if top == 0:
            raise ValueError("zero Plucker vector")
        return PluckerVector({k: v / top for k, v in self.items()}, self.bound)

    def array(self) -> np.ndarray:
        return np.array([complex(self[lam]) for lam in all_partitions(self.bound)])

    def by_columns(self, cols) -> Any:
        """Coordinate of an arbitrary ordered column tuple, with the permutation sign."""
        cols = tuple(cols)
        if len(set(cols)) < len(cols):
            return 0
        order = sorted(range(len(cols)), key=lambda i: cols[i])
        sign = _perm_sign(order)
        return sign * self[partition_of_columns(self.bound, cols)]

    def to_json(self) -> list:
        return [{"partition": list(k.parts), "value": _num_json(v)} for k, v in self.items()]


def plucker_of_basis(b: SubspaceBasis) -> PluckerVector:
    _require_rank(b)
    out = {}
    exact = b.is_exact()
    M = b.matrix() if not exact else None
    for lam in all_partitions(b.bound):
        cols = [j - 1 for j in column_set(lam)]
        if exact:
            out[lam] = determinant([[r[j] for j in cols] for r in b.rows])
        else:
            out[lam] = complex(np.linalg.det(M[:, cols]))
    return PluckerVector(out, b.bound)


def wronskian_plucker(p: Mapping[Partition, Any], bound: RectBound | None = None) -> Poly:
    """``sum_lam q_lam p_lam z^{|lam|}``."""
    bound = bound or getattr(p, "bound", None) or next(iter(p)).bound
    coeffs: list = [Fraction(0)] * (bound.N + 1)
    for lam, v in p.items():
        coeffs[lam.size] = coeffs[lam.size] + q_weight(lam) * v
    return Poly(tuple(coeffs), bound.N)


def proportional(f: Poly, g: Poly, tol: float = 0.0) -> bool:
    """Whether ``f = c g`` for a nonzero scalar ``c``; exact when ``tol == 0``."""
    a, b = f.coeffs, g.coeffs
    m = max(len(a), len(b))
    a = a + (0,) * (m - len(a))
    b = b + (0,) * (m - len(b))
    i = max(range(m), key=lambda k: abs(b[k]))
    if b[i] == 0 or a[i] == 0:
        return False
    c = a[i] / b[i]
    if tol == 0:
        return all(x == c * y for x, y in zip(a, b))
    scale = max(abs(x) for x in a)
    return all(abs(x - c * y) <= tol * scale for x, y in zip(a, b))


# -- roots -------------------------------------------------------------------


class RootMultiset(list):
    """``N`` points of the extended complex line; ``INF`` marks infinity."""

    def finite(self) -> list[complex]:
        return [x for x in self if not is_inf(x)]

    def n_inf(self) -> int:
        return sum(1 for x in self if is_inf(x))

    def close_to(self, other: Iterable, tol: float = 1e-8) -> bool:
        return multiset_distance(self, list(other)) <= tol


def chordal(a, b) -> float:
    """Chordal distance on the Riemann sphere."""
    if is_inf(a) and is_inf(b):
        return 0.0
    if is_inf(a):
        return 2.0 / math.sqrt(1 + abs(complex(b)) ** 2)
    if is_inf(b):
        return 2.0 / math.sqrt(1 + abs(complex(a)) ** 2)
    a, b = complex(a), complex(b)
    return 2 * abs(a - b) / math.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


def multiset_distance(A: list, B: list) -> float:
    """Bottleneck-free matching cost: max chordal distance under the best assignment."""
    if len(A) != len(B):
        return math.inf
    if not A:
        return 0.0
    C = np.array([[chordal(a, b) for b in B] for a in A])
    r, c = linear_sum_assignment(C)
    return float(C[r, c].max())


def poly_roots(f: Poly, N: int, rel_tol: float = 1e-12, cluster: float = 1e-6) -> RootMultiset:
    """Roots of ``f`` padded with infinity to ``N``; nearby roots are merged to their mean."""
    c = np.array([complex(x) for x in f.coeffs])
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        raise ValueError("zero polynomial has no root multiset")
    c = c / scale
    deg = max(i for i in range(len(c)) if abs(c[i]) > rel_tol)
    roots = list(np.roots(c[: deg + 1][::-1])) if deg > 0 else []
    roots = _cluster(roots, cluster)
    return RootMultiset(roots + [INF] * (N - len(roots)))


def _cluster(roots: list, radius: float) -> list:
    out = list(roots)
    groups: list[list[int]] = []
    used = set()
    for i in range(len(out)):
        if i in used:
            continue
        g = [i]
        used.add(i)
        for j in range(i + 1, len(out)):
            if j not in used and abs(out[i] - out[j]) <= radius * max(1.0, abs(out[i])):
                g.append(j)
                used.add(j)
        groups.append(g)
    res = []
    for g in groups:
        mean = sum(out[k] for k in g) / len(g)
        res.extend([complex(mean)] * len(g))
    return res


def roots_multiset(x: SubspaceBasis | Mapping, cluster: float = 1e-6) -> RootMultiset:
    """``pi(x)``: the roots of ``Wr(x; -z)`` padded with infinity."""
    if isinstance(x, SubspaceBasis):
        W = wronskian_det(x) if x.is_exact() else wronskian_plucker(plucker_of_basis(x), x.bound)
        N = x.bound.N
    else:
        W = wronskian_plucker(x)
        N = next(iter(x)).bound.N
    return poly_roots(W.reflect(), N, cluster=cluster)


def poly_from_roots(a: Iterable, N: int):
    """Coefficients (lowest first, length ``N+1``) of ``prod (z + a_i)`` over finite ``a_i``.

    Entries equal to infinity only lower the degree.
    """
    coeffs: list = [1]
    for r in a:
        if is_inf(r):
            continue
        coeffs = [0] + coeffs
        for i in range(len(coeffs) - 1):
            coeffs[i] += r * coeffs[i + 1]
    if len(coeffs) > N + 1:
        raise ValueError("more finite roots than N")
    return coeffs + [0] * (N + 1 - len(coeffs))


# -- SL2 --------------------------------------------------------------------


@dataclass(frozen=True)
class Mobius:
    """``((a11, a12), (a21, a22))`` with determinant one."""

    m11: Any
    m12: Any
    m21: Any
    m22: Any

    def __post_init__(self) -> None:
        det = self.m11 * self.m22 - self.m12 * self.m21
        ok = det == 1 if _all_exact(self) else abs(det - 1) <= 1e-10
        if not ok:
            raise ValueError(f"determinant is {det}, not 1")

    @classmethod
    def of(cls, rows) -> "Mobius":
        (a, b), (c, d) = rows
        return cls(*(_coerce(x) for x in (a, b, c, d)))

    @classmethod
    def translation(cls, t) -> "Mobius":
        """``w -> w + t``."""
        return cls(Fraction(1), _coerce(t), Fraction(0), Fraction(1))

    @classmethod
    def inversion(cls) -> "Mobius":
        """``w -> -1/w``, sending infinity to 0."""
        return cls(Fraction(0), Fraction(1), Fraction(-1), Fraction(0))

    @classmethod
    def sending_to_zero(cls, a) -> "Mobius":
        return cls.inversion() if is_inf(a) else cls.translation(-a)

    def inverse(self) -> "Mobius":
        return Mobius(self.m22, -self.m12, -self.m21, self.m11)

    def __matmul__(self, o: "Mobius") -> "Mobius":
        return Mobius(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )

    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)


def _all_exact(phi: Mobius) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in (phi.m11, phi.m12, phi.m21, phi.m22))


def _apply_value(phi: Mobius, w):
    if is_inf(w):
        return INF if phi.m21 == 0 else phi.m11 / phi.m21
    den = phi.m21 * w + phi.m22
    if den == 0:
        return INF
    return (phi.m11 * w + phi.m12) / den


def _apply_poly(phi: Mobius, f: Poly) -> Poly:
    # (m21 z + m11)^(m - i) (m22 z + m12)^i summed against f's coefficients
    m = f.m
    lin_a = Poly((phi.m11, phi.m21), 1)
    lin_b = Poly((phi.m12, phi.m22), 1)
    total = Poly((0,), m)
    for i, c in enumerate(f.coeffs):
        if c == 0:
            continue
        term = Poly((c,), 0)
        for _ in range(m - i):
            term = term * lin_a
        for _ in range(i):
            term = term * lin_b
        total = total + term
    return Poly(total.coeffs[: m + 1], m)


def mobius_apply(phi: Mobius, target):
    """Act on a point of the extended line, a polynomial, a basis, or a root multiset."""
    if isinstance(target, Poly):
        return _apply_poly(phi, target)
    if isinstance(target, SubspaceBasis):
        return SubspaceBasis.from_polys([_apply_poly(phi, f) for f in target.polys()], target.n)
    if isinstance(target, (list, tuple)):
        return RootMultiset(_apply_value(phi, w) for w in target)
    return _apply_value(phi, target)


# -- Schubert conditions ----------------------------------------------------


def schubert_pattern(p: Mapping[Partition, Any], lam: Partition, tol: float = 1e-8) -> str:
    """``"cell"``, ``"closure"`` or ``"none"`` for membership of ``p`` in ``X_lam(0)``.

    ``p`` is normalized internally; exact vectors are tested with ``== 0``.
    """
    vals = list(p.values())
    exact = all(isinstance(v, (Fraction, int)) for v in vals)
    top = max(abs(v) for v in vals)
    if top == 0:
        raise ValueError("zero Plucker vector")

    def small(v) -> bool:
        return v == 0 if exact else abs(v) / top <= tol

    if any(not small(v) for mu, v in p.items() if not mu >= lam):
        return "none"
    return "closure" if small(p[lam]) else "cell"


def schubert_membership_at(x: SubspaceBasis, a, k: int, tol: float = 1e-8) -> list[Partition]:
    """Partitions ``lam`` of ``k`` with ``x`` in ``X_lam(a)``."""
    phi = Mobius.sending_to_zero(a)
    p = plucker_of_basis(mobius_apply(phi, x))
    return [lam for lam in partitions_of_size(x.bound, k) if schubert_pattern(p, lam, tol) != "none"]


def plucker_relations(p: PluckerVector) -> list:
    """Values of the quadratic Grassmann-Plucker relations."""
    d, n = p.bound.d, p.bound.n
    out = []
    cols = range(1, n + 1)
    for I in itertools.combinations(cols, d - 1):
        for K in itertools.combinations(cols, d + 1):
            s = 0
            for l, k in enumerate(K):
                rest = K[:l] + K[l + 1 :]
                s = s + (-1) ** l * p.by_columns(I + (k,)) * p.by_columns(rest)
            out.append(s)
    return out
