"""Leading-order solutions of the fiber equations over Puiseux-type series.

A series ``c u^v + (higher order)`` is represented by the :class:`Jet`
``(c, v)``. Larger valuation means smaller norm, so a tableau of jets is
ordered by ``-val``. Everything here is exact when the coefficients are
``Fraction``; complex or float coefficients are carried through unchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Mapping

from ._exact import determinant
from .partitions import Box, Partition, RectBound, SkewShape, all_partitions, box_distance, q_weight
from .tableaux import ValuedTableau, is_inf, is_zero, norm_key


class UnsupportedTies(ValueError):
    """The tableau has a tie pattern outside the isolated-pair case."""


def _frac(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class Jet:
    """Leading term ``coeff * u**val``; ``val`` is ``+inf`` for 0 and ``-inf`` for infinity."""

    coeff: Any
    val: Any = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", _frac(self.coeff))
        v = self.val
        if not (isinstance(v, float) and math.isinf(v)):
            v = Fraction(v)
        object.__setattr__(self, "val", v)
        finite = not (isinstance(v, float) and math.isinf(v))
        if finite and self.coeff == 0:
            raise ValueError("a finite jet needs a nonzero coefficient")

    @classmethod
    def zero(cls) -> "Jet":
        return cls(0, math.inf)

    @classmethod
    def infinity(cls) -> "Jet":
        return cls(1, -math.inf)

    @classmethod
    def from_terms(cls, terms: Mapping) -> "Jet":
        """Leading jet of ``sum(c * u**v for v, c in terms.items())``."""
        live = {Fraction(v): c for v, c in terms.items() if c != 0}
        if not live:
            return cls.zero()
        v = min(live)
        return cls(live[v], v)

    def is_zero(self) -> bool:
        return self.val == math.inf

    def is_inf(self) -> bool:
        return self.val == -math.inf

    def norm_key(self):
        return -self.val

    def __mul__(self, other: "Jet") -> "Jet":
        if self.is_zero() or other.is_zero():
            if self.is_inf() or other.is_inf():
                raise ZeroDivisionError("0 * infinity")
            return Jet.zero()
        if self.is_inf() or other.is_inf():
            return Jet.infinity()
        return Jet(self.coeff * other.coeff, self.val + other.val)

    def scaled(self, c, v=0) -> "Jet":
        """The jet of ``c u^v`` times this one."""
        return self * Jet(c, v)

    def at(self, eps: float) -> complex:
        """Numerical value with ``u = eps``."""
        if self.is_zero():
            return 0.0
        if self.is_inf():
            return math.inf
        return self.coeff * eps ** float(self.val)

    def to_json(self) -> dict:
        c = self.coeff
        if isinstance(c, Fraction):
            cj: Any = str(c)
        else:
            c = complex(c)
            cj = [c.real, c.imag]
        v = self.val
        vj = "inf" if v == math.inf else "-inf" if v == -math.inf else str(v)
        return {"coeff": cj, "val": vj}

    @classmethod
    def from_json(cls, obj: dict) -> "Jet":
        c = obj["coeff"]
        coeff = complex(c[0], c[1]) if isinstance(c, list) else Fraction(c)
        v = obj["val"]
        val = math.inf if v == "inf" else -math.inf if v == "-inf" else Fraction(v)
        return cls(coeff, val)

    def __repr__(self) -> str:
        if self.is_zero():
            return "Jet(0)"
        if self.is_inf():
            return "Jet(inf)"
        return f"Jet({self.coeff}*u^{self.val})"


def as_jet(x) -> Jet:
    if isinstance(x, Jet):
        return x
    if x is None or is_inf(x):
        return Jet.infinity()
    if is_zero(x):
        return Jet.zero()
    return Jet(x, 0)


# -- elementary symmetric leading data ------------------------------------


def elementary_lead(a: Iterable, i: int):
    """``[u^l] E_i(a)`` where ``E_i`` is the ``(|a|-i)``-th elementary symmetric function.

    ``l`` is the least valuation among the monomials, so the result is 0
    exactly when those monomials cancel.
    """
    jets = [as_jet(x) for x in a]
    m = len(jets)
    if not 0 <= i <= m:
        raise ValueError(f"need 0 <= i <= {m}")
    k = m - i
    # dp[j] = (least valuation, coefficient sum at that valuation) of e_j
    dp: list = [(Fraction(0), Fraction(1))] + [None] * k
    for jet in jets:
        if jet.is_zero() or jet.is_inf():
            raise ValueError("strip 0 and infinity before taking elementary leads")
        for j in range(min(k, m), 0, -1):
            prev = dp[j - 1]
            if prev is None:
                continue
            term = (prev[0] + jet.val, prev[1] * jet.coeff)
            cur = dp[j]
            if cur is None or term[0] < cur[0]:
                dp[j] = term
            elif term[0] == cur[0]:
                dp[j] = (cur[0], cur[1] + term[1])
    return dp[k][1]


def elementary_lead_val(a: Iterable, i: int) -> Fraction:
    """The least valuation ``l_i`` of the monomials of ``E_i(a)``."""
    vals = sorted((as_jet(x).val for x in a), reverse=True)
    return sum(vals[: len(vals) - i], Fraction(0))


# -- shapes, omega products ------------------------------------------------


def strip_zero_inf(T: ValuedTableau) -> ValuedTableau:
    """Drop entries 0 (absorbed into the inner shape) and infinity (removed from the outer)."""
    ent = T.as_dict()
    zeros = [b for b, v in ent.items() if as_jet(v).is_zero()]
    infs = [b for b, v in ent.items() if as_jet(v).is_inf()]
    if not zeros and not infs:
        return T
    bound = T.shape.bound
    inner = Partition.from_boxes(bound, T.shape.inner.boxes() + zeros)
    outer_boxes = [b for b in T.shape.outer.boxes() if b not in set(infs)]
    outer = Partition.from_boxes(bound, outer_boxes)
    keep = {b: v for b, v in ent.items() if b not in set(zeros) | set(infs)}
    return ValuedTableau.from_dict(SkewShape(outer, inner), keep)


def _val_outside(T: ValuedTableau, nu: Partition) -> Fraction:
    return sum((as_jet(v).val for b, v in T.entries if not nu.contains_box(b)), Fraction(0))


def between(shape: SkewShape) -> list[Partition]:
    mu, lam = shape.inner, shape.outer
    return [nu for nu in all_partitions(shape.bound) if mu <= nu <= lam]


def min_shapes(T: ValuedTableau, i: int) -> list[Partition]:
    """``M_i(T)``: shapes of size ``|mu|+i`` between inner and outer minimizing ``val(T|lam/nu)``."""
    mu = T.shape.inner
    cands = [nu for nu in between(T.shape) if nu.size == mu.size + i]
    if not cands:
        return []
    vals = {nu: _val_outside(T, nu) for nu in cands}
    best = min(vals.values())
    return [nu for nu in cands if vals[nu] == best]


def entry_order(T: ValuedTableau) -> list[Box]:
    """Boxes by increasing norm, ties broken in reading order; fixes the omega indexing."""
    return [b for b, v in sorted(T.entries, key=lambda e: (norm_key(e[1]), e[0]))]


def omega_product(omega: Mapping[Box, Any], nu: Partition, shape: SkewShape):
    """Product of omega over the boxes of ``shape`` outside ``nu``; 0 unless inner <= nu <= outer."""
    if not (shape.inner <= nu <= shape.outer):
        return 0
    out = Fraction(1)
    for b in shape.boxes():
        if not nu.contains_box(b):
            out = out * omega[b]
    return out


def omega_vector(omega: Mapping[Box, Any], shape: SkewShape) -> dict[Partition, Any]:
    return {nu: omega_product(omega, nu, shape) for nu in all_partitions(shape.bound)}


def _jets(T: ValuedTableau) -> list[Jet]:
    return [as_jet(v) for v in T.values()]


def rhs(T: ValuedTableau) -> list:
    """Right-hand sides ``q_lam e_i(a)`` for ``0 <= i < |lam/mu|``."""
    ql = q_weight(T.shape.outer)
    a = _jets(T)
    return [ql * elementary_lead(a, i) for i in range(len(a))]


def residuals(T: ValuedTableau, omega: Mapping[Box, Any]) -> list:
    """Left minus right side of each leading-term equation."""
    out = []
    for i, r in enumerate(rhs(T)):
        lhs = sum((q_weight(nu) * omega_product(omega, nu, T.shape) for nu in min_shapes(T, i)), Fraction(0))
        out.append(lhs - r)
    return out


# -- solving -------------------------------------------------------------


@dataclass(frozen=True)
class LeadSolution:
    omega: dict
    det: Any
    degenerate: bool = False


def _sqrt(x):
    """Exact square root of a nonnegative perfect-square rational, else a float/complex one."""
    if isinstance(x, Fraction) and x >= 0:
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
        return math.sqrt(x)
    if isinstance(x, (Fraction, int, float)) and x >= 0:
        return math.sqrt(x)
    return cmath.sqrt(x)


def solve_distinct(T: ValuedTableau) -> dict[Box, Any]:
    """Closed-form solution when all entries have distinct norms."""
    T = strip_zero_inf(T)
    order = entry_order(T)
    jets = {b: as_jet(v) for b, v in T.entries}
    vals = [jets[b].val for b in order]
    if len(set(vals)) != len(vals):
        raise ValueError("entries must have pairwise distinct norms")
    alpha = T.shape.inner
    omega = {}
    for b in order:
        nxt = alpha.add_box(b)
        omega[b] = q_weight(nxt) * jets[b].coeff / q_weight(alpha)
        alpha = nxt
    return omega


def two_root_discriminant(S, P, ratio):
    """Discriminant ``S^2 - 4 ratio P`` of the tied-pair quadratic."""
    return S * S - 4 * ratio * P


def diamond_ratio(lo: Partition, a: Partition, a2: Partition, hi: Partition) -> Fraction:
    """``q_a q_a2 / (q_lo q_hi)`` for a diamond ``lo < a, a2 < hi``."""
    return Fraction(q_weight(a) * q_weight(a2), q_weight(lo) * q_weight(hi))


def distance_identity_holds(lo: Partition, a: Partition, a2: Partition, hi: Partition) -> bool:
    """Exact check that the diamond ratio is ``1 - L^-2`` with L the box distance."""
    (ba,) = set(a.boxes()) - set(lo.boxes())
    (bb,) = set(a2.boxes()) - set(lo.boxes())
    L = box_distance(ba, bb)
    return diamond_ratio(lo, a, a2, hi) == 1 - Fraction(1, L * L)


@dataclass(frozen=True)
class TwoRoots:
    pairs: tuple
    discriminant: Any
    degenerate: bool


def solve_tworoots(lo: Partition, a: Partition, a2: Partition, hi: Partition, ck, ck1) -> TwoRoots:
    """Solve the tied-pair quadratic for ``(omega_A, omega_B)``.

    ``A`` is the box ``a/lo`` and ``B`` the box ``a2/lo``. ``ck, ck1`` are the
    leading coefficients of the two tied entries.
    """
    if ck == 0 or ck1 == 0:
        raise ValueError("tied coefficients must be nonzero")
    ck, ck1 = _frac(ck), _frac(ck1)
    S, P = ck + ck1, ck * ck1
    qlo, qa, qa2, qhi = (q_weight(x) for x in (lo, a, a2, hi))
    A2 = Fraction(qa2, qhi)
    disc = two_root_discriminant(S, P, diamond_ratio(lo, a, a2, hi))
    root = _sqrt(disc)
    pairs = []
    for sgn in (1, -1):
        wa = (S + sgn * root) / (2 * A2)
        wb = (qhi * S - qa2 * wa) / qa
        pairs.append((wa, wb))
    return TwoRoots(tuple(pairs), disc, disc == 0)


def partner(lo, a, a2, hi, wa, wb):
    """The companion root pair of a tied-pair solution."""
    qa, qa2 = q_weight(a), q_weight(a2)
    return (Fraction(qa) * wb / qa2, Fraction(qa2) * wa / qa)


def _chain_solve(T: ValuedTableau, chain: list[Partition], e: list, omega: dict, lo: int, hi: int) -> bool:
    """Fill omega for chain steps ``lo+1..hi`` from ``Omega_{chain[i]} = e[i] / q(chain[i])``."""
    for i in range(hi, lo, -1):
        (b,) = set(chain[i].boxes()) - set(chain[i - 1].boxes())
        if e[i - 1] == 0:
            return False
        big = e[i - 1] / q_weight(chain[i - 1])
        small = e[i] / q_weight(chain[i])
        omega[b] = big / small
    return True


def solve_full(T: ValuedTableau) -> list[LeadSolution]:
    """All solutions of the leading-term system for a diagonally increasing ``T``.

    Supported: every ``M_i`` a singleton along a saturated chain, or exactly
    one index with two minimizers forming a diamond. Anything else raises
    :class:`UnsupportedTies`.
    """
    T = strip_zero_inf(T)
    m = len(T)
    lam = T.shape.outer
    if m == 0:
        return [LeadSolution({}, Fraction(1))]
    a = _jets(T)
    ql = q_weight(lam)
    e = [ql * elementary_lead(a, i) for i in range(m)] + [Fraction(ql)]
    Ms = [min_shapes(T, i) for i in range(m + 1)]
    wide = [i for i, M in enumerate(Ms) if len(M) != 1]
    if not wide:
        chain = [M[0] for M in Ms]
        if any(not chain[i + 1].covers(chain[i]) for i in range(m)):
            raise UnsupportedTies("minimizing shapes do not form a chain")
        omega: dict = {}
        if not _chain_solve(T, chain, e, omega, 0, m):
            return []
        return [LeadSolution(omega, jacobian_det(T, omega))]
    if len(wide) != 1 or len(Ms[wide[0]]) != 2 or wide[0] in (0, m):
        raise UnsupportedTies(f"unsupported tie pattern at indices {wide}")
    k = wide[0]
    lo, hi = Ms[k - 1][0], Ms[k + 1][0]
    a1, a2 = Ms[k]
    if not (a1.covers(lo) and a2.covers(lo) and hi.covers(a1) and hi.covers(a2)):
        raise UnsupportedTies("tied minimizers do not form a diamond")
    chain = [M[0] for M in Ms]
    for i in list(range(k - 1)) + list(range(k + 1, m)):
        if not chain[i + 1].covers(chain[i]):
            raise UnsupportedTies("minimizing shapes do not form a chain")
    top: dict = {}
    if not _chain_solve(T, chain, e, top, k + 1, m):
        return []
    if e[k + 1] == 0:
        return []
    R = e[k + 1] / q_weight(hi)  # product of omega outside hi
    Ek, Ek1 = e[k] / R, e[k - 1] / R  # scaled as q_hi * S and q_hi * P
    (ba,) = set(a1.boxes()) - set(lo.boxes())
    (bb,) = set(a2.boxes()) - set(lo.boxes())
    qlo, qa, qa2, qhi = (q_weight(x) for x in (lo, a1, a2, hi))
    # q_a2 X^2 - Ek X + q_a Ek1 / q_lo = 0 with X = omega_A
    disc = Ek * Ek - 4 * Fraction(qa2 * qa, qlo) * Ek1
    if disc == 0:
        X = Ek / (2 * qa2)
        om = dict(top)
        om[ba], om[bb] = X, (Ek - qa2 * X) / qa
        return [LeadSolution(om, Fraction(0), degenerate=True)] if X != 0 else []
    root = _sqrt(disc)
    out = []
    for sgn in (1, -1):
        X = (Ek + sgn * root) / (2 * qa2)
        if X == 0:
            continue
        om = dict(top)
        om[ba], om[bb] = X, (Ek - qa2 * X) / qa
        low = dict(om)
        if not _chain_solve(T, chain, e, low, 0, k - 1):
            continue
        out.append(LeadSolution(low, jacobian_det(T, low)))
    return out


# -- Jacobian, Pluckers, weights -------------------------------------------


def jacobian(T: ValuedTableau, omega: Mapping[Box, Any]) -> list[list]:
    """``J[i][j] = d/d omega_j sum_{nu in M_i} q_nu Omega_nu``, columns in :func:`entry_order`."""
    T = strip_zero_inf(T)
    order = entry_order(T)
    m = len(order)
    rows = []
    for i in range(m):
        row = []
        for b in order:
            s = Fraction(0)
            for nu in min_shapes(T, i):
                if nu.contains_box(b):
                    continue
                term = Fraction(q_weight(nu))
                for c in T.shape.boxes():
                    if c != b and not nu.contains_box(c):
                        term = term * omega[c]
                s = s + term
            row.append(s)
        rows.append(row)
    return rows


def jacobian_det(T: ValuedTableau, omega: Mapping[Box, Any]):
    return determinant(jacobian(T, omega))


def lead_pluckers(T: ValuedTableau, omega: Mapping[Box, Any]) -> dict[Partition, Jet]:
    """``nu -> Omega_nu u^{val(T|lam/nu)}`` as jets (zero jet off the interval)."""
    T = strip_zero_inf(T)
    out = {}
    for nu in all_partitions(T.shape.bound):
        w = omega_product(omega, nu, T.shape)
        out[nu] = Jet.zero() if w == 0 else Jet(w, _val_outside(T, nu))
    return out


def predicted_pluckers(T: ValuedTableau, omega: Mapping[Box, Any], eps: float = 1e-2) -> dict[Partition, complex]:
    """Numerical Pluckers at ``u = eps``, computed through logarithms."""
    out = {}
    log_eps = math.log(eps)
    for nu, jet in lead_pluckers(T, omega).items():
        if jet.is_zero():
            out[nu] = 0.0
        else:
            out[nu] = complex(jet.coeff) * math.exp(float(jet.val) * log_eps)
    return out


def weight_vector(T: ValuedTableau) -> dict[Partition, Fraction]:
    """``nu -> val(T|nu^c)`` over the partitions between the inner and outer shape."""
    return {nu: _val_outside(T, nu) for nu in between(T.shape)}


# -- Gelfand-Tsetlin type relations ----------------------------------------


def _close(x, y, tol) -> bool:
    if tol == 0:
        return x == y
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def gt_check(c: Mapping[Partition, Any], tol: float = 0) -> bool:
    """``c_l c_l' == c_{l v l'} c_{l ^ l'}`` for every pair; exact when ``tol == 0``."""
    from .partitions import meet_join

    keys = list(c)
    for i, l1 in enumerate(keys):
        for l2 in keys[i + 1 :]:
            lo, hi = meet_join(l1, l2)
            if not _close(c[l1] * c[l2], c.get(lo, 0) * c.get(hi, 0), tol):
                return False
    return True


def critical_ratio(L: int) -> tuple[complex, complex]:
    """The two unit-modulus ratios ``c_k / c_{k+1}`` where the tied-pair quadratic degenerates."""
    if L < 2:
        raise ValueError("L must be at least 2")
    cos_t = 1 - 2 / L**2
    sin_t = math.sqrt(1 - cos_t * cos_t)
    return complex(cos_t, sin_t), complex(cos_t, -sin_t)
