"""Numerical fibers of the Wronski map and monodromy by path tracking.

A fiber point is a Plucker vector ``p`` with one coordinate fixed to 1 and
a scale ``s``; together they solve

    sum_{|lam| = k} q_lam p_lam - s * P_k = 0,   k = 0..N,

plus the quadratic Plucker relations, where ``P = prod(beta_i z + alpha_i)``
is the target written with homogeneous roots ``[alpha_i : beta_i]`` (so a
root at infinity simply drops the degree). Working with ``p`` instead of a
chart keeps tiny minors accurate in relative terms when the roots are far
apart. All points of a fiber are tracked together with a common step size.

Residuals are componentwise backward errors: each equation is divided by
the sum of the absolute values of its monomials.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .jdt import ValuePath
from .leadterms import omega_vector
from .partitions import Partition, RectBound, SkewShape, all_partitions, column_set, partition_of_columns, q_weight, syt_count
from .tableaux import INF, ValuedTableau, is_inf, ordinal_syt, ordinalize, relabel
from .wronski import PluckerVector, SubspaceBasis

TOL_NEWTON = 1e-12
TOL_COLLISION = 1e-5


class TrackingError(RuntimeError):
    """Step underflow, corrector failure or a collision between tracked points."""


class AmbiguousMatch(RuntimeError):
    pass


# -- geometry of a rectangle -------------------------------------------------


class _Grass:
    """Index tables for one rectangle: partitions, weights, Plucker relation terms."""

    _cache: dict = {}

    def __new__(cls, bound: RectBound):
        if bound in cls._cache:
            return cls._cache[bound]
        self = super().__new__(cls)
        self.bound = bound
        d, n, N = bound.d, bound.n, bound.N
        self.lams = all_partitions(bound)
        self.nl = len(self.lams)
        self.index = {lam: i for i, lam in enumerate(self.lams)}
        self.cols = np.array([[c - 1 for c in column_set(lam)] for lam in self.lams], dtype=int)
        self.col_index = {tuple(int(c) for c in row): i for i, row in enumerate(self.cols)}
        self.q = np.array([q_weight(lam) for lam in self.lams], dtype=float)
        self.W = np.zeros((self.nl, N + 1))
        for i, lam in enumerate(self.lams):
            self.W[i, lam.size] = self.q[i]
        self._relations()
        cls._cache[bound] = self
        return self

    def signed_index(self, cols) -> tuple[int, int]:
        """``(sign, index)`` of the coordinate on an ordered column tuple; sign 0 if repeated."""
        if len(set(cols)) < len(cols):
            return 0, 0
        order = sorted(range(len(cols)), key=lambda i: cols[i])
        return _perm_sign(order), self.col_index[tuple(sorted(cols))]

    def _relations(self) -> None:
        d, n = self.bound.d, self.bound.n
        seen, rels = set(), []
        for I in itertools.combinations(range(n), d - 1):
            for K in itertools.combinations(range(n), d + 1):
                terms = {}
                for l, k in enumerate(K):
                    s1, i1 = self.signed_index(I + (k,))
                    s2, i2 = self.signed_index(K[:l] + K[l + 1 :])
                    if s1 and s2:
                        key = (min(i1, i2), max(i1, i2))
                        terms[key] = terms.get(key, 0) + (-1) ** l * s1 * s2
                terms = {k: v for k, v in terms.items() if v}
                if len(terms) < 2:
                    continue
                canon = tuple(sorted(terms.items()))
                lead = canon[0][1]
                canon = tuple((k, v * lead) for k, v in canon)
                if canon not in seen:
                    seen.add(canon)
                    rels.append(canon)
        m = max((len(r) for r in rels), default=0)
        self.nrel = len(rels)
        self.r_sign = np.zeros((self.nrel, m))
        self.r_i = np.zeros((self.nrel, m), dtype=int)
        self.r_j = np.zeros((self.nrel, m), dtype=int)
        for r, rel in enumerate(rels):
            for t, ((i, j), v) in enumerate(rel):
                self.r_sign[r, t], self.r_i[r, t], self.r_j[r, t] = v, i, j

    def minors(self, A: np.ndarray) -> np.ndarray:
        """``(P, d, n) -> (P, nLam, d, d)`` square blocks on each pivot set."""
        return np.transpose(A[:, :, self.cols], (0, 2, 1, 3))

    def pluckers(self, A: np.ndarray) -> np.ndarray:
        return np.linalg.det(self.minors(A)) if self.bound.d > 0 else np.ones((len(A), 1))


def _perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s

# -- targets -----------------------------------------------------------------


def homogeneous(values: Iterable) -> np.ndarray:
    """Unit-norm ``[alpha : beta]`` rows for values ``alpha/beta``; ``INF`` is ``[1 : 0]``."""
    out = []
    for v in values:
        if is_inf(v):
            out.append((1.0 + 0j, 0j))
        else:
            v = complex(v)
            r = math.hypot(abs(v), 1.0)
            out.append((v / r, 1.0 / r + 0j))
    return np.array(out, dtype=complex)


def dehomogenize(H: np.ndarray, inf_tol: float = 1e-300) -> list:
    out = []
    for a, b in H:
        out.append(INF if abs(b) <= inf_tol * max(abs(a), 1e-300) or b == 0 else complex(a / b))
    return out


def target_coeffs(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (lowest first) of ``prod(beta z + alpha)`` and of its absolute version."""
    P = np.array([1.0 + 0j])
    Pa = np.array([1.0])
    for a, b in H:
        P = np.convolve(P, np.array([a, b]))
        Pa = np.convolve(Pa, np.array([abs(a), abs(b)]))
    return P, Pa


# -- root paths --------------------------------------------------------------


@dataclass
class Segment:
    t0: float
    t1: float
    func: Callable[[float], np.ndarray]  # local x in [0,1] -> homogeneous (N, 2)
    linear_values: tuple | None = None  # (start, end) values of an interpolating segment
    interp: str = "linear"  # "linear" in value, or "log": linear in signed log1p


def slog(v: float) -> float:
    """``sign(v) log(1 + |v|)``: monotone, odd, and order-preserving on norms."""
    return math.copysign(math.log1p(abs(v)), v)


def sexp(u: float) -> float:
    return math.copysign(math.expm1(abs(u)), u)


class RootPath:
    """A continuous path of ``N`` homogeneous roots on ``[0, 1]``, made of segments."""

    def __init__(self, segments: Sequence[Segment]):
        self.segments = list(segments)
        if not self.segments:
            raise ValueError("empty path")
        self.N = len(self.segments[0].func(0.0))

    @property
    def breakpoints(self) -> list[float]:
        return [self.segments[0].t0] + [s.t1 for s in self.segments]

    def _seg(self, t: float) -> Segment:
        for s in self.segments:
            if t <= s.t1 + 1e-15:
                return s
        return self.segments[-1]

    def at(self, t: float) -> np.ndarray:
        s = self._seg(t)
        x = 0.0 if s.t1 == s.t0 else (t - s.t0) / (s.t1 - s.t0)
        return s.func(min(max(x, 0.0), 1.0))

    def at_in(self, seg: Segment, t: float) -> np.ndarray:
        x = (t - seg.t0) / (seg.t1 - seg.t0)
        return seg.func(min(max(x, 0.0), 1.0))

    def values(self, t: float) -> list:
        return dehomogenize(self.at(t))

    def start(self) -> list:
        lv = self.segments[0].linear_values
        return list(lv[0]) if lv is not None else self.values(self.breakpoints[0])

    def end(self) -> list:
        lv = self.segments[-1].linear_values
        return list(lv[1]) if lv is not None else self.values(self.breakpoints[-1])

    @classmethod
    def through(cls, waypoints: Sequence[Sequence], times: Sequence[float] | None = None, interp: str = "linear") -> "RootPath":
        """Interpolating path through the given root lists.

        ``interp="linear"`` moves linearly in value (``INF`` linearly in
        ``1/v``); ``"log"`` moves real roots linearly in :func:`slog`, which
        keeps roots of very different sizes moving at comparable speeds.
        """
        m = len(waypoints) - 1
        if m < 1:
            raise ValueError("need at least two waypoints")
        times = list(times) if times is not None else [k / m for k in range(m + 1)]
        make = _linear_func if interp == "linear" else _slog_func
        segs = [
            Segment(times[k], times[k + 1], make(waypoints[k], waypoints[k + 1]), (tuple(waypoints[k]), tuple(waypoints[k + 1])), interp)
            for k in range(m)
        ]
        return cls(segs)

    @classmethod
    def from_function(cls, f: Callable[[float], Sequence], t0: float = 0.0, t1: float = 1.0) -> "RootPath":
        return cls([Segment(t0, t1, lambda x: homogeneous(f(x)))])

    @classmethod
    def from_homogeneous(cls, f: Callable[[float], np.ndarray]) -> "RootPath":
        return cls([Segment(0.0, 1.0, f)])

    def then(self, other: "RootPath") -> "RootPath":
        """Concatenate and rescale to ``[0, 1]``, giving each part equal time."""
        parts = [self, other]
        segs = []
        for k, p in enumerate(parts):
            a, b = p.breakpoints[0], p.breakpoints[-1]
            for s in p.segments:
                u0 = (k + (s.t0 - a) / (b - a)) / 2
                u1 = (k + (s.t1 - a) / (b - a)) / 2
                segs.append(Segment(u0, u1, s.func, s.linear_values, s.interp))
        return RootPath(segs)

    @classmethod
    def chain(cls, parts: Sequence["RootPath"]) -> "RootPath":
        m = len(parts)
        segs = []
        for k, p in enumerate(parts):
            a, b = p.breakpoints[0], p.breakpoints[-1]
            for s in p.segments:
                segs.append(Segment((k + (s.t0 - a) / (b - a)) / m, (k + (s.t1 - a) / (b - a)) / m, s.func, s.linear_values, s.interp))
        return cls(segs)

    def reversed(self) -> "RootPath":
        a, b = self.breakpoints[0], self.breakpoints[-1]
        segs = []
        for s in reversed(self.segments):
            f = s.func
            lv = None if s.linear_values is None else (s.linear_values[1], s.linear_values[0])
            segs.append(Segment(a + b - s.t1, a + b - s.t0, (lambda g: lambda x: g(1.0 - x))(f), lv, s.interp))
        return RootPath(segs)

    def mobius(self, M: np.ndarray) -> "RootPath":
        """Apply ``w -> (m11 w + m12) / (m21 w + m22)`` to every root."""
        M = np.asarray(M, dtype=complex)

        def wrap(f):
            def g(x):
                H = f(x) @ M.T
                return H / np.linalg.norm(H, axis=1, keepdims=True)

            return g

        return RootPath([Segment(s.t0, s.t1, wrap(s.func)) for s in self.segments])

    def value_path(self) -> ValuePath:
        """The motion as a real :class:`ValuePath` with the same norm-crossing events.

        Segments interpolated in :func:`slog` are reported in ``slog``
        coordinates; use :func:`predict_slide` to get tableaux in true values.
        """
        if any(s.linear_values is None for s in self.segments):
            raise ValueError("only interpolating paths convert to value paths")
        kinds = {s.interp for s in self.segments}
        if len(kinds) > 1:
            raise ValueError("mixed interpolation kinds")
        f = slog if kinds == {"log"} else (lambda v: v)
        times = self.breakpoints
        knots = []
        for i in range(self.N):
            col = [f(_real_value(self.segments[0].linear_values[0][i]))]
            for s in self.segments:
                col.append(f(_real_value(s.linear_values[1][i])))
            knots.append(col)
        return ValuePath(tuple(times), tuple(knots))

    def to_json(self) -> list:
        if any(s.linear_values is None for s in self.segments):
            raise ValueError("only piecewise-linear paths serialize")
        out = []
        for s in self.segments:
            seg = {"t0": s.t0, "t1": s.t1, "roots": [_root_json(v) for v in s.linear_values[0]], "roots_end": [_root_json(v) for v in s.linear_values[1]]}
            if s.interp != "linear":
                seg["interp"] = s.interp
            out.append(seg)
        return out

    @classmethod
    def from_json(cls, segs: list) -> "RootPath":
        """Segments ``{"t0","t1","roots"[, "roots_end"]}``; a missing end is the next segment's start (or the first start)."""
        starts = [[_root_parse(v) for v in s["roots"]] for s in segs]
        out = []
        for k, s in enumerate(segs):
            end = [_root_parse(v) for v in s["roots_end"]] if "roots_end" in s else starts[(k + 1) % len(segs)]
            interp = s.get("interp", "linear")
            make = _linear_func if interp == "linear" else _slog_func
            out.append(Segment(float(s["t0"]), float(s["t1"]), make(starts[k], end), (tuple(starts[k]), tuple(end)), interp))
        return cls(out)


def _real_value(v):
    if is_inf(v):
        return INF
    v = complex(v)
    if abs(v.imag) > 1e-12 * max(1.0, abs(v)):
        raise ValueError("value path needs real roots")
    return v.real


def _root_json(v):
    if is_inf(v):
        return "inf"
    v = complex(v)
    return [v.real, v.imag]


def _root_parse(v):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity"):
            return INF
        return complex(v.replace(" ", ""))
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def _linear_func(start: Sequence, end: Sequence):
    a0 = list(start)
    a1 = list(end)

    def f(x: float) -> np.ndarray:
        vals = []
        for u, v in zip(a0, a1):
            if is_inf(u) or is_inf(v):
                wu = 0j if is_inf(u) else 1 / complex(u)
                wv = 0j if is_inf(v) else 1 / complex(v)
                w = wu + x * (wv - wu)
                r = math.hypot(abs(w), 1.0)
                vals.append((1.0 / r + 0j, w / r))
            else:
                z = complex(u) + x * (complex(v) - complex(u))
                r = math.hypot(abs(z), 1.0)
                vals.append((z / r, 1.0 / r + 0j))
        return np.array(vals, dtype=complex)

    return f


def _slog_func(start: Sequence, end: Sequence):
    u0 = [slog(_real_value(v)) for v in start]
    u1 = [slog(_real_value(v)) for v in end]

    def f(x: float) -> np.ndarray:
        return homogeneous([sexp(a + x * (b - a)) for a, b in zip(u0, u1)])

    return f


def predict_slide(T: ValuedTableau, path: RootPath):
    """Sliding prediction for a real interpolating path; returns ``(T1, events)`` in true values."""
    from .jdt import slide_along

    vp = path.value_path()
    if path.segments[0].interp != "log":
        return slide_along(T, vp)
    fwd = {}
    for v in T.values():
        fwd[v] = slog(float(v))
    T1, events = slide_along(T.map_values(lambda v: fwd[v]), vp)
    ends = {slog(_real_value(v)): v for v in path.segments[-1].linear_values[1]}
    back = lambda u: min(ends.items(), key=lambda kv: abs(kv[0] - u))[1]
    return T1.map_values(back), events


# -- fiber points ------------------------------------------------------------


@dataclass
class FiberPoint:
    """A fiber point through its Plucker vector ``p`` (``p[ref] == 1``) and target scale ``s``.

    The chart with pivot columns ``J(lams[ref])`` has free entries
    :attr:`B`; each of them is a ratio of two Plucker coordinates, so the
    chart is read off ``p`` without losing relative accuracy.
    """

    bound: RectBound
    p: np.ndarray
    s: complex = 1.0 + 0j
    residual: float = math.inf
    label: Any = None
    ref: int = -1

    def __post_init__(self) -> None:
        self.p = np.asarray(self.p, dtype=complex)
        if self.ref < 0:
            self.ref = int(np.argmax(np.abs(self.p)))
        if self.p[self.ref] != 1:
            scale = self.p[self.ref]
            self.p = self.p / scale
            self.s = self.s / scale

    @property
    def pivots(self) -> tuple:
        return tuple(int(c) for c in _Grass(self.bound).cols[self.ref])

    @property
    def free(self) -> tuple:
        return tuple(c for c in range(self.bound.n) if c not in self.pivots)

    @property
    def B(self) -> np.ndarray:
        g = _Grass(self.bound)
        piv, free = list(self.pivots), self.free
        out = np.zeros((self.bound.d, len(free)), dtype=complex)
        for i in range(self.bound.d):
            for jj, j in enumerate(free):
                cols = list(piv)
                cols[i] = j
                sg, k = g.signed_index(tuple(cols))
                out[i, jj] = sg * self.p[k]
        return out

    def matrix(self) -> np.ndarray:
        d, n = self.bound.d, self.bound.n
        A = np.zeros((d, n), dtype=complex)
        A[:, list(self.pivots)] = np.eye(d)
        A[:, list(self.free)] = self.B
        return A

    def basis(self) -> SubspaceBasis:
        return SubspaceBasis.from_matrix(self.matrix())

    def plucker_array(self) -> np.ndarray:
        return self.p.copy()

    def pluckers(self) -> PluckerVector:
        return PluckerVector(dict(zip(_Grass(self.bound).lams, self.p)), self.bound)

    def chart_partition(self) -> Partition:
        return _Grass(self.bound).lams[self.ref]

    def copy(self) -> "FiberPoint":
        return FiberPoint(self.bound, self.p.copy(), self.s, self.residual, self.label, self.ref)

    def to_json(self) -> dict:
        return {
            "chart": [c + 1 for c in self.pivots],
            "coords": [[complex(v).real, complex(v).imag] for v in self.B.ravel()],
            "pluckers": [{"partition": list(lam.parts), "value": [complex(v).real, complex(v).imag]} for lam, v in zip(_Grass(self.bound).lams, self.p)],
            "residual": self.residual,
            "label": None if self.label is None else self.label.to_json(),
        }


def point_from_matrix(A: np.ndarray, label=None) -> FiberPoint:
    A = np.asarray(A, dtype=complex)
    bound = RectBound(*A.shape)
    return FiberPoint(bound, _Grass(bound).pluckers(A[None])[0], label=label)


def point_from_pluckers(bound: RectBound, p, label=None) -> FiberPoint:
    g = _Grass(bound)
    arr = np.array([complex(p[lam]) for lam in g.lams]) if isinstance(p, Mapping) else np.asarray(p, dtype=complex)
    return FiberPoint(bound, arr, label=label)


def point_from_basis(x: SubspaceBasis, label=None) -> FiberPoint:
    return point_from_matrix(np.array(x.matrix(), dtype=complex), label)


# -- batched evaluation ------------------------------------------------------


@dataclass
class _Ensemble:
    bound: RectBound
    p: np.ndarray  # (P, nl)
    s: np.ndarray  # (P,)
    ref: np.ndarray  # (P,)

    @classmethod
    def of(cls, points: Sequence[FiberPoint]) -> "_Ensemble":
        return cls(
            points[0].bound,
            np.array([q.p for q in points], dtype=complex),
            np.array([q.s for q in points], dtype=complex),
            np.array([q.ref for q in points], dtype=int),
        )

    def copy(self) -> "_Ensemble":
        return _Ensemble(self.bound, self.p.copy(), self.s.copy(), self.ref.copy())

    def x(self) -> np.ndarray:
        return np.concatenate([self.p, self.s[:, None]], axis=1)

    def set_x(self, x: np.ndarray, mask=None) -> None:
        if mask is None:
            self.p, self.s = x[:, :-1].copy(), x[:, -1].copy()
        else:
            self.p[mask], self.s[mask] = x[mask, :-1], x[mask, -1]

    def points(self, residuals=None, labels=None) -> list[FiberPoint]:
        return [
            FiberPoint(
                self.bound,
                self.p[k].copy(),
                complex(self.s[k]),
                float(residuals[k]) if residuals is not None else math.inf,
                labels[k] if labels is not None else None,
                int(self.ref[k]),
            )
            for k in range(len(self.s))
        ]

    def rechart(self, threshold: float = 1e-3) -> int:
        """Move the reference coordinate when it drops below ``threshold`` times the largest."""
        big = np.argmax(np.abs(self.p), axis=1)
        rows = np.arange(len(self.s))
        bad = np.abs(self.p[rows, self.ref]) < threshold * np.abs(self.p[rows, big])
        for k in np.nonzero(bad)[0]:
            c = self.p[k, big[k]]
            self.p[k] /= c
            self.s[k] /= c
            self.ref[k] = big[k]
        return int(np.sum(bad))


def _evaluate(ens: _Ensemble, P: np.ndarray, Pa: np.ndarray, jac: bool = True):
    """Residuals, row scales and Jacobian of the fiber system at every point.

    Rows: Wronskian coefficients, Plucker relations, the normalization
    ``p[ref] = 1``. Columns: the Plucker coordinates, then ``s``.
    """
    g = _Grass(ens.bound)
    p, s = ens.p, ens.s
    Pn = len(s)
    rows = np.arange(Pn)
    lin = p @ g.W - s[:, None] * P[None, :]
    lin_sc = np.abs(p) @ g.W + np.abs(s)[:, None] * Pa[None, :]
    # a coefficient that is exactly zero (a root at 0 or infinity) is only
    # matched up to the size of the whole target
    lin_sc = lin_sc + np.where(P == 0, np.abs(s)[:, None] * np.max(Pa), 0.0)
    pi, pj = p[:, g.r_i], p[:, g.r_j]  # (P, nrel, m)
    terms = g.r_sign * pi * pj
    rel = terms.sum(axis=2)
    rel_sc = np.abs(terms).sum(axis=2)
    norm = p[rows, ens.ref] - 1.0
    F = np.concatenate([lin, rel, norm[:, None]], axis=1)
    scale = np.concatenate([lin_sc, rel_sc, np.ones((Pn, 1))], axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    if not jac:
        return F, scale, None
    nl = g.nl
    J = np.zeros((Pn, F.shape[1], nl + 1), dtype=complex)
    J[:, : g.bound.N + 1, :nl] = g.W.T[None]
    J[:, : g.bound.N + 1, nl] = -P[None, :]
    Jr = J[:, g.bound.N + 1 : -1, :nl]
    ar = np.arange(g.nrel)
    for m in range(g.r_sign.shape[1]):
        # within one term slot each relation touches each coordinate at most once
        Jr[:, ar, g.r_i[:, m]] += g.r_sign[:, m] * pj[:, :, m]
        Jr[:, ar, g.r_j[:, m]] += g.r_sign[:, m] * pi[:, :, m]
    J[rows, -1, ens.ref] = 1.0
    return F, scale, J


def _solve(J: np.ndarray, rhs: np.ndarray, scale: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares ``J dx = rhs`` after row and column equilibration.

    Returns ``dx`` and the column-scaled step, whose max-norm measures the
    step's effect on the relative residuals. QR throughout: the normal
    equations lose the predictor tangent on ill-conditioned fibers.
    """
    Js = J / scale[:, :, None]
    rs = rhs / scale
    cn = np.max(np.abs(Js), axis=1)
    cn = np.where(cn > 0, cn, 1.0)
    Jc = Js / cn[:, None, :]
    try:
        Q, R = np.linalg.qr(Jc)
        y = np.linalg.solve(R, np.einsum("pij,pi->pj", Q.conj(), rs)[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        y = np.stack([np.linalg.lstsq(Jc[k], rs[k], rcond=None)[0] for k in range(len(rs))])
    return y / cn, y


def _backward_error(F: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return np.max(np.abs(F) / scale, axis=1)


def newton(ens: _Ensemble, H: np.ndarray, tol: float = TOL_NEWTON, max_iter: int = 30) -> np.ndarray:
    """Gauss-Newton on every point in place (converged points are left alone); returns residuals."""
    P, Pa = target_coeffs(H)
    res = None
    for _ in range(max_iter):
        ens.rechart()
        F, scale, J = _evaluate(ens, P, Pa)
        res = _backward_error(F, scale)
        todo = res > tol
        if not np.any(todo):
            break
        dx, _ = _solve(J[todo], -F[todo], scale[todo])
        x = ens.x()
        x[todo] += dx
        ens.set_x(x)
    ens.rechart()
    F, scale, _ = _evaluate(ens, P, Pa, jac=False)
    return _backward_error(F, scale)


def _fit_scale(ens: _Ensemble, P: np.ndarray) -> None:
    c = ens.p @ _Grass(ens.bound).W
    ens.s = (c @ P.conj()) / np.vdot(P, P)


# -- public fiber API --------------------------------------------------------


class FiberSystem:
    """The fiber system over ``roots`` (values, or homogeneous rows ``[alpha, beta]``)."""

    def __init__(self, bound: RectBound, roots):
        self.bound = bound
        H = np.asarray(roots, dtype=complex) if isinstance(roots, np.ndarray) and roots.ndim == 2 else homogeneous(roots)
        if len(H) != bound.N:
            raise ValueError(f"need {bound.N} roots")
        if np.all(np.abs(H[:, 1]) == 0):
            raise ValueError("every root at infinity is a degenerate target")
        self.H = H
        self.P, self.Pa = target_coeffs(H)

    def residual(self, point: FiberPoint, fit_scale: bool = True) -> float:
        ens = _Ensemble.of([point])
        if fit_scale:
            _fit_scale(ens, self.P)
        F, scale, _ = _evaluate(ens, self.P, self.Pa, jac=False)
        return float(_backward_error(F, scale)[0])

    def jacobian(self, point: FiberPoint) -> np.ndarray:
        return _evaluate(_Ensemble.of([point]), self.P, self.Pa)[2][0]


def fiber_system(bound: RectBound, roots) -> FiberSystem:
    return FiberSystem(bound, roots)


def separated_roots(bound: RectBound, beta: float | None = None, signs: Sequence[int] | None = None) -> list[float]:
    """``sigma_i beta^i``; the default ``beta`` is 1e3 for N <= 6 and 1e2 beyond."""
    N = bound.N
    if beta is None:
        beta = 1e3 if N <= 6 else 1e2
    signs = list(signs) if signs is not None else [1] * N
    return [signs[i] * beta ** (i + 1) for i in range(N)]


def _norm_sorted(roots: Sequence) -> list:
    return sorted(roots, key=lambda v: abs(complex(v)))


def predicted_plucker_map(O: ValuedTableau, roots: Sequence) -> dict[Partition, complex]:
    """Asymptotic Pluckers ``Omega_nu`` for ordinal tableau ``O`` and roots sorted by modulus."""
    vals = _norm_sorted(roots)
    omega = {}
    lam = O.shape.inner
    for i in range(1, len(O) + 1):
        b = O.box_of(i)
        nxt = lam.add_box(b)
        omega[b] = q_weight(nxt) * complex(vals[i - 1]) / q_weight(lam)
        lam = nxt
    return omega_vector(omega, O.shape)


def fiber_seed(T: ValuedTableau, roots: Sequence | None = None) -> FiberPoint:
    """Starting point for the point labelled ``T``; ``roots`` default to ``T``'s values."""
    roots = list(T.values()) if roots is None else list(roots)
    O = ordinalize(T)
    pt = point_from_pluckers(T.shape.bound, predicted_plucker_map(O, roots), label=relabel(O, roots))
    ens = _Ensemble.of([pt])
    _fit_scale(ens, target_coeffs(homogeneous(roots))[0])
    pt.s = complex(ens.s[0])
    return pt


def newton_refine(point: FiberPoint, roots, tol: float = TOL_NEWTON, max_iter: int = 30) -> FiberPoint:
    sysm = FiberSystem(point.bound, roots)
    ens = _Ensemble.of([point])
    _fit_scale(ens, sysm.P)
    res = newton(ens, sysm.H, tol, max_iter)
    if not res[0] <= tol:
        raise TrackingError(f"Newton did not converge (residual {res[0]:.3e})")
    return ens.points(res, [point.label])[0]


def _rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    den = np.maximum(np.abs(a), np.abs(b))
    mask = den > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(a - b)[mask] / den[mask]))


def point_distance(x: FiberPoint, y: FiberPoint) -> float:
    """Componentwise relative distance of the Plucker vectors, both normalized at ``x``'s largest entry."""
    k = int(np.argmax(np.abs(x.p)))
    if y.p[k] == 0:
        return math.inf
    return _rel_diff(x.p / x.p[k], y.p / y.p[k])


def _pairwise_min(p: np.ndarray) -> float:
    P = len(p)
    if P < 2:
        return math.inf
    best = math.inf
    big = np.argmax(np.abs(p), axis=1)
    for i in range(P - 1):
        k = big[i]
        a = p[i] / p[i, k]
        b = p[i + 1 :] / p[i + 1 :, k : k + 1]
        den = np.maximum(np.abs(a)[None], np.abs(b))
        den = np.where(den > 0, den, np.inf)
        best = min(best, float(np.min(np.max(np.abs(a[None] - b) / den, axis=1))))
    return best


def _check_fiber(pts: list[FiberPoint], bound: RectBound, tol: float, min_dist: float = 1e-6) -> float:
    want = syt_count(bound.full())
    bad = [q.residual for q in pts if not q.residual <= tol]
    if bad:
        raise TrackingError(f"{len(bad)} points above residual tolerance (worst {max(bad):.3e})")
    dmin = _pairwise_min(np.array([q.p for q in pts]))
    if len(pts) != want or dmin < min_dist:
        raise TrackingError(f"expected {want} distinct points, got {len(pts)} with min distance {dmin:.3e}")
    return dmin


def solve_base_fiber(bound: RectBound, roots: Sequence, tol: float = TOL_NEWTON) -> list[FiberPoint]:
    """The fiber over well-separated roots, one point per standard tableau, each labelled."""
    seeds = [fiber_seed(relabel(O, roots), roots) for O in ordinal_syt(SkewShape.straight(bound.full()))]
    ens = _Ensemble.of(seeds)
    res = newton(ens, homogeneous(roots), tol)
    pts = ens.points(res, [q.label for q in seeds])
    _check_fiber(pts, bound, tol)
    return pts


def label_point(point: FiberPoint, roots: Sequence, margin: float = 10.0) -> ValuedTableau:
    """The tableau whose asymptotic Pluckers best match ``point`` in phase and log-modulus."""
    bound = point.bound
    g = _Grass(bound)
    p = point.p
    k = int(np.argmax(np.abs(p)))
    if np.any(p == 0):
        raise AmbiguousMatch("a Plucker coordinate vanishes; roots are not separated")
    lp = np.log(p / p[k])
    Os = ordinal_syt(SkewShape.straight(bound.full()))
    scores = []
    for O in Os:
        pred = predicted_plucker_map(O, roots)
        arr = np.array([complex(pred[lam]) for lam in g.lams])
        diff = lp - np.log(arr / arr[k])
        diff = diff.real + 1j * ((diff.imag + math.pi) % (2 * math.pi) - math.pi)
        scores.append(float(np.max(np.abs(diff))))
    order = np.argsort(scores)
    best = scores[order[0]]
    second = scores[order[1]] if len(scores) > 1 else math.inf
    if not second > margin * best:
        raise AmbiguousMatch(f"label scores {best:.3g} vs {second:.3g} are not separated")
    return relabel(Os[order[0]], roots)


def mobius_matrix(phi, n: int) -> np.ndarray:
    """The ``n x n`` matrix of ``mobius_apply(phi, .)`` on coefficient vectors of degree ``< n``."""
    from .wronski import Mobius, Poly, _apply_poly

    if not isinstance(phi, Mobius):
        (a, b), (c, d) = np.asarray(phi, dtype=complex)
        phi = Mobius(complex(a), complex(b), complex(c), complex(d))
    cols = []
    for i in range(n):
        e = [0j] * n
        e[i] = 1 + 0j
        cols.append([complex(v) for v in _apply_poly(phi, Poly.of(e, n - 1)).coeffs])
    return np.array(cols, dtype=complex).T


def mobius_points(points: Sequence[FiberPoint], phi) -> list[FiberPoint]:
    """Images of fiber points under the Mobius action; roots move by ``phi``. Labels are dropped."""
    if not points:
        return []
    M = mobius_matrix(phi, points[0].bound.n)
    return [point_from_matrix(q.matrix() @ M.T) for q in points]


def is_separated(roots: Sequence, ratio: float = 50.0) -> bool:
    """Real, finite, nonzero roots whose consecutive moduli differ by at least ``ratio``."""
    vals = []
    for v in roots:
        if is_inf(v):
            return False
        v = complex(v)
        if v.imag != 0 or v.real == 0:
            return False
        vals.append(abs(v.real))
    vals.sort()
    return all(b >= ratio * a for a, b in zip(vals, vals[1:]))


def _rotation_to_finite(roots: Sequence) -> np.ndarray:
    # a rotation of RP^1 keeping every root away from 0 and infinity
    H = homogeneous(roots)
    best, best_M = -1.0, np.eye(2)
    for k in range(1, 24):
        th = math.pi * k / 24
        M = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        G = H @ M.T
        score = float(np.min(np.minimum(np.abs(G[:, 0]), np.abs(G[:, 1]))))
        if score > best:
            best, best_M = score, M
    return best_M


def solve_fiber(
    bound: RectBound,
    roots: Sequence,
    *,
    tol: float = TOL_NEWTON,
    seed: int = 0,
    beta: float | None = None,
    bump: float = 1.0,
) -> list[FiberPoint]:
    """All ``syt_count`` points over ``roots`` (values, ``INF`` allowed), pairwise distinct.

    Separated real roots are solved directly from the asymptotic seeds.
    Otherwise the separated fiber is carried along a homotopy in log space
    whose phases get a seeded random bump, which keeps the path generic.
    Points over separated real roots are labelled.
    """
    roots = list(roots)
    if len(roots) != bound.N:
        raise ValueError(f"need {bound.N} roots, got {len(roots)}")
    if is_separated(roots):
        return solve_base_fiber(bound, roots, tol)
    if any(is_inf(v) or complex(v) == 0 for v in roots):
        M = _rotation_to_finite(roots)
        moved = [complex(a / b) for a, b in homogeneous(roots) @ M.T]
        pts = solve_fiber(bound, moved, tol=tol, seed=seed, beta=beta, bump=bump)
        back = mobius_points(pts, np.linalg.inv(M))
        return _refined(back, roots, bound, tol)
    base = separated_roots(bound, beta)
    start = solve_base_fiber(bound, base, tol)
    rng = np.random.default_rng(seed)
    l0 = [cmath.log(b) for b in base]
    l1 = [cmath.log(complex(a)) for a in _norm_sorted(roots)]
    xi = rng.uniform(-1.0, 1.0, size=len(roots))

    def f(x: float) -> np.ndarray:
        w = math.sin(math.pi * x) * bump
        return homogeneous([cmath.exp((1 - x) * a + x * b + 1j * w * e) for a, b, e in zip(l0, l1, xi)])

    end, _ = track(RootPath([Segment(0.0, 1.0, f)]), start, final_tol=tol)
    return _refined(end, roots, bound, tol)


def _refined(points: Sequence[FiberPoint], roots: Sequence, bound: RectBound, tol: float) -> list[FiberPoint]:
    H = homogeneous(roots)
    ens = _Ensemble.of([q.copy() for q in points])
    _fit_scale(ens, target_coeffs(H)[0])
    res = newton(ens, H, tol)
    pts = ens.points(res, [None] * len(points))
    _check_fiber(pts, bound, tol)
    return pts


# -- tracking ----------------------------------------------------------------


@dataclass
class TrackReport:
    steps: int = 0
    rejected: int = 0
    min_step: float = math.inf
    newton_iters: int = 0
    min_distance: float = math.inf
    chart_switches: int = 0
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "rejected": self.rejected,
            "min_step": self.min_step,
            "newton_iterations": self.newton_iters,
            "min_distance": self.min_distance,
            "chart_switches": self.chart_switches,
        }


def track(
    path: RootPath,
    points: Sequence[FiberPoint],
    *,
    tol: float = 1e-10,
    final_tol: float = TOL_NEWTON,
    dt0: float = 1e-2,
    dt_min: float = 1e-8,
    dt_max: float = 0.05,
    collision: float | None = TOL_COLLISION,
    trace: bool = False,
) -> tuple[list[FiberPoint], TrackReport]:
    """Carry every point along ``path``; all points share one adaptive step size.

    Steps are tangent predictions followed by Gauss-Newton corrections; a
    step is accepted only if every point's corrector converges quickly.
    """
    if not points:
        return [], TrackReport()
    ens = _Ensemble.of([q.copy() for q in points])
    labels = [q.label for q in points]
    rep = TrackReport()
    P_prev = None
    for seg in path.segments:
        t, t_end = seg.t0, seg.t1
        span = t_end - t
        if span <= 0:
            continue
        P_new = target_coeffs(path.at_in(seg, t))[0]
        if P_prev is not None:
            # homogeneous representatives may change scale between segments
            c = np.vdot(P_new, P_prev) / np.vdot(P_new, P_new)
            if np.linalg.norm(P_prev - c * P_new) > 1e-8 * np.linalg.norm(P_prev):
                raise ValueError(f"path is discontinuous at t={t:.6g}")
            ens.s = ens.s * c
        else:
            # the caller's points may carry the scale of another representative
            _fit_scale(ens, P_new)
        dt = dt0 * span
        streak = 0
        while t < t_end - 1e-14 * span:
            h = min(dt, t_end - t, dt_max * span)
            ok, trial, iters = _step(ens, path, seg, t, h, tol)
            rep.newton_iters += iters
            dmin = math.inf
            if ok and (collision is not None or trace):
                dmin = _pairwise_min(trial.p)
                if collision is not None and dmin < collision:
                    # a corrector that lands on another tracked path: retry with a shorter step
                    if h / 2 < dt_min * span:
                        raise TrackingError(f"tracked points collide at t={t + h:.6g} (distance {dmin:.3e})")
                    ok = False
            if not ok:
                rep.rejected += 1
                dt = h / 2
                streak = 0
                if dt < dt_min * span:
                    raise TrackingError(f"step size underflow at t={t:.6g}")
                continue
            t = t + h if t_end - (t + h) > 1e-14 * span else t_end
            ens = trial
            rep.steps += 1
            rep.min_step = min(rep.min_step, h / span)
            rep.chart_switches += ens.rechart()
            rep.min_distance = min(rep.min_distance, dmin)
            if trace:
                F, scale, _ = _evaluate(ens, *target_coeffs(path.at_in(seg, t)), jac=False)
                res = _backward_error(F, scale)
                for k in range(len(ens.s)):
                    rep.trace.append((t, k, _chart_id(_Grass(ens.bound).cols[ens.ref[k]]), float(res[k]), h))
            streak += 1
            if streak >= 3 and h >= dt:
                dt = min(2 * dt, dt_max * span)
                streak = 0
        P_prev = target_coeffs(path.at_in(seg, t_end))[0]
    res = newton(ens, path.at(path.breakpoints[-1]), final_tol, max_iter=8)
    if not np.all(res <= final_tol):
        raise TrackingError(f"final refinement failed (worst residual {np.max(res):.3e})")
    return ens.points(res, labels), rep


def _chart_id(piv) -> str:
    return ",".join(str(int(c) + 1) for c in piv)


def _tangent(ens: _Ensemble, path: RootPath, seg: Segment, t: float) -> np.ndarray:
    """``dx/dt`` of the solution curve through the current points."""
    g = _Grass(ens.bound)
    P0, Pa0 = target_coeffs(path.at_in(seg, t))
    eps = 1e-7 * (seg.t1 - seg.t0)
    ta, tb = max(seg.t0, t - eps), min(seg.t1, t + eps)
    dP = (target_coeffs(path.at_in(seg, tb))[0] - target_coeffs(path.at_in(seg, ta))[0]) / (tb - ta)
    _, scale, J = _evaluate(ens, P0, Pa0)
    rhs = np.zeros(scale.shape, dtype=complex)
    rhs[:, : g.bound.N + 1] = ens.s[:, None] * dP[None, :]
    return _solve(J, rhs, scale)[0]


def _shifted(ens: _Ensemble, dx: np.ndarray) -> _Ensemble:
    out = ens.copy()
    out.set_x(ens.x() + dx)
    return out


FIRST_CORRECTION = 0.2
NOISE = 1e-8


def _step(ens: _Ensemble, path: RootPath, seg: Segment, t: float, h: float, tol: float):
    # classical Runge-Kutta on the tangent field, then Gauss-Newton
    k1 = _tangent(ens, path, seg, t)
    k2 = _tangent(_shifted(ens, 0.5 * h * k1), path, seg, t + 0.5 * h)
    k3 = _tangent(_shifted(ens, 0.5 * h * k2), path, seg, t + 0.5 * h)
    k4 = _tangent(_shifted(ens, h * k3), path, seg, t + h)
    trial = _shifted(ens, h * (k1 + 2 * k2 + 2 * k3 + k4) / 6)
    P1, Pa1 = target_coeffs(path.at_in(seg, t + h))
    prev = None
    for it in range(1, 7):
        F, scale, J = _evaluate(trial, P1, Pa1)
        res = _backward_error(F, scale)
        if np.all(res <= tol):
            return True, trial, it
        dx, y = _solve(J, -F, scale)
        size = np.max(np.abs(y), axis=1)
        if not np.all(np.isfinite(size)):
            return False, None, it
        if prev is None and np.any(size > FIRST_CORRECTION):
            return False, None, it
        # below NOISE the updates are rounding in an ill-conditioned solve
        if prev is not None and np.any((size > 0.5 * prev) & (size > NOISE)):
            return False, None, it
        trial.set_x(trial.x() + dx)
        prev = size
    F, scale, _ = _evaluate(trial, P1, Pa1, jac=False)
    return bool(np.all(_backward_error(F, scale) <= tol)), trial, 6


# -- monodromy ---------------------------------------------------------------


@dataclass
class MonodromyResult:
    base: list[FiberPoint]
    perm: list[int]
    report: TrackReport
    ratios: list[float]

    def label_map(self) -> dict:
        """``label of base point -> label of the point it was carried to``."""
        return {_key(self.base[i].label): self.base[j].label for i, j in enumerate(self.perm)}

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.perm[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out


def _key(T):
    if isinstance(T, ValuedTableau):
        return tuple(T.entries)
    return T


def match_points(ends: Sequence[FiberPoint], base: Sequence[FiberPoint], ratio: float = 0.1) -> tuple[list[int], list[float]]:
    """Nearest base point for each end point, certified by nearest/second-nearest <= ``ratio``."""
    perm, ratios = [], []
    for e in ends:
        dist = sorted((point_distance(b, e), j) for j, b in enumerate(base))
        d0, j0 = dist[0]
        d1 = dist[1][0] if len(dist) > 1 else math.inf
        r = d0 / d1 if d1 > 0 else math.inf
        if not r <= ratio:
            raise AmbiguousMatch(f"end point matches ambiguously (ratio {r:.3g})")
        perm.append(j0)
        ratios.append(r)
    if sorted(perm) != list(range(len(base))):
        raise AmbiguousMatch("endpoint matching is not a bijection")
    return perm, ratios


def monodromy(loop: RootPath, base: Sequence[FiberPoint], **kw) -> MonodromyResult:
    start, end = homogeneous_close(loop)
    if not start:
        raise ValueError("path is not closed")
    ends, rep = track(loop, base, **kw)
    perm, ratios = match_points(ends, base)
    return MonodromyResult(list(base), perm, rep, ratios)


def homogeneous_close(path: RootPath, tol: float = 1e-9) -> tuple[bool, float]:
    from .wronski import multiset_distance

    a, b = path.start(), path.end()
    d = multiset_distance(a, b)
    return d <= tol, d


def perm_power(perm: Sequence[int], k: int) -> list[int]:
    out = list(range(len(perm)))
    for _ in range(k):
        out = [perm[i] for i in out]
    return out


def expected_perm(base: Sequence[FiberPoint], f: Callable[[ValuedTableau], ValuedTableau]) -> list[int]:
    """Permutation of base points induced by a map on their labels."""
    idx = {_key(p.label): i for i, p in enumerate(base)}
    return [idx[_key(f(p.label))] for p in base]


# -- loops ---------------------------------------------------------------------


def critical_points(L_values: Iterable[int]) -> list[complex]:
    from .leadterms import critical_ratio

    out = []
    for L in L_values:
        out.extend(critical_ratio(L))
    return out


def winding_number(curve: Sequence[complex], center: complex) -> float:
    z = np.asarray(curve) - center
    ang = np.unwrap(np.angle(z))
    return float((ang[-1] - ang[0]) / (2 * math.pi))


def _skl_ratio_path(r0: complex, L: int, Lmax: int, rho: float | None = None):
    from .leadterms import critical_ratio

    rstar = critical_ratio(L)[0]
    others = [z for z in critical_points([l for l in range(2, max(Lmax, L) + 1) if l != L])] + [-1.0 + 0j, np.conj(rstar)]
    gap = min(abs(rstar - z) for z in others)
    if rho is None:
        rho = min(0.05, 0.3 * gap)
    sigma = 1.0 if r0.real > 0 else -1.0
    mid = sigma * 0.5 + 0j
    near = (1 - rho) * rstar
    phi0 = cmath.phase(-rstar)

    def r(u: float) -> complex:
        # five equal pieces: approach, enter, circle, leave, return
        k = min(int(u * 5), 4)
        x = u * 5 - k
        if k == 0:
            return r0 + x * (mid - r0)
        if k == 1:
            return mid + x * (near - mid)
        if k == 2:
            return rstar + rho * cmath.exp(1j * (phi0 + 2 * math.pi * x))
        if k == 3:
            return near + x * (mid - near)
        return mid + x * (r0 - mid)

    return r, rstar, rho


def loop_skl(base: Sequence[float], k: int, L: int, bound: RectBound | None = None, rho: float | None = None) -> RootPath:
    """Loop that circles the critical ratio for the ordinals ``k, k+1`` at distance ``L`` once.

    The roots other than ``a_k`` stay fixed; ``a_k = r a_{k+1}`` with ``r``
    following a lasso around ``exp(i theta_L)``.
    """
    vals = _norm_sorted(base)
    N = len(vals)
    if not 1 <= k < N:
        raise ValueError("k out of range")
    Lmax = (bound.d + bound.width - 2) if bound is not None else max(L, 4)
    r0 = complex(vals[k - 1]) / complex(vals[k])
    r, rstar, rho = _skl_ratio_path(r0, L, Lmax, rho)
    ak1 = complex(vals[k])

    def f(u: float) -> np.ndarray:
        cur = list(vals)
        cur[k - 1] = r(u) * ak1
        return homogeneous(cur)

    segs = [Segment(i / 5, (i + 1) / 5, (lambda i: lambda x: f((i + x) / 5))(i)) for i in range(5)]
    path = RootPath(segs)
    path.ratio_curve = [r(u) for u in np.linspace(0, 1, 2001)]
    path.critical = rstar
    return path


def _psi_matrix(N: int) -> np.ndarray:
    # rotation of RP^1 keeping every rotation root finite
    phi = math.pi / 2 + math.pi / (2 * N)
    return np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])


def _rotation_angles(N: int) -> list[float]:
    # uneven spacing: the evenly spread configuration is symmetric, and its
    # fiber has points with whole weight classes of coordinates equal to zero
    golden = (math.sqrt(5) - 1) / 2
    off = [0.3 * (((j * golden) % 1.0) - 0.5) for j in range(1, N)] + [0.0]
    return [math.pi * (j + off[j - 1]) / N for j in range(1, N + 1)]


def _rotated_angle(th: list[float], j: int, x: float, direction: int) -> float:
    """Angle of root ``j`` (0-based) after moving the fraction ``x`` towards its neighbour."""
    N = len(th)
    k = j + direction
    dest = th[k % N] + math.pi * (k // N)
    return (1 - x) * th[j] + x * dest


def _psi_value(M: np.ndarray, th: float) -> tuple[float, float]:
    a, b = M @ np.array([math.sin(th), math.cos(th)])
    return a, b


def rotation_roots(N: int) -> list[float]:
    """Increasing real roots ``tan(theta_j - phi)`` for slightly uneven angles ``theta_j`` near ``pi j / N``.

    They are spread over ``[-cot(pi/2N), cot(pi/2N)]``; a tight cluster
    would put the fiber next to the totally degenerate one.
    """
    M = _psi_matrix(N)
    return [a / b for a, b in (_psi_value(M, th) for th in _rotation_angles(N))]


def loop_rotation(base: Sequence[float], direction: int = -1) -> RootPath:
    """Cyclic rotation loop based at the real configuration ``base``.

    The base is joined to :func:`rotation_roots` by an order-preserving
    path in signed log scale. There every root moves to the position of its
    predecessor (``direction=-1``, the smallest one passing through infinity
    to the top), and the connection is retraced with the labels shifted.
    """
    vals = sorted(float(v) for v in base)
    N = len(vals)
    R = rotation_roots(N)
    M = _psi_matrix(N)
    th = _rotation_angles(N)
    connect = _slog_func(vals, R)

    def rot(x: float) -> np.ndarray:
        H = np.array([_psi_value(M, _rotated_angle(th, j, x, direction)) for j in range(N)], dtype=complex)
        return H / np.linalg.norm(H, axis=1, keepdims=True)

    segs = [
        Segment(0.0, 1 / 3, connect, (tuple(vals), tuple(R)), "log"),
        Segment(1 / 3, 2 / 3, rot),
        Segment(2 / 3, 1.0, lambda x: _relabelled(connect(1 - x), direction)),
    ]
    return RootPath(segs)


def _relabelled(H: np.ndarray, direction: int) -> np.ndarray:
    # after the rotation root j sits where root j+direction started
    return np.roll(H, -direction, axis=0)


# -- random real paths -----------------------------------------------------------


def separated_endpoint(rng: np.random.Generator, N: int, beta: float) -> list[float]:
    """Sorted real values whose moduli are the powers ``beta^1..beta^N`` with random signs."""
    mags = [beta ** (i + 1) for i in range(N)]
    signs = rng.choice([-1.0, 1.0], size=N)
    return sorted(s * m for s, m in zip(signs, mags))


def random_real_path(rng: np.random.Generator, start: Sequence[float], beta: float, waypoints: int = 2, end: Sequence[float] | None = None) -> RootPath:
    """Piecewise-linear real path keeping the value order (so roots never collide).

    The end is a separated configuration, so both ends carry tableau labels.
    """
    start = list(start)
    N = len(start)
    order = sorted(range(N), key=lambda i: start[i])
    pts = [start]
    top = math.log10(beta) * N
    for _ in range(waypoints):
        mags = 10 ** rng.uniform(0, top, size=N)
        signs = rng.choice([-1.0, 1.0], size=N)
        vals = sorted(s * m for s, m in zip(signs, mags))
        w = [0.0] * N
        for rank, i in enumerate(order):
            w[i] = vals[rank]
        pts.append(w)
    vals = sorted(end) if end is not None else separated_endpoint(rng, N, beta)
    w = [0.0] * N
    for rank, i in enumerate(order):
        w[i] = vals[rank]
    pts.append(w)
    return RootPath.through(pts, interp="log")


def random_real_loop(rng: np.random.Generator, base: Sequence[float], avoid: float | None = None, waypoints: int = 3) -> RootPath:
    """Closed real loop whose roots never meet ``avoid`` (infinity when ``None``).

    In the coordinate ``u = K / (avoid - a)`` (``K`` makes the smallest
    ``|u|`` equal to 1) the loop is an order-preserving
    path in signed log scale through random waypoints, so the roots stay
    distinct and never reach ``u = infinity``.
    """
    base = [float(v) for v in base]
    N = len(base)
    phi = np.eye(2) if avoid is None else np.array([[0.0, 1.0], [-1.0, avoid]])
    # scale so the smallest |u| is 1: slog is linear below that
    small = min((abs(_mob(phi, a)) for a in base if _mob(phi, a) != 0), default=1.0)
    phi = np.diag([1.0 / small, 1.0]) @ phi
    u = [_mob(phi, a) for a in base]
    order = sorted(range(N), key=lambda i: u[i])
    lo, hi = 0.0, math.log10(max(max(abs(x) for x in u), 10.0))
    pts = [u]
    for _ in range(waypoints):
        mags = 10 ** rng.uniform(lo, hi, size=N)
        signs = rng.choice([-1.0, 1.0], size=N)
        vals = sorted(s * m for s, m in zip(signs, mags))
        w = [0.0] * N
        for rank, i in enumerate(order):
            w[i] = vals[rank]
        pts.append(w)
    pts.append(u)
    return RootPath.through(pts, interp="log").mobius(np.linalg.inv(phi))


def _mob(M: np.ndarray, a: float) -> float:
    return (M[0, 0] * a + M[0, 1]) / (M[1, 0] * a + M[1, 1])


# -- limits ----------------------------------------------------------------------


@dataclass
class LimitResult:
    point: FiberPoint
    cycle: int
    spread: float


def compress_fiber(points: Sequence[FiberPoint], roots: Sequence[float], ratio: float = 3.0) -> tuple[list[FiberPoint], list[float]]:
    """Carry a labelled fiber over positive increasing ``roots`` to ``ratio^1..ratio^N``.

    The path keeps the roots positive and in order, so no norm or sign
    crossing happens and the labels carry over unchanged (with the new values).
    Limits are then computed without the cancellation a huge spread would cause.
    """
    roots = [float(v) for v in roots]
    if any(v <= 0 for v in roots) or roots != sorted(roots):
        raise ValueError("compress_fiber needs positive increasing roots")
    new = [ratio ** (i + 1) for i in range(len(roots))]
    out, _ = track(RootPath.through([roots, new], interp="log"), points)
    where = {v: i for i, v in enumerate(roots)}
    for q, q0 in zip(out, points):
        if q0.label is not None:
            q.label = q0.label.map_values(lambda v: new[where[float(v)]])
    return out, new


def _contract_func(base: Sequence, block: Sequence[int], c: float):
    vals = list(base)

    def f(h: complex) -> np.ndarray:
        cur = list(vals)
        for i in block:
            cur[i] = c + h * (vals[i] - c)
        return homogeneous(cur)

    return f


def _contraction_radius(base: Sequence, block: Sequence[int], c: float) -> float:
    # the contraction parameter at which a block root reaches an outside root's distance
    inside = [abs(complex(base[i]) - c) for i in block]
    outside = [abs(complex(base[j]) - c) for j in range(len(base)) if j not in block]
    if not outside:
        return 1.0
    return min(1.0, min(outside) / max(inside))


def limit_points(
    points: Sequence[FiberPoint],
    base: Sequence[float],
    block: Sequence[int],
    c: float,
    h_end: float | None = None,
    samples: int = 64,
    max_cycle: int = 6,
) -> list[LimitResult]:
    """Limits of the points as the roots with indices ``block`` contract onto ``c``.

    The roots ``c + h (a_i - c)`` of the block are carried geometrically to
    ``h = h_end`` (by default 1/20 of the radius where the block would reach
    the other roots). A Cauchy integral over loops ``h = h_end e^{i phi}``,
    repeated until the point returns, gives the limit at ``h = 0`` and the
    cycle length.
    """
    base = list(base)
    if h_end is None:
        h_end = 0.05 * _contraction_radius(base, block, c)
    f = _contract_func(base, block, c)
    approach = RootPath([Segment(0.0, 1.0, lambda x: f(h_end**x))])
    mids, _ = track(approach, points, collision=None)
    return [_cauchy_limit(pt, f, h_end, samples, max_cycle) for pt in mids]


def _cauchy_limit(pt: FiberPoint, f, h_end: float, samples: int, max_cycle: int) -> LimitResult:
    g = _Grass(pt.bound)
    p0 = pt.plucker_array()
    ref = int(np.argmax(np.abs(p0)))
    acc = []
    cur = pt
    for cyc in range(1, max_cycle + 1):
        for k in range(samples):
            a0 = 2 * math.pi * k / samples
            a1 = 2 * math.pi * (k + 1) / samples
            seg = RootPath([Segment(0.0, 1.0, (lambda a0, a1: lambda x: f(h_end * cmath.exp(1j * (a0 + x * (a1 - a0)))))(a0, a1))])
            (cur,), _ = track(seg, [cur], collision=None)
            pa = cur.plucker_array()
            acc.append(pa / pa[ref])
        if point_distance(pt, cur) < 1e-6:
            mean = np.mean(np.array(acc), axis=0)
            spread = float(np.max(np.abs(np.array(acc) - mean)))
            lim = point_from_pluckers(pt.bound, dict(zip(g.lams, mean)), label=pt.label)
            return LimitResult(lim, cyc, spread)
    raise TrackingError("limit loop did not close; extrapolation failed")


def limit_clusters(limits: Sequence[LimitResult], tol: float = 1e-6) -> list[list[int]]:
    """Group limit points within ``tol`` of each other (componentwise relative Plucker distance)."""
    groups: list[list[int]] = []
    for i, L in enumerate(limits):
        for grp in groups:
            if point_distance(limits[grp[0]].point, L.point) <= tol:
                grp.append(i)
                break
        else:
            groups.append([i])
    return groups


def schubert_at(point: FiberPoint, c: float, k: int, tol: float = 1e-6) -> list[Partition]:
    """Partitions ``lam`` of ``k`` with ``point`` in the closure of ``X_lam(c)``.

    The point is moved by ``a -> (a - c) / |c|`` (``a -> a`` when ``c = 0``),
    which sends ``c`` to 0 without mixing scales.
    """
    from .partitions import partitions_of_size
    from .wronski import schubert_pattern

    bound = point.bound
    if c == 0:
        q = point
    else:
        r = math.sqrt(abs(c))
        q = mobius_points([point], np.array([[1 / r, -c / r], [0.0, r]]))[0]
    g = _Grass(bound)
    pv = PluckerVector(dict(zip(g.lams, q.p)), bound)
    return [lam for lam in partitions_of_size(bound, k) if schubert_pattern(pv, lam, tol) != "none"]


# -- serialization ----------------------------------------------------------------


def load_path(fp) -> RootPath:
    return RootPath.from_json(json.load(fp))
