"""Group-ring matrices, truncated l2 data, and the operators acting on them.

Exact data (integer / rational coefficients) lives in :class:`GroupRingMatrix`
and :class:`FinSuppVector`, both backed by ``dict`` maps ``element -> coeff``.
Floating point enters only through :class:`TruncatedL2Matrix`, whose entries
are dense arrays over an enumerated ball.

Vectors act as rows under right multiplication (``r_apply``, ``r_xi_apply``)
and as columns under left convolution (``lambda_apply``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .groups import Ball, GroupDescriptor

__all__ = [
    "GroupRingMatrix",
    "FinSuppVector",
    "TruncatedL2Matrix",
    "TorusConfiguration",
    "Membership",
    "lambda_apply",
    "right_apply",
    "r_apply",
    "r_xi_apply",
    "star",
    "hat",
    "inner",
    "duality_pairing",
    "q_map",
    "image_membership",
    "mod1",
    "torus_distance",
]


class DimensionError(ValueError):
    pass


# -- finite-support maps --------------------------------------------------


def _clean(d: dict) -> dict:
    return {g: c for g, c in d.items() if c != 0}


def _acc(d: dict, g, c) -> None:
    d[g] = d.get(g, 0) + c


def _ring_product(group: GroupDescriptor, x: dict, y: dict) -> dict:
    out: dict = {}
    mul = group.mul
    for g, a in x.items():
        for h, b in y.items():
            _acc(out, mul(g, h), a * b)
    return out


def _left_conv(group: GroupDescriptor, c: dict, x: dict) -> dict:
    """(c * x)(g) = sum_h c(h) x(h^-1 g), evaluated pointwise."""
    mul, inv = group.mul, group.inverse
    cand = {mul(h, u) for h in c for u in x}
    out = {}
    for g in cand:
        s = 0
        for h, a in c.items():
            v = x.get(mul(inv(h), g))
            if v is not None:
                s += a * v
        out[g] = s
    return out


def _right_conv(group: GroupDescriptor, x: dict, c: dict) -> dict:
    """(x * c)(g) = sum_h x(h) c(h^-1 g) with c acting on the right, evaluated pointwise."""
    mul, inv = group.mul, group.inverse
    cand = {mul(u, s) for u in x for s in c}
    out = {}
    for g in cand:
        s = 0
        for h, a in x.items():
            v = c.get(mul(inv(h), g))
            if v is not None:
                s += a * v
        out[g] = s
    return out


def _add_maps(x: dict, y: dict, sign=1) -> dict:
    out = dict(x)
    for g, c in y.items():
        _acc(out, g, sign * c)
    return out


def _degree(group: GroupDescriptor, maps: Iterable[dict]) -> int:
    return max((group.word_length(g) for d in maps for g in d), default=0)


def _domain(maps: Iterable[dict]) -> str:
    rank = 0
    order = {int: 0, Fraction: 1, float: 2, complex: 3}
    for d in maps:
        for c in d.values():
            if isinstance(c, (bool, int, np.integer)):
                r = 0
            elif isinstance(c, Fraction):
                r = 0 if c.denominator == 1 else 1
            elif isinstance(c, complex) or np.iscomplexobj(c):
                r = 3
            else:
                r = 2
            rank = max(rank, r)
    return ["integer", "rational", "real", "complex"][rank]


# -- exact containers ----------------------------------------------------


class GroupRingMatrix:
    """An m x n matrix over the group ring, entries stored as sparse maps."""

    __slots__ = ("group", "entries")

    def __init__(self, group: GroupDescriptor, entries: Sequence[Sequence[dict]]):
        rows = tuple(tuple(_clean(dict(e)) for e in row) for row in entries)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("group-ring matrix must be a nonempty rectangle")
        for row in rows:
            for e in row:
                for g in e:
                    group.validate(g)
        self.group = group
        self.entries = rows

    @classmethod
    def identity(cls, group: GroupDescriptor, n: int, coeff=1) -> "GroupRingMatrix":
        e = group.identity()
        return cls(group, [[{e: coeff} if i == j else {} for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, group: GroupDescriptor, m: int, n: int) -> "GroupRingMatrix":
        return cls(group, [[{} for _ in range(n)] for _ in range(m)])

    @classmethod
    def scalar(cls, group: GroupDescriptor, d: dict) -> "GroupRingMatrix":
        return cls(group, [[d]])

    @property
    def shape(self) -> tuple:
        return len(self.entries), len(self.entries[0])

    def entry(self, i: int, j: int) -> dict:
        return self.entries[i][j]

    def maps(self):
        return (e for row in self.entries for e in row)

    @property
    def degree(self) -> int:
        return _degree(self.group, self.maps())

    @property
    def domain(self) -> str:
        return _domain(self.maps())

    def is_integer(self) -> bool:
        return self.domain == "integer"

    def support(self) -> set:
        return {g for e in self.maps() for g in e}

    def _check(self, other: "GroupRingMatrix") -> None:
        if not isinstance(other, GroupRingMatrix) or other.group != self.group:
            raise DimensionError("operands live over different groups")

    def __add__(self, other):
        self._check(other)
        if other.shape != self.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return GroupRingMatrix(
            self.group, [[_add_maps(a, b) for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self * -1

    def __mul__(self, c):
        if isinstance(c, GroupRingMatrix):
            return NotImplemented
        return GroupRingMatrix(self.group, [[{g: c * v for g, v in e.items()} for e in row] for row in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        m, n = self.shape
        n2, p = other.shape
        if n != n2:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(m):
            row = []
            for j in range(p):
                acc: dict = {}
                for k in range(n):
                    for g, c in _ring_product(self.group, self.entries[i][k], other.entries[k][j]).items():
                        _acc(acc, g, c)
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(self.group, out)

    def __eq__(self, other):
        return isinstance(other, GroupRingMatrix) and self.group == other.group and self.entries == other.entries

    __hash__ = None

    def __repr__(self):
        from .parse import format_matrix

        return f"GroupRingMatrix({self.group}, {format_matrix(self)})"

    def column(self, j: int) -> "FinSuppVector":
        return FinSuppVector(self.group, [row[j] for row in self.entries])

    def row(self, i: int) -> "FinSuppVector":
        return FinSuppVector(self.group, self.entries[i])


class FinSuppVector:
    """An element of C(G)^n (or c_c(G)^n): n finitely supported maps."""

    __slots__ = ("group", "components")

    def __init__(self, group: GroupDescriptor, components: Sequence[dict]):
        comps = tuple(_clean(dict(c)) for c in components)
        if not comps:
            raise DimensionError("vector needs at least one component")
        for c in comps:
            for g in c:
                group.validate(g)
        self.group = group
        self.components = comps

    @classmethod
    def zero(cls, group: GroupDescriptor, n: int) -> "FinSuppVector":
        return cls(group, [{}] * n)

    @classmethod
    def basis(cls, group: GroupDescriptor, n: int, k: int, g=None, coeff=1) -> "FinSuppVector":
        g = group.identity() if g is None else g
        return cls(group, [{g: coeff} if i == k else {} for i in range(n)])

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k: int) -> dict:
        return self.components[k]

    @property
    def degree(self) -> int:
        return _degree(self.group, self.components)

    @property
    def domain(self) -> str:
        return _domain(self.components)

    def items(self):
        """Iterate ``((l, g), coeff)`` over the support."""
        for l, c in enumerate(self.components):
            for g, v in c.items():
                yield (l, g), v

    def is_zero(self) -> bool:
        return not any(self.components)

    def l1_norm(self) -> float:
        return float(sum(abs(v) for c in self.components for v in c.values()))

    def _check(self, other):
        if not isinstance(other, FinSuppVector) or other.group != self.group or len(other) != len(self):
            raise DimensionError("vector operands do not match")

    def __add__(self, other):
        self._check(other)
        return FinSuppVector(self.group, [_add_maps(a, b) for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._check(other)
        return FinSuppVector(self.group, [_add_maps(a, b, -1) for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return self * -1

    def __mul__(self, c):
        return FinSuppVector(self.group, [{g: c * v for g, v in d.items()} for d in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, FinSuppVector) and self.group == other.group and self.components == other.components
        )

    __hash__ = None

    def __repr__(self):
        from .parse import format_vector

        return f"FinSuppVector({self.group}, {format_vector(self)})"


# -- truncated l2 data -----------------------------------------------------


@dataclass(eq=False)
class TruncatedL2Matrix:
    """n x n matrix of real functions supported in the ball B_R.

    ``coeffs[i, j]`` is entry (i, j) laid out in canonical ball order.
    Residuals and ``tail_mass`` are filled in by the solver that produced it;
    ``info`` carries the rest of its report.
    """

    group: GroupDescriptor
    radius: int
    coeffs: np.ndarray
    residual_left: float = 0.0
    residual_right: float = 0.0
    tail_mass: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != self.coeffs.shape[1]:
            raise DimensionError("coeffs must have shape (n, n, |B_R|)")
        if self.coeffs.shape[2] != len(self.ball):
            raise DimensionError(f"coeffs length {self.coeffs.shape[2]} != |B_{self.radius}| = {len(self.ball)}")
        if min(self.residual_left, self.residual_right, self.tail_mass) < 0:
            raise ValueError("residuals and tail mass are nonnegative")

    @property
    def ball(self) -> Ball:
        return self.group.ball(self.radius)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def delta(cls, group: GroupDescriptor, n: int, radius: int = 0, scale: float = 1.0) -> "TruncatedL2Matrix":
        ball = group.ball(radius)
        c = np.zeros((n, n, len(ball)))
        for i in range(n):
            c[i, i, ball.index[group.identity()]] = scale
        return cls(group, radius, c)

    @classmethod
    def from_matrix(cls, x: GroupRingMatrix, radius: int) -> "TruncatedL2Matrix":
        ball = x.group.ball(radius)
        n = x.shape[0]
        if x.shape != (n, n):
            raise DimensionError("need a square matrix")
        c = np.zeros((n, n, len(ball)))
        for i in range(n):
            for j in range(n):
                for g, v in x.entries[i][j].items():
                    if g not in ball.index:
                        raise ValueError(f"support element {g} lies outside B_{radius}")
                    c[i, j, ball.index[g]] = float(v)
        return cls(x.group, radius, c)

    def entry(self, i: int, j: int) -> dict:
        els = self.ball.elements
        row = self.coeffs[i, j]
        return {els[t]: float(row[t]) for t in np.flatnonzero(row)}

    def to_matrix(self) -> GroupRingMatrix:
        n = self.n
        return GroupRingMatrix(self.group, [[self.entry(i, j) for j in range(n)] for i in range(n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def restrict(self, radius: int) -> "TruncatedL2Matrix":
        if radius > self.radius:
            raise ValueError("can only restrict to a smaller ball")
        k = self.ball.prefix(radius)
        return TruncatedL2Matrix(self.group, radius, self.coeffs[:, :, :k].copy())

    def extend(self, radius: int) -> "TruncatedL2Matrix":
        if radius < self.radius:
            return self.restrict(radius)
        big = self.group.ball(radius)
        c = np.zeros((self.n, self.n, len(big)))
        c[:, :, : self.coeffs.shape[2]] = self.coeffs
        return TruncatedL2Matrix(self.group, radius, c)

    def sphere_masses(self) -> np.ndarray:
        """Squared l2 mass of each sphere S_r, r = 0..R."""
        sq = (self.coeffs**2).sum(axis=(0, 1))
        return np.array([sq[lo:hi].sum() for _, lo, hi in self.ball.spheres()])


# -- torus configurations ----------------------------------------------------


def mod1(x):
    """Representative of x + Z in [0, 1)."""
    if isinstance(x, Fraction):
        return x % 1
    r = float(x) % 1.0
    return 0.0 if r >= 1.0 else r


def torus_distance(x, y) -> float:
    d = abs(float(x) - float(y)) % 1.0
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class TorusConfiguration:
    """Values in T = R/Z on a finite window of (component, element) pairs."""

    group: GroupDescriptor
    window: tuple
    values: tuple

    def __post_init__(self):
        w = tuple((int(l), g) for l, g in self.window)
        if len(set(w)) != len(w):
            raise ValueError("window has duplicate points")
        vals = tuple(mod1(v) for v in self.values)
        if len(vals) != len(w):
            raise ValueError("one value per window point")
        object.__setattr__(self, "window", w)
        object.__setattr__(self, "values", vals)

    def as_dict(self) -> dict:
        return dict(zip(self.window, self.values))

    def value(self, l: int, g):
        return self.as_dict()[(l, g)]

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(torus_distance(v, 0) <= tol for v in self.values)


# -- operators ---------------------------------------------------------------


def _coef_arrays(c: dict):
    supp = tuple(c)
    return supp, np.array([float(c[h]) for h in supp])


def _conv_dense(f: GroupRingMatrix, xi: np.ndarray, ball_in: Ball, ball_out: Ball, side: str) -> np.ndarray:
    m, n = f.shape
    p = xi.shape[1] if side == "left" else xi.shape[0]
    out = np.zeros((m, p, len(ball_out)) if side == "left" else (p, n, len(ball_out)))
    if side == "left":
        # (f xi)_ij = sum_k f_ik * xi_kj
        for i in range(m):
            for k in range(n):
                if not f.entries[i][k]:
                    continue
                supp, coef = _coef_arrays(f.entries[i][k])
                tab = ball_in.table(supp, ball_out, "left")
                for j in range(p):
                    kernels.scatter_conv(out[i, j], xi[k, j], tab, coef)
    else:
        # (xi f)_ij = sum_k xi_ik *_r f_kj
        for k in range(m):
            for j in range(n):
                if not f.entries[k][j]:
                    continue
                supp, coef = _coef_arrays(f.entries[k][j])
                tab = ball_in.table(supp, ball_out, "right")
                for i in range(p):
                    kernels.scatter_conv(out[i, j], xi[i, k], tab, coef)
    return out


def lambda_apply(f: GroupRingMatrix, x):
    """Left convolution by f.

    ``x`` may be a :class:`FinSuppVector` (a column), a :class:`GroupRingMatrix`
    read as a matrix of finitely supported functions, or a
    :class:`TruncatedL2Matrix`; the result has the same kind.
    """
    m, n = f.shape
    G = f.group
    if isinstance(x, TruncatedL2Matrix):
        if x.n != n or m != n:
            raise DimensionError(f"cannot apply {f.shape} matrix to {x.n}x{x.n} data")
        out_ball = G.ball(x.radius + f.degree)
        out = _conv_dense(f, x.coeffs, x.ball, out_ball, "left")
        return TruncatedL2Matrix(G, out_ball.radius, out)
    if isinstance(x, FinSuppVector):
        if len(x) != n or x.group != G:
            raise DimensionError(f"cannot apply {f.shape} matrix to a length-{len(x)} vector")
        comps = []
        for l in range(m):
            acc: dict = {}
            for k in range(n):
                for g, c in _left_conv(G, f.entries[l][k], x.components[k]).items():
                    _acc(acc, g, c)
            comps.append(acc)
        return FinSuppVector(G, comps)
    if isinstance(x, GroupRingMatrix):
        if x.shape[0] != n or x.group != G:
            raise DimensionError(f"cannot apply {f.shape} matrix to {x.shape}")
        cols = [lambda_apply(f, x.column(j)) for j in range(x.shape[1])]
        return GroupRingMatrix(G, [[cols[j].components[i] for j in range(len(cols))] for i in range(m)])
    raise TypeError(f"lambda_apply does not accept {type(x).__name__}")


def right_apply(x, f: GroupRingMatrix):
    """Right multiplication x f, i.e. ``(x f)_ij = sum_k r(f_kj) x_ik``."""
    G = f.group
    m, n = f.shape
    if isinstance(x, TruncatedL2Matrix):
        if x.n != m or m != n:
            raise DimensionError("dimension mismatch")
        out_ball = G.ball(x.radius + f.degree)
        out = _conv_dense(f, x.coeffs, x.ball, out_ball, "right")
        return TruncatedL2Matrix(G, out_ball.radius, out)
    if isinstance(x, GroupRingMatrix):
        p, m2 = x.shape
        if m2 != m or x.group != G:
            raise DimensionError(f"cannot multiply {x.shape} by {f.shape}")
        rows = []
        for i in range(p):
            row = []
            for j in range(n):
                acc: dict = {}
                for k in range(m):
                    for g, c in _right_conv(G, x.entries[i][k], f.entries[k][j]).items():
                        _acc(acc, g, c)
                row.append(acc)
            rows.append(row)
        return GroupRingMatrix(G, rows)
    if isinstance(x, FinSuppVector):
        return right_apply(GroupRingMatrix(G, [list(x.components)]), f).row(0)
    raise TypeError(f"right_apply does not accept {type(x).__name__}")


def r_apply(f: GroupRingMatrix, alpha: FinSuppVector) -> FinSuppVector:
    """``(r(f) alpha)(l) = sum_k alpha_k f_kl`` as a group-ring product."""
    m, n = f.shape
    if len(alpha) != m or alpha.group != f.group:
        raise DimensionError(f"r({f.shape[0]}x{f.shape[1]}) needs a length-{m} vector, got {len(alpha)}")
    comps = []
    for l in range(n):
        acc: dict = {}
        for k in range(m):
            for g, c in _ring_product(f.group, alpha.components[k], f.entries[k][l]).items():
                _acc(acc, g, c)
        comps.append(acc)
    return FinSuppVector(f.group, comps)


def _r_xi_dense(xi: TruncatedL2Matrix, alpha: FinSuppVector):
    """Dense ``r(xi) alpha`` on the ball B_{R + deg(alpha)}; returns (ball, array (n, |ball|))."""
    n = xi.n
    if len(alpha) != n or alpha.group != xi.group:
        raise DimensionError(f"r(xi) with n={n} needs a length-{n} vector")
    ball_out = xi.group.ball(xi.radius + alpha.degree)
    out = np.zeros((n, len(ball_out)))
    for k in range(n):
        if not alpha.components[k]:
            continue
        supp, coef = _coef_arrays(alpha.components[k])
        tab = xi.ball.table(supp, ball_out, "left")
        for l in range(n):
            kernels.scatter_conv(out[l], xi.coeffs[k, l], tab, coef)
    return ball_out, out


def r_xi_apply(xi, alpha: FinSuppVector) -> FinSuppVector:
    """``(r(xi) alpha)(l) = sum_k lambda(alpha(k)) xi_kl``.

    Exact when ``xi`` is a :class:`GroupRingMatrix`; floating point for a
    :class:`TruncatedL2Matrix`.
    """
    if isinstance(xi, GroupRingMatrix):
        n = xi.shape[0]
        if xi.shape != (n, n) or len(alpha) != n:
            raise DimensionError("dimension mismatch")
        comps = []
        for l in range(n):
            acc: dict = {}
            for k in range(n):
                for g, c in _left_conv(xi.group, alpha.components[k], xi.entries[k][l]).items():
                    _acc(acc, g, c)
            comps.append(acc)
        return FinSuppVector(xi.group, comps)
    ball, arr = _r_xi_dense(xi, alpha)
    els = ball.elements
    return FinSuppVector(xi.group, [{els[t]: float(row[t]) for t in np.flatnonzero(row)} for row in arr])


def star(x):
    """Adjoint: ``(x*)_ij(g) = conj(x_ji(g^-1))``."""
    if isinstance(x, GroupRingMatrix):
        inv = x.group.inverse
        m, n = x.shape
        return GroupRingMatrix(
            x.group,
            [[{inv(g): c.conjugate() for g, c in x.entries[j][i].items()} for j in range(m)] for i in range(n)],
        )
    if isinstance(x, TruncatedL2Matrix):
        c = x.coeffs.transpose(1, 0, 2)[:, :, x.ball.inverse_perm]
        return TruncatedL2Matrix(
            x.group,
            x.radius,
            np.ascontiguousarray(c),
            residual_left=x.residual_right,
            residual_right=x.residual_left,
            tail_mass=x.tail_mass,
            info=dict(x.info, adjoint=True),
        )
    raise TypeError(f"star does not accept {type(x).__name__}")


def hat(x):
    """``x^ = x (delta_e (x) id)``: the coefficient functions of x."""
    G = x.group
    if isinstance(x, GroupRingMatrix):
        n = x.shape[1]
        delta = GroupRingMatrix.identity(G, n)
        return lambda_apply(x, delta)
    if isinstance(x, FinSuppVector):
        e = G.identity()
        return FinSuppVector(G, [_left_conv(G, c, {e: 1}) for c in x.components])
    raise TypeError(f"hat does not accept {type(x).__name__}")


def inner(u: FinSuppVector, v: FinSuppVector):
    """l2 inner product, linear in the first argument."""
    if len(u) != len(v):
        raise DimensionError("length mismatch")
    s = 0
    for a, b in zip(u.components, v.components):
        small, big = (a, b) if len(a) <= len(b) else (b, a)
        for g in small:
            if g in big:
                s += a[g] * b[g].conjugate()
    return s


def duality_pairing(theta: TorusConfiguration, alpha: FinSuppVector):
    """``<theta, alpha>_T = sum_{l,g} alpha^(l)(g) theta(l)(g)`` mod 1."""
    vals = theta.as_dict()
    s = 0
    for (l, g), c in hat(alpha).items():
        if (l, g) not in vals:
            raise ValueError(f"support point ({l}, {theta.group.format_element(g)}) escapes the window")
        s += c * vals[(l, g)]
    return mod1(s)


def q_map(zeta, window: Iterable, column: int = 0) -> TorusConfiguration:
    """Reduce a real vector (or a column of a truncated matrix) mod 1 on ``window``."""
    window = tuple((int(l), g) for l, g in window)
    if isinstance(zeta, FinSuppVector):
        G = zeta.group
        vals = [zeta.components[l].get(g, 0) for l, g in window]
    elif isinstance(zeta, GroupRingMatrix):
        G = zeta.group
        vals = [zeta.entries[l][column].get(g, 0) for l, g in window]
    elif isinstance(zeta, TruncatedL2Matrix):
        G = zeta.group
        idx = zeta.ball.index
        vals = [float(zeta.coeffs[l, column, idx[g]]) if g in idx else 0.0 for l, g in window]
    else:
        raise TypeError(f"q_map does not accept {type(zeta).__name__}")
    return TorusConfiguration(G, window, tuple(vals))


@dataclass(frozen=True)
class Membership:
    status: str  # "yes" | "no" | "inconclusive"
    witness: FinSuppVector | None
    max_deviation: float

    def __bool__(self):
        return self.status == "yes"


def image_membership(
    f: GroupRingMatrix,
    xi,
    alpha: FinSuppVector,
    reject_tol: float = 1e-2,
) -> Membership:
    """Decide whether ``alpha`` lies in r(f)(Z(G)^n) from the integrality of r(xi) alpha.

    "yes" is only returned with an integer witness beta satisfying
    r(f) beta == alpha exactly.  "no" needs a deviation from Z of at least
    ``reject_tol`` at a point whose value does not involve truncated
    coefficients of a TruncatedL2Matrix xi.
    """
    v = r_xi_apply(xi, alpha)
    G = alpha.group
    trusted = xi.radius - alpha.degree if isinstance(xi, TruncatedL2Matrix) else None
    beta_comps, dev = [], 0.0
    for comp in v.components:
        b = {}
        for g, c in comp.items():
            k = round(c)
            if trusted is None or G.word_length(g) <= trusted:
                dev = max(dev, abs(float(c - k)))
            if k:
                b[g] = int(k)
        beta_comps.append(b)
    beta = FinSuppVector(G, beta_comps)
    if r_apply(f, beta) == alpha:
        return Membership("yes", beta, dev)
    if dev >= reject_tol:
        return Membership("no", None, dev)
    return Membership("inconclusive", None, dev)
