"""Exact ground truth on finite abelian groups.

Everything here is integer or rational arithmetic.  Finite groups fall
outside the infinite-group setting of the main constructions, so these
results validate formulas and identities, never the limit statement itself.
Every report carries ``"oracle": True`` to make that explicit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from sympy import Matrix, QQ
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.matrices import DomainMatrix

from .groups import GroupDescriptor
from .parse import scalar_to_json, vector_to_json
from .ring import (
    FinSuppVector,
    GroupRingMatrix,
    hat,
    inner,
    lambda_apply,
    r_apply,
    r_xi_apply,
    right_apply,
    star,
)

__all__ = [
    "OracleError",
    "FiniteModel",
    "exact_inverse_finite",
    "brute_force_mu_fourier",
    "OracleValue",
    "brute_force_identities",
    "IdentityReport",
    "snf_membership",
    "DEFAULT_MODEL_CAP",
    "DEFAULT_STATE_CAP",
]

DEFAULT_MODEL_CAP = 64
DEFAULT_STATE_CAP = 10**7


class OracleError(ValueError):
    pass


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass
class FiniteModel:
    """``lambda(f)`` on a finite abelian group as an explicit ``n|G| x n|G|`` integer matrix.

    Rows and columns are indexed by ``(component, element)`` with the
    element in canonical order: position ``k*|G| + index(u)``.
    """

    group: GroupDescriptor
    f: GroupRingMatrix
    cap: int = DEFAULT_MODEL_CAP
    elements: tuple = field(init=False)
    operator: list = field(init=False, repr=False)

    def __post_init__(self):
        if not self.group.oracle_only:
            raise OracleError("oracle models need a finite group")
        if self.f.group != self.group:
            raise OracleError("f lives over a different group")
        n, m = self.f.shape
        if n != m:
            raise OracleError("f must be square")
        self.elements = self.group.ball(0).elements
        if n * len(self.elements) > self.cap:
            raise OracleError(f"n|G| = {n * len(self.elements)} exceeds the model cap {self.cap}")
        G = self.group
        N = len(self.elements)
        # entry [(l,g),(k,u)] = f_lk(g u^-1)
        op = [[0] * (n * N) for _ in range(n * N)]
        for l in range(n):
            for k in range(n):
                c = self.f.entries[l][k]
                if not c:
                    continue
                for gi, g in enumerate(self.elements):
                    for ui, u in enumerate(self.elements):
                        op[l * N + gi][k * N + ui] = c.get(G.mul(g, G.inverse(u)), 0)
        self.operator = op

    @property
    def n(self) -> int:
        return self.f.shape[0]

    @property
    def size(self) -> int:
        return len(self.elements)

    def pos(self, k: int, g) -> int:
        return k * self.size + self.group.ball(0).index[g]


# -- exact inverse ----------------------------------------------------------------


def exact_inverse_finite(model: FiniteModel) -> GroupRingMatrix:
    """The inverse of lambda(f) as a rational group-ring matrix."""
    dm = DomainMatrix.from_list_sympy(len(model.operator), len(model.operator), model.operator).convert_to(QQ)
    try:
        inv = dm.inv()
    except Exception as exc:  # sympy raises DMNonInvertibleMatrixError
        raise OracleError(f"lambda(f) is singular on {model.group}: {exc}") from None
    rows = inv.to_list()
    n, G = model.n, model.group
    e = G.identity()
    entries = [
        [
            {u: _normalize(_to_fraction(rows[model.pos(k, u)][model.pos(j, e)])) for u in model.elements}
            for j in range(n)
        ]
        for k in range(n)
    ]
    return GroupRingMatrix(G, entries)


# -- exhaustive Fourier coefficient ---------------------------------------------------


@dataclass(frozen=True)
class OracleValue:
    """Exact phase distribution of ``<rho(x), alpha>`` and the resulting mean of exp(2 pi i .)."""

    value: float
    imag: float
    distribution: dict  # Fraction phase in [0,1) -> count
    configurations: int
    oracle: bool = True

    def to_json(self) -> dict:
        return {
            "oracle": True,
            "value": self.value,
            "imag": self.imag,
            "configurations": self.configurations,
            "distribution": [[scalar_to_json(p), c] for p, c in sorted(self.distribution.items())],
        }


def brute_force_mu_fourier(
    model: FiniteModel,
    xi: GroupRingMatrix,
    m: int,
    alpha: FinSuppVector,
    cap: int = DEFAULT_STATE_CAP,
    chunk: int = 1 << 16,
) -> OracleValue:
    """Average of ``exp(2 pi i <q(r(xi*) x), alpha>)`` over all of ``{-m..m}^(n|G|)``.

    Arithmetic is integer: xi is scaled by the common denominator D of its
    coefficients, so every pairing is an exact residue mod D.
    """
    G, n, N = model.group, model.n, model.size
    C = n * N
    base = 2 * m + 1
    total = base**C
    if total > cap:
        raise OracleError(f"(2m+1)^(n|G|) = {total} configurations exceeds cap {cap}")
    coeffs = [c for e in xi.maps() for c in e.values()]
    D = 1
    for c in coeffs:
        D = math.lcm(D, Fraction(c).denominator)
    # K[(k,h),(l,g)] = D * xi_lk(g^-1 h): theta(l)(g) = sum_{k,h} x(k)(h) xi*_kl(h^-1 g)
    K = np.zeros((C, C), dtype=object)
    for k in range(n):
        for hi, h in enumerate(model.elements):
            for l in range(n):
                for gi, g in enumerate(model.elements):
                    v = xi.entries[l][k].get(G.mul(G.inverse(g), h), 0)
                    K[k * N + hi, l * N + gi] = int(Fraction(v) * D)
    a = np.zeros(C, dtype=object)
    for (l, g), c in hat(alpha).items():
        if Fraction(c).denominator != 1:
            raise OracleError("alpha must have integer coefficients")
        a[model.pos(l, g)] = int(c)
    amax = max((abs(int(v)) for v in a), default=0)
    if max(m, 1) * D * max(C, 1) * max(amax, 1) * D >= 2**62:
        raise OracleError("integer range exceeded")
    theta_k = np.array([[int(v) % D for v in row] for row in K], dtype=np.int64)
    a_int = np.array([int(v) for v in a], dtype=np.int64)
    hist = np.zeros(D, dtype=np.int64)
    powers = base ** np.arange(C, dtype=np.int64)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        x = (idx[:, None] // powers[None, :]) % base - m
        theta = (x @ theta_k) % D  # factor map, scaled by D
        ph = (theta @ a_int) % D
        hist += np.bincount(ph, minlength=D)
    dist = {Fraction(p, D): int(c) for p, c in enumerate(hist) if c}
    re = math.fsum(c * math.cos(2 * math.pi * float(p)) for p, c in dist.items()) / total
    im = math.fsum(c * math.sin(2 * math.pi * float(p)) for p, c in dist.items()) / total
    return OracleValue(re, im, dist, total)


# -- identities -----------------------------------------------------------------------


@dataclass
class IdentityReport:
    passed: bool
    checks: int
    failures: list = field(default_factory=list)
    oracle: bool = True

    def to_json(self) -> dict:
        return {"oracle": True, "passed": self.passed, "checks": self.checks, "failures": self.failures}


def _rand_map(rng: random.Random, elements, density=0.6, den=5) -> dict:
    return {
        g: Fraction(rng.randint(-6, 6), rng.randint(1, den))
        for g in elements
        if rng.random() < density
    }


def _rand_matrix(rng, G, elements, n) -> GroupRingMatrix:
    return GroupRingMatrix(G, [[_rand_map(rng, elements) for _ in range(n)] for _ in range(n)])


def _rand_vector(rng, G, elements, n, integer=False) -> FinSuppVector:
    if integer:
        return FinSuppVector(G, [{g: rng.randint(-3, 3) for g in elements if rng.random() < 0.6} for _ in range(n)])
    return FinSuppVector(G, [_rand_map(rng, elements) for _ in range(n)])


def check_identities(x, y, xi, a, b, star_fn: Callable = star) -> list:
    """Exact checks on one instance; returns the names of the identities that fail."""
    bad = []
    # hat-switch: (xy)^ = x y^ = x^ y
    if not (hat(x @ y) == lambda_apply(x, hat(y)) == right_apply(hat(x), y)):
        bad.append("hat-switch")
    # <r(xi) a, b^> = <a^, r(xi*) b>
    if inner(r_xi_apply(xi, a), hat(b)) != inner(hat(a), r_xi_apply(star_fn(xi), b)):
        bad.append("adjoint-pairing")
    if star_fn(x @ y) != star_fn(y) @ star_fn(x):
        bad.append("star-antimultiplicative")
    if star_fn(star_fn(x)) != x:
        bad.append("star-involution")
    return bad


def brute_force_identities(
    model: FiniteModel,
    trials: int = 100,
    seed: int = 0,
    star_fn: Callable = star,
) -> IdentityReport:
    """Hat-switch, adjoint pairing and star laws on the identity plus random rational instances."""
    G, n = model.group, model.n
    els = model.elements
    rng = random.Random(seed)
    one = GroupRingMatrix.identity(G, n)
    cases = [(one, one, one, FinSuppVector.basis(G, n, 0), FinSuppVector.basis(G, n, 0))]
    cases.append((model.f, one, model.f, FinSuppVector.basis(G, n, 0), FinSuppVector.basis(G, n, n - 1)))
    for _ in range(trials):
        cases.append(
            (
                _rand_matrix(rng, G, els, n),
                _rand_matrix(rng, G, els, n),
                _rand_matrix(rng, G, els, n),
                _rand_vector(rng, G, els, n),
                _rand_vector(rng, G, els, n),
            )
        )
    failures = []
    from .parse import format_matrix

    for i, (x, y, xi, a, b) in enumerate(cases):
        for name in check_identities(x, y, xi, a, b, star_fn):
            failures.append(
                {
                    "case": i,
                    "identity": name,
                    "x": format_matrix(x),
                    "y": format_matrix(y),
                    "xi": format_matrix(xi),
                    "alpha": vector_to_json(a),
                    "beta": vector_to_json(b),
                }
            )
    return IdentityReport(not failures, len(cases), failures)


# -- Smith normal form membership -------------------------------------------------------


def snf_membership(model: FiniteModel, alpha: FinSuppVector):
    """Solve ``r(f) beta = alpha`` over Z exactly; returns ``(member, beta_or_None)``."""
    G, n, N = model.group, model.n, model.size
    f = model.f
    C = n * N
    # (r(f) beta)(l)(g) = sum_k sum_h beta_k(h) f_kl(h^-1 g)
    R = [[0] * C for _ in range(C)]
    for l in range(n):
        for gi, g in enumerate(model.elements):
            for k in range(n):
                c = f.entries[k][l]
                for hi, h in enumerate(model.elements):
                    R[l * N + gi][k * N + hi] = c.get(G.mul(G.inverse(h), g), 0)
    a = [0] * C
    for (l, g), c in alpha.items():
        if Fraction(c).denominator != 1:
            raise OracleError("alpha must have integer coefficients")
        a[model.pos(l, g)] = int(c)
    M = Matrix(R)
    D, U, V = smith_normal_decomp(M)
    ua = U * Matrix(a)
    y = []
    for i in range(C):
        d = int(D[i, i]) if i < min(D.shape) else 0
        v = int(ua[i])
        if d == 0:
            if v != 0:
                return False, None
            y.append(0)
        else:
            if v % d:
                return False, None
            y.append(v // d)
    bvec = V * Matrix(y)
    beta = FinSuppVector(
        G, [{u: int(bvec[k * N + ui]) for ui, u in enumerate(model.elements)} for k in range(n)]
    )
    if r_apply(f, beta) != alpha:
        raise OracleError("Smith normal form solution failed to verify")
    return True, beta
