"""Truncated l2 formal inverses by three independent methods.

``neumann``
    Series ``sum_k b^(-k-1) a^k`` for ``f = b*id - a``; each term is clipped
    to the ball B_R.
``cg-normal``
    CGLS on the normal equations of the truncated convolution operator.
    The ``dirichlet`` boundary solves the square system on B_R (the same
    finite problem as clipped Neumann).  ``least-squares`` keeps the full
    output ball B_{R+deg f}, which is what anti-causal inverses need.
``torus-grid``
    Lattices only: invert the matrix symbol pointwise on a uniform grid and
    transform back.

Every solver reports the left/right residuals on the interior ball
B_{R-deg f} as well as on the full output ball.  A solver that matches the
interior equations while leaking O(1) mass through the boundary has not
found an l2 inverse, and fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .groups import GroupDescriptor
from .parse import matrix_to_json, parse_matrix, scalar_to_json
from .ring import GroupRingMatrix, TruncatedL2Matrix, _conv_dense, lambda_apply, right_apply

__all__ = [
    "METHODS",
    "SolverConfig",
    "SolverFailure",
    "ExamplePreset",
    "PRESETS",
    "preset",
    "solve",
    "neumann_inverse",
    "cg_inverse",
    "torus_fft_inverse",
    "verify_left_right",
    "estimate_operator_norm",
    "solver_report",
]

METHODS = ("neumann", "cg-normal", "torus-grid")
BOUNDARIES = ("dirichlet", "least-squares")


class SolverFailure(RuntimeError):
    """Raised when a solver cannot certify a small residual."""

    def __init__(self, method: str, reason: str, history=None, **details):
        super().__init__(f"{method}: {reason}")
        self.method = method
        self.reason = reason
        self.history = list(history or [])
        self.details = details

    def to_json(self) -> dict:
        return {
            "status": "failure",
            "method": self.method,
            "reason": self.reason,
            "history": [float(h) for h in self.history],
            **{k: _jsonable(v) for k, v in self.details.items()},
        }


def _is_pow2(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs.  ``tol=None`` picks 1e-8 on lattices and 1e-6 on free groups."""

    radius: int = 20
    tol: float | None = None
    max_iter: int = 10_000
    method: str = "neumann"
    grid: int | None = None
    boundary: str = "dirichlet"
    patience: int = 50
    shrink: float = 0.999
    max_leakage: float = 0.5
    singular_tol: float = 1e-9

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.grid is not None and not _is_pow2(self.grid):
            raise ValueError("grid resolution must be a power of 2")
        if self.max_iter < 1 or self.patience < 1 or not 0 < self.shrink <= 1:
            raise ValueError("bad iteration controls")

    def resolved_tol(self, group: GroupDescriptor) -> float:
        if self.tol is not None:
            return self.tol
        return 1e-6 if group.kind == "free" else 1e-8

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# -- residuals ----------------------------------------------------------------


def _delta_dense(n: int, size: int) -> np.ndarray:
    d = np.zeros((n, n, size))
    for i in range(n):
        d[i, i, 0] = 1.0  # identity is always first in canonical order
    return d


def _exact_norm(x: GroupRingMatrix) -> float:
    s = sum(abs(c) ** 2 for e in x.maps() for c in e.values())
    return math.sqrt(float(s))


def verify_left_right(f: GroupRingMatrix, xi) -> dict:
    """Residuals of ``lambda(f) xi = delta (x) id`` and ``xi lambda(f) = delta (x) id``.

    Interior values are taken over B_{R - deg f}; ``*_full`` over the whole
    output ball.  An exact ``GroupRingMatrix`` xi gives exact residuals.
    """
    G = f.group
    n = f.shape[0]
    if isinstance(xi, GroupRingMatrix):
        one = GroupRingMatrix.identity(G, n)
        left = lambda_apply(f, xi) - one
        right = right_apply(xi, f) - one
        if G.kind == "finite":
            l, r = _exact_norm(left), _exact_norm(right)
            return {
                "residual_left": l,
                "residual_right": r,
                "residual_left_full": l,
                "residual_right_full": r,
                "interior_radius": 0,
            }
        xi = TruncatedL2Matrix.from_matrix(xi, xi.degree)
    deg = f.degree
    R = xi.radius
    out_ball = G.ball(R + deg)
    interior_r = max(R - deg, 0)
    k = out_ball.prefix(interior_r)
    delta = _delta_dense(n, len(out_ball))
    left = _conv_dense(f, xi.coeffs, xi.ball, out_ball, "left") - delta
    right = _conv_dense(f, xi.coeffs, xi.ball, out_ball, "right") - delta
    return {
        "residual_left": float(np.linalg.norm(left[:, :, :k])),
        "residual_right": float(np.linalg.norm(right[:, :, :k])),
        "residual_left_full": float(np.linalg.norm(left)),
        "residual_right_full": float(np.linalg.norm(right)),
        "interior_radius": interior_r,
    }


def _tail_mass(xi: TruncatedL2Matrix, leak: float) -> float:
    """Heuristic l2 mass of the untruncated inverse outside B_R.

    Extrapolates the sphere masses geometrically from the two spheres just
    inside the boundary (the outermost one is distorted by clipping) and adds
    the boundary leakage of the residual.  An estimate, not a bound.
    """
    if xi.group.kind == "finite":
        return leak
    m = xi.sphere_masses()
    R = xi.radius
    if R < 3 or m[R - 2] <= 0:
        return leak + math.sqrt(float(m[R])) if R >= 0 else leak
    q = m[R - 1] / m[R - 2]
    if q >= 1:
        return math.inf
    return leak + math.sqrt(float(m[R - 1]) * q / (1 - q))


def _finish(f, cfg, method, coeffs, info, history) -> TruncatedL2Matrix:
    G = f.group
    n = f.shape[0]
    xi = TruncatedL2Matrix(G, cfg.radius, coeffs)
    rep = verify_left_right(f, xi)
    tol = cfg.resolved_tol(G)
    if not np.all(np.isfinite(coeffs)):
        raise SolverFailure(method, "non-finite coefficients", history)
    if rep["residual_left"] > tol:
        raise SolverFailure(
            method,
            f"interior residual {rep['residual_left']:.3e} above tolerance {tol:.1e}",
            history,
            **rep,
        )
    leak = rep["residual_left_full"]
    if leak > cfg.max_leakage * math.sqrt(n):
        raise SolverFailure(
            method,
            f"boundary leakage: full residual {leak:.3e} exceeds {cfg.max_leakage}*sqrt(n); "
            "the interior equations are met only by mass escaping the ball, so the truncations "
            "diverge in l2 (symbol vanishing or delta_e outside the range)",
            history,
            **rep,
        )
    xi.residual_left = rep["residual_left"]
    xi.residual_right = rep["residual_right"]
    xi.tail_mass = _tail_mass(xi, leak)
    xi.info = {
        "method": method,
        "radius": cfg.radius,
        "tol": tol,
        "iterations": max(len(history) - 1, 0),  # history starts with the initial residual
        "history": [float(h) for h in history],
        **rep,
        **info,
    }
    return xi


# -- decomposition f = b*id - a ----------------------------------------------------


def _split(f: GroupRingMatrix):
    n, m = f.shape
    if n != m:
        raise ValueError("formal inverses need a square matrix")
    e = f.group.identity()
    diag = [f.entries[i][i].get(e, 0) for i in range(n)]
    if all(d == diag[0] for d in diag) and diag[0] != 0:
        b = diag[0]
    else:
        b = max(diag, key=abs)
    if b == 0:
        raise SolverFailure("neumann", "no nonzero diagonal scalar b to split off")
    a = GroupRingMatrix.identity(f.group, n, b) - f
    return b, a


# -- Neumann series ---------------------------------------------------------------


def neumann_inverse(f: GroupRingMatrix, cfg: SolverConfig = SolverConfig()) -> TruncatedL2Matrix:
    """Clipped Neumann series.

    Stops once the interior residual is below tol and the newest term is below
    ``1e-6 * tol`` (the series has settled to working precision).  Divergence
    is declared when the interior residual fails to shrink by ``shrink`` over
    ``patience`` consecutive terms.
    """
    cfg = replace(cfg, method="neumann")
    G = f.group
    n = f.shape[0]
    tol = cfg.resolved_tol(G)
    b, a = _split(f)
    b = float(b)
    deg = f.degree
    ball = G.ball(cfg.radius)
    big = G.ball(cfg.radius + deg)
    k_in = big.prefix(max(cfg.radius - deg, 0))
    size = len(ball)

    T = _delta_dense(n, size) / b
    S = T.copy()
    res = _conv_dense(f, S, ball, big, "left") - _delta_dense(n, len(big))
    history = [float(np.linalg.norm(res[:, :, :k_in]))]
    for it in range(cfg.max_iter):
        interior = history[-1]
        term = float(np.linalg.norm(T))
        if not (math.isfinite(interior) and math.isfinite(term)):
            raise SolverFailure("neumann", "series produced non-finite values", history)
        if interior < tol and term <= 1e-6 * tol:
            break
        if term == 0.0:
            break  # nothing left to add; _finish judges the residual
        if len(history) > cfg.patience and interior > cfg.shrink * history[-1 - cfg.patience]:
            raise SolverFailure(
                "neumann",
                f"divergence: interior residual did not shrink by {cfg.shrink} over {cfg.patience} terms "
                f"(now {interior:.3e}); the series does not converge for this splitting",
                history,
                b=b,
            )
        T = _conv_dense(a, T, ball, big, "left")[:, :, :size] / b
        S += T
        res += _conv_dense(f, T, ball, big, "left")
        history.append(float(np.linalg.norm(res[:, :, :k_in])))
    else:
        raise SolverFailure("neumann", f"max_iter={cfg.max_iter} reached", history)
    return _finish(f, cfg, "neumann", S, {"b": b}, history)


# -- CGLS -------------------------------------------------------------------------


def _tables(f: GroupRingMatrix, ball, out_ball):
    ops = []
    m, n = f.shape
    for i in range(m):
        for k in range(n):
            c = f.entries[i][k]
            if c:
                supp = tuple(c)
                coef = np.array([float(c[h]) for h in supp])
                ops.append((i, k, ball.table(supp, out_ball, "left"), coef))
    return ops


def cg_inverse(f: GroupRingMatrix, cfg: SolverConfig = SolverConfig()) -> TruncatedL2Matrix:
    """CGLS for ``min ||P lambda(f) xi - delta (x) id||`` over xi supported in B_R."""
    cfg = replace(cfg, method="cg-normal")
    G = f.group
    n = f.shape[0]
    if f.shape != (n, n):
        raise ValueError("formal inverses need a square matrix")
    tol = cfg.resolved_tol(G)
    deg = f.degree
    ball = G.ball(cfg.radius)
    out_ball = ball if cfg.boundary == "dirichlet" else G.ball(cfg.radius + deg)
    k_in = out_ball.prefix(max(cfg.radius - deg, 0))
    ops = _tables(f, ball, out_ball)
    sz_in, sz_out = len(ball), len(out_ball)

    def A(x):
        y = np.zeros((n, n, sz_out))
        for i, k, tab, coef in ops:
            for j in range(n):
                kernels.scatter_conv(y[i, j], x[k, j], tab, coef)
        return y

    def At(y):
        x = np.zeros((n, n, sz_in))
        for i, k, tab, coef in ops:
            for j in range(n):
                kernels.gather_conv(x[k, j], y[i, j], tab, coef)
        return x

    x = np.zeros((n, n, sz_in))
    r = _delta_dense(n, sz_out)
    s = At(r)
    p = s.copy()
    gamma = float(np.vdot(s, s))
    gamma0 = gamma
    history = [float(np.linalg.norm(r))]
    for it in range(cfg.max_iter):
        if float(np.linalg.norm(r[:, :, :k_in])) <= tol:
            break
        if gamma <= (1e-15) ** 2 * gamma0 or gamma == 0.0:
            break  # stationary: the least-squares optimum is reached
        q = A(p)
        qq = float(np.vdot(q, q))
        if qq == 0.0:
            break
        alpha = gamma / qq
        x += alpha * p
        r -= alpha * q
        s = At(r)
        gamma_new = float(np.vdot(s, s))
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new
        history.append(float(np.linalg.norm(r)))
        if not math.isfinite(history[-1]):
            raise SolverFailure("cg-normal", "non-finite residual", history)
    else:
        raise SolverFailure(
            "cg-normal",
            f"max_iter={cfg.max_iter} reached with residual {history[-1]:.3e}",
            history,
        )
    return _finish(f, cfg, "cg-normal", x, {"boundary": cfg.boundary}, history)


# -- torus grid ---------------------------------------------------------------------


def _next_pow2(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


def default_grid(d: int, radius: int) -> int:
    base = {1: 4096, 2: 256}.get(d, 64)
    return max(base, _next_pow2(4 * (radius + 1)))


def _torus_coeffs(f: GroupRingMatrix, M: int, ball, singular_tol: float):
    d = f.group.rank
    n = f.shape[0]
    shape = (M,) * d
    arr = np.zeros((n, n) + shape, dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            for g, c in f.entries[i][k].items():
                arr[(i, k) + tuple(x % M for x in g)] += float(c)
    axes = tuple(range(2, 2 + d))
    # sum_g f(g) exp(+2 pi i g.theta) on the grid theta = j/M
    F = np.fft.ifftn(arr, axes=axes) * M**d
    F = np.moveaxis(F.reshape(n, n, -1), -1, 0)
    sv = np.linalg.svd(F, compute_uv=False)
    smin = sv[:, -1]
    worst = int(np.argmin(smin))
    if smin[worst] < singular_tol:
        theta = [int(j) / M for j in np.unravel_index(worst, shape)]
        raise SolverFailure(
            "torus-grid",
            f"symbol singular: min singular value {smin[worst]:.3e} at theta={theta}",
            [],
            theta=theta,
            min_singular_value=float(smin[worst]),
        )
    Xi = np.linalg.inv(F)
    Xi = np.moveaxis(Xi, 0, -1).reshape((n, n) + shape)
    xi_grid = np.fft.fftn(Xi, axes=axes) / M**d
    idx = tuple(np.array([g[t] % M for g in ball.elements]) for t in range(d))
    out = xi_grid[(slice(None), slice(None)) + idx]
    return out, float(smin[worst])


def torus_fft_inverse(f: GroupRingMatrix, cfg: SolverConfig = SolverConfig(method="torus-grid")) -> TruncatedL2Matrix:
    """Pointwise inversion of the symbol on a grid of ``M^d`` points, M from ``cfg.grid``."""
    cfg = replace(cfg, method="torus-grid")
    G = f.group
    if G.kind != "lattice":
        raise ValueError("torus-grid needs a lattice group Z^d")
    M = cfg.grid or default_grid(G.rank, cfg.radius)
    if M < 2 * cfg.radius + 1:
        raise ValueError(f"grid {M} too coarse for radius {cfg.radius}")
    ball = G.ball(cfg.radius)
    c, smin = _torus_coeffs(f, M, ball, cfg.singular_tol)
    imag = float(np.max(np.abs(c.imag))) if c.size else 0.0
    if imag > 1e-10:
        raise SolverFailure("torus-grid", f"imaginary residue {imag:.3e} above 1e-10", [])
    c2, _ = _torus_coeffs(f, 2 * M, ball, cfg.singular_tol)
    alias = float(np.max(np.abs(c2 - c))) if c.size else 0.0
    info = {"grid": M, "imaginary_residue": imag, "aliasing_error": alias, "min_singular_value": smin}
    return _finish(f, cfg, "torus-grid", np.ascontiguousarray(c.real), info, [])


def solve(f: GroupRingMatrix, cfg: SolverConfig) -> TruncatedL2Matrix:
    return {"neumann": neumann_inverse, "cg-normal": cg_inverse, "torus-grid": torus_fft_inverse}[cfg.method](f, cfg)


# -- diagnostics --------------------------------------------------------------------


def estimate_operator_norm(a: GroupRingMatrix, radius: int, iters: int = 200, seed: int = 0) -> float:
    """Power iteration for ``||lambda(a)||`` on functions supported in B_R.

    Non-rigorous: truncation only sees part of the spectrum, so on
    non-amenable groups the value approaches the true norm slowly from below.
    """
    G = a.group
    n = a.shape[1]
    ball = G.ball(radius)
    big = G.ball(radius + a.degree)
    ops = _tables(a, ball, big)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, len(ball)))
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = np.zeros((a.shape[0], len(big)))
        for i, k, tab, coef in ops:
            kernels.scatter_conv(y[i], x[k], tab, coef)
        z = np.zeros_like(x)
        for i, k, tab, coef in ops:
            kernels.gather_conv(z[k], y[i], tab, coef)
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        est = math.sqrt(nz)
        x = z / nz
    return est


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def solver_report(f: GroupRingMatrix, xi: TruncatedL2Matrix, coefficients: bool = True) -> dict:
    """JSON-ready record of a solver run; coefficients keyed by element string."""
    G = xi.group
    out = {
        "status": "ok",
        "group": str(G),
        "f": matrix_to_json(f),
        "method": xi.info.get("method"),
        "R": xi.radius,
        "iterations": xi.info.get("iterations", 0),
        "residual_left": xi.residual_left,
        "residual_right": xi.residual_right,
        "residual_left_full": xi.info.get("residual_left_full"),
        "residual_right_full": xi.info.get("residual_right_full"),
        "interior_radius": xi.info.get("interior_radius"),
        "tail_mass": xi.tail_mass,
        "info": {k: v for k, v in xi.info.items() if k not in ("history",)},
        "history": xi.info.get("history", []),
    }
    if coefficients:
        els = xi.ball.elements
        out["coefficients"] = [
            [[[G.format_element(els[t]), float(xi.coeffs[i, j, t])] for t in np.flatnonzero(xi.coeffs[i, j])]
             for j in range(xi.n)]
            for i in range(xi.n)
        ]
    return _jsonable(out)


# -- presets --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExamplePreset:
    name: str
    group: GroupDescriptor
    f: GroupRingMatrix = field(compare=False)
    l1_invertible: str  # "yes" | "no" | "unknown"
    rationale: str

    def __post_init__(self):
        if not self.f.is_integer():
            raise ValueError("preset f must have integer coefficients")


def _mk(name, group, text, l1, why):
    G = GroupDescriptor.parse(group)
    return ExamplePreset(name, G, parse_matrix(G, text), l1, why)


PRESETS = {
    p.name: p
    for p in (
        _mk(
            "l1-dominant-z",
            "Z",
            "3e-g-g^2",
            "yes",
            "b=3 exceeds the l1 mass 2 of the remaining coefficients, so the Neumann series converges in l1",
        ),
        _mk(
            "l1-dominant-f2",
            "F2",
            "5e-a-b-ab",
            "yes",
            "b=5 exceeds the l1 mass 3 of the remaining coefficients",
        ),
        _mk(
            "harmonic-f2",
            "F2",
            "4e-a-a^-1-b-b^-1",
            "no",
            "augmentation sends f to 0, so f is not l1-invertible; lambda(f) is invertible because "
            "the simple random walk operator on F2 has norm 2*sqrt(3) < 4",
        ),
        _mk(
            "li-example-f2",
            "F2",
            "3e+(e-a-a^2)b",
            "no",
            "lambda(f) is invertible since ||e-a-a^2|| = sqrt(5) < 3 and b is unitary; "
            "not l1-invertible (free semigroup on a, b)",
        ),
    )
}


def preset(name: str) -> ExamplePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
