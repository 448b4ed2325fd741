"""Dirichlet kernel, the measures mu_{m,xi}, homoclinic points and the convergence sweep.

``mu_{m,xi}`` is the image of the uniform Bernoulli measure on
``{-m..m}^(G x n)`` under ``rho(x) = q(r(xi*) x)``.  Its Fourier coefficient
at an integer vector alpha is a finite product of Dirichlet kernel values at
the t-values ``(r(xi) alpha)(l)(g)``; :func:`mu_fourier_exact` evaluates that
product and :func:`monte_carlo_fourier` estimates the same number by sampling
rho directly.

Sampling uses a counter-based generator: the digit at source coordinate
``(k, u)`` of sample ``i`` is a hash of ``(seed, stream, i, index(u)*n + k)``
with ``index`` the canonical ball position.  Draws therefore do not depend on
the window, the chunking, or the source radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .ring import (
    FinSuppVector,
    GroupRingMatrix,
    TorusConfiguration,
    TruncatedL2Matrix,
    _r_xi_dense,
    image_membership,
    mod1,
    r_xi_apply,
    star,
    torus_distance,
)

__all__ = [
    "dirichlet_kernel",
    "dirichlet_cosine_sum",
    "dirichlet_sine_ratio",
    "MuSpec",
    "FourierReport",
    "HomoclinicPoint",
    "t_values",
    "mu_fourier_exact",
    "bernoulli_factor_sample",
    "sample_windows",
    "factor_map",
    "source_digits",
    "monte_carlo_fourier",
    "haar_fourier",
    "convergence_sweep",
    "continuity_profile",
    "homoclinic_point",
    "INCONCLUSIVE",
]

INCONCLUSIVE = "inconclusive"
NEAR_INTEGER = 1e-4


# -- Dirichlet kernel -------------------------------------------------------------


def _frac_part(t):
    """t minus the nearest integer, computed exactly for floats and Fractions."""
    return t - round(t)


def _sinpi(x: float) -> float:
    y = x - 2.0 * round(x / 2.0)  # exact for |x| < 2^52
    return math.sin(math.pi * y)


def dirichlet_cosine_sum(m: int, t) -> float:
    """``(1/(2m+1)) sum_{j=-m..m} cos(2 pi t j)``, with ``j*t`` reduced mod 1 first."""
    r = float(_frac_part(t))
    terms = [1.0] + [2.0 * math.cos(2.0 * math.pi * _frac_part(j * r)) for j in range(1, m + 1)]
    return math.fsum(terms) / (2 * m + 1)


def dirichlet_sine_ratio(m: int, t) -> float:
    """``sin((2m+1) pi t) / ((2m+1) sin(pi t))``; undefined at integers."""
    r = float(_frac_part(t))
    if r == 0.0:
        raise ZeroDivisionError("sine ratio is 0/0 at integers")
    k = 2 * m + 1
    return _sinpi(k * r) / (k * _sinpi(r))


def dirichlet_kernel(m: int, t) -> float:
    """F_m(t), the mean of exp(2 pi i t j) over j uniform in {-m..m}."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return 1.0
    if abs(float(_frac_part(t))) <= NEAR_INTEGER:
        return dirichlet_cosine_sum(m, t)
    return max(-1.0, min(1.0, dirichlet_sine_ratio(m, t)))


def _log_product(m: int, ts) -> float:
    sign, logsum = 1, 0.0
    for t in ts:
        v = dirichlet_kernel(m, t)
        if v == 0.0:
            return 0.0
        if v < 0:
            sign = -sign
        logsum += math.log(abs(v))
    return sign * math.exp(logsum)


# -- records ------------------------------------------------------------------------


@dataclass(frozen=True)
class MuSpec:
    m: int
    xi: object  # TruncatedL2Matrix, or an exact GroupRingMatrix on a finite group

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError("m must be a nonnegative integer")
        if isinstance(self.xi, TruncatedL2Matrix):
            if np.iscomplexobj(self.xi.coeffs):
                raise ValueError("xi must be real")
        elif isinstance(self.xi, GroupRingMatrix):
            if self.xi.domain == "complex":
                raise ValueError("xi must be real")
        else:
            raise TypeError("xi must be a TruncatedL2Matrix or GroupRingMatrix")

    @property
    def n(self) -> int:
        return self.xi.n if isinstance(self.xi, TruncatedL2Matrix) else self.xi.shape[0]

    @property
    def group(self):
        return self.xi.group


@dataclass
class FourierReport:
    alpha: FinSuppVector
    m: int
    exact_value: float
    tail_bound: float
    mc_estimate: complex | None = None
    mc_stderr: float | None = None
    N: int = 0
    seed: int | None = None
    t_count: int = 0
    t0: float | None = None

    def __post_init__(self):
        if abs(self.exact_value) > 1 + 1e-12:
            raise ValueError("Fourier coefficients of probability measures lie in the unit disc")
        if self.tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")

    def consistent(self, k: float = 5.0) -> bool:
        """``|mc - exact| <= k*stderr + tail`` and ``|Im mc| <= k*stderr``."""
        if self.mc_estimate is None:
            raise ValueError("no Monte Carlo estimate attached")
        err = abs(self.mc_estimate - self.exact_value)
        return err <= k * self.mc_stderr + self.tail_bound and abs(self.mc_estimate.imag) <= k * self.mc_stderr


# -- exact product formula ------------------------------------------------------------


def t_values(xi, alpha: FinSuppVector) -> list:
    """Nonzero values of r(xi) alpha, in canonical order (exact for exact xi)."""
    if isinstance(xi, GroupRingMatrix):
        v = r_xi_apply(xi, alpha)
        G = v.group
        return [c[g] for c in v.components for g in sorted(c, key=G.sort_key)]
    _, arr = _r_xi_dense(xi, alpha)
    return [float(x) for x in arr[arr != 0.0]]


def _tail_bound(spec: MuSpec, alpha: FinSuppVector) -> float:
    if not isinstance(spec.xi, TruncatedL2Matrix):
        return 0.0
    tau = alpha.l1_norm() * spec.xi.tail_mass
    if not math.isfinite(tau):
        return math.inf
    c_m = ((2 * spec.m + 1) * math.pi) ** 2 / 6.0
    return c_m * tau * tau


def _farthest(ts):
    best, t0 = -1.0, None
    for t in ts:
        d = abs(float(_frac_part(t)))
        if d > best:
            best, t0 = d, t
    return t0, best


def mu_fourier_exact(spec: MuSpec, alpha: FinSuppVector) -> FourierReport:
    """Product of F_m over the t-values of r(xi) alpha, with a tail bound.

    The tail bound is ``C_m * tau^2`` with ``C_m = ((2m+1) pi)^2 / 6`` and
    ``tau = ||alpha||_1 * tail_mass(xi)``.  It covers the coefficients that
    truncation removed from r(xi) alpha, each of which would contribute a
    factor within ``C_m t^2`` of 1.
    """
    if alpha.is_zero():
        return FourierReport(alpha, spec.m, 1.0, 0.0)
    ts = t_values(spec.xi, alpha)
    t0, _ = _farthest(ts)
    return FourierReport(
        alpha,
        spec.m,
        _log_product(spec.m, ts),
        _tail_bound(spec, alpha),
        t_count=len(ts),
        t0=None if t0 is None else float(t0),
    )


# -- Bernoulli factor sampling ---------------------------------------------------------


@dataclass
class _Plan:
    """Gather plan: window point w reads source coordinates ``coords[idx[w, t]]``."""

    window: tuple
    coords: np.ndarray  # sorted coordinate ids (index(u)*n + k)
    idx: np.ndarray
    coef: np.ndarray
    source_radius: int


def _source_radius(xi: TruncatedL2Matrix, window_radius: int) -> int:
    return window_radius + xi.radius


def _plan(xi: TruncatedL2Matrix, points: Sequence, source_radius: int) -> _Plan:
    G = xi.group
    n = xi.n
    src = G.ball(source_radius)
    inner = xi.ball
    mul = G.mul
    rows_idx, rows_coef = [], []
    for l, g in points:
        ids, cs = [], []
        for k in range(n):
            col = xi.coeffs[l, k]
            for s in np.flatnonzero(col):
                u = mul(g, inner.elements[s])
                pos = src.index.get(u)
                if pos is None:
                    raise ValueError(
                        f"source radius {source_radius} too small: window point {G.format_element(g)} "
                        f"reads {G.format_element(u)}"
                    )
                ids.append(pos * n + k)
                cs.append(col[s])
        rows_idx.append(ids)
        rows_coef.append(cs)
    coords = np.array(sorted({c for r in rows_idx for c in r}), dtype=np.int64)
    where = {c: i for i, c in enumerate(coords.tolist())}
    width = max((len(r) for r in rows_idx), default=0)
    idx = np.zeros((len(points), max(width, 1)), dtype=np.int64)
    coef = np.zeros((len(points), max(width, 1)))
    for w, (ids, cs) in enumerate(zip(rows_idx, rows_coef)):
        idx[w, : len(ids)] = [where[c] for c in ids]
        coef[w, : len(cs)] = cs
    if coords.size == 0:
        coords = np.zeros(1, dtype=np.int64)
    return _Plan(tuple(points), coords, idx, coef, source_radius)


def _window_points(G, n: int, window_radius: int) -> list:
    return [(l, g) for g in G.ball(window_radius).elements for l in range(n)]


def _check_spec(spec: MuSpec) -> TruncatedL2Matrix:
    if not isinstance(spec.xi, TruncatedL2Matrix):
        raise TypeError("sampling needs a TruncatedL2Matrix xi")
    if spec.group.oracle_only:
        raise ValueError("Bernoulli sampling is defined for infinite groups; use the oracle on finite ones")
    return spec.xi


def sample_windows(
    spec: MuSpec,
    window_radius: int,
    N: int,
    seed: int,
    source_radius: int | None = None,
    stream: int = 0,
    start: int = 0,
):
    """Samples ``start .. start+N-1`` of rho on the ball window; returns (points, values[N, W])."""
    xi = _check_spec(spec)
    need = _source_radius(xi, window_radius)
    if source_radius is None:
        source_radius = need
    if source_radius < need:
        raise ValueError(f"source radius {source_radius} < window radius + R = {need}")
    pts = _window_points(spec.group, spec.n, window_radius)
    plan = _plan(xi, pts, source_radius)
    key = kernels.stream_key(seed, stream)
    vals = kernels.window_values(key, start, N, plan.coords, spec.m, plan.idx, plan.coef)
    return pts, vals


def bernoulli_factor_sample(
    spec: MuSpec,
    window_radius: int,
    seed: int,
    source_radius: int | None = None,
    sample_index: int = 0,
    stream: int = 0,
) -> TorusConfiguration:
    """One draw of rho(x) restricted to ``B_window x {0..n-1}``."""
    pts, vals = sample_windows(spec, window_radius, 1, seed, source_radius, stream, sample_index)
    return TorusConfiguration(spec.group, pts, tuple(float(v) for v in vals[0]))


def factor_map(spec: MuSpec, source: dict, points: Sequence) -> TorusConfiguration:
    """Reference evaluation of rho on an explicit source ``{(k, u): digit}``.

    Missing source coordinates read as 0.  The summation order matches the
    sampling kernels, so results agree with them exactly.
    """
    xi = _check_spec(spec) if isinstance(spec.xi, TruncatedL2Matrix) else spec.xi
    G = xi.group
    inner = xi.ball
    vals = []
    for l, g in points:
        acc = 0.0
        for k in range(xi.n):
            col = xi.coeffs[l, k]
            for s in np.flatnonzero(col):
                acc += source.get((k, G.mul(g, inner.elements[s])), 0) * col[s]
        vals.append(acc - math.floor(acc))
    return TorusConfiguration(G, tuple(points), tuple(vals))


def source_digits(spec: MuSpec, radius: int, seed: int, sample_index: int = 0, stream: int = 0) -> dict:
    """The Bernoulli digits of one sample on ``B_radius x {0..n-1}``, as ``{(k, u): digit}``."""
    G = spec.group
    n = spec.n
    ball = G.ball(radius)
    coords = np.arange(len(ball) * n, dtype=np.int64)
    key = kernels.stream_key(seed, stream)
    d = kernels.digits(kernels.sample_keys(key, sample_index, 1), coords, spec.m)[0]
    return {(c % n, ball.elements[c // n]): int(d[c]) for c in range(len(coords))}


def monte_carlo_fourier(
    spec: MuSpec,
    alpha: FinSuppVector,
    N: int,
    seed: int,
    stream: int = 0,
    report: FourierReport | None = None,
) -> FourierReport:
    """Average of ``exp(2 pi i <rho(x), alpha>)`` over N samples.

    ``stderr`` is the complex sample standard deviation over sqrt(N).
    If ``report`` is given, its Monte Carlo fields are filled in.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    xi = _check_spec(spec)
    if len(alpha) != spec.n:
        raise ValueError("alpha has the wrong number of components")
    rep = report if report is not None else mu_fourier_exact(spec, alpha)
    rep.N, rep.seed = N, seed
    if alpha.is_zero():
        rep.mc_estimate, rep.mc_stderr = complex(1.0, 0.0), 0.0
        return rep
    pts = [pt for pt, _ in alpha.items()]
    weights = np.array([float(c) for _, c in alpha.items()])
    src_r = _source_radius(xi, alpha.degree)
    plan = _plan(xi, pts, src_r)
    key = kernels.stream_key(seed, stream)
    ph = kernels.mc_phases(key, 0, N, plan.coords, spec.m, plan.idx, plan.coef, weights)
    z = np.exp(2j * np.pi * ph)
    mean = complex(z.mean())
    if N > 1:
        var = (np.sum(np.abs(z - mean) ** 2)) / (N - 1)
        se = float(math.sqrt(var / N))
    else:
        se = math.inf
    rep.mc_estimate, rep.mc_stderr = mean, se
    return rep


# -- Haar measure and the limit ---------------------------------------------------------


def haar_fourier(f: GroupRingMatrix, xi, alpha: FinSuppVector, reject_tol: float = 1e-2):
    """Fourier coefficient of Haar measure on X_f at alpha: 1, 0, or ``"inconclusive"``."""
    if alpha.is_zero():
        return 1
    mem = image_membership(f, xi, alpha, reject_tol)
    return {"yes": 1, "no": 0}.get(mem.status, INCONCLUSIVE)


@dataclass
class SweepRow:
    m: int
    exact_value: float
    tail_bound: float
    envelope: float | None


@dataclass
class SweepTable:
    alpha: FinSuppVector
    haar_value: object
    t0: float | None
    rows: list = field(default_factory=list)


def convergence_sweep(f: GroupRingMatrix, xi, alpha: FinSuppVector, m_list: Sequence[int], int_tol: float = 1e-6) -> SweepTable:
    """mu_fourier_exact along ``m_list`` with the single-factor envelope ``|F_m(t0)|``.

    ``t0`` is the t-value farthest from Z; there is no envelope when every
    t-value is within ``int_tol`` of an integer.
    """
    ms = list(m_list)
    if not ms or any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("m-list must be nonempty and strictly increasing")
    ts = t_values(xi, alpha) if not alpha.is_zero() else []
    t0, dist = _farthest(ts)
    if dist <= int_tol:
        t0 = None
    table = SweepTable(alpha, haar_fourier(f, xi, alpha), None if t0 is None else float(t0))
    for m in ms:
        rep = mu_fourier_exact(MuSpec(m, xi), alpha)
        env = None if t0 is None else abs(dirichlet_kernel(m, t0))
        table.rows.append(SweepRow(m, rep.exact_value, rep.tail_bound, env))
    return table


def continuity_profile(xis: Sequence[TruncatedL2Matrix], alpha: FinSuppVector, m: int) -> list:
    """``(R, value, |delta value|, ||delta xi||)`` along a sequence of truncations.

    Empirical Lipschitz ratios ``|delta value| / ||delta xi||`` stay bounded
    when Phi_m is continuous along the sequence.
    """
    out, prev_v, prev_x = [], None, None
    for xi in xis:
        v = mu_fourier_exact(MuSpec(m, xi), alpha).exact_value
        if prev_x is None:
            out.append((xi.radius, v, None, None))
        else:
            R = max(xi.radius, prev_x.radius)
            dx = float(np.linalg.norm(xi.extend(R).coeffs - prev_x.extend(R).coeffs))
            out.append((xi.radius, v, abs(v - prev_v), dx))
        prev_v, prev_x = v, xi
    return out


# -- homoclinic points -----------------------------------------------------------------


@dataclass(frozen=True)
class HomoclinicPoint:
    beta: FinSuppVector
    window_radius: int
    configuration: TorusConfiguration
    decay_profile: tuple  # (radius, sup of torus distance to 0 on that sphere)


def homoclinic_point(f: GroupRingMatrix, xi: TruncatedL2Matrix, beta: FinSuppVector, window_radius: int) -> HomoclinicPoint:
    """q(r(xi*) beta) on ``B_window x {0..n-1}``.

    The window must satisfy ``window + rad(beta) <= R`` so that no value
    there depends on coefficients dropped by truncation.
    """
    if window_radius + beta.degree > xi.radius:
        raise ValueError(
            f"window radius {window_radius} + rad(beta) {beta.degree} exceeds the solver radius {xi.radius}"
        )
    G = xi.group
    n = xi.n
    pts = _window_points(G, n, window_radius)
    if beta.is_zero():
        vals = [0.0] * len(pts)
    else:
        ball, arr = _r_xi_dense(star(xi), beta)
        vals = [mod1(arr[l, ball.index[g]]) for l, g in pts]
    conf = TorusConfiguration(G, pts, tuple(vals))
    dist = np.array([torus_distance(v, 0.0) for v in vals]).reshape(-1, n).max(axis=1)
    prof = tuple((r, float(dist[lo:hi].max())) for r, lo, hi in G.ball(window_radius).spheres())
    return HomoclinicPoint(beta, window_radius, conf, prof)
