"""Verification suites shared by the ``verify`` subcommand and the test-suite.

Each suite returns a list of check records ``{"suite", "name", "passed", ...}``
built from deterministic, seeded random instances.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from .groups import GroupDescriptor
from .inverse import METHODS, PRESETS, SolverConfig, SolverFailure, preset, solve, verify_left_right
from .measures import MuSpec, homoclinic_point, mu_fourier_exact
from .oracle import (
    FiniteModel,
    brute_force_identities,
    brute_force_mu_fourier,
    check_identities,
    exact_inverse_finite,
    snf_membership,
)
from .parse import format_matrix, format_vector, parse_matrix, parse_vector
from .ring import (
    FinSuppVector,
    GroupRingMatrix,
    TruncatedL2Matrix,
    duality_pairing,
    hat,
    image_membership,
    inner,
    lambda_apply,
    r_apply,
    right_apply,
    r_xi_apply,
    star,
    torus_distance,
)

SUITES = ("identities", "residual-symmetry", "solvers", "homoclinic", "oracle")

PRESET_RADIUS = {"l1-dominant-z": 40, "l1-dominant-f2": 6, "harmonic-f2": 6, "li-example-f2": 6}


def _check(suite: str, name: str, passed: bool, **detail) -> dict:
    return {"suite": suite, "name": name, "passed": bool(passed), **detail}


# -- random instances ----------------------------------------------------------------


def random_map(rng: random.Random, G: GroupDescriptor, radius: int, terms: int = 3, rational: bool = True) -> dict:
    els = G.ball(radius).elements
    out = {}
    for _ in range(rng.randint(0, terms)):
        g = els[rng.randrange(len(els))]
        out[g] = Fraction(rng.randint(-9, 9), rng.randint(1, 6)) if rational else rng.randint(-3, 3)
    return {g: c for g, c in out.items() if c}


def random_matrix(rng, G, n, radius=3, terms=3, rational=True) -> GroupRingMatrix:
    return GroupRingMatrix(G, [[random_map(rng, G, radius, terms, rational) for _ in range(n)] for _ in range(n)])


def random_vector(rng, G, n, radius=3, terms=3, rational=True) -> FinSuppVector:
    return FinSuppVector(G, [random_map(rng, G, radius, terms, rational) for _ in range(n)])


def random_l1_dominant(rng, G, n, radius=1) -> GroupRingMatrix:
    """``b*id - a`` with integer a supported in ``B_radius \\ {e}`` and ``b > ||a||_1``."""
    els = [g for g in G.ball(radius).elements if g != G.identity()]
    a = [
        [{g: rng.choice((-2, -1, 1, 2)) for g in rng.sample(els, rng.randint(0, min(3, len(els))))} for _ in range(n)]
        for _ in range(n)
    ]
    b = 1 + sum(abs(c) for row in a for e in row for c in e.values())
    return GroupRingMatrix.identity(G, n, b) - GroupRingMatrix(G, a)


# -- suites --------------------------------------------------------------------------


def suite_identities(seed: int = 0, count: int = 200, groups=("Z^2", "F2")) -> list:
    """Hat-switch, adjoint pairing and star laws, exact over Q, supports in B_3, n <= 2."""
    rng = random.Random(seed)
    out = []
    for gs in groups:
        G = GroupDescriptor.parse(gs)
        bad = []
        for i in range(count):
            n = rng.randint(1, 2)
            x, y, xi = (random_matrix(rng, G, n) for _ in range(3))
            a, b = random_vector(rng, G, n), random_vector(rng, G, n)
            for name in check_identities(x, y, xi, a, b):
                bad.append({"case": i, "identity": name, "x": format_matrix(x), "y": format_matrix(y)})
        out.append(_check("identities", f"exact identities on {G}", not bad, instances=count, failures=bad[:5]))
        # floating point adjoint pairing with truncated real xi
        worst = 0.0
        nprng = np.random.default_rng(seed)
        for _ in range(max(1, count // 10)):
            n = rng.randint(1, 2)
            ball = G.ball(3)
            xi = TruncatedL2Matrix(G, 3, nprng.standard_normal((n, n, len(ball))))
            a = FinSuppVector(G, [{g: float(c) for g, c in random_map(rng, G, 3).items()} for _ in range(n)])
            b = FinSuppVector(G, [{g: float(c) for g, c in random_map(rng, G, 3).items()} for _ in range(n)])
            lhs = inner(r_xi_apply(xi, a), hat(b))
            rhs = inner(hat(a), r_xi_apply(star(xi), b))
            worst = max(worst, abs(lhs - rhs))
        out.append(_check("identities", f"float adjoint pairing on {G}", worst <= 1e-10, max_error=worst))
    return out


def _solve_ok(f, cfg):
    try:
        return solve(f, cfg), None
    except SolverFailure as exc:
        return None, exc


def suite_residual_symmetry(seed: int = 0, trials: int = 10) -> list:
    """Left residual <= tol implies right residual <= 10*tol on the trusted ball B_{ceil(R/2)}."""
    rng = random.Random(seed)
    cases = [(name, p.f, PRESET_RADIUS[name]) for name, p in PRESETS.items()]
    for gs, R in (("Z", 20), ("F2", 6)):
        G = GroupDescriptor.parse(gs)
        for t in range(trials):
            cases.append((f"random {gs} #{t}", random_l1_dominant(rng, G, rng.randint(1, 2)), R))
    out = []
    for label, f, R in cases:
        for method in METHODS:
            if method == "torus-grid" and f.group.kind != "lattice":
                continue
            xi, err = _solve_ok(f, SolverConfig(radius=R, method=method))
            if xi is None:
                out.append(_check("residual-symmetry", f"{label} [{method}]", False, error=str(err)))
                continue
            tol = xi.info["tol"]
            rep = verify_left_right(f, xi.restrict(math.ceil(R / 2)))
            applies = rep["residual_left"] <= tol
            ok = applies and rep["residual_right"] <= 10 * tol
            out.append(
                _check(
                    "residual-symmetry",
                    f"{label} [{method}]",
                    ok,
                    tol=tol,
                    residual_left=rep["residual_left"],
                    residual_right=rep["residual_right"],
                )
            )
    return out


def suite_solvers(seed: int = 0) -> list:
    out = []
    Z = GroupDescriptor.lattice(1)
    # geometric series
    f = parse_matrix(Z, "2e-g")
    for method in METHODS:
        xi, err = _solve_ok(f, SolverConfig(radius=40, method=method))
        if xi is None:
            out.append(_check("solvers", f"2e-g [{method}]", False, error=str(err)))
            continue
        ball = xi.ball
        dev = max(abs(xi.coeffs[0, 0, ball.index[(k,)]] - 2.0 ** (-k - 1)) for k in range(41))
        ok = dev <= 1e-8 and xi.residual_left <= 1e-8 and xi.residual_right <= 10 * xi.residual_left
        out.append(
            _check(
                "solvers",
                f"2e-g [{method}]",
                ok,
                max_coefficient_error=dev,
                residual_left=xi.residual_left,
                residual_right=xi.residual_right,
            )
        )
    # negative control
    g = parse_matrix(Z, "e-g")
    for method in METHODS:
        xi, err = _solve_ok(g, SolverConfig(radius=40, method=method))
        out.append(
            _check("solvers", f"e-g fails [{method}]", xi is None, reason=None if err is None else err.reason)
        )
    # cross-solver agreement on B_{R/2}
    for name, p in PRESETS.items():
        R = PRESET_RADIUS[name]
        methods = [m for m in METHODS if m != "torus-grid" or p.group.kind == "lattice"]
        sols = {}
        for m in methods:
            xi, err = _solve_ok(p.f, SolverConfig(radius=R, method=m))
            if xi is not None:
                sols[m] = xi
        k = p.group.ball(R).prefix(R // 2)
        diffs = [
            float(np.abs(sols[a].coeffs[..., :k] - sols[b].coeffs[..., :k]).max())
            for i, a in enumerate(methods)
            for b in methods[i + 1 :]
            if a in sols and b in sols
        ]
        ok = len(sols) == len(methods) and all(d <= 1e-6 for d in diffs)
        out.append(_check("solvers", f"{name} cross-solver agreement", ok, max_difference=max(diffs, default=None)))
    # monotone refinement of the full residual
    for name, ladder in (("harmonic-f2", (4, 5, 6)), ("l1-dominant-z", (10, 20, 30, 40))):
        p = preset(name)
        full = [solve(p.f, SolverConfig(radius=R)).info["residual_left_full"] for R in ladder]
        ok = all(b <= a for a, b in zip(full, full[1:]))
        out.append(_check("solvers", f"{name} residual refinement", ok, radii=list(ladder), residuals=full))
    return out


def homoclinic_pairs(f, xi, rng: random.Random, pairs: int, radius: int = 2, coef: int = 2):
    """Random integer (alpha, beta) in B_radius; yields pairing distance and decay profile."""
    G = f.group
    n = f.shape[0]
    xs = star(xi)
    els = G.ball(radius).elements
    for _ in range(pairs):
        def vec():
            while True:
                v = FinSuppVector(
                    G,
                    [
                        {els[rng.randrange(len(els))]: rng.choice([c for c in range(-coef, coef + 1) if c]) for _ in range(rng.randint(1, 4))}
                        for _ in range(n)
                    ],
                )
                if not v.is_zero():
                    return v

        alpha, beta = vec(), vec()
        target = r_apply(f, alpha)
        w = max(target.degree, xi.radius - beta.degree)
        hp = homoclinic_point(f, xi, beta, w) if w + beta.degree <= xi.radius else None
        if hp is None:
            raise ValueError("solver radius too small for the homoclinic window")
        pair = duality_pairing(hp.configuration, target)
        yield alpha, beta, torus_distance(pair, 0.0), hp.decay_profile


def suite_homoclinic(seed: int = 0, pairs: int = 100, presets=("l1-dominant-z", "harmonic-f2"), tol: float = 1e-4) -> list:
    """Pairings of r(f) alpha with q(r(xi*) beta) vanish mod 1; the outermost sphere carries the smallest value."""
    rng = random.Random(seed)
    out = []
    for name in presets:
        p = preset(name)
        xi = solve(p.f, SolverConfig(radius=PRESET_RADIUS[name]))
        worst, bad_decay = 0.0, []
        for alpha, beta, dist, prof in homoclinic_pairs(p.f, xi, rng, pairs):
            worst = max(worst, dist)
            # outside supp(beta) every value is a tail sum; the outermost sphere must be the smallest
            tail = [s for r, s in prof if r > 2]
            if tail and tail[-1] > min(tail):
                bad_decay.append(format_vector(beta))
        out.append(_check("homoclinic", f"{name} pairing vanishes", worst <= tol, max_distance=worst, pairs=pairs))
        out.append(_check("homoclinic", f"{name} decays at the window edge", not bad_decay, violations=bad_decay[:5]))
    return out


ORACLE_MODELS = (("Z/2", "2e-g"), ("Z/3", "2e-g"), ("1", "2e"))


def suite_oracle(seed: int = 0, ms=(0, 1, 2, 3)) -> list:
    rng = random.Random(seed)
    out = []
    for gs, ftxt in ORACLE_MODELS:
        G = GroupDescriptor.parse(gs)
        model = FiniteModel(G, parse_matrix(G, ftxt))
        xi = exact_inverse_finite(model)
        one = GroupRingMatrix.identity(G, model.n)
        out.append(
            _check(
                "oracle",
                f"{gs} exact inverse {format_matrix(xi)}",
                lambda_apply(model.f, xi) == one and right_apply(xi, model.f) == one,
            )
        )
        alphas = [parse_vector(G, "e")] + [random_vector(rng, G, model.n, 0, 3, rational=False) for _ in range(3)]
        worst = 0.0
        for m in ms:
            for a in alphas:
                bf = brute_force_mu_fourier(model, xi, m, a)
                ex = mu_fourier_exact(MuSpec(m, xi), a).exact_value
                worst = max(worst, abs(bf.value - ex), abs(bf.imag))
        out.append(_check("oracle", f"{gs} brute force = product formula", worst <= 1e-12, max_error=worst))
        rep = brute_force_identities(model, trials=50, seed=seed)
        out.append(_check("oracle", f"{gs} identities", rep.passed, checks=rep.checks))
        agree = True
        for a in alphas + [r_apply(model.f, b) for b in alphas]:
            member, _ = snf_membership(model, a)
            status = image_membership(model.f, xi, a).status
            agree &= status == ("yes" if member else "no")
        out.append(_check("oracle", f"{gs} membership = Smith normal form", agree))
    return out


def run_suites(names, seed: int = 0, quick: bool = True) -> list:
    names = SUITES if names in ("all", ["all"], ("all",)) else names
    out = []
    for s in names:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; choose from {SUITES} or 'all'")
        if s == "identities":
            out += suite_identities(seed, 200 if quick else 1000)
        elif s == "residual-symmetry":
            out += suite_residual_symmetry(seed, 5 if quick else 10)
        elif s == "solvers":
            out += suite_solvers(seed)
        elif s == "homoclinic":
            out += suite_homoclinic(seed, 100)
        elif s == "oracle":
            out += suite_oracle(seed)
    return out
