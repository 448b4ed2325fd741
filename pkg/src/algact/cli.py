"""Command-line driver.

Subcommands: ``inverse``, ``converge``, ``sample``, ``mc``, ``verify``, ``presets``.
Options come from flags or a JSON file given with ``--config`` (flags win).
Outputs are written under ``--out`` and embed the resolved configuration;
identical configurations produce byte-identical files.

Exit status: 0 success, 1 verification failure, 2 solver failure, 3 config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .groups import GroupDescriptor, GroupError
from .inverse import PRESETS, SolverConfig, SolverFailure, preset, solve, solver_report
from .measures import MuSpec, convergence_sweep, monte_carlo_fourier, sample_windows
from .parse import ParseError, format_matrix, format_vector, matrix_to_json, parse_matrix, parse_vector

EXIT_OK, EXIT_VERIFY, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3

CSV_COLUMNS = ["m", "alpha_id", "exact", "tail_bound", "mc_re", "mc_im", "stderr", "N", "seed"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    preset: str | None = None
    group: str | None = None
    f: str | None = None
    method: str = "neumann"
    radius: int | None = None
    tol: float | None = None
    boundary: str = "dirichlet"
    grid: int | None = None
    max_iter: int = 10_000
    m: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    N: int | None = None
    seed: int | None = None
    window: int = 1
    suite: list = field(default_factory=lambda: ["all"])
    out: str | None = None
    formats: list = field(default_factory=lambda: ["json", "csv", "txt"])

    def to_json(self) -> dict:
        return asdict(self)


def parse_m_list(spec) -> list:
    """``"1..50"``, ``"1,3,5"``, ``"3"`` or a list of ints."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        out = []
        for s in spec:
            out += parse_m_list(s)
        return out
    s = str(spec).replace(" ", "")
    out = []
    for part in s.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out += list(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if any(m < 0 for m in out):
        raise ConfigError("m values must be >= 0")
    return out


def _default_radius(G: GroupDescriptor) -> int:
    if G.kind == "free":
        return 6
    if G.kind == "lattice":
        return 40 if G.rank == 1 else 10
    return 0


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    names = {f.name for f in fields(ExperimentConfig)}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        for k, v in data.items():
            k = k.replace("-", "_")
            if k not in names or k == "command":
                raise ConfigError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    for k in names - {"command"}:
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    cfg.m = parse_m_list(cfg.m) if cfg.m not in (None, []) else []
    if isinstance(cfg.alpha, str):
        cfg.alpha = [cfg.alpha]
    if isinstance(cfg.suite, str):
        cfg.suite = [cfg.suite]
    if isinstance(cfg.formats, str):
        cfg.formats = cfg.formats.split(",")
    if cfg.out is None and cfg.command != "presets":
        cfg.out = "out"
    return cfg


def _problem(cfg: ExperimentConfig):
    if cfg.preset:
        if cfg.group or cfg.f:
            raise ConfigError("give either --preset or --group/--f, not both")
        try:
            p = preset(cfg.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        G, f = p.group, p.f
    else:
        if not (cfg.group and cfg.f):
            raise ConfigError("need --preset, or both --group and --f")
        G = GroupDescriptor.parse(cfg.group)
        f = parse_matrix(G, cfg.f)
        if not f.is_integer():
            raise ConfigError("f must have integer coefficients")
    if cfg.radius is None:
        cfg.radius = _default_radius(G)
    return G, f


def _solver_config(cfg: ExperimentConfig) -> SolverConfig:
    try:
        return SolverConfig(
            radius=cfg.radius,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            method=cfg.method,
            grid=cfg.grid,
            boundary=cfg.boundary,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _need_seed(cfg: ExperimentConfig):
    if cfg.seed is None:
        raise ConfigError(f"{cfg.command} is stochastic: --seed is required")
    if cfg.seed < 0:
        raise ConfigError("seed must be nonnegative")


# -- writers -------------------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _csv_text(cfg: ExperimentConfig, header: list, rows: list, extra: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(cfg.to_json(), sort_keys=True) + "\n")
    if extra is not None:
        buf.write("# solver: " + json.dumps(extra, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def _solver_summary(xi) -> dict:
    return {
        "method": xi.info.get("method"),
        "R": xi.radius,
        "residual_left": xi.residual_left,
        "residual_right": xi.residual_right,
        "residual_left_full": xi.info.get("residual_left_full"),
        "tail_mass": xi.tail_mass if math.isfinite(xi.tail_mass) else "inf",
    }


def _alphas(cfg, G, n):
    texts = cfg.alpha or ["e"]
    out = []
    for i, t in enumerate(texts):
        v = parse_vector(G, t)
        if len(v) != n:
            raise ConfigError(f"alpha {t!r} has {len(v)} components, f is {n}x{n}")
        if v.domain != "integer":
            raise ConfigError(f"alpha {t!r} must have integer coefficients")
        out.append((f"a{i}", t, v))
    return out


# -- commands -----------------------------------------------------------------------------


def cmd_inverse(cfg: ExperimentConfig) -> int:
    G, f = _problem(cfg)
    out = Path(cfg.out)
    scfg = _solver_config(cfg)
    try:
        xi = solve(f, scfg)
    except SolverFailure as exc:
        _write(out, "inverse.json", _dump_json({"config": cfg.to_json(), **exc.to_json()}))
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rep = solver_report(f, xi)
    _write(out, "inverse.json", _dump_json({"config": cfg.to_json(), **rep}))
    if "csv" in cfg.formats:
        els = xi.ball.elements
        rows = [
            (i, j, G.format_element(els[t]), float(xi.coeffs[i, j, t]))
            for i in range(xi.n)
            for j in range(xi.n)
            for t in np.flatnonzero(xi.coeffs[i, j])
        ]
        _write(out, "inverse_coefficients.csv", _csv_text(cfg, ["i", "j", "element", "value"], rows, _solver_summary(xi)))
    print(
        f"{rep['method']} R={xi.radius} iterations={rep['iterations']} "
        f"residual_left={xi.residual_left:.3e} residual_right={xi.residual_right:.3e} "
        f"full={rep['residual_left_full']:.3e}"
    )
    return EXIT_OK


def _solve_or_fail(cfg, f, out: Path, name: str):
    try:
        return solve(f, _solver_config(cfg))
    except SolverFailure as exc:
        _write(out, name, _dump_json({"config": cfg.to_json(), **exc.to_json()}))
        print(f"solver failure: {exc}", file=sys.stderr)
        return None


def cmd_converge(cfg: ExperimentConfig) -> int:
    G, f = _problem(cfg)
    if not cfg.m:
        cfg.m = list(range(1, 51))
    out = Path(cfg.out)
    xi = _solve_or_fail(cfg, f, out, "converge.json")
    if xi is None:
        return EXIT_SOLVER
    rows, tables = [], []
    for aid, text, alpha in _alphas(cfg, G, f.shape[0]):
        t = convergence_sweep(f, xi, alpha, cfg.m)
        tables.append(
            {
                "alpha_id": aid,
                "alpha": text,
                "haar_value": t.haar_value,
                "t0": t.t0,
                "rows": [
                    {"m": r.m, "exact": r.exact_value, "tail_bound": r.tail_bound, "envelope": r.envelope}
                    for r in t.rows
                ],
            }
        )
        for r in t.rows:
            rows.append((r.m, aid, r.exact_value, r.tail_bound, None, None, None, None, None))
        if "txt" in cfg.formats:
            lines = [f"# config: {json.dumps(cfg.to_json(), sort_keys=True)}", f"# alpha {aid} = {text}", "# m |value|"]
            lines += [f"{r.m} {abs(r.exact_value)!r}" for r in t.rows]
            _write(out, f"converge_{aid}.dat", "\n".join(lines) + "\n")
        last = t.rows[-1]
        print(f"{aid} ({text}): haar={t.haar_value} m={last.m} exact={last.exact_value:.6g} tail={last.tail_bound:.3g}")
    summary = _solver_summary(xi)
    if "csv" in cfg.formats:
        _write(out, "converge.csv", _csv_text(cfg, CSV_COLUMNS, rows, summary))
    _write(out, "converge.json", _dump_json({"config": cfg.to_json(), "solver": summary, "sweeps": tables}))
    return EXIT_OK


def cmd_mc(cfg: ExperimentConfig) -> int:
    _need_seed(cfg)
    G, f = _problem(cfg)
    if G.oracle_only:
        raise ConfigError("Monte Carlo sampling needs an infinite group")
    if not cfg.m:
        cfg.m = [1]
    if cfg.N is None:
        cfg.N = 10_000
    if cfg.N < 1:
        raise ConfigError("N must be >= 1")
    out = Path(cfg.out)
    xi = _solve_or_fail(cfg, f, out, "mc.json")
    if xi is None:
        return EXIT_SOLVER
    rows, reports, ok_all = [], [], True
    for m in cfg.m:
        spec = MuSpec(m, xi)
        for aid, text, alpha in _alphas(cfg, G, f.shape[0]):
            rep = monte_carlo_fourier(spec, alpha, cfg.N, cfg.seed)
            ok = rep.consistent()
            ok_all &= ok
            rows.append(
                (m, aid, rep.exact_value, rep.tail_bound, rep.mc_estimate.real, rep.mc_estimate.imag, rep.mc_stderr, cfg.N, cfg.seed)
            )
            reports.append(
                {
                    "m": m,
                    "alpha_id": aid,
                    "alpha": text,
                    "exact": rep.exact_value,
                    "tail_bound": rep.tail_bound,
                    "mc_re": rep.mc_estimate.real,
                    "mc_im": rep.mc_estimate.imag,
                    "stderr": rep.mc_stderr,
                    "consistent": ok,
                }
            )
            print(
                f"m={m} {aid} ({text}): exact={rep.exact_value:.6g} mc={rep.mc_estimate.real:.6g}"
                f"{rep.mc_estimate.imag:+.2g}i stderr={rep.mc_stderr:.2g} tail={rep.tail_bound:.2g} "
                f"{'ok' if ok else 'INCONSISTENT'}"
            )
    summary = _solver_summary(xi)
    if "csv" in cfg.formats:
        _write(out, "mc.csv", _csv_text(cfg, CSV_COLUMNS, rows, summary))
    _write(
        out,
        "mc.json",
        _dump_json({"config": cfg.to_json(), "solver": summary, "N": cfg.N, "seed": cfg.seed, "reports": reports}),
    )
    return EXIT_OK if ok_all else EXIT_VERIFY


def cmd_sample(cfg: ExperimentConfig) -> int:
    _need_seed(cfg)
    G, f = _problem(cfg)
    if G.oracle_only:
        raise ConfigError("sampling needs an infinite group")
    if not cfg.m:
        cfg.m = [1]
    if len(cfg.m) != 1:
        raise ConfigError("sample takes a single m")
    if cfg.N is None:
        cfg.N = 10
    out = Path(cfg.out)
    xi = _solve_or_fail(cfg, f, out, "sample.json")
    if xi is None:
        return EXIT_SOLVER
    pts, vals = sample_windows(MuSpec(cfg.m[0], xi), cfg.window, cfg.N, cfg.seed)
    summary = _solver_summary(xi)
    rows = [
        (i, l, G.format_element(g), float(vals[i, w])) for i in range(cfg.N) for w, (l, g) in enumerate(pts)
    ]
    if "csv" in cfg.formats:
        _write(out, "sample.csv", _csv_text(cfg, ["sample", "component", "element", "value"], rows, summary))
    _write(
        out,
        "sample.json",
        _dump_json(
            {
                "config": cfg.to_json(),
                "solver": summary,
                "N": cfg.N,
                "seed": cfg.seed,
                "window": [[l, G.format_element(g)] for l, g in pts],
                "max_value": float(vals.max()) if vals.size else 0.0,
            }
        ),
    )
    print(f"{cfg.N} samples on {len(pts)} window points, m={cfg.m[0]}, seed={cfg.seed}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    from .suites import SUITES, run_suites

    _need_seed(cfg)
    names = cfg.suite or ["all"]
    if names != ["all"] and any(s not in SUITES for s in names):
        raise ConfigError(f"unknown suite in {names}; choose from {list(SUITES)} or all")
    checks = run_suites(names if names != ["all"] else "all", seed=cfg.seed)
    failed = [c["name"] for c in checks if not c["passed"]]
    for c in checks:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['suite']}: {c['name']}")
    _write(
        Path(cfg.out),
        "verify.json",
        _dump_json({"config": cfg.to_json(), "passed": not failed, "failures": failed, "checks": checks}),
    )
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_presets(cfg: ExperimentConfig) -> int:
    data = [
        {
            "name": p.name,
            "group": str(p.group),
            "f": format_matrix(p.f),
            "f_json": matrix_to_json(p.f),
            "l1_invertible": p.l1_invertible,
            "rationale": p.rationale,
        }
        for p in PRESETS.values()
    ]
    for d in data:
        print(f"{d['name']:16s} {d['group']:4s} f = {d['f']}")
    if cfg.out is not None:
        _write(Path(cfg.out), "presets.json", _dump_json(data))
    return EXIT_OK


COMMANDS = {
    "inverse": cmd_inverse,
    "converge": cmd_converge,
    "sample": cmd_sample,
    "mc": cmd_mc,
    "verify": cmd_verify,
    "presets": cmd_presets,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="algact", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with any of the options below")
        p.add_argument("--out", help="output directory (default: out; presets writes nothing unless given)")
        p.add_argument("--formats", help="comma list of json,csv,txt")
        if name == "presets":
            continue
        if name == "verify":
            p.add_argument("--suite", action="append", help="identities, residual-symmetry, solvers, homoclinic, oracle, all")
            p.add_argument("--seed", type=int)
            continue
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--group", help='e.g. "Z", "Z^2", "F2"')
        p.add_argument("--f", help='e.g. "2e-g" or "[[3e, a],[0, 3e]]"')
        p.add_argument("--method", choices=["neumann", "cg-normal", "torus-grid"])
        p.add_argument("--radius", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--boundary", choices=["dirichlet", "least-squares"])
        p.add_argument("--grid", type=int)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        if name in ("converge", "mc", "sample"):
            p.add_argument("--m", help='"1..50", "1,3" or "3"')
        if name in ("converge", "mc"):
            p.add_argument("--alpha", action="append", help='integer vector, e.g. "e" or "2e-g"; repeatable')
        if name in ("mc", "sample"):
            p.add_argument("--N", type=int)
            p.add_argument("--seed", type=int)
        if name == "sample":
            p.add_argument("--window", type=int, help="window ball radius")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](resolve(args))
    except (ConfigError, ParseError, GroupError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
