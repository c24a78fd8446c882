"""Command-line front end.

Usage: ``dwnls <subcommand> [key=value ...] [--config FILE] [--out DIR] [--format csv,json,svg] [--check]``

Parameters come from an optional plain-text ``key=value`` file, overridden by
``key=value`` arguments. Every run writes its artifacts plus ``manifest.json``
(artifact hashes and the hash of the resolved configuration) into ``--out``.

Exit status: 0 success, 1 a ``--check`` invariant failed, 2 bad configuration,
3 numerical failure inside a module.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys
import types
import typing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import delta_well, dynamics, grid_solver, root_count, stability, two_level
from ._numerics import dumps_json, fmt
from .errors import ConfigError, ConvergenceError, DomainError, OracleMismatchError, SingularPointError
from .svg import LinePlot, diagram_svg

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")
NUMERICAL_ERRORS = (DomainError, SingularPointError, ConvergenceError, OracleMismatchError, ArithmeticError)


# ---------------------------------------------------------------------------
# configurations


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")


@dataclass
class DiagramConfig:
    sigma: float = 1.0
    eta_min: float = -4.0
    eta_max: float = 4.0
    n_eta: int = 400

    def __post_init__(self):
        _positive("sigma", self.sigma)
        _positive("n_eta", self.n_eta)
        if self.eta_max < self.eta_min:
            raise ConfigError("eta_max must not be below eta_min")


@dataclass
class RootsConfig:
    sigmas: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 2.5, 3.0, 3.31, 4.0, 5.0, 7.5])
    n_grid: int = 200001

    def __post_init__(self):
        if not self.sigmas:
            raise ConfigError("sigmas must not be empty")
        for s in self.sigmas:
            _positive("sigma", s)


@dataclass
class StabilityConfig:
    sigma: float = 1.0
    eta: float = -3.0
    probe: bool = False

    def __post_init__(self):
        _positive("sigma", self.sigma)


@dataclass
class DynamicsConfig:
    sigma: float = 1.0
    eta: float = -1.0
    theta0: float = 0.0
    z0: float = 0.1
    dt: float = 1e-3
    horizon: float = 100.0
    record_every: int = 10
    drift_tol: float = 1e-8

    def __post_init__(self):
        _positive("sigma", self.sigma)
        _positive("horizon", self.horizon)
        _positive("record_every", self.record_every)
        if self.dt == 0:
            raise ConfigError("dt must be nonzero")
        if abs(self.z0) > 1:
            raise ConfigError("|z0| must not exceed 1")


@dataclass
class DeltaConfig:
    a: float = 1.0
    alpha: float | None = None
    beta: float | None = None
    hbar: float | None = None
    n_samples: int = 801

    def __post_init__(self):
        _positive("a", self.a)
        if self.alpha is None and (self.beta is None or self.hbar is None):
            raise ConfigError("give alpha, or both beta and hbar")
        if self.alpha is not None and self.beta is not None:
            raise ConfigError("give alpha or beta, not both")
        if (self.alpha if self.alpha is not None else self.beta) >= 0:
            raise ConfigError("the wells must attract: alpha (or beta) must be negative")
        if self.hbar is not None:
            _positive("hbar", self.hbar)

    def params(self) -> delta_well.DeltaWellParams:
        if self.alpha is not None:
            return delta_well.DeltaWellParams(self.a, self.alpha)
        return delta_well.DeltaWellParams.semiclassical(self.a, self.beta, self.hbar)


BRANCHES = ("s", "a", "as", "as1", "as2")


@dataclass
class SolveConfig:
    sigma: float = 1.0
    hbar: float = 0.1
    eta: float = -1.0
    branch: str = "s"
    potential: str = "gaussian"
    depth: float = 1.0
    centre: float = 1.2
    width: float = 1.0
    delta_a: float = 1.0
    delta_beta: float = -1.0
    half_width: float = 5.0
    n_points: int = 2001
    tol: float = 1e-10

    def __post_init__(self):
        for name in ("sigma", "hbar", "half_width", "tol", "depth", "width", "delta_a"):
            _positive(name, getattr(self, name))
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be one of {BRANCHES}")
        if self.potential not in ("gaussian", "delta"):
            raise ConfigError("potential must be gaussian or delta")
        if self.n_points < 5 or self.n_points % 2 == 0:
            raise ConfigError("n_points must be odd and at least 5")
        if self.delta_beta >= 0:
            raise ConfigError("delta_beta must be negative")

    def problem(self, hbar: float | None = None) -> grid_solver.DiscreteProblem:
        pot = (
            grid_solver.GaussianDoubleWell(self.depth, self.centre, self.width)
            if self.potential == "gaussian"
            else grid_solver.DoubleDelta(self.delta_a, self.delta_beta)
        )
        return grid_solver.DiscreteProblem(
            half_width=self.half_width,
            n_points=self.n_points,
            hbar=self.hbar if hbar is None else hbar,
            sigma=self.sigma,
            potential=pot,
        )


@dataclass
class SweepConfig(SolveConfig):
    hbars: list[float] = field(default_factory=lambda: [0.1])
    etas: list[float] = field(default_factory=lambda: [-1.0, -2.0, -3.0])
    workers: int = 2

    def __post_init__(self):
        super().__post_init__()
        if not self.hbars or not self.etas:
            raise ConfigError("hbars and etas must not be empty")
        for h in self.hbars:
            _positive("hbar", h)
        _positive("workers", self.workers)


CONFIGS: dict[str, type] = {
    "diagram": DiagramConfig,
    "roots": RootsConfig,
    "stability": StabilityConfig,
    "dynamics": DynamicsConfig,
    "delta": DeltaConfig,
    "solve": SolveConfig,
    "sweep": SweepConfig,
}


HELP = {
    "diagram": "two-mode bifurcation diagram over a coupling range",
    "roots": "root counts of the fold polynomial against the sign-change bound",
    "stability": "dynamical and orbital verdicts for every stationary point at one coupling",
    "dynamics": "integrate the two-mode Hamiltonian flow from one initial state",
    "delta": "closed-form spectrum and eigenfunctions of the double-delta well",
    "solve": "grid stationary state on one branch",
    "sweep": "grid stationary states over lists of hbar and eta, in parallel",
}


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict[str, str]
    output_dir: Path
    formats: tuple[str, ...] = FORMATS
    check: bool = False


def _parse_scalar(text: str, tp) -> object:
    text = text.strip()
    if tp is bool:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if tp is int:
        return int(text)
    if tp is float:
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("non-finite value")
        return v
    return text


def parse_value(text: str, tp) -> object:
    """Convert ``text`` to the annotated field type (scalars, optionals, comma lists)."""
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if text.strip().lower() in ("", "none", "null"):
            return None
        return parse_value(text, args[0])
    if origin is list:
        (inner,) = typing.get_args(tp)
        return [_parse_scalar(t, inner) for t in text.split(",") if t.strip()]
    return _parse_scalar(text, tp)


def read_config_file(path: Path) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are ignored."""
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    out: dict[str, str] = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_config(subcommand: str, parameters: dict[str, str]):
    cls = CONFIGS[subcommand]
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(parameters) - known)
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {subcommand}: {', '.join(unknown)}")
    kwargs = {}
    for key, text in parameters.items():
        try:
            kwargs[key] = parse_value(text, hints[key])
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from exc
    return cls(**kwargs)


def config_hash(subcommand: str, cfg) -> str:
    canonical = dumps_json({"subcommand": subcommand, "config": asdict(cfg)})
    return hashlib.sha256(canonical.encode()).hexdigest()


# ---------------------------------------------------------------------------
# subcommands: each returns ({filename: text}, checks)

Check = tuple[str, bool, str]
Artifacts = dict[str, str]


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _diagram(cfg: DiagramConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    diag = two_level.build_diagram(cfg.sigma, cfg.eta_min, cfg.eta_max, cfg.n_eta)
    art = {"diagram.csv": diag.to_csv(), "diagram.json": diag.to_json(), "diagram.svg": diagram_svg(diag)}
    checks: list[Check] = []
    if check:
        worst = 0.0
        for p in diag.branches:
            if p.label.is_asymmetric:
                sign = two_level.BranchSign.PLUS if p.theta is two_level.Phase.ZERO else two_level.BranchSign.MINUS
                worst = max(worst, abs(two_level.branch_function(p.z, p.eta, cfg.sigma, sign)))
        checks.append(("asymmetric points solve the stationarity equation", worst <= 1e-9, f"max residual {worst:.3e}"))
        keyed = {(p.eta, p.z, p.label, p.theta): p.energy for p in diag.branches}
        mirrored = all(
            (e, -z, lab, th) in keyed and keyed[(e, -z, lab, th)] == en for (e, z, lab, th), en in keyed.items()
        )
        checks.append(("branches are mirror symmetric in z", mirrored, ""))
        mismatched = 0
        for p in diag.branches:
            if p.stability is not two_level.Stability.UNDETERMINED:
                expect = stability.det_hess(p, cfg.sigma) > 0
                mismatched += expect != (p.stability is two_level.Stability.STABLE)
        checks.append(("stability labels follow the Hessian sign", mismatched == 0, f"{mismatched} mismatches"))
    return art, checks


def _roots(cfg: RootsConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    rows, docs, checks = [], [], []
    for s in cfg.sigmas:
        rc = root_count.budan_fourier_bound(s)
        oc = root_count.count_roots_oracle(s, n_grid=cfg.n_grid)
        rows.append([s, oc.n_total, oc.n_at_one, rc.bf_bound, rc.method.value])
        docs.append(
            {
                "sigma": float(s),
                "n_total": oc.n_total,
                "n_at_one": oc.n_at_one,
                "bf_bound": rc.bf_bound,
                "method": rc.method.value,
                "simple_roots": [float(r) for r in oc.simple_roots],
            }
        )
        if check:
            checks.append((f"sigma={fmt(s)}: count within bound", oc.n_total <= rc.bf_bound, f"{oc.n_total} <= {rc.bf_bound}"))
            checks.append((f"sigma={fmt(s)}: oracle matches expected count", oc.n_total == rc.n_total and oc.n_at_one == rc.n_at_one,
                           f"oracle ({oc.n_total}, {oc.n_at_one}) vs ({rc.n_total}, {rc.n_at_one})"))
            r = sorted(oc.simple_roots)
            recip = max((abs(r[i] * r[-1 - i] - 1.0) for i in range(len(r))), default=0.0)
            checks.append((f"sigma={fmt(s)}: roots pair up as y, 1/y", recip <= 1e-8, f"max |y y' - 1| = {recip:.2e}"))
    art = {
        "roots.csv": _csv(["sigma", "n_total", "n_at_one", "bf_bound", "method"], rows),
        "roots.json": dumps_json({"rows": docs}),
    }
    return art, checks


def _stability(cfg: StabilityConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    rows, docs, checks = [], [], []
    for p in two_level.stationary_points(cfg.eta, cfg.sigma):
        dyn = stability.classify_dynamical(p, cfg.sigma)
        doc = {
            "label": p.label.value,
            "z": p.z,
            "theta": p.theta.angle,
            "energy": p.energy,
            "det_hess": stability.det_hess(p, cfg.sigma),
            "dynamical": dyn.value,
        }
        orbital = None
        if cfg.eta < 0:
            rep = stability.orbital_verdict(p, cfg.sigma)
            orbital = rep.verdict
            doc.update(
                orbital=rep.verdict.value,
                l_plus_negative_count=rep.l_plus_negative_count,
                l_minus_nonnegative=rep.l_minus_nonnegative,
                slope_sign=rep.slope_sign.name.lower(),
            )
        probe = None
        if cfg.probe:
            rate, probe = dynamics.probe_stability(p, cfg.sigma)
            doc.update(probe=probe.value, probe_rate=rate)
        docs.append(doc)
        rows.append([p.label.value, p.z, p.theta.angle, p.energy, doc["det_hess"], dyn.value,
                     "" if orbital is None else orbital.value, "" if probe is None else probe.value])
        if check:
            undet = two_level.Stability.UNDETERMINED
            if orbital is not None and undet not in (orbital, dyn):
                checks.append((f"{p.label.value} z={fmt(p.z)}: orbital agrees with dynamical", orbital is dyn, ""))
            if probe is not None and dyn is not undet and probe is not dynamics.ProbeVerdict.INCONCLUSIVE:
                checks.append((f"{p.label.value} z={fmt(p.z)}: probe agrees", probe.value == dyn.value, ""))
    art = {
        "stability.csv": _csv(["label", "z", "theta", "energy", "det_hess", "dynamical", "orbital", "probe"], rows),
        "stability.json": dumps_json({"sigma": float(cfg.sigma), "eta": float(cfg.eta), "points": docs}),
    }
    return art, checks


def _dynamics(cfg: DynamicsConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    start = dynamics.TwoLevelState(cfg.theta0, cfg.z0)
    traj = dynamics.integrate(start, cfg.eta, cfg.sigma, cfg.dt, cfg.horizon, cfg.record_every)
    h = traj.hamiltonian_values
    drift = float(np.max(np.abs(h - h[0])))
    summary = {"initial_H": float(h[0]), "max_H_drift": drift, "n_samples": len(traj.times)}
    try:
        summary["z_frequency"] = dynamics.oscillation_frequency(traj, float(np.mean(traj.z)))
    except DomainError:
        summary["z_frequency"] = None
    plot = LinePlot((float(traj.times[0]), float(traj.times[-1]) or 1.0), (-1.0, 1.0), x_label="tau", y_label="z",
                    title=f"sigma = {fmt(cfg.sigma)}, eta = {fmt(cfg.eta)}")
    plot.polyline(traj.times, traj.z)
    art = {"trajectory.csv": traj.to_csv(), "dynamics.json": dumps_json(summary), "trajectory.svg": plot.render()}
    checks: list[Check] = []
    if check:
        checks.append(("Hamiltonian drift below tolerance", drift <= cfg.drift_tol, f"{drift:.3e} vs {cfg.drift_tol:.1e}"))
        checks.append(("trajectory stays on the sphere", bool(np.all(np.abs(traj.z) <= 1.0)), ""))
    return art, checks


def _delta(cfg: DeltaConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    p = cfg.params()
    sp = delta_well.spectrum(p)
    has_odd = delta_well.odd_state_exists(p)
    doc = {
        "a": p.a,
        "alpha": p.alpha,
        "odd_state_exists": has_odd,
        "eigenvalues": [sp.e1] + ([sp.e2] if has_odd else []),
        "kappa": [sp.kappa1] + ([sp.kappa2] if has_odd else []),
        "normalization": [sp.c1] + ([sp.c2] if has_odd else []),
    }
    if has_odd:
        doc["splitting"] = delta_well.splitting(p)
        doc["splitting_asymptote"] = delta_well.splitting_asymptote(p)
    reach = p.a + 8.0 / sp.kappa1
    x = np.linspace(-reach, reach, cfg.n_samples)
    cols = [delta_well.eigenfunction(p, 1, x)] + ([delta_well.eigenfunction(p, 2, x)] if has_odd else [])
    header = ["x", "phi1"] + (["phi2"] if has_odd else [])
    plot = LinePlot((-reach, reach), (float(min(c.min() for c in cols)) * 1.1, float(max(c.max() for c in cols)) * 1.1),
                    x_label="x", y_label="phi", title=f"a = {fmt(p.a)}, alpha = {fmt(p.alpha)}")
    for c, colour in zip(cols, ("#1f4e9c", "#b03a2e")):
        plot.polyline(x, c, colour)
    art = {"delta.json": dumps_json(doc), "eigenfunctions.csv": _csv(header, zip(x, *cols)), "eigenfunctions.svg": plot.render()}
    checks: list[Check] = []
    if check:
        shot = delta_well.shooting_energies(p)
        closed = doc["eigenvalues"]
        agree = len(shot) == len(closed) and all(abs(s - c) <= 1e-10 * max(1.0, abs(c)) for s, c in zip(shot, closed))
        checks.append(("closed form matches shooting", agree, f"{shot} vs {closed}"))
        worst = 0.0
        for j in range(1, len(closed) + 1):
            for c in (-p.a, p.a):
                jump = (delta_well.eigenfunction_derivative(p, j, np.array([c]), +1)
                        - delta_well.eigenfunction_derivative(p, j, np.array([c]), -1))[0]
                worst = max(worst, abs(jump - p.alpha * delta_well.eigenfunction(p, j, np.array([c]))[0]))
        checks.append(("derivative jump conditions", worst <= 1e-8, f"max residual {worst:.2e}"))
        checks.append(("odd state iff a > -1/alpha", has_odd == (p.a > -1.0 / p.alpha), ""))
    return art, checks


def _initial_point(cfg: SolveConfig, eta: float) -> tuple[float, two_level.Phase]:
    for p in two_level.stationary_points(eta, cfg.sigma):
        if p.label.value == cfg.branch and p.z >= 0:
            return p.z, p.theta
    raise ConfigError(f"branch {cfg.branch!r} does not exist at eta = {fmt(eta)}, sigma = {fmt(cfg.sigma)}")


def solve_point(cfg: SolveConfig, hbar: float, eta: float) -> dict:
    """Solve one (hbar, eta) point on the configured branch and summarize it."""
    problem = cfg.problem(hbar)
    doublet = grid_solver.linear_doublet(problem)
    z0, theta0 = _initial_point(cfg, eta)
    sol = grid_solver.solve_stationary(problem, doublet, eta, z0, theta0, tol=cfg.tol)
    ops = grid_solver.linearized_operators(problem, sol)
    lp = ops.lowest("plus", 3)
    lm = ops.lowest("minus", 2)
    parity = float(np.max(np.abs(sol.psi - (1 if cfg.branch == "s" else -1) * sol.psi[::-1])))
    return {
        "hbar": hbar,
        "eta": eta,
        "branch": cfg.branch,
        "z_init": z0,
        "z": sol.z,
        "lambda": sol.lam,
        "E": sol.E,
        "E_two_level": two_level.energy(sol.z, eta, cfg.sigma, theta0),
        "epsilon": sol.epsilon,
        "omega": doublet.omega,
        "Omega": doublet.Omega,
        "c_R": grid_solver.coupling_constant(problem, doublet),
        "psi_c_norm": sol.psi_c_norm,
        "residual": sol.residual,
        "norm_error": abs(problem.norm(sol.psi) - 1.0),
        "iterations": sol.iterations,
        "l_plus_negative": grid_solver.negative_count(lp, 1e-3 * doublet.omega),
        "l_plus_lowest_over_omega": [float(v) for v in lp / doublet.omega],
        "l_minus_lowest": [float(v) for v in lm],
        "parity_error": parity if cfg.branch in ("s", "a") else None,
        "_psi": sol.psi,
        "_x": problem.x,
    }


def _point_checks(cfg: SolveConfig, r: dict) -> list[Check]:
    tag = f"hbar={fmt(r['hbar'])} eta={fmt(r['eta'])}"
    out = [
        (f"{tag}: unit norm", r["norm_error"] <= 1e-10, f"{r['norm_error']:.2e}"),
        (f"{tag}: residual below tolerance", r["residual"] < cfg.tol, f"{r['residual']:.2e}"),
        (f"{tag}: L- kernel", abs(r["l_minus_lowest"][0]) < 1e-6 and r["l_minus_lowest"][1] > 0, str(r["l_minus_lowest"])),
    ]
    if r["parity_error"] is not None:
        out.append((f"{tag}: parity preserved", r["parity_error"] <= 1e-8, f"{r['parity_error']:.2e}"))
    return out


def _public(r: dict) -> dict:
    return {k: v for k, v in r.items() if not k.startswith("_")}


def _solve(cfg: SolveConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    r = solve_point(cfg, cfg.hbar, cfg.eta)
    x, psi = r["_x"], r["_psi"]
    plot = LinePlot((float(x[0]), float(x[-1])), (float(min(psi.min(), 0.0)) * 1.1, float(psi.max()) * 1.1),
                    x_label="x", y_label="psi", title=f"{cfg.branch}, eta = {fmt(cfg.eta)}, hbar = {fmt(cfg.hbar)}")
    plot.polyline(x, psi)
    art = {"solution.csv": _csv(["x", "psi"], zip(x, psi)), "solution.json": dumps_json(_public(r)), "solution.svg": plot.render()}
    return art, (_point_checks(cfg, r) if check else [])


def _sweep_task(args) -> dict:
    cfg, hbar, eta = args
    try:
        return _public(solve_point(cfg, hbar, eta))
    except NUMERICAL_ERRORS as exc:
        return {"hbar": hbar, "eta": eta, "branch": cfg.branch, "error": f"{type(exc).__name__}: {exc}"}


SWEEP_COLUMNS = ["hbar", "eta", "branch", "z", "lambda", "E", "E_two_level", "omega", "psi_c_norm", "residual",
                 "iterations", "l_plus_negative"]


def _sweep(cfg: SweepConfig, check: bool) -> tuple[Artifacts, list[Check]]:
    tasks = [(cfg, h, e) for h in cfg.hbars for e in cfg.etas]
    if cfg.workers == 1 or len(tasks) == 1:
        results = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(tasks))) as pool:
            results = list(pool.map(_sweep_task, tasks))  # map keeps task order
    rows = [[r.get(c, "") if r.get(c) is not None else "" for c in SWEEP_COLUMNS] for r in results]
    rows = [[v if isinstance(v, (str, int, float)) else str(v) for v in row] for row in rows]
    ok = [r for r in results if "error" not in r]
    plot = LinePlot((min(cfg.etas), max(cfg.etas)) if len(set(cfg.etas)) > 1 else (cfg.etas[0] - 1, cfg.etas[0] + 1),
                    (-1.0, 1.0), x_label="eta", y_label="z", title=f"sweep, branch {cfg.branch}")
    for h in cfg.hbars:
        pts = sorted((r["eta"], r["z"]) for r in ok if r["hbar"] == h)
        if pts:
            plot.polyline([p[0] for p in pts], [p[1] for p in pts])
    art = {"sweep.csv": _csv(SWEEP_COLUMNS, rows), "sweep.json": dumps_json({"points": results}), "sweep.svg": plot.render()}
    checks: list[Check] = []
    if check:
        for r in results:
            if "error" in r:
                checks.append((f"hbar={fmt(r['hbar'])} eta={fmt(r['eta'])}: solved", False, r["error"]))
            else:
                checks.extend(_point_checks(cfg, r))
    return art, checks


HANDLERS = {
    "diagram": _diagram,
    "roots": _roots,
    "stability": _stability,
    "dynamics": _dynamics,
    "delta": _delta,
    "solve": _solve,
    "sweep": _sweep,
}


# ---------------------------------------------------------------------------
# driver


def run(config: RunConfig, stream=None) -> int:
    """Execute one subcommand, write artifacts and the manifest, and return the exit status."""
    stream = sys.stdout if stream is None else stream
    try:
        if config.subcommand not in HANDLERS:
            raise ConfigError(f"unknown subcommand {config.subcommand!r}")
        bad = sorted(set(config.formats) - set(FORMATS))
        if bad:
            raise ConfigError(f"unknown format(s): {', '.join(bad)}")
        cfg = build_config(config.subcommand, config.parameters)
        artifacts, checks = HANDLERS[config.subcommand](cfg, config.check)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(artifacts):
        if name.rsplit(".", 1)[-1] not in config.formats:
            continue
        data = artifacts[name].encode()
        (out / name).write_bytes(data)
        written.append({"file": name, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
    manifest = {
        "subcommand": config.subcommand,
        "config": asdict(cfg),
        "config_sha256": config_hash(config.subcommand, cfg),
        "artifacts": written,
    }
    if config.check:
        manifest["checks"] = [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks]
    (out / "manifest.json").write_text(dumps_json(manifest))
    for f in written:
        print(f"wrote {out / f['file']}", file=stream)
    failed = [c for c in checks if not c[1]]
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""), file=stream)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _split_params(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwnls", description="Double-well NLS two-mode and grid experiments.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, cls in CONFIGS.items():
        keys = ", ".join(f.name for f in fields(cls))
        p = sub.add_parser(name, help=HELP[name], description=f"{HELP[name]}. Parameters: {keys}")
        p.add_argument("params", nargs="*", metavar="key=value")
        p.add_argument("--config", type=Path, help="key=value file; command-line parameters take precedence")
        p.add_argument("--out", type=Path, default=Path("dwnls-out") / name, help="output directory")
        p.add_argument("--format", default=",".join(FORMATS), help="comma-separated subset of csv,json,svg")
        p.add_argument("--check", action="store_true", help="run the invariant checks and fail on violation")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = read_config_file(args.config) if args.config else {}
        params.update(_split_params(args.params))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    return run(RunConfig(args.subcommand, params, args.out, formats, args.check))


if __name__ == "__main__":
    sys.exit(main())
