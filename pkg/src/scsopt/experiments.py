"""Config-driven benchmark and CT studies, and the files they emit."""

from __future__ import annotations

import configparser
import csv
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from scsopt.benchmarks import PROBLEM_NAMES, error_measure, is_solved, make_problem
from scsopt.core import UsageError
from scsopt.ct.imageio import write_pgm
from scsopt.ct.metrics import psnr, ssim
from scsopt.ct.phantoms import PHANTOMS
from scsopt.ct.problem import ScenarioSpec, build_scenario, ct_objective
from scsopt.ct.projector import default_detector_count
from scsopt.profiles import (
    ERROR_FLOOR,
    ResultsTable,
    build_profile,
    ten_percent_solved,
    write_profile_csv,
    write_profile_svg,
)
from scsopt.solver import ScsConfig, parse_solver_name, solve

BENCH_SOLVERS = ("NMB0", "NMB1", "NMB2", "NMB3", "WB0", "WB1", "WB2", "WB3")
CT_SOLVERS = ("NMB0", "NMB1", "NMB2", "NMB3")

# acquisition used by the full-size study: views and detector bins per view
FULL_N = 400
FULL_LOW_DOSE_VIEWS = 360
FULL_MU_LOW_DOSE = (25.0, 250.0, 2500.0)
FULL_MU_SPARSE = (0.5, 5.0, 50.0)

BENCH_COLUMNS = ["problem", "solver", "f_min", "error", "evals", "cpu_seconds", "solved"]
CT_COLUMNS = ["scenario", "solver", "f_min", "evals", "psnr", "ssim", "cpu_seconds"]


def scale_mu(mu_full: float, N: int, n_views: int, n_det: int, full_views: int) -> float:
    """Carry a full-size TV weight over to a smaller grid.

    The data term grows like ``m N^2`` (m rays, line integrals of length ~N)
    while the TV of a piecewise-constant image grows like N, so the weight is
    multiplied by ``(m N)_small / (m N)_full``.
    """
    m_full = full_views * default_detector_count(FULL_N)
    return mu_full * (n_views * n_det * N) / (m_full * FULL_N)


@dataclass
class ExperimentConfig:
    study: str = "bench"
    output: str = "results"
    seed: int = 0
    workers: int = 1
    solvers: list[str] = field(default_factory=list)
    max_iter: int = 0
    memory: int = 7
    # bench
    problems: list[str] = field(default_factory=lambda: list(PROBLEM_NAMES))
    # ct
    N: int = 64
    n_det: int = 0
    phantoms: list[str] = field(default_factory=lambda: ["shepplogan", "grains"])
    low_dose_noise: list[float] = field(default_factory=lambda: [0.01])
    low_dose_views: int = 90
    sparse_views: list[int] = field(default_factory=lambda: [30])
    mu_low_dose: list[float] = field(default_factory=list)
    mu_sparse_view: list[float] = field(default_factory=list)
    grad_norm_stop: float = 1e-10

    def __post_init__(self):
        if self.study not in ("bench", "ct"):
            raise UsageError(f"study must be 'bench' or 'ct', got {self.study!r}")
        if not self.solvers:
            self.solvers = list(BENCH_SOLVERS if self.study == "bench" else CT_SOLVERS)
        if self.max_iter <= 0:
            self.max_iter = 1000 if self.study == "bench" else 200
        if self.n_det <= 0:
            self.n_det = default_detector_count(self.N)
        for s in self.solvers:
            _, kind = parse_solver_name(s)
            if self.study == "ct" and kind.value != "nonmonotone":
                raise UsageError("the CT study uses box projection and needs a nonmonotone solver")
        if self.study == "bench":
            for p in self.problems:
                make_problem(p)
        else:
            if self.N < 16:
                raise UsageError("CT study needs N >= 16")
            for ph in self.phantoms:
                if ph not in PHANTOMS:
                    raise UsageError(f"unknown phantom {ph!r}")
            if any(v < 1 for v in [self.low_dose_views, *self.sparse_views]):
                raise UsageError("view counts must be positive")


def preset(name: str, study: str) -> dict:
    """Default overrides for ``desk`` (small, quick) or ``full`` (N=400, 45 scenarios) runs."""
    if name not in ("desk", "full"):
        raise UsageError(f"unknown preset {name!r}")
    if study == "bench":
        return {}
    if name == "full":
        return dict(N=FULL_N, n_det=default_detector_count(FULL_N),
                    phantoms=["shepplogan", "threephases", "grains"],
                    low_dose_noise=[0.01, 0.05, 0.10], low_dose_views=FULL_LOW_DOSE_VIEWS,
                    sparse_views=[60, 30], mu_low_dose=list(FULL_MU_LOW_DOSE),
                    mu_sparse_view=list(FULL_MU_SPARSE))
    N, n_det, views, sparse = 64, 90, 90, [30]
    return dict(N=N, n_det=n_det, phantoms=["shepplogan", "grains"], low_dose_noise=[0.01],
                low_dose_views=views, sparse_views=sparse,
                mu_low_dose=[scale_mu(FULL_MU_LOW_DOSE[0], N, views, n_det, FULL_LOW_DOSE_VIEWS)],
                mu_sparse_view=[scale_mu(FULL_MU_SPARSE[1], N, sparse[0], n_det, sparse[0])])


def _coerce(name, raw: str):
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in kinds:
        raise UsageError(f"unknown config key {name!r}")
    kind = str(kinds[name])
    items = [v.strip() for v in raw.split(",") if v.strip()]
    try:
        if kind.startswith("list[float]"):
            return [float(v) for v in items]
        if kind.startswith("list[int]"):
            return [int(v) for v in items]
        if kind.startswith("list"):
            return items
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {name}: {raw!r}") from None
    return raw.strip()


def load_config(path=None, study: str | None = None, preset_name: str | None = None,
                **overrides) -> ExperimentConfig:
    """Merge preset, INI file and explicit overrides (later wins).

    The INI file may hold a ``[study]`` section plus a section named after the
    study (``[bench]`` or ``[ct]``); list values are comma separated.
    """
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        if not parser.read(path):
            raise UsageError(f"cannot read config file {path}")
        for section in parser.sections():
            for key, raw in parser[section].items():
                values[key] = _coerce(key, raw)
    study = study or values.get("study") or "bench"
    merged = preset(preset_name, study) if preset_name else (preset("desk", study) if study == "ct" else {})
    merged.update(values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    merged["study"] = study
    return ExperimentConfig(**merged)


_BENCH_ONLY = {"problems"}
_CT_ONLY = {"N", "n_det", "phantoms", "low_dose_noise", "low_dose_views", "sparse_views",
            "mu_low_dose", "mu_sparse_view", "grad_norm_stop"}


def write_effective_config(cfg: ExperimentConfig, out: Path) -> None:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    skip = _CT_ONLY if cfg.study == "bench" else _BENCH_ONLY
    flat = {}
    for k, v in asdict(cfg).items():
        if k in skip:
            continue
        flat[k] = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v) if isinstance(v, list) else (repr(v) if isinstance(v, float) else str(v))
    parser["study"] = {"study": flat.pop("study")}
    parser[cfg.study] = flat
    with open(out / "effective_config.ini", "w") as fh:
        parser.write(fh)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(_fmt(r[c]) for c in columns) for r in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _map(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------- bench study

def _bench_task(task):
    problem_name, solver, max_iter, memory, seed = task
    prob = make_problem(problem_name)
    rule, kind = parse_solver_name(solver)
    cfg = ScsConfig(beta_rule=rule, line_search=kind, memory=memory, max_iter=max_iter, seed=seed)
    res = solve(prob.oracle, prob.x0, cfg)
    err = error_measure(res.f_min, prob.f_star)
    return {
        "problem": problem_name, "solver": solver, "f_min": res.f_min, "f_star": prob.f_star,
        "error": err, "evals": res.evals_at_best, "total_evals": res.function_evals,
        "iterations": res.iterations, "cpu_seconds": res.wall_time, "solved": is_solved(err),
        "terminated_early": res.terminated_early, "x_best": res.x_best.tolist(),
    }


def run_bench(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    write_effective_config(cfg, out)
    tasks = [(p, s, cfg.max_iter, cfg.memory, cfg.seed) for p in cfg.problems for s in cfg.solvers]
    rows = _map(_bench_task, tasks, cfg.workers)
    for r in rows:
        _atomic_write(out / f"run_{r['problem']}_{r['solver']}.json", json.dumps(r, indent=2))
    _write_csv(out / "bench_results.csv", BENCH_COLUMNS, rows)
    for metric in ("error", "evals", "cpu"):
        make_profiles([out / "bench_results.csv"], metric, "threshold", out)
    return out


# ------------------------------------------------------------------- ct study

def ct_scenarios(cfg: ExperimentConfig) -> list[ScenarioSpec]:
    specs = []
    for ph in cfg.phantoms:
        for noise in cfg.low_dose_noise:
            for mu in cfg.mu_low_dose:
                specs.append(ScenarioSpec(ph, "low_dose", cfg.low_dose_views, noise, mu,
                                          cfg.N, cfg.n_det, cfg.seed))
        for views in cfg.sparse_views:
            for mu in cfg.mu_sparse_view:
                specs.append(ScenarioSpec(ph, "sparse_view", views, 0.0, mu, cfg.N, cfg.n_det,
                                          cfg.seed))
    return specs


def ct_config(solver: str, cfg: ExperimentConfig) -> ScsConfig:
    rule, kind = parse_solver_name(solver)
    return ScsConfig(beta_rule=rule, line_search=kind, memory=cfg.memory, max_iter=cfg.max_iter,
                     box_projection=True, grad_norm_stop=cfg.grad_norm_stop, seed=cfg.seed)


def reconstruct(spec: ScenarioSpec, scs: ScsConfig):
    """Solve one scenario from ``x0 = 0``; return ``(SolveResult, truth)``."""
    problem, truth = build_scenario(spec)
    res = solve(ct_objective(problem), np.zeros(problem.geometry.n), scs)
    return res, truth


def _ct_task(task):
    spec, solver, cfg, out = task
    res, truth = reconstruct(spec, ct_config(solver, cfg))
    stem = f"{spec.label}_{solver}"
    write_pgm(out / f"recon_{stem}.pgm", res.x_best.reshape(spec.N, spec.N))
    hist = [{"k": h.k, "f": h.f, "alpha": h.alpha, "theta": h.theta, "beta": h.beta,
             "restarted": h.restarted, "gnorm": h.gnorm, "evals": h.evals} for h in res.history]
    _write_csv(out / f"history_{stem}.csv", list(hist[0]), hist)
    return {"scenario": spec.label, "solver": solver, "f_min": res.f_min,
            "evals": res.function_evals, "psnr": psnr(res.x_best, truth),
            "ssim": ssim(res.x_best, truth), "cpu_seconds": res.wall_time,
            "case": spec.label.rsplit("_mu", 1)[0], "mu": spec.mu}


def run_ct(cfg: ExperimentConfig) -> Path:
    if cfg.study != "ct":
        raise UsageError("run_ct needs a ct study config")
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    write_effective_config(cfg, out)
    tasks = [(spec, s, cfg, out) for spec in ct_scenarios(cfg) for s in cfg.solvers]
    rows = _map(_ct_task, tasks, cfg.workers)
    _write_csv(out / "ct_results.csv", CT_COLUMNS, rows)
    _write_quality_table(out / "ct_quality.csv", rows, cfg.solvers)
    for metric in ("f_min", "evals"):
        make_profiles([out / "ct_results.csv"], metric, "ten_percent", out)
    return out


def _write_quality_table(path: Path, rows, solvers) -> None:
    """Best PSNR and SSIM over the weights tried, per imaging case and solver."""
    cases = []
    for r in rows:
        if r["case"] not in cases:
            cases.append(r["case"])
    table = []
    for case in cases:
        for s in solvers:
            sel = [r for r in rows if r["case"] == case and r["solver"] == s]
            table.append({"case": case, "solver": s,
                          "best_psnr": max(r["psnr"] for r in sel),
                          "best_ssim": max(r["ssim"] for r in sel)})
    _write_csv(path, ["case", "solver", "best_psnr", "best_ssim"], table)


# ------------------------------------------------------------------- profiles

_METRIC_COLUMNS = {"error": "error", "evals": "evals", "cpu": "cpu_seconds", "f_min": "f_min"}


def _read_results(paths):
    rows, key = [], None
    for p in paths:
        if not Path(p).is_file():
            raise UsageError(f"{p}: no such results file")
        with open(p, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise UsageError(f"{p}: empty results file")
            this_key = "problem" if "problem" in reader.fieldnames else "scenario"
            for col in (this_key, "solver"):
                if col not in reader.fieldnames:
                    raise UsageError(f"{p}: missing column {col!r}")
            if key is not None and this_key != key:
                raise UsageError(f"{p}: mixes benchmark and CT results")
            key = this_key
            rows.extend(({**r, "_key": r[this_key], "_file": str(p)}) for r in reader)
    if not rows:
        raise UsageError("no result rows to profile")
    return rows


def make_profiles(paths, metric: str, rule: str, out=None) -> Path:
    """Build ``profile_<metric>.csv`` and ``.svg`` from result CSVs.

    ``rule`` is ``threshold`` (benchmark accuracy test on the ``error``
    column) or ``ten_percent`` (``f_min`` within 10% of the best per problem).
    """
    if metric not in _METRIC_COLUMNS:
        raise UsageError(f"unknown metric {metric!r}; choose from {sorted(_METRIC_COLUMNS)}")
    if rule not in ("threshold", "ten_percent"):
        raise UsageError(f"unknown rule {rule!r}")
    rows = _read_results(paths)
    col = _METRIC_COLUMNS[metric]
    needed = [col, "error"] if rule == "threshold" else [col, "f_min"]
    for c in needed:
        if c not in rows[0]:
            raise UsageError(f"{rows[0]['_file']}: missing column {c!r}")
    problems, solvers = [], []
    for r in rows:
        if r["_key"] not in problems:
            problems.append(r["_key"])
        if r["solver"] not in solvers:
            solvers.append(r["solver"])
    cells = {(r["_key"], r["solver"]): r for r in rows}
    missing = [(p, s) for p in problems for s in solvers if (p, s) not in cells]
    if missing:
        raise UsageError(f"missing result for problem {missing[0][0]!r}, solver {missing[0][1]!r}")

    def grid(c):
        try:
            return np.array([[float(cells[(p, s)][c]) for s in solvers] for p in problems])
        except ValueError:
            raise UsageError(f"non-numeric entry in column {c!r}") from None

    t = grid(col)
    if rule == "threshold":
        err = grid("error")
        solved = err < 1e-1
    else:
        solved = ten_percent_solved(grid("f_min"))
    if metric == "error":
        t = np.maximum(t, ERROR_FLOOR)
    profile = build_profile(ResultsTable(problems, solvers, t, solved))
    out = Path(out) if out is not None else Path(paths[0]).parent
    out.mkdir(parents=True, exist_ok=True)
    target = out / f"profile_{metric}.csv"
    write_profile_csv(target, profile)
    write_profile_svg(out / f"profile_{metric}.svg", profile, title=f"performance profile: {metric}")
    return target
