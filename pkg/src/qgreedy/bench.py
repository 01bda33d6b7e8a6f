"""Ensemble benchmark harness.

A plan names sizes, solvers, depths, and an advice mode; run_plan generates
one shared instance set per size from the master seed and runs every
configured solver on every instance, so depth-to-depth and solver-to-solver
comparisons are paired.  Per-instance results are flushed to a sidecar file
as they finish, and reruns skip rows already present, so an interrupted run
resumes where it stopped.

Reference constants reported alongside the aggregates: the asymptotic mean
ratio of the classical min-degree greedy on large random 3-regular graphs,
6 ln(3/2) - 2, and the best known prioritized-search ratio 0.445330.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .angles import load_default_angles, read_angle_file
from .engines import ExpectationCache
from .graph import generate_regular
from .noise import NoiseParams
from .solver import SolverConfig, solve_classical_greedy, solve_quantum_greedy

GREEDY_ASYMPTOTE = 6.0 * math.log(1.5) - 2.0  # ~0.43283
PRIORITIZED_SEARCH_RATIO = 0.445330

CSV_COLUMNS = "size,solver,depth,instances,mean_r,sem,3sem,lambda,advice,seed"


@dataclass(frozen=True)
class ExperimentPlan:
    sizes: tuple[int, ...]
    instances: int
    solvers: tuple[str, ...] = ("greedy",)
    depths: tuple[int, ...] = ()
    lam: float = 1.0
    advice: str = "ideal"
    shots: int = 0
    noise: NoiseParams | None = None
    seed: int = 0
    degree: int = 3
    out: str = "bench.csv"
    angles_dir: str | None = None
    workers: int = 1
    stamp: bool = True

    def __post_init__(self):
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be a nonempty list of sizes >= 1")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        for s in self.solvers:
            if s not in ("greedy", "qgreedy"):
                raise ValueError(f"unknown solver {s!r}")
        if "qgreedy" in self.solvers and not self.depths:
            raise ValueError("qgreedy requested but no depths given")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def parse_plan(text: str) -> ExperimentPlan:
    """Line-oriented `key = value` plan text; '#' starts a comment."""
    raw: dict[str, str] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"plan line is not key = value: {line!r}")
        key, _, val = line.partition("=")
        raw[key.strip()] = val.strip()

    def ints(key, default):
        if key not in raw:
            return default
        return tuple(int(t) for t in raw[key].replace(",", " ").split())

    noise = None
    if any(k in raw for k in ("eta", "alpha", "sigma", "noise_seed")):
        noise = NoiseParams(
            eta=float(raw.get("eta", 0.0)),
            alpha=float(raw.get("alpha", 0.0)),
            sigma=float(raw.get("sigma", 0.0)),
            seed=int(raw.get("noise_seed", 0)),
        )
    return ExperimentPlan(
        sizes=ints("sizes", ()),
        instances=int(raw.get("instances", 1)),
        solvers=tuple(raw["solvers"].replace(",", " ").split())
        if "solvers" in raw
        else ("greedy",),
        depths=ints("depths", ()),
        lam=float(raw.get("lambda", 1.0)),
        advice=raw.get("advice", "ideal"),
        shots=int(raw.get("shots", 0)),
        noise=noise,
        seed=int(raw.get("seed", 0)),
        degree=int(raw.get("degree", 3)),
        out=raw.get("out", "bench.csv"),
        angles_dir=raw.get("angles_dir"),
        workers=int(raw.get("workers", 1)),
        stamp=raw.get("stamp", "true").lower() not in ("false", "0", "no"),
    )


def load_plan(path) -> ExperimentPlan:
    with open(path) as fh:
        return parse_plan(fh.read())


@dataclass(frozen=True)
class ReportRow:
    size: int
    solver: str
    depth: int  # 0 for the classical baseline
    instances: int
    mean_r: float
    sem: float
    sem3: float


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[ReportRow, ...]
    greedy_asymptote: float = GREEDY_ASYMPTOTE
    prioritized_search_ratio: float = PRIORITIZED_SEARCH_RATIO

    def row(self, size: int, solver: str, depth: int = 0) -> ReportRow:
        for r in self.rows:
            if (r.size, r.solver, r.depth) == (size, solver, depth):
                return r
        raise KeyError((size, solver, depth))


def _derived_seed(*entropy) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def _load_schedule(plan: ExperimentPlan, depth: int):
    if plan.angles_dir:
        name = f"p{depth}_d{plan.degree}_lam{plan.lam:g}.txt"
        return read_angle_file(os.path.join(plan.angles_dir, name)).schedule
    return load_default_angles(depth, plan.degree, plan.lam).schedule


# per-process expectation caches, keyed by schedule fingerprint
_WORKER_CACHES: dict = {}


def _cache_for(schedule) -> ExpectationCache:
    cache = _WORKER_CACHES.get(schedule.fingerprint)
    if cache is None:
        cache = ExpectationCache(schedule)
        _WORKER_CACHES[schedule.fingerprint] = cache
    return cache


def _run_instance(plan: ExperimentPlan, size: int, index: int) -> list[tuple]:
    """All (solver, depth) ratios for one shared instance."""
    g = generate_regular(size, plan.degree, _derived_seed(plan.seed, size, index))
    solver_seed = _derived_seed(plan.seed, size, index, 1)
    out = []
    for solver in plan.solvers:
        if solver == "greedy":
            trace = solve_classical_greedy(g, seed=solver_seed)
            out.append((size, "greedy", 0, index, trace.ratio))
        else:
            for depth in plan.depths:
                schedule = _load_schedule(plan, depth)
                noise = plan.noise
                if noise is not None:
                    noise = dataclasses.replace(
                        noise, seed=_derived_seed(noise.seed, size, index)
                    )
                cfg = SolverConfig(
                    schedule=schedule,
                    delta=None if plan.advice != "ideal" else 0.0,
                    advice=plan.advice,
                    shots=plan.shots,
                    noise=noise,
                    seed=solver_seed,
                )
                trace = solve_quantum_greedy(g, cfg, _cache_for(schedule))
                out.append((size, "qgreedy", depth, index, trace.ratio))
    return out


def _partial_path(plan: ExperimentPlan) -> str:
    return plan.out + ".partial"


def _load_partial(path) -> dict[tuple, float]:
    done = {}
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if len(parts) != 5:
                    continue
                size, solver, depth, index, r = parts
                done[(int(size), solver, int(depth), int(index))] = float(r)
    return done


def run_plan(plan: ExperimentPlan) -> BenchmarkReport:
    done = _load_partial(_partial_path(plan))
    todo = [
        (size, index)
        for size in plan.sizes
        for index in range(plan.instances)
        if any(
            (size, solver, depth, index) not in done
            for solver in plan.solvers
            for depth in (plan.depths if solver == "qgreedy" else (0,))
        )
    ]
    with open(_partial_path(plan), "a") as partial:
        def flush(rows):
            for size, solver, depth, index, r in rows:
                key = (size, solver, depth, index)
                if key not in done:
                    done[key] = r
                    partial.write(f"{size} {solver} {depth} {index} {r:.17g}\n")
            partial.flush()

        if plan.workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=plan.workers) as pool:
                futures = [
                    pool.submit(_run_instance, plan, size, index)
                    for size, index in todo
                ]
                for fut in futures:
                    flush(fut.result())
        else:
            for size, index in todo:
                flush(_run_instance(plan, size, index))

    rows = []
    for size in sorted(set(plan.sizes)):
        cells = sorted(
            {(solver, depth) for (s, solver, depth, _i) in done if s == size}
        )
        for solver, depth in cells:
            rs = [
                r
                for (s, sv, dp, _i), r in done.items()
                if (s, sv, dp) == (size, solver, depth)
            ]
            mean = float(np.mean(rs))
            sem = float(np.std(rs, ddof=1) / math.sqrt(len(rs))) if len(rs) > 1 else 0.0
            rows.append(
                ReportRow(size, solver, depth, len(rs), mean, sem, 3.0 * sem)
            )
    report = BenchmarkReport(rows=tuple(rows))
    write_csv(plan, report)
    return report


def write_csv(plan: ExperimentPlan, report: BenchmarkReport) -> None:
    lines = []
    if plan.stamp:
        lines.append(f"# generated {datetime.now(timezone.utc).isoformat()}")
    lines.append(CSV_COLUMNS)
    for r in report.rows:
        lines.append(
            f"{r.size},{r.solver},{r.depth},{r.instances},"
            f"{r.mean_r:.17g},{r.sem:.17g},{r.sem3:.17g},"
            f"{plan.lam:.17g},{plan.advice},{plan.seed}"
        )
    with open(plan.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- depth-trend fits --------------------------------------------------------


@dataclass(frozen=True)
class CurveFit:
    model: str  # "a/p+b" | "c*p^d"
    params: tuple[float, ...]
    residual_norm: float


def fit_curve(points, model: str) -> CurveFit:
    """Least-squares fit of value-vs-depth points to one of two small models.

    a/p+b is linear in 1/p and solved directly.  c*p^d is solved by a scan
    over the exponent with the closed-form optimal c at each candidate,
    then a local bisection refinement around the best exponent.
    """
    pts = [(float(p), float(v)) for p, v in points]
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    ps = np.array([p for p, _ in pts])
    ys = np.array([v for _, v in pts])
    if model == "a/p+b":
        if np.any(ps == 0):
            raise ValueError("a/p+b undefined at p=0")
        design = np.column_stack([1.0 / ps, np.ones_like(ps)])
        params, *_ = np.linalg.lstsq(design, ys, rcond=None)
        resid = design @ params - ys
        return CurveFit("a/p+b", (float(params[0]), float(params[1])),
                        float(np.linalg.norm(resid)))
    if model == "c*p^d":
        if np.any(ps <= 0):
            raise ValueError("c*p^d needs positive p")

        def best_c(d):
            basis = ps**d
            denom = float(basis @ basis)
            c = float(basis @ ys) / denom
            return c, float(np.linalg.norm(c * basis - ys))

        grid = np.arange(-4.0, 4.0 + 1e-9, 1e-3)
        scores = [best_c(d)[1] for d in grid]
        i = int(np.argmin(scores))
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        for _ in range(60):  # bisect the bracket down to ~1e-19 width
            m1 = lo + (hi - lo) / 3
            m2 = hi - (hi - lo) / 3
            if best_c(m1)[1] <= best_c(m2)[1]:
                hi = m2
            else:
                lo = m1
        d = (lo + hi) / 2
        c, resid = best_c(d)
        return CurveFit("c*p^d", (c, float(d)), resid)
    raise ValueError(f"unknown model {model!r}")
