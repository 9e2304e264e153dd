"""Time scans and optimizations of the criteria for the evolved beam-splitter state.

The squeezing angle is always resolved analytically at each time, so only
the evolution time is scanned or optimized.  Scans use the exact Fock-sum
moments by default; ``method="closed"`` switches to the analytic forms.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import BoundTable, SolverSettings, largest_two_s_above, solve_c_s
from .closed_form import closed_form_spin_moments
from .criteria import CriteriaReport, evaluate_criteria
from .depth import infer_depth_steering
from .fock import ModelParams, beam_splitter_state, evolve
from .moments import moments_from_state

__all__ = [
    "CSV_COLUMNS",
    "OBJECTIVES",
    "SearchSettings",
    "SweepResult",
    "OptimumRecord",
    "TableOneRow",
    "criteria_at",
    "default_horizon",
    "scan_time",
    "optimize_over_t",
    "table_one",
]

CSV_COLUMNS = (
    "t", "theta", "var_sx", "var_sy", "var_sz", "var_stheta", "mean_sx",
    "e_hz", "e_hz_t", "e_hz_theta", "xi2", "xi2_bar", "r", "r_parallel",
)
OBJECTIVES = ("xi2_bar", "xi2", "e_hz_theta", "e_hz", "e_hz_t")


def _check_objective(objective):
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


def criteria_at(params: ModelParams, method="fock") -> CriteriaReport:
    """Criteria report of the evolved beam-splitter state at ``params``."""
    if method == "fock":
        m = moments_from_state(evolve(beam_splitter_state(params.n_total), params))
    elif method == "closed":
        m = closed_form_spin_moments(params)
    else:
        raise ValueError(f"method must be 'fock' or 'closed', got {method!r}")
    return evaluate_criteria(m)


def _row(t, rep: CriteriaReport):
    return {
        "t": t, "theta": rep.theta, "var_sx": rep.var_sx, "var_sy": rep.var_sy,
        "var_sz": rep.var_sz, "var_stheta": rep.var_stheta, "mean_sx": rep.mean_sx,
        "e_hz": rep.e_hz, "e_hz_t": rep.e_hz_t, "e_hz_theta": rep.e_hz_theta,
        "xi2": rep.xi2, "xi2_bar": rep.xi2_bar, "r": rep.bloch_r,
        "r_parallel": rep.r_parallel,
    }


def _row_job(args):
    params, t, method = args
    return _row(t, criteria_at(params.at(t), method))


def _fmt(x):
    return repr(float(x))


@dataclass
class SweepResult:
    param_grid: dict
    rows: list
    objective: str
    optimum: dict | None = None

    def column(self, name):
        return np.array([row[name] for row in self.rows])

    def to_csv(self, header_comment=None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")
        return buf.getvalue()


def scan_time(params: ModelParams, t_grid, objective="e_hz_theta", method="fock",
              workers: int = 1) -> SweepResult:
    """Evaluate every criterion on ``t_grid`` (``params.time`` is ignored).

    Rows come back in grid order whatever the worker count, so the output
    is reproducible byte for byte.
    """
    _check_objective(objective)
    if params.n_total < 2:
        raise ValueError("scans need N >= 2")
    t_grid = [float(t) for t in np.atleast_1d(np.asarray(t_grid, dtype=float))]
    if not t_grid:
        raise ValueError("time grid is empty")
    jobs = [(params, t, method) for t in t_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_row_job(j) for j in jobs]
    best = min(range(len(rows)), key=lambda i: rows[i][objective])
    grid_desc = {"n_total": params.n_total, "chi": params.chi, "k_const": params.k_const,
                 "t_min": min(t_grid), "t_max": max(t_grid), "points": len(t_grid),
                 "method": method}
    return SweepResult(grid_desc, rows, objective, dict(rows[best]))


def default_horizon(params: ModelParams) -> float:
    """Quarter of the twisting period, ``pi / (2 |1 - K| chi)``; pi/4 for K = -1, chi = 1."""
    rate = abs(1.0 - params.k_const) * abs(params.chi)
    if rate == 0:
        raise ValueError("K = 1 or chi = 0 gives no twisting; nothing to optimize")
    return math.pi / (2.0 * rate)


@dataclass(frozen=True)
class SearchSettings:
    """Coarse grid plus bounded Brent refinement.

    ``spacing="log"`` places the grid geometrically between
    ``t_max * t_min_fraction`` and ``t_max``, which resolves the optimum
    even when it sits near ``N^(-2/3)`` for large N.
    """

    grid_points: int = 2000
    t_max: float | None = None
    t_min_fraction: float = 1e-6
    spacing: str = "log"
    xtol: float = 1e-10
    method: str = "fock"


@dataclass(frozen=True)
class OptimumRecord:
    n_total: int
    objective: str
    t: float
    theta: float
    value: float
    r: float
    r_parallel: float
    bracketed: bool
    report: CriteriaReport = field(repr=False)

    @property
    def ratio(self):
        return self.value / self.r

    def as_dict(self):
        return {"n_total": self.n_total, "objective": self.objective, "t": self.t,
                "theta": self.theta, "value": self.value, "r": self.r,
                "r_parallel": self.r_parallel, "ratio": self.ratio,
                "bracketed": self.bracketed}


def _grid(settings: SearchSettings, t_max):
    n = int(settings.grid_points)
    if n < 3:
        raise ValueError("need at least 3 grid points")
    if settings.spacing == "log":
        return np.geomspace(t_max * settings.t_min_fraction, t_max, n)
    if settings.spacing == "linear":
        return np.linspace(t_max / n, t_max, n)
    raise ValueError(f"spacing must be 'log' or 'linear', got {settings.spacing!r}")


def optimize_over_t(params: ModelParams, objective="e_hz_theta",
                    settings: SearchSettings | None = None) -> OptimumRecord:
    """Minimize ``objective`` over the evolution time (angle optimal at each time).

    The best coarse-grid point and its two neighbours form the bracket for
    a bounded Brent search.  A minimum on the edge of the grid is returned
    as is with ``bracketed=False``.
    """
    _check_objective(objective)
    settings = settings or SearchSettings()
    t_max = settings.t_max if settings.t_max is not None else default_horizon(params)
    grid = _grid(settings, t_max)

    def f(t):
        return getattr(criteria_at(params.at(t), settings.method), objective)

    values = np.array([f(t) for t in grid])
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        t_best = float(grid[i])
        bracketed = False
    else:
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                              options={"xatol": settings.xtol})
        t_best = float(res.x) if res.fun <= values[i] else float(grid[i])
        bracketed = True
    rep = criteria_at(params.at(t_best), settings.method)
    return OptimumRecord(params.n_total, objective, t_best, rep.theta, getattr(rep, objective),
                         rep.bloch_r, rep.r_parallel, bracketed, rep)


@dataclass(frozen=True)
class TableOneRow:
    n_total: int
    t_opt: float | None = None
    theta_opt: float | None = None
    e_hz_theta: float | None = None
    r: float | None = None
    ratio: float | None = None
    two_s: int | None = None
    c_tilde: float | None = None
    error: str | None = None

    COLUMNS = ("n_total", "t_opt", "theta_opt", "e_hz_theta", "r", "ratio", "two_s", "c_tilde", "error")

    def as_dict(self):
        return {c: getattr(self, c) for c in self.COLUMNS}


def table_one(n_list, k_const=-1.0, chi=1.0, settings: SearchSettings | None = None,
              table: BoundTable | None = None, solver: SolverSettings | None = None):
    """Optimal steering ratio and certified depth for each N in ``n_list``.

    Each row minimizes ``e_hz_theta`` over time, divides by the Bloch
    length at that optimum and converts the ratio into a steering depth.
    With ``table`` the depth comes from :func:`infer_depth_steering`;
    without it the largest ``2S`` with ``c_tilde > ratio`` is found by
    bisection over exact solves, which is what a table holding every
    integer 2S would give.  A failing row records its error and the other
    rows still run.
    """
    rows = []
    for n in n_list:
        try:
            opt = optimize_over_t(ModelParams(int(n), chi, k_const, 0.0), "e_hz_theta", settings)
            ratio = opt.ratio
            if table is not None:
                res = infer_depth_steering(opt.value, opt.r, table)
                two_s = None if res is None else res.n_lower_bound
                c_tilde = None if res is None else res.margin + ratio
            else:
                two_s = largest_two_s_above(ratio, settings=solver) if opt.value < 0.5 else None
                c_tilde = solve_c_s(two_s / 2, solver) / (two_s / 2) if two_s else None
            rows.append(TableOneRow(int(n), opt.t, opt.theta, opt.value, opt.r, ratio,
                                    two_s, c_tilde))
        except Exception as exc:  # noqa: BLE001 - row-level isolation is the contract
            rows.append(TableOneRow(int(n), error=f"{type(exc).__name__}: {exc}"))
    return rows
