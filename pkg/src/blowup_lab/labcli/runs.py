"""Sweep and region-grid experiments, parallel over independent tasks."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .. import blowup_ode, regions
from ..errors import BlowupLabError, FitError
from ..fitting import LinearFit, linear_fit
from ..regions import SystemParams


class AllRunsFailed(BlowupLabError, RuntimeError):
    pass


def thread_cap() -> int:
    raw = os.environ.get("BLOWUP_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _map(fn, items, workers: int | None = None):
    workers = min(workers or thread_cap(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SweepRow:
    eps: float
    t_b: float
    termination: str
    blew_up: bool


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    fit_subcritical: LinearFit | None
    fit_critical: LinearFit | None
    theoretical_omega: float
    branch: str


def _sweep_task(args) -> SweepRow:
    params, horizon, thresholds, tolerances = args
    res = blowup_ode.integrate(params, horizon, thresholds, tolerances, dense=False)
    return SweepRow(params.eps, res.final_time, res.termination.value, res.blew_up)


def run_sweep(params: SystemParams, eps_list, horizon, thresholds, tolerances, workers=None) -> SweepReport:
    """Integrate once per eps and fit log T_b against log(1/eps) and against eps**-(pq-1)."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise FitError("a sweep needs at least two eps values")
    if len(set(eps_list)) != len(eps_list):
        raise FitError("degenerate abscissa: repeated eps values")
    cls = regions.omega(params)
    tasks = [(replace(params, eps=e), horizon, tuple(thresholds), tuple(tolerances)) for e in sorted(eps_list, reverse=True)]
    rows = tuple(_map(_sweep_task, tasks, workers))
    good = [r for r in rows if r.blew_up]
    if not good:
        raise AllRunsFailed("no eps produced a blow-up within the horizon")
    fit_sub = fit_crit = None
    if len(good) >= 2:
        ly = [math.log(r.t_b) for r in good]
        fit_sub = linear_fit([math.log(1.0 / r.eps) for r in good], ly)
        pq1 = params.p * params.q - 1.0
        fit_crit = linear_fit([r.eps ** (-pq1) for r in good], ly)
    return SweepReport(rows, fit_sub, fit_crit, cls.omega, cls.branch.value)


def grid_axis(lo: float, hi: float, n: int) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _grid_task(args):
    params, p, q = args
    cls = regions.omega(replace(params, p=p, q=q))
    return (p, q, cls.lambda1, cls.lambda2, cls.omega, cls.branch.value)


def region_grid(params: SystemParams, grid, workers=None) -> list[tuple]:
    """One row ``(p, q, lambda1, lambda2, omega, branch)`` per grid cell, sorted by (p, q)."""
    grid.validate()
    ps = grid_axis(grid.p_min, grid.p_max, grid.resolution)
    qs = grid_axis(grid.q_min, grid.q_max, grid.resolution)
    params.validate()
    tasks = [(params, p, q) for p in ps for q in qs]
    # cells are microsecond-cheap; a process pool only pays off for big rasters
    rows = _map(_grid_task, tasks, workers if len(tasks) > 20000 else 1)
    return sorted(rows, key=lambda r: (r[0], r[1]))
