"""Integration of the two-component power-law ODE model and blow-up detection.

The model is

    Y1' = Y2**p t**a1,   Y2' = Y1**q t**a2,   Y1(1) = Y2(1) = eps,

with exponents ``a1``, ``a2`` built from the system parameters (see
:func:`exponents`).  Both right-hand sides are nonnegative, so positive
solutions are nondecreasing; a blow-up is declared when the leading
component crosses the largest threshold, and the blow-up time is refined
by fitting ``Y ~ A (T_b - t)**(-alpha)`` to the last accepted steps.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy import optimize

from . import dopri
from .errors import DomainError, IntegratorFault
from .regions import SystemParams

DEFAULT_THRESHOLDS = (1e6, 1e8, 1e10)
DEFAULT_TOLERANCES = (1e-8, 1e-12)
DEFAULT_HORIZON = 1e6
LOG_SWITCH = 1e3
FIT_POINTS = 20

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class OdeExponents:
    a1: float
    a2: float


def exponents(params: SystemParams) -> OdeExponents:
    """Time exponents of the two right-hand sides."""
    k = (params.N - 1) * (params.m + 1.0) - params.m
    p, q, mu1, mu2 = params.p, params.q, params.mu1, params.mu2
    a1 = -(p - 1.0) * k / 2.0 + mu1 / 2.0 - mu2 * p / 2.0
    a2 = -(q - 1.0) * k / 2.0 + mu2 / 2.0 - mu1 * q / 2.0
    return OdeExponents(a1, a2)


class Termination(str, enum.Enum):
    THRESHOLD = "ThresholdCrossed"
    UNDERFLOW = "StepUnderflow"
    HORIZON = "HorizonReached"


@dataclass
class _Segment:
    t0: float
    h: float
    y0: tuple  # state in the representation used for the step
    coeffs: tuple
    log_mode: bool

    def values(self, t: float) -> tuple[float, float]:
        y = dopri.dense_eval(self.y0, self.coeffs, (t - self.t0) / self.h)
        return (math.exp(y[0]), math.exp(y[1])) if self.log_mode else y

    def log_component(self, c: int, t: float) -> float:
        y = dopri.dense_eval(self.y0, self.coeffs, (t - self.t0) / self.h)[c]
        return y if self.log_mode else math.log(y) if y > 0 else -math.inf


@dataclass
class Trajectory:
    """Accepted steps ``(t, y1, y2)``; with ``dense`` the step polynomials are kept too."""

    t: list[float]
    y1: list[float]
    y2: list[float]
    dense: bool = False
    segments: list = field(default_factory=list, repr=False)

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.t, self.y1, self.y2))

    def __len__(self) -> int:
        return len(self.t)

    def component(self, c: int) -> list[float]:
        return self.y1 if c == 0 else self.y2

    def evaluate(self, t: float) -> tuple[float, float]:
        """State at ``t`` from dense output (requires ``dense``)."""
        if not self.dense:
            raise ValueError("trajectory was recorded without dense output")
        if not self.t[0] <= t <= self.t[-1]:
            raise DomainError(f"t={t} outside recorded range [{self.t[0]}, {self.t[-1]}]")
        i = max(0, min(bisect.bisect_right(self.t, t) - 1, len(self.segments) - 1))
        return self.segments[i].values(t)

    def crossing_time(self, c: int, level: float) -> float | None:
        """First time component ``c`` reaches ``level``; None if it never does."""
        ys = self.component(c)
        if ys[0] >= level:
            return self.t[0]
        j = bisect.bisect_left(ys, level)  # components are nondecreasing
        if j >= len(ys):
            return None
        t0, t1 = self.t[j - 1], self.t[j]
        target = math.log(level)
        if self.dense:
            seg = self.segments[j - 1]
            g = lambda tt: seg.log_component(c, tt) - target  # noqa: E731
            if g(t1) <= 0.0:  # rounding at the right end of the step
                return t1
            return optimize.brentq(g, t0, t1, xtol=1e-15 * max(1.0, t1), rtol=1e-15)
        l0, l1 = math.log(ys[j - 1]), math.log(ys[j])
        return t0 + (t1 - t0) * (target - l0) / (l1 - l0)

    def check_invariants(self) -> None:
        """Raise IntegratorFault unless t increases and both components are positive and nondecreasing."""
        for i in range(len(self.t)):
            if not (self.y1[i] > 0 and self.y2[i] > 0):
                raise IntegratorFault(f"non-positive state at t={self.t[i]}")
            if i and not self.t[i] > self.t[i - 1]:
                raise IntegratorFault(f"time not increasing at sample {i}")
            if i and (self.y1[i] < self.y1[i - 1] or self.y2[i] < self.y2[i - 1]):
                raise IntegratorFault(f"state decreased at t={self.t[i]}")

    def to_csv(self, path=None) -> str:
        """Write ``t,y1,y2`` rows with 17 significant digits; returns the text."""
        buf = io.StringIO()
        buf.write("t,y1,y2\n")
        for t, a, b in zip(self.t, self.y1, self.y2):
            buf.write(f"{t:.17g},{a:.17g},{b:.17g}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "Trajectory":
        text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["t", "y1", "y2"]:
            raise ValueError(f"unexpected header {rows[0]}")
        t, y1, y2 = ([float(r[i]) for r in rows[1:]] for i in range(3))
        return cls(t, y1, y2)


@dataclass
class BlowupResult:
    blew_up: bool
    t_b_estimate: float | None
    threshold_spread: tuple[float | None, ...]
    termination: Termination
    trajectory: Trajectory
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    leading: int = 0
    blowup_rate: float | None = None
    steps: int = 0
    rejected: int = 0

    @property
    def final_time(self) -> float:
        """Reported time: the fitted blow-up time, else the last integrated time."""
        return self.t_b_estimate if self.t_b_estimate is not None else self.trajectory.t[-1]


def _make_rhs(params: SystemParams, ex: OdeExponents):
    p, q, a1, a2 = params.p, params.q, ex.a1, ex.a2

    def linear(t, y):
        y1, y2 = y
        if y1 <= 0.0 or y2 <= 0.0:
            raise dopri.StageFailure
        return (y2**p * t**a1, y1**q * t**a2)

    def logarithmic(t, z):
        z1, z2 = z
        try:
            return (math.exp(p * z2 - z1) * t**a1, math.exp(q * z1 - z2) * t**a2)
        except OverflowError:
            raise dopri.StageFailure from None

    return linear, logarithmic


def fit_blowup_time(ts, ys) -> tuple[float, float]:
    """Least-squares fit of ``log y = c - alpha log(T - t)`` with ``T > max(ts)``.

    For fixed ``T`` the model is linear in ``(c, alpha)``; the remaining
    one-dimensional problem in ``log(T - t_last)`` is minimized on a bracket.
    Returns ``(T, alpha)``.
    """
    ts = [float(t) for t in ts]
    ly = [math.log(y) for y in ys]
    t_last = ts[-1]
    n = len(ts)

    def solve(s):
        gap = math.exp(s)
        xs = [-math.log(t_last + gap - t) for t in ts]
        mx = sum(xs) / n
        my = sum(ly) / n
        sxx = sum((x - mx) ** 2 for x in xs)
        alpha = sum((x - mx) * (y - my) for x, y in zip(xs, ly)) / sxx
        c = my - alpha * mx
        res = math.fsum((c + alpha * x - y) ** 2 for x, y in zip(xs, ly))
        return res, alpha

    span = max(t_last - ts[0], 1e-300)
    lo = math.log(max(span * 1e-9, 1e-15 * t_last))
    hi = math.log(span * 1e3)
    # coarse scan, then bounded refinement around the best cell
    grid = [lo + (hi - lo) * i / 200 for i in range(201)]
    vals = [solve(s)[0] for s in grid]
    i = min(range(len(grid)), key=vals.__getitem__)
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    best = optimize.minimize_scalar(lambda s: solve(s)[0], bounds=(a, b), method="bounded",
                                    options={"xatol": 1e-12})
    s = best.x if best.fun <= vals[i] else grid[i]
    return t_last + math.exp(s), solve(s)[1]


def integrate(
    params: SystemParams,
    horizon: float = DEFAULT_HORIZON,
    thresholds=DEFAULT_THRESHOLDS,
    tolerances=DEFAULT_TOLERANCES,
    *,
    h0: float = 1e-4,
    h_min: float = 1e-12,
    log_switch: float = LOG_SWITCH,
    fit_points: int = FIT_POINTS,
    dense: bool = True,
    max_steps: int = 2_000_000,
) -> BlowupResult:
    """Integrate from ``t = 1`` with adaptive DOPRI5 steps until blow-up or ``horizon``.

    Once either component exceeds ``log_switch`` the state is carried as
    ``log Y`` (per-step error then measured against ``rtol`` in log space).
    Integration stops when a component crosses ``max(thresholds)``, when the
    step size falls below ``h_min`` (reported as StepUnderflow) or at
    ``horizon``.
    """
    params.validate()
    thresholds = tuple(float(x) for x in thresholds)
    if list(thresholds) != sorted(thresholds) or len(set(thresholds)) != len(thresholds):
        raise ValueError("thresholds must be strictly ascending")
    if not horizon > 1.0:
        raise ValueError("horizon must exceed 1")
    rtol, atol = tolerances
    eps = params.eps
    ex = exponents(params)
    f_lin, f_log = _make_rhs(params, ex)
    top = thresholds[-1]

    t = 1.0
    y = (eps, eps)
    log_mode = False
    f = f_lin
    if max(y) > log_switch:
        y, log_mode, f = (math.log(y[0]), math.log(y[1])), True, f_log
    k1 = f(t, y)
    h = min(h0, horizon - t)
    err_prev = 1e-4

    ts, y1s, y2s, segments = [t], [eps], [eps], []
    termination = Termination.HORIZON
    steps = rejected = 0
    while True:
        if steps >= max_steps:
            raise IntegratorFault(f"exceeded {max_steps} steps at t={t}")
        h_floor = max(h_min, 16.0 * 2.2e-16 * abs(t))
        if h < h_floor:
            termination = Termination.UNDERFLOW
            break
        try:
            y_new, err_vec, ks = dopri.step(f, t, y, h, k1)
            if log_mode:
                err = math.sqrt(sum((e / rtol) ** 2 for e in err_vec) / 2.0)
            else:
                if min(y_new) <= 0.0:
                    raise dopri.StageFailure
                err = math.sqrt(
                    sum((e / (atol + rtol * max(abs(a), abs(b)))) ** 2 for e, a, b in zip(err_vec, y, y_new)) / 2.0
                )
        except (dopri.StageFailure, OverflowError):
            rejected += 1
            h *= 0.25
            continue
        if not math.isfinite(err):
            rejected += 1
            h *= 0.25
            continue
        if err > 1.0:
            rejected += 1
            h *= max(_FAC_MIN, _SAFETY * err ** (-0.2))
            continue

        # accepted
        steps += 1
        t_new = t + h
        if dense:
            segments.append(_Segment(t, h, y, dopri.dense_coefficients(ks, h), log_mode))
        vals = (math.exp(y_new[0]), math.exp(y_new[1])) if log_mode else y_new
        if not (vals[0] > 0 and vals[1] > 0):
            raise IntegratorFault(f"non-positive state {vals} at t={t_new}")
        ts.append(t_new)
        y1s.append(vals[0])
        y2s.append(vals[1])
        t, y, k1 = t_new, y_new, ks[6]

        fac = _SAFETY * max(err, 1e-10) ** (-_EXPO) * err_prev**_BETA
        h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        err_prev = max(err, 1e-4)

        if max(vals) >= top:
            termination = Termination.THRESHOLD
            break
        if t >= horizon * (1.0 - 1e-15):
            termination = Termination.HORIZON
            break
        h = min(h, horizon - t)
        if not log_mode and max(vals) > log_switch:
            y = (math.log(vals[0]), math.log(vals[1]))
            log_mode, f = True, f_log
            k1 = f(t, y)

    traj = Trajectory(ts, y1s, y2s, dense=dense, segments=segments if dense else [])
    traj.check_invariants()

    leading = 0 if y1s[-1] >= y2s[-1] else 1
    spread = []
    for thr in thresholds:
        hits = [x for x in (traj.crossing_time(0, thr), traj.crossing_time(1, thr)) if x is not None]
        spread.append(min(hits) if hits else None)

    blew_up = termination is Termination.THRESHOLD
    t_b = rate = None
    if blew_up:
        k = min(fit_points, len(ts) - 1)
        ys = traj.component(leading)
        t_b, rate = fit_blowup_time(ts[-k:], ys[-k:])
    return BlowupResult(
        blew_up=blew_up,
        t_b_estimate=t_b,
        threshold_spread=tuple(spread),
        termination=termination,
        trajectory=traj,
        thresholds=thresholds,
        leading=leading,
        blowup_rate=rate,
        steps=steps,
        rejected=rejected,
    )


def simultaneity_gap(result: BlowupResult, level: float) -> float:
    """``|t(Y1 = level) - t(Y2 = level)| / T_b``; ``inf`` if one component never reaches ``level``."""
    if not result.blew_up or result.t_b_estimate is None:
        raise ValueError("simultaneity gap needs a blow-up result")
    traj = result.trajectory
    t1 = traj.crossing_time(0, level)
    t2 = traj.crossing_time(1, level)
    if t1 is None or t2 is None:
        return math.inf
    return abs(t1 - t2) / result.t_b_estimate
