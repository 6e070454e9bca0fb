"""Registered identity and bound checks for the special functions and test functions.

Each check returns a :class:`CheckResult` whose ``margin`` is positive when
the check passes (distance to its limit, in the check's own units).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

import numpy as np

from .. import specfun, testfn
from ..specfun import ProfileEval, ProfileParams

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.limit - self.value


def _result(name, value, limit, detail=""):
    return CheckResult(name, float(value), float(limit), bool(value <= limit), detail)


def faulty_rho(params: ProfileParams, t: float) -> ProfileEval:
    """rho multiplied by ``1 + 0.01 sin t``: a 1% perturbation for negative controls."""
    ev = specfun.rho(params, t)
    g = 1.0 + 0.01 * math.sin(t)
    dg = 0.01 * math.cos(t) / g
    return replace(ev, log_value=ev.log_value + math.log(g), log_derivative=ev.log_derivative + dg)


def bessel_recurrence(n: int = 50, seed: int = SEED) -> CheckResult:
    """Central difference of K_nu in z against -K_{nu+1} + (nu/z) K_nu."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n):
        nu = rng.uniform(0.0, 3.0)
        z = rng.uniform(0.1, 20.0)
        h = 1e-5 * z
        fd = (specfun.bessel_k(nu, z + h) - specfun.bessel_k(nu, z - h)) / (2.0 * h)
        exact = -specfun.bessel_k(nu + 1.0, z) + nu / z * specfun.bessel_k(nu, z)
        worst = max(worst, abs(fd - exact) / abs(exact))
    return _result("bessel_recurrence", worst, 1e-6, f"{n} random (nu, z) in [0,3]x[0.1,20]")


def bessel_half_order(zs=(0.1, 1.0, 5.0, 20.0)) -> CheckResult:
    """K_{1/2}(z) against sqrt(pi/(2z)) exp(-z)."""
    worst = max(abs(specfun.bessel_k(0.5, z) / (math.sqrt(math.pi / (2 * z)) * math.exp(-z)) - 1.0) for z in zs)
    return _result("bessel_half_order", worst, 1e-10)


def random_profiles(n: int, seed: int = SEED) -> list[ProfileParams]:
    rng = random.Random(seed + 1)
    return [
        ProfileParams(rng.uniform(0.0, 5.0), rng.uniform(0.0, 9.0), rng.uniform(0.0, 2.0), rng.uniform(0.5, 3.0))
        for _ in range(n)
    ]


def rho_ode(n: int = 20, times=(1.0, 2.0, 5.0, 10.0), profile=None, seed: int = SEED) -> CheckResult:
    worst = 0.0
    for params in random_profiles(n, seed):
        for t in times:
            worst = max(worst, specfun.rho_ode_residual(params, t, profile=profile))
    name = "rho_ode_residual" + ("[fault]" if profile is not None else "")
    return _result(name, worst, 1e-5, f"{n} tuples x t in {list(times)}")


def rho_limit(ms=(0.0, 0.5, 1.0), etas=(1.0, 2.0), mus=(0.0, 1.0), t: float = 100.0) -> CheckResult:
    """rho'/(t**m rho) against -eta**(m+1) at large t."""
    worst = 0.0
    for m in ms:
        for eta in etas:
            for mu in mus:
                ev = specfun.rho(ProfileParams(mu, 1.0, m, eta), t)
                worst = max(worst, abs(ev.log_derivative / t**m / (-(eta ** (m + 1.0))) - 1.0))
    return _result("rho_limit", worst, 0.01, f"t={t}")


def rho_bound_ratios(params: ProfileParams, ts) -> np.ndarray:
    """rho(t) / (t**((mu-m)/2) exp(-phi_m(t))), computed in log form (eta must be 1)."""
    out = []
    for t in ts:
        ev = specfun.rho(params, t)
        out.append(math.exp(ev.log_value - 0.5 * (params.mu - params.m) * math.log(t) + specfun.phi_m(params.m, t)))
    return np.array(out)


def rho_two_sided_bound(panel=None) -> CheckResult:
    """Ratio to the two-sided envelope stays in a compact subset of (0, inf) on [1, 50].

    The value reported is the largest max/min spread of the ratio; the check
    also requires monotone behaviour on [10, 50].
    """
    panel = panel or [ProfileParams(mu, d, m, 1.0) for mu in (0.0, 2.0) for d in (0.0, 1.0, 4.0) for m in (0.0, 1.0)]
    ts = np.linspace(1.0, 50.0, 99)
    tail = ts >= 10.0
    worst = 0.0
    ok = True
    for params in panel:
        r = rho_bound_ratios(params, ts)
        if not (np.all(np.isfinite(r)) and np.all(r > 0)):
            ok = False
            continue
        worst = max(worst, float(r.max() / r.min()))
        # rounding-level jitter counts as flat (the ratio is exactly constant when the order is 1/2)
        d = np.diff(r[tail]) / r[tail][:-1]
        ok &= bool(np.all(d >= -1e-12) or np.all(d <= 1e-12))
    res = _result("rho_two_sided_bound", worst, 10.0, "max/min ratio spread over t in [1,50]")
    return replace(res, passed=res.passed and ok)


def rho_positive(n: int = 20) -> CheckResult:
    ts = (1.0, 1.5, 3.0, 10.0, 40.0)
    worst = -math.inf
    for params in random_profiles(n, SEED + 7):
        for t in ts:
            ev = specfun.rho(params, t)
            ok = math.isfinite(ev.log_value)
            worst = max(worst, 0.0 if ok else 1.0)
    return _result("rho_positive", worst, 0.0, "log form finite for all samples")


def gamma_limit() -> CheckResult:
    p = ProfileParams(0.0, 1.0, 0.0, 1.0)
    worst = max(abs(specfun.gamma_eta(p, t) / 2.0 - 1.0) for t in (50.0, 80.0, 120.0))
    return _result("gamma_limit", worst, 0.01, "mu=0, delta=1, m=0, eta=1; limit 2")


def eigen_identity() -> CheckResult:
    cases = [
        (testfn.SpatialTestFn(1, 0.0, 1.0), (0.5, 1.0, 2.0)),
        (testfn.SpatialTestFn(3, 1.0, 1.0), (0.5, 1.0, 2.0)),
        (testfn.SpatialTestFn(2, 0.0, 2.0), (1.0,)),
        (testfn.SpatialTestFn(2, 1.0, 1.0), (0.5, 1.0, 2.0, 4.0)),
    ]
    worst = max(testfn.verify_eigen_identity(fn, rs) for fn, rs in cases)
    return _result("eigen_identity", worst, 1e-6, "N in {1,2,3}")


def conjugate_equation() -> CheckResult:
    cases = [
        (1, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0),
        (2, 0.0, 1.0, 4.0, 1.5, 0.5, 3.0),
        (3, 1.0, 0.0, 1.0, 1.0, 2.0, 1.5),
        (3, 0.5, 3.0, 0.0, 1.0, 0.7, 4.0),
    ]
    worst = 0.0
    for N, m, mu, delta, eta, r, t in cases:
        fn = testfn.SpatialTestFn(N, m, eta)
        worst = max(worst, testfn.verify_conjugate_equation(fn, ProfileParams(mu, delta, m, eta), r, t))
    return _result("conjugate_equation", worst, 1e-5)


GROWTH_PANELS = (
    # N, m, r_exp, mu
    (1, 1.0, 1.5, 2.0),
    (3, 0.0, 2.0, 0.0),
    (2, 1.0, 1.5, 2.0),
    (3, 0.0, 1.5, 2.0),
    (2, 0.0, 1.5, 0.0),
)


def growth_fits(panels=GROWTH_PANELS) -> CheckResult:
    worst = 0.0
    for N, m, r_exp, mu in panels:
        fn = testfn.SpatialTestFn(N, m, 1.0)
        fit = testfn.growth_exponent_fit(fn, ProfileParams(mu, 1.0, m, 1.0), r_exp)
        e_phi, e_psi = testfn.growth_exponents(N, m, r_exp, mu)
        worst = max(worst, abs(fit.phi - e_phi), abs(fit.psi - e_psi))
    return _result("growth_exponents", worst, 0.1, f"{len(panels)} panels")


REGISTRY = (
    bessel_half_order,
    bessel_recurrence,
    rho_ode,
    rho_limit,
    rho_two_sided_bound,
    rho_positive,
    gamma_limit,
    eigen_identity,
    conjugate_equation,
    growth_fits,
)


def run_all(self_test: bool = False) -> list[CheckResult]:
    """Run every registered check; ``self_test`` adds the ODE check on a perturbed profile."""
    results = [check() for check in REGISTRY]
    if self_test:
        results.append(rho_ode(profile=faulty_rho))
    return results
