"""Spatial and space-time test functions and checks of their identities.

The spatial factor is the sphere average of ``exp(a x.w)`` with
``a = eta**(1+m)``; it solves ``Lap phi = a**2 phi``.  In dimensions 1, 2
and 3 it has the closed or semi-closed forms

    N=1: exp(a r) + exp(-a r)
    N=2: 2 pi I_0(a r)
    N=3: 4 pi sinh(a r) / (a r)

Only these dimensions are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from . import specfun
from .errors import FitError, ParameterMismatch, UnsupportedDimension
from .fitting import linear_fit
from .specfun import ProfileParams

SUPPORTED_DIMENSIONS = (1, 2, 3)
SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}

__all__ = [
    "ExponentFit",
    "SpatialTestFn",
    "default_t_grid",
    "i0_series",
    "growth_exponent_fit",
    "growth_exponents",
    "log_i0",
    "log_phi_eta",
    "log_psi_eta",
    "phi_eta",
    "psi_eta",
    "support_radius",
    "verify_conjugate_equation",
    "verify_eigen_identity",
]


@dataclass(frozen=True)
class SpatialTestFn:
    N: int
    m: float
    eta: float

    def __post_init__(self):
        if self.N not in SUPPORTED_DIMENSIONS:
            raise UnsupportedDimension(f"only N in {SUPPORTED_DIMENSIONS} are supported, got N={self.N}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.m >= 0:
            raise ValueError(f"m must be nonnegative, got {self.m}")

    @property
    def rate(self) -> float:
        """``eta**(1+m)``, the exponential rate in ``|x|``."""
        return self.eta ** (1.0 + self.m)


def i0_series(x, dtype=float):
    """``I_0(x)`` from its power series ``sum (x/2)**(2k) / (k!)**2``.

    Every term is positive so the partial sums carry no cancellation; the
    loop stops once the tail is below the working precision.
    """
    x = dtype(abs(x))
    q = x * x / dtype(4)
    term = dtype(1)
    total = dtype(1)
    k = 0
    eps = np.finfo(dtype).eps if dtype is not float else 2.2e-16
    while True:
        k += 1
        term = term * q / dtype(k * k)
        total = total + term
        if k > x and term < eps * total * dtype(0.01):
            return total


def log_i0(x: float) -> float:
    """log I_0(x), summing the series around its largest term to stay in range."""
    x = abs(float(x))
    if x < 600.0:
        return math.log(i0_series(x))
    q = x * x / 4.0
    k0 = int(x / 2.0)
    log_peak = k0 * math.log(q) - 2.0 * math.lgamma(k0 + 1)
    total = 1.0
    term = 1.0
    k = k0
    while True:  # upward from the peak
        k += 1
        term *= q / (k * k)
        total += term
        if term < 1e-18 * total:
            break
    term = 1.0
    k = k0
    while k > 0:  # downward
        term *= (k * k) / q
        k -= 1
        total += term
        if term < 1e-18 * total:
            break
    return log_peak + math.log(total)


def _phi_direct(fn: SpatialTestFn, r, dtype=float):
    ar = dtype(fn.rate) * dtype(abs(r))
    if fn.N == 1:
        return dtype(2) * np.cosh(ar) if dtype is not float else 2.0 * math.cosh(ar)
    if fn.N == 2:
        return dtype(2) * dtype(math.pi) * i0_series(ar, dtype) if dtype is not float else 2.0 * math.pi * i0_series(ar)
    if ar == 0:
        return dtype(4) * dtype(math.pi)
    if dtype is float:
        return 4.0 * math.pi * math.sinh(ar) / ar
    return dtype(4) * dtype(np.pi) * np.sinh(ar) / ar


def phi_eta(fn: SpatialTestFn, r: float) -> float:
    """Spatial test function at radius ``r = |x|`` (even in ``r``)."""
    return _phi_direct(fn, r)


def log_phi_eta(fn: SpatialTestFn, r: float) -> float:
    """log of :func:`phi_eta`, valid for radii where the value itself overflows."""
    ar = fn.rate * abs(r)
    if fn.N == 1:
        return ar + math.log1p(math.exp(-2.0 * ar)) if ar > 0 else math.log(2.0)
    if fn.N == 2:
        return math.log(2.0 * math.pi) + log_i0(ar)
    if ar == 0:
        return math.log(4.0 * math.pi)
    # sinh(x)/x = exp(x) (1 - exp(-2x)) / (2x)
    return math.log(4.0 * math.pi) + ar + math.log(-math.expm1(-2.0 * ar) / (2.0 * ar))


def support_radius(R: float, m: float, t: float) -> float:
    """``R + phi_m(t) - phi_m(1)``, the support radius at time ``t``."""
    return R + (specfun.phi_m(m, t) - specfun.phi_m(m, 1.0))


def verify_eigen_identity(fn: SpatialTestFn, r_samples: Sequence[float]) -> float:
    """Max relative residual of ``Lap phi = eta**(2m+2) phi`` over the sample radii.

    The radial Laplacian ``phi'' + (N-1)/r phi'`` uses central differences with
    ``h = max(1e-5, 1e-6 r)``.  Function values are taken in extended
    precision so the second difference is not dominated by rounding.
    """
    ld = np.longdouble
    target = ld(fn.eta) ** ld(2.0 * fn.m + 2.0)
    worst = 0.0
    for r in r_samples:
        if not r > 0:
            raise ValueError("sample radii must be positive")
        h = max(1e-5, 1e-6 * r)
        rl, hl = ld(r), ld(h)
        f0 = _phi_direct(fn, rl, ld)
        fp = _phi_direct(fn, rl + hl, ld)
        fm = _phi_direct(fn, rl - hl, ld)
        lap = (fp - 2 * f0 + fm) / (hl * hl) + ld(fn.N - 1) / rl * (fp - fm) / (2 * hl)
        worst = max(worst, float(abs(lap - target * f0) / (target * f0)))
    return worst


def _check_match(fn: SpatialTestFn, profile: ProfileParams) -> None:
    if fn.m != profile.m or fn.eta != profile.eta:
        raise ParameterMismatch(
            f"test function (m={fn.m}, eta={fn.eta}) does not match profile (m={profile.m}, eta={profile.eta})"
        )


def log_psi_eta(fn: SpatialTestFn, profile: ProfileParams, r: float, t: float) -> float:
    """log of ``rho(t) * phi(r)``."""
    _check_match(fn, profile)
    return specfun.rho(profile, t).log_value + log_phi_eta(fn, r)


psi_eta = log_psi_eta


def verify_conjugate_equation(fn: SpatialTestFn, profile: ProfileParams, r: float, t: float) -> float:
    """Relative residual of the conjugate linear equation satisfied by ``psi``.

        psi_tt - t**(2m) Lap psi - (mu/t psi)_t + nu_sq/t**2 psi = 0

    Both second derivatives are central finite differences (in ``t`` of the
    profile, in ``r`` of the spatial factor); the residual is divided by psi
    and by the largest term.
    """
    _check_match(fn, profile)
    if not r > 0:
        raise ValueError("r must be positive")
    mu, m = profile.mu, profile.m
    mid = specfun.rho(profile, t)
    rate = profile.eta ** (m + 1.0) * t**m
    ht = 1e-3 / (1.0 + rate)
    if t - ht < 1.0:
        raise ValueError("t too close to 1 for a central stencil")
    log_p = mid.log_value
    up = math.exp(specfun.rho(profile, t + ht).log_value - log_p)
    dn = math.exp(specfun.rho(profile, t - ht).log_value - log_p)
    rho_tt = (up - 2.0 + dn) / (ht * ht)  # rho''/rho
    rho_t = (up - dn) / (2.0 * ht)  # rho'/rho

    ld = np.longdouble
    hr = max(1e-5, 1e-6 * r)
    f0 = _phi_direct(fn, ld(r), ld)
    fp = _phi_direct(fn, ld(r) + ld(hr), ld)
    fm = _phi_direct(fn, ld(r) - ld(hr), ld)
    lap = float(((fp - 2 * f0 + fm) / ld(hr * hr) + ld(fn.N - 1) / ld(r) * (fp - fm) / ld(2 * hr)) / f0)

    terms = (rho_tt, -(t ** (2.0 * m)) * lap, mu / (t * t), -mu / t * rho_t, profile.nu_sq / (t * t))
    return abs(math.fsum(terms)) / max(abs(x) for x in terms)


def growth_exponents(N: int, m: float, r_exp: float, mu: float) -> tuple[float, float]:
    """Closed-form polynomial growth exponents for the integrals of phi**r and psi**r."""
    phi_exp = (2.0 - r_exp) * (N - 1) * (m + 1.0) / 2.0
    psi_exp = ((2.0 - r_exp) * (N - 1) * (m + 1.0) + r_exp * (mu - m)) / 2.0
    return phi_exp, psi_exp


def default_t_grid(m: float, n: int = 12) -> np.ndarray:
    """Geometric grid on [2, 12] for m >= 1; longer windows for slower phases."""
    hi = 12.0 if m >= 1 else 12.0 ** ((1.0 + 1.0) / (1.0 + m))
    return np.geomspace(2.0, hi, n)


@dataclass(frozen=True)
class ExponentFit:
    phi: float
    psi: float
    phi_r2: float
    psi_r2: float
    log_phi_integrals: tuple[float, ...]
    log_psi_integrals: tuple[float, ...]


def _scaled_power_integral(fn: SpatialTestFn, r_exp: float, radius: float, shift: float) -> float:
    """``int_{|x| <= radius} phi**r_exp dx * exp(-r_exp * shift)``."""
    area = SPHERE_AREA[fn.N]
    dim = fn.N

    def integrand(s: float) -> float:
        return area * s ** (dim - 1) * math.exp(r_exp * (log_phi_eta(fn, s) - shift))

    # the mass sits within a few decay lengths of the outer radius
    width = 40.0 / (r_exp * fn.rate)
    breaks = [b for b in (radius - width, radius - 0.25 * width) if 0.0 < b < radius]
    value, _ = integrate.quad(integrand, 0.0, radius, epsrel=1e-9, epsabs=0.0, limit=400, points=breaks or None)
    return value


def growth_exponent_fit(
    fn: SpatialTestFn,
    profile: ProfileParams,
    r_exp: float,
    t_grid: Sequence[float] | None = None,
    R: float = 1.0,
) -> ExponentFit:
    """Fit the polynomial growth of the power integrals of phi and psi over the support ball.

    For each ``t`` the radial integral of ``phi**r_exp`` over
    ``|x| <= R + phi_m(t) - phi_m(1)`` is computed with adaptive
    Gauss-Kronrod quadrature, the factor ``exp(r_exp * phi_m(eta t))`` is
    divided out, and the slope of the log of what remains against ``log t``
    is returned.  The psi integral is ``rho(t)**r_exp`` times the phi
    integral, which cancels the exponential on its own.
    """
    _check_match(fn, profile)
    if not 1.0 < r_exp <= 3.0:
        raise ValueError(f"r_exp must lie in (1, 3], got {r_exp}")
    ts = np.asarray(default_t_grid(fn.m) if t_grid is None else t_grid, dtype=float)
    if np.any(ts < 1.0):
        raise ValueError("t_grid must lie in [1, inf)")
    log_phi, log_psi = [], []
    for t in ts:
        shift = specfun.phi_m(fn.m, fn.eta * t)
        scaled = _scaled_power_integral(fn, r_exp, support_radius(R, fn.m, t), shift)
        if not scaled > 0.0:
            raise FitError(f"non-positive scaled integral at t={t} (quadrature underflow)")
        lp = math.log(scaled)
        log_phi.append(lp)
        log_psi.append(r_exp * (specfun.rho(profile, t).log_value + shift) + lp)
    x = np.log(ts)
    fit_phi = linear_fit(x, log_phi)
    fit_psi = linear_fit(x, log_psi)
    return ExponentFit(fit_phi.slope, fit_psi.slope, fit_phi.r2, fit_psi.r2, tuple(log_phi), tuple(log_psi))
