"""Special functions behind the time profile of the test functions.

The modified Bessel function of the second kind is evaluated straight from
its integral representation

    K_nu(z) = int_0^inf exp(-z cosh s) cosh(nu s) ds

with a double-exponential (tanh-sinh) rule on a truncated interval.  All
work is done on the exponentially scaled integrand ``exp(z) K_nu(z)`` so the
same code path serves arguments where ``K_nu`` itself underflows; callers
that need huge arguments use the log form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "KScaled",
    "ProfileEval",
    "ProfileParams",
    "bessel_k",
    "bessel_k_scaled",
    "gamma_eta",
    "log_bessel_k",
    "phi_m",
    "rho",
    "rho_ode_residual",
]

DEFAULT_TOL = 1e-10
# tail of the scaled integrand dropped below this fraction of its peak
_TAIL = 1e-18
_MIN_LEVEL = 3
_MAX_LEVEL = 12
_U_MAX = 4.0


@dataclass(frozen=True)
class KScaled:
    """``exp(z) * K_nu(z)`` for several orders at one argument."""

    nu: tuple[float, ...]
    z: float
    values: tuple[float, ...]
    rel_error: float


def _log_integrand(nu: np.ndarray, s: np.ndarray, z: float) -> np.ndarray:
    # log of exp(-z (cosh s - 1)) cosh(nu s), written without cancellation
    s = s[None, :]
    nu = nu[:, None]
    half = np.sinh(0.5 * s)
    return nu * s - 2.0 * z * half * half + np.log1p(np.exp(-2.0 * nu * s)) - math.log(2.0)


def _truncation_point(nu: float, z: float) -> float:
    """Smallest Z past the integrand peak with a negligible tail beyond it."""

    def f(s: float) -> float:
        return nu * s - 2.0 * z * math.sinh(0.5 * s) ** 2

    peak = math.asinh(nu / z) if nu > 0 else 0.0
    target = max(0.0, f(peak)) - math.log(1.0 / _TAIL) - max(0.0, 0.5 * math.log(z))
    lo = peak
    hi = max(peak, 1e-3) * 2.0
    while f(hi) > target:
        lo, hi = hi, 2.0 * hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _tanh_sinh_nodes(width: float, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights (step included) of the tanh-sinh rule on [0, width]."""
    h = 2.0 ** (-level)
    n = int(round(_U_MAX / h))
    u = h * np.arange(-n, n + 1)
    s = 0.5 * math.pi * np.sinh(u)
    # x = width / (1 + exp(-2s)); the weight uses sech^2 written in exp(-2|s|)
    e = np.exp(-2.0 * np.abs(s))
    x = np.where(s >= 0, width / (1.0 + e), width * e / (1.0 + e))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    w = h * 0.5 * width * sech2 * 0.5 * math.pi * np.cosh(u)
    keep = (x > 0.0) & (w > 0.0)
    return x[keep], w[keep]


def bessel_k_scaled(nu, z: float, tol: float = DEFAULT_TOL) -> KScaled:
    """Evaluate ``exp(z) K_nu(z)`` for one order or a sequence of orders.

    The refinement halves the tanh-sinh step until two successive levels
    agree to ``tol`` (relative) for every requested order.
    """
    orders = np.atleast_1d(np.asarray(nu, dtype=float))
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"K_nu(z) requires z > 0, got z={z!r}")
    if np.any(orders < 0) or not np.all(np.isfinite(orders)):
        raise DomainError(f"K_nu(z) requires finite nu >= 0, got {orders.tolist()}")

    width = max(_truncation_point(float(v), z) for v in orders)
    previous = None
    err = math.inf
    for level in range(_MAX_LEVEL + 1):
        x, w = _tanh_sinh_nodes(width, level)
        current = np.exp(_log_integrand(orders, x, z)) @ w
        if previous is not None:
            err = float(np.max(np.abs(current - previous) / np.abs(current)))
            if level >= _MIN_LEVEL and err <= tol:
                return KScaled(tuple(orders.tolist()), z, tuple(current.tolist()), err)
        previous = current
    raise AccuracyError(
        f"tanh-sinh quadrature for K_nu({z}) stalled at relative error {err:.3g} > {tol:.3g}"
    )


def bessel_k(nu: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Modified Bessel function of the second kind ``K_nu(z)`` for real ``nu >= 0``, ``z > 0``.

    Values below the double range underflow to zero; use :func:`log_bessel_k`
    for large arguments.
    """
    scaled = bessel_k_scaled(nu, z, tol).values[0]
    return scaled * math.exp(-z)


def log_bessel_k(nu: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Natural log of ``K_nu(z)``, finite for every ``z > 0``."""
    return math.log(bessel_k_scaled(nu, z, tol).values[0]) - z


def phi_m(m: float, t: float) -> float:
    """Tricomi phase ``t**(1+m) / (1+m)``.

    Raises OverflowError when the power leaves the double range.
    """
    if t <= 0:
        raise DomainError(f"phi_m needs t > 0, got {t}")
    if m < 0:
        raise DomainError(f"phi_m needs m >= 0, got {m}")
    return float(t) ** (1.0 + m) / (1.0 + m)


@dataclass(frozen=True)
class ProfileParams:
    """Damping ``mu``, discriminant ``delta``, Tricomi exponent ``m`` and frequency ``eta``."""

    mu: float
    delta: float
    m: float
    eta: float

    def __post_init__(self):
        bad = []
        if not self.mu >= 0:
            bad.append(f"mu={self.mu} < 0")
        if not self.delta >= 0:
            bad.append(f"delta={self.delta} < 0")
        if not self.m >= 0:
            bad.append(f"m={self.m} < 0")
        if not self.eta > 0:
            bad.append(f"eta={self.eta} <= 0")
        if bad:
            raise DomainError("invalid profile parameters: " + ", ".join(bad))
        if not math.isfinite(self.order):
            raise DomainError("Bessel order is not finite")

    @property
    def order(self) -> float:
        """Bessel order ``sqrt(delta) / (2 (1 + m))``."""
        return math.sqrt(self.delta) / (2.0 * (1.0 + self.m))

    @property
    def nu_sq(self) -> float:
        """Mass coefficient recovered from ``delta = (mu - 1)**2 - 4 nu_sq``."""
        return ((self.mu - 1.0) ** 2 - self.delta) / 4.0


@dataclass(frozen=True)
class ProfileEval:
    """The profile and its derivatives at ``t``, stored in log form.

    ``log_derivative`` is rho'/rho and ``curvature`` is rho''/rho (both from
    the Bessel recurrence).  ``value`` and ``derivative`` may underflow to 0;
    ``log_value`` never does.
    """

    t: float
    log_value: float
    log_derivative: float
    curvature: float
    rel_accuracy: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def derivative(self) -> float:
        return self.log_derivative * self.value


def rho(params: ProfileParams, t: float, tol: float = DEFAULT_TOL) -> ProfileEval:
    """Evaluate ``(eta t)**((mu+1)/2) * K_order(phi_m(eta t))`` with its derivatives.

    Derivatives come from ``K_nu' = -K_{nu+1} + (nu/z) K_nu`` and the chain
    rule; no finite differences are involved.
    """
    if not t >= 1.0:
        raise DomainError(f"rho is defined for t >= 1, got t={t}")
    mu, m, eta = params.mu, params.m, params.eta
    nu = params.order
    s = eta * t
    z = phi_m(m, s)
    k = bessel_k_scaled([nu, nu + 1.0, nu + 2.0], z, tol)
    k0, k1, k2 = k.values

    # K'/K and K''/K at z
    q1 = -k1 / k0 + nu / z
    dk1 = -k2 / k1 + (nu + 1.0) / z  # K_{nu+1}'/K_{nu+1}
    q2 = -(k1 / k0) * dk1 + (nu / z) * q1 - nu / (z * z)

    zp = eta * s**m  # dz/dt
    zpp = eta * eta * m * s ** (m - 1.0) if m != 0 else 0.0
    a = 0.5 * (mu + 1.0)
    log_d = a / t + zp * q1
    # rho''/rho = (log rho)'' + ((log rho)')**2
    dlog_d = -a / (t * t) + zpp * q1 + zp * zp * (q2 - q1 * q1)
    curvature = dlog_d + log_d * log_d
    log_value = a * math.log(s) + math.log(k0) - z
    return ProfileEval(t, log_value, log_d, curvature, k.rel_error)


def gamma_eta(params: ProfileParams, t: float, tol: float = DEFAULT_TOL) -> float:
    """``mu/t - 2 rho'/rho``, the damping-like coefficient built from the profile."""
    return params.mu / t - 2.0 * rho(params, t, tol).log_derivative


def rho_ode_residual(params: ProfileParams, t: float, profile=None, h: float | None = None) -> float:
    """Relative residual of the profile ODE at ``t`` with rho'' from finite differences.

    rho'' is the central difference of the analytic rho' (both scaled by
    rho(t) in log form).  The residual

        rho'' - (mu/t rho)' + (nu_sq/t**2 - eta**(2m+2) t**(2m)) rho

    is divided by rho(t) and by the largest of its terms.  ``profile`` may
    replace :func:`rho` (used to inject faults); ``h`` defaults to a step
    scaled by the local decay rate.
    """
    profile = profile or rho
    mu, m, eta = params.mu, params.m, params.eta
    rate = eta ** (m + 1.0) * t**m
    if h is None:
        h = 1e-4 / (1.0 + rate)
    mid = profile(params, t)

    def scaled_slope(tt: float) -> float:
        # rho'(tt) / rho(t)
        ev = profile(params, tt)
        return ev.log_derivative * math.exp(ev.log_value - mid.log_value)

    if t - h >= 1.0:
        second = (scaled_slope(t + h) - scaled_slope(t - h)) / (2.0 * h)
    else:
        # one-sided second-order stencil at the left edge of the domain
        second = (
            -3.0 * mid.log_derivative + 4.0 * scaled_slope(t + h) - scaled_slope(t + 2.0 * h)
        ) / (2.0 * h)
    terms = (
        second,
        mu / (t * t),
        -mu / t * mid.log_derivative,
        params.nu_sq / (t * t),
        -(eta ** (2.0 * m + 2.0)) * t ** (2.0 * m),
    )
    scale = max(abs(x) for x in terms)
    return abs(math.fsum(terms)) / scale
