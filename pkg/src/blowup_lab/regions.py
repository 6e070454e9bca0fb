"""Blow-up region quantities and lifespan classification for the coupled system.

Notation: ``Lambda(d, p, q) = (p+1)/(pq-1) - (d-1)/2``, the shifted
dimension ``N(m+1) - 2m``, and ``Omega = max(Lambda(N_m+mu1, p, q),
Lambda(N_m+mu2, q, p))``.  The lifespan upper bound is a power of
``1/eps`` when Omega > 0 and an exponential law on the critical curve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

from .errors import DomainError, HypothesisViolation, OutsideTheoremError

ZERO_TOL = 1e-12


def delta(mu: float, nu_sq: float) -> float:
    """Discriminant ``(mu - 1)**2 - 4 nu_sq``; may be negative."""
    return (mu - 1.0) ** 2 - 4.0 * nu_sq


def shifted_dimension(N: int, m: float) -> float:
    return N * (m + 1.0) - 2.0 * m


def lambda_fn(d: float, p: float, q: float) -> float:
    if p * q == 1.0:
        raise DomainError("Lambda is undefined for pq = 1")
    return (p + 1.0) / (p * q - 1.0) - (d - 1.0) / 2.0


@dataclass(frozen=True)
class SystemParams:
    """Full parameter tuple of the coupled system.

    ``nu1_sq`` and ``nu2_sq`` are the squared mass coefficients.  ``eps`` is
    the data size and ``R`` the initial support radius.
    """

    N: int
    m: float
    mu1: float
    mu2: float
    nu1_sq: float
    nu2_sq: float
    p: float
    q: float
    eps: float = 0.1
    R: float = 1.0

    @property
    def delta1(self) -> float:
        return delta(self.mu1, self.nu1_sq)

    @property
    def delta2(self) -> float:
        return delta(self.mu2, self.nu2_sq)

    def violations(self) -> list[str]:
        bad = []
        if not (isinstance(self.N, int) and self.N >= 1):
            bad.append(f"N={self.N!r} must be a positive integer")
        if not self.m >= 0:
            bad.append(f"m={self.m} must be >= 0")
        for name in ("mu1", "mu2", "nu1_sq", "nu2_sq"):
            if not getattr(self, name) >= 0:
                bad.append(f"{name}={getattr(self, name)} must be >= 0")
        if not self.p > 1:
            bad.append(f"p={self.p} must be > 1")
        if not self.q > 1:
            bad.append(f"q={self.q} must be > 1")
        if not self.delta1 >= 0:
            bad.append(f"delta1={self.delta1:g} must be >= 0")
        if not self.delta2 >= 0:
            bad.append(f"delta2={self.delta2:g} must be >= 0")
        if not self.eps > 0:
            bad.append(f"eps={self.eps} must be > 0")
        if not self.R > 0:
            bad.append(f"R={self.R} must be > 0")
        return bad

    def validate(self) -> "SystemParams":
        bad = self.violations()
        if bad:
            raise HypothesisViolation(bad)
        return self

    def swapped(self) -> "SystemParams":
        """The same system with the two equations exchanged."""
        return replace(self, mu1=self.mu2, mu2=self.mu1, nu1_sq=self.nu2_sq, nu2_sq=self.nu1_sq, p=self.q, q=self.p)

    def to_dict(self) -> dict:
        return asdict(self)


class Branch(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    DOUBLY_CRITICAL = "DoublyCritical"
    OUTSIDE = "OutsideTheorem"


@dataclass(frozen=True)
class LifespanLaw:
    """Shape of the lifespan bound: ``C eps**-exponent`` or ``exp(C eps**-exponent)``."""

    kind: str  # "power", "exp" or "none"
    exponent: float

    def __str__(self) -> str:
        if self.kind == "power":
            return f"C*eps^(-{self.exponent:.12g})"
        if self.kind == "exp":
            return f"exp(C*eps^(-{self.exponent:.12g}))"
        return "no bound"


@dataclass(frozen=True)
class LifespanClassification:
    omega: float
    lambda1: float
    lambda2: float
    branch: Branch
    exponent_descriptor: LifespanLaw
    p: float
    q: float


def branch_of(lambda1: float, lambda2: float, tol: float = ZERO_TOL) -> Branch:
    """Partition of the (lambda1, lambda2) plane; |lambda| < tol counts as zero."""
    if abs(lambda1) < tol and abs(lambda2) < tol:
        return Branch.DOUBLY_CRITICAL
    om = max(lambda1, lambda2)
    if abs(om) < tol:
        return Branch.CRITICAL
    return Branch.SUBCRITICAL if om > 0 else Branch.OUTSIDE


def classify(lambda1: float, lambda2: float, p: float, q: float) -> LifespanClassification:
    branch = branch_of(lambda1, lambda2)
    omega_value = max(lambda1, lambda2)
    if branch is Branch.SUBCRITICAL:
        law = LifespanLaw("power", omega_value)
    elif branch is Branch.CRITICAL:
        law = LifespanLaw("exp", p * q - 1.0)
    elif branch is Branch.DOUBLY_CRITICAL:
        law = LifespanLaw("exp", min((p * q - 1.0) / (p + 1.0), (p * q - 1.0) / (q + 1.0)))
    else:
        law = LifespanLaw("none", math.nan)
    return LifespanClassification(omega_value, lambda1, lambda2, branch, law, p, q)


def omega(params: SystemParams) -> LifespanClassification:
    """Region quantities at the shifted dimension; raises HypothesisViolation on bad input."""
    params.validate()
    nm = shifted_dimension(params.N, params.m)
    l1 = lambda_fn(nm + params.mu1, params.p, params.q)
    l2 = lambda_fn(nm + params.mu2, params.q, params.p)
    return classify(l1, l2, params.p, params.q)


def lifespan_upper_bound(cls: LifespanClassification, eps: float, C: float = 1.0) -> float:
    """Evaluate the lifespan bound for a caller-chosen constant ``C``.

    The exponential branches overflow to ``inf`` for small ``eps``.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    law = cls.exponent_descriptor
    if cls.branch is Branch.OUTSIDE:
        raise OutsideTheoremError("Omega < 0: the theorem gives no bound")
    if law.kind == "power":
        return C * eps ** (-law.exponent)
    try:
        return math.exp(C * eps ** (-law.exponent))
    except OverflowError:
        return math.inf
