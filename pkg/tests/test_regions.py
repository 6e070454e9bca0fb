import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from blowup_lab import regions
from blowup_lab.errors import DomainError, HypothesisViolation, OutsideTheoremError
from blowup_lab.regions import Branch, SystemParams


def params(**kw):
    base = dict(N=1, m=1.0, mu1=4.0, mu2=2.0, nu1_sq=0.0, nu2_sq=0.0, p=2.0, q=1.5)
    base.update(kw)
    return SystemParams(**base)


def lam_exact(d, p, q):
    """Rational-arithmetic reference for Lambda."""
    d, p, q = Fraction(d), Fraction(p), Fraction(q)
    return (p + 1) / (p * q - 1) - (d - 1) / 2


def test_delta():
    assert regions.delta(1, 0) == 0
    assert regions.delta(3, 1) == 0
    assert regions.delta(4, 0) == 9


def test_shifted_dimension():
    for m in (0.0, 0.5, 1.0, 3.0):
        assert regions.shifted_dimension(2, m) == 2
    assert regions.shifted_dimension(1, 1) == 0
    for N in (1, 2, 5):
        assert regions.shifted_dimension(N, 0) == N


def test_lambda_examples():
    assert regions.lambda_fn(1, 2, 3) == pytest.approx(3 / 5)
    assert regions.lambda_fn(4, 2, 1.5) == 0
    assert regions.lambda_fn(2, 1.5, 2) == 0.75
    with pytest.raises(DomainError):
        regions.lambda_fn(1, 2, 0.5)


@pytest.mark.parametrize(
    "kw,omega,branch",
    [
        ({}, 0.75, Branch.SUBCRITICAL),
        ({"mu1": 0.0}, 2.0, Branch.SUBCRITICAL),
        ({"N": 2, "mu1": 3.0, "mu2": 5.0, "q": 1.25}, 0.0, Branch.CRITICAL),
    ],
)
def test_reference_classifications(kw, omega, branch):
    cls = regions.omega(params(**kw))
    assert abs(cls.omega - omega) <= 1e-12
    assert cls.branch is branch
    sp = params(**kw)
    nm = sp.N * (sp.m + 1) - 2 * sp.m
    ref = max(lam_exact(nm + sp.mu1, sp.p, sp.q), lam_exact(nm + sp.mu2, sp.q, sp.p))
    assert cls.omega == pytest.approx(float(ref), abs=1e-12)


def test_critical_case_lambda2():
    cls = regions.omega(params(N=2, mu1=3.0, mu2=5.0, q=1.25))
    assert cls.lambda2 == pytest.approx(-1.5)
    assert str(cls.exponent_descriptor) == "exp(C*eps^(-1.5))"


def test_near_one_exponents_are_subcritical():
    # 2.01/0.0201 dominates (18-1)/2, so Omega is large and positive
    cls = regions.omega(params(N=10, m=1.0, mu1=0.0, mu2=0.0, p=1.01, q=1.01))
    assert cls.omega == pytest.approx(float(lam_exact(18, Fraction("1.01"), Fraction("1.01"))), rel=1e-12)
    assert cls.branch is Branch.SUBCRITICAL


def test_outside_theorem():
    cls = regions.omega(params(N=10, m=1.0, mu1=0.0, mu2=0.0, p=3.0, q=3.0))
    assert cls.omega == pytest.approx(0.5 - 8.5)
    assert cls.branch is Branch.OUTSIDE
    with pytest.raises(OutsideTheoremError):
        regions.lifespan_upper_bound(cls, 0.1)


def test_doubly_critical():
    # lambda1 = lambda2 = 0 needs p = q and mu1 = mu2: (p+1)/(p^2-1) = 1/(p-1) = (d-1)/2
    cls = regions.omega(params(N=3, m=0.0, mu1=0.0, mu2=0.0, p=2.0, q=2.0))
    assert cls.branch is Branch.DOUBLY_CRITICAL
    assert cls.exponent_descriptor.exponent == pytest.approx(1.0)


def test_hypothesis_violation_lists_failures():
    with pytest.raises(HypothesisViolation) as info:
        regions.omega(params(p=1.0, nu1_sq=5.0))
    msg = str(info.value)
    assert "p=1.0" in msg and "delta1" in msg


def test_lifespan_upper_bound():
    sub = regions.omega(params())
    assert regions.lifespan_upper_bound(sub, 0.1) == pytest.approx(10**0.75)
    assert regions.lifespan_upper_bound(sub, 1.0) == 1.0
    crit = regions.omega(params(N=2, mu1=3.0, mu2=5.0, q=1.25))
    assert regions.lifespan_upper_bound(crit, 0.1) == pytest.approx(math.exp(10**1.5))
    assert regions.lifespan_upper_bound(crit, 1e-6) == math.inf


positive = st.floats(0.0, 6.0)
exponent = st.floats(1.01, 6.0)
system = st.builds(
    SystemParams,
    N=st.integers(1, 6),
    m=st.floats(0.0, 3.0),
    mu1=positive,
    mu2=positive,
    nu1_sq=st.just(0.0),
    nu2_sq=st.just(0.0),
    p=exponent,
    q=exponent,
)


@settings(max_examples=200)
@given(system)
def test_swap_invariance(sp):
    a = regions.omega(sp)
    b = regions.omega(sp.swapped())
    assert a.omega == b.omega
    assert (a.lambda1, a.lambda2) == (b.lambda2, b.lambda1)


@settings(max_examples=200)
@given(system)
def test_classification_invariants(sp):
    cls = regions.omega(sp)
    assert cls.omega == max(cls.lambda1, cls.lambda2)
    zero = regions.ZERO_TOL
    if abs(cls.lambda1) < zero and abs(cls.lambda2) < zero:
        assert cls.branch is Branch.DOUBLY_CRITICAL
    elif cls.omega > zero:
        assert cls.branch is Branch.SUBCRITICAL
    elif cls.omega < -zero:
        assert cls.branch is Branch.OUTSIDE


@settings(max_examples=200)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_branch_partition_exhaustive(l1, l2):
    b = regions.branch_of(l1, l2)
    expected = {
        Branch.SUBCRITICAL: max(l1, l2) >= regions.ZERO_TOL,
        Branch.OUTSIDE: max(l1, l2) <= -regions.ZERO_TOL,
        Branch.DOUBLY_CRITICAL: abs(l1) < regions.ZERO_TOL and abs(l2) < regions.ZERO_TOL,
    }
    expected[Branch.CRITICAL] = not any(expected.values())
    assert [k for k, v in expected.items() if v] == [b]


@settings(max_examples=200)
@given(st.floats(-5, 10), st.floats(0, 5), exponent, exponent, st.floats(0.01, 3))
def test_lambda_monotone(d, dd, p, q, dq):
    assume(dd > 1e-6)
    assert regions.lambda_fn(d + dd, p, q) < regions.lambda_fn(d, p, q)
    assert regions.lambda_fn(d, p, q + dq) < regions.lambda_fn(d, p, q)


@settings(max_examples=100)
@given(system)
def test_flat_case_uses_plain_dimension(sp):
    from dataclasses import replace

    flat = replace(sp, m=0.0)
    cls = regions.omega(flat)
    ref = max(regions.lambda_fn(flat.N + flat.mu1, flat.p, flat.q), regions.lambda_fn(flat.N + flat.mu2, flat.q, flat.p))
    assert cls.omega == ref
