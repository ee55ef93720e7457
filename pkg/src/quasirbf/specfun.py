"""Double-precision Bessel functions J0, J1, I0, I1 on the non-negative axis.

These are the radial profiles of the nonsingular general-solution kernels:
J0 for the Helmholtz operator, I0 for the modified Helmholtz operator, and
J1/I1 for their gradients. Each function uses the ascending power series
(with compensated summation) for small arguments and the large-argument
asymptotic expansion beyond a fixed switch point:

    J0, J1:  series for x < 12, Hankel expansion for x >= 12
    I0, I1:  series for x < 15, exponential asymptotic form for x >= 15

Absolute accuracy for J and relative accuracy for I is ~1e-12 or better
on [0, 50].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

J_SWITCH = 12.0
I_SWITCH = 15.0
I_OVERFLOW_LIMIT = 700.0

_SERIES = "series"
_ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class SpecfunResult:
    value: float
    method: str


def _check_arg(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} requires a finite argument, got {x!r}")
    if x < 0.0:
        raise DomainError(f"{name} is defined for x >= 0, got {x}")
    return x


def _series_bessel(nu: int, x: float, sign: float) -> float:
    """Ascending series for J_nu (sign=-1) or I_nu (sign=+1), nu in {0, 1}.

    Kahan-compensated summation; terms generated by the two-term recurrence.
    """
    q = 0.25 * x * x
    t = x * 0.5 if nu == 1 else 1.0
    s = t
    c = 0.0
    for m in range(1, 400):
        t = sign * t * q / (m * (m + nu))
        y = t - c
        u = s + y
        c = (u - s) - y
        s = u
        if abs(t) <= 1e-18 * abs(s) + 1e-300:
            break
    return s


def _hankel_pq(nu: int, x: float):
    """P and Q sums of the Hankel large-argument expansion, truncated at
    the smallest term."""
    a = 1.0
    p = 0.0
    q = 0.0
    prev = math.inf
    for k in range(60):
        t = a / x ** k
        if abs(t) > prev:
            break
        prev = abs(t)
        if k % 2 == 0:
            p += (-1) ** (k // 2) * t
        else:
            q += (-1) ** ((k - 1) // 2) * t
        a = a * (4 * nu * nu - (2 * k + 1) ** 2) / ((k + 1) * 8.0)
    return p, q


def _asymptotic_j(nu: int, x: float) -> float:
    p, q = _hankel_pq(nu, x)
    omega = x - nu * math.pi / 2 - math.pi / 4
    return math.sqrt(2.0 / (math.pi * x)) * (math.cos(omega) * p - math.sin(omega) * q)


def _asymptotic_i(nu: int, x: float) -> float:
    a = 1.0
    s = 0.0
    prev = math.inf
    for k in range(60):
        t = (-1) ** k * a / x ** k
        if abs(t) > prev:
            break
        prev = abs(t)
        s += t
        a = a * (4 * nu * nu - (2 * k + 1) ** 2) / ((k + 1) * 8.0)
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * s


def j0_result(x: float) -> SpecfunResult:
    x = _check_arg("bessel_j0", x)
    if x < J_SWITCH:
        return SpecfunResult(_series_bessel(0, x, -1.0), _SERIES)
    return SpecfunResult(_asymptotic_j(0, x), _ASYMPTOTIC)


def j1_result(x: float) -> SpecfunResult:
    x = _check_arg("bessel_j1", x)
    if x < J_SWITCH:
        return SpecfunResult(_series_bessel(1, x, -1.0), _SERIES)
    return SpecfunResult(_asymptotic_j(1, x), _ASYMPTOTIC)


def _check_i_arg(name: str, x: float) -> float:
    x = _check_arg(name, x)
    if x > I_OVERFLOW_LIMIT:
        raise OverflowError(f"{name} overflows double precision for x > {I_OVERFLOW_LIMIT}, got {x}")
    return x


def i0_result(x: float) -> SpecfunResult:
    x = _check_i_arg("bessel_i0", x)
    if x < I_SWITCH:
        return SpecfunResult(_series_bessel(0, x, 1.0), _SERIES)
    return SpecfunResult(_asymptotic_i(0, x), _ASYMPTOTIC)


def i1_result(x: float) -> SpecfunResult:
    x = _check_i_arg("bessel_i1", x)
    if x < I_SWITCH:
        return SpecfunResult(_series_bessel(1, x, 1.0), _SERIES)
    return SpecfunResult(_asymptotic_i(1, x), _ASYMPTOTIC)


def bessel_j0(x: float) -> float:
    return j0_result(x).value


def bessel_j1(x: float) -> float:
    return j1_result(x).value


def bessel_i0(x: float) -> float:
    return i0_result(x).value


def bessel_i1(x: float) -> float:
    return i1_result(x).value
