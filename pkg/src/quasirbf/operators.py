"""Elliptic operators: Fourier symbols, nonsingular kernels, FD application.

Sign conventions (fixed once, used everywhere):

    Poisson               laplace(u) = f
    Helmholtz             laplace(u) + k^2 u = f
    ModifiedHelmholtz     laplace(u) - k^2 u = f
    ConvectionDiffusion   D laplace(u) + v . grad(u) - kappa u = f

Each non-Poisson operator has a radial (up to an exponential factor for
convection-diffusion) kernel that satisfies the homogeneous equation
everywhere and stays finite at r = 0. Poisson has no such kernel beyond
constants; its homogeneous solutions are handled by the circular-harmonic
basis in the bkm module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ConfigurationError, UnsupportedOperatorError
from .specfun import bessel_i0, bessel_i1, bessel_j0, bessel_j1


@dataclass(frozen=True)
class Poisson:
    pass


@dataclass(frozen=True)
class Helmholtz:
    k: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ConfigurationError(f"Helmholtz wavenumber must be positive, got {self.k}")


@dataclass(frozen=True)
class ModifiedHelmholtz:
    k: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ConfigurationError(f"modified-Helmholtz parameter must be positive, got {self.k}")


@dataclass(frozen=True)
class ConvectionDiffusion:
    diffusivity: float
    velocity: np.ndarray
    reaction: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if self.velocity.shape != (2,) or not np.all(np.isfinite(self.velocity)):
            raise ConfigurationError("velocity must be a finite 2-vector")
        if not (self.diffusivity > 0 and math.isfinite(self.diffusivity)):
            raise ConfigurationError(f"diffusivity must be positive, got {self.diffusivity}")
        if not (self.reaction >= 0 and math.isfinite(self.reaction)):
            raise ConfigurationError(f"reaction must be >= 0, got {self.reaction}")
        if self.reaction == 0.0 and not np.any(self.velocity):
            raise ConfigurationError(
                "convection-diffusion with zero velocity and zero reaction is the "
                "Poisson operator (up to D); use Poisson instead")

    @property
    def mu(self) -> float:
        """Decay rate of the reduced modified-Helmholtz problem."""
        v2 = float(self.velocity @ self.velocity)
        return math.sqrt(v2 / (4.0 * self.diffusivity ** 2) + self.reaction / self.diffusivity)


OperatorSpec = Union[Poisson, Helmholtz, ModifiedHelmholtz, ConvectionDiffusion]


def fourier_symbol(op: OperatorSpec, omega) -> complex:
    """sigma(omega) with L exp(i omega.x) = sigma(omega) exp(i omega.x)."""
    omega = np.asarray(omega, dtype=float)
    w2 = float(omega @ omega)
    if isinstance(op, Poisson):
        return complex(-w2)
    if isinstance(op, Helmholtz):
        return complex(op.k ** 2 - w2)
    if isinstance(op, ModifiedHelmholtz):
        return complex(-(op.k ** 2 + w2))
    if isinstance(op, ConvectionDiffusion):
        return complex(-op.diffusivity * w2 - op.reaction, float(op.velocity @ omega))
    raise UnsupportedOperatorError(f"unknown operator {op!r}")


def kernel_value(op: OperatorSpec, d) -> float:
    """Nonsingular general-solution kernel evaluated at displacement d = x - s."""
    d = np.asarray(d, dtype=float)
    r = float(np.hypot(d[0], d[1]))
    if isinstance(op, Helmholtz):
        return bessel_j0(op.k * r)
    if isinstance(op, ModifiedHelmholtz):
        return bessel_i0(op.k * r)
    if isinstance(op, ConvectionDiffusion):
        drift = math.exp(-float(op.velocity @ d) / (2.0 * op.diffusivity))
        return drift * bessel_i0(op.mu * r)
    raise UnsupportedOperatorError(
        "Poisson has no nonsingular radial kernel; use the Trefftz basis")


def kernel_gradient(op: OperatorSpec, d) -> np.ndarray:
    """Gradient of kernel_value with respect to x, with analytic r=0 limits."""
    d = np.asarray(d, dtype=float)
    r = float(np.hypot(d[0], d[1]))
    if isinstance(op, Helmholtz):
        if r == 0.0:
            return np.zeros(2)
        return -op.k * bessel_j1(op.k * r) * d / r
    if isinstance(op, ModifiedHelmholtz):
        if r == 0.0:
            return np.zeros(2)
        return op.k * bessel_i1(op.k * r) * d / r
    if isinstance(op, ConvectionDiffusion):
        half_v = op.velocity / (2.0 * op.diffusivity)
        if r == 0.0:
            return -half_v
        drift = math.exp(-float(op.velocity @ d) / (2.0 * op.diffusivity))
        radial = op.mu * bessel_i1(op.mu * r) / r
        return drift * (radial * d - half_v * bessel_i0(op.mu * r))
    raise UnsupportedOperatorError(
        "Poisson has no nonsingular radial kernel; use the Trefftz basis")


def apply_operator_fd(op: OperatorSpec, u: Callable[[float, float], float],
                      x, h: float) -> float:
    """Second-order finite-difference application of L to a scalar field.

    5-point stencil for the Laplacian, centered differences for the
    convective term; error is O(h^2) for C^4 fields. Used as the
    independent check that kernels and solved fields satisfy L u = f.
    """
    x = np.asarray(x, dtype=float)
    x1, x2 = float(x[0]), float(x[1])
    uc = u(x1, x2)
    ue, uw = u(x1 + h, x2), u(x1 - h, x2)
    un, us = u(x1, x2 + h), u(x1, x2 - h)
    lap = (ue + uw + un + us - 4.0 * uc) / (h * h)
    if isinstance(op, Poisson):
        return lap
    if isinstance(op, Helmholtz):
        return lap + op.k ** 2 * uc
    if isinstance(op, ModifiedHelmholtz):
        return lap - op.k ** 2 * uc
    if isinstance(op, ConvectionDiffusion):
        gx = (ue - uw) / (2.0 * h)
        gy = (un - us) / (2.0 * h)
        return (op.diffusivity * lap
                + op.velocity[0] * gx + op.velocity[1] * gy
                - op.reaction * uc)
    raise UnsupportedOperatorError(f"unknown operator {op!r}")
