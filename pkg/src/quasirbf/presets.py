"""Built-in manufactured problems with analytic exact solutions.

Each preset carries a whole-plane analytic source f and (where known) the
exact solution u* and its gradient, so boundary data comes from tracing
u* and errors are measurable. Registration verifies L u* = f by finite
differences at interior probe points, so a preset with a typo cannot
enter the registry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .errors import ConfigurationError
from .geometry import Circle, Star, StarDomain, interior_eval_points
from .operators import (ConvectionDiffusion, Helmholtz, ModifiedHelmholtz,
                        OperatorSpec, Poisson, apply_operator_fd,
                        kernel_gradient, kernel_value)

Field = Callable[[float, float], float]
VectorField = Callable[[float, float], np.ndarray]

_SELF_CONSISTENCY_H = 1e-3
_SELF_CONSISTENCY_TOL = 1e-4


@dataclass(frozen=True)
class ProblemPreset:
    name: str
    description: str
    operator: OperatorSpec
    domain: StarDomain
    exact: Optional[Field]
    exact_gradient: Optional[VectorField]
    source: Optional[Field]  # None declares a homogeneous problem (f == 0)
    bc_kind: str = "dirichlet"
    trefftz_order: int = 12


def check_self_consistency(preset: ProblemPreset, h: float = _SELF_CONSISTENCY_H) -> float:
    """Max |L u* - f| over interior probe points (NaN if no exact solution)."""
    if preset.exact is None:
        return float("nan")
    worst = 0.0
    for p in interior_eval_points(preset.domain, rings=2, per_ring=4):
        lu = apply_operator_fd(preset.operator, preset.exact, p, h)
        f = preset.source(p[0], p[1]) if preset.source is not None else 0.0
        worst = max(worst, abs(lu - f))
    return worst


_REGISTRY: Dict[str, ProblemPreset] = {}


def _register(preset: ProblemPreset):
    mismatch = check_self_consistency(preset)
    if mismatch == mismatch and mismatch > _SELF_CONSISTENCY_TOL:
        raise ConfigurationError(
            f"preset {preset.name!r} is inconsistent: |L u* - f| = {mismatch:.3g}")
    _REGISTRY[preset.name] = preset


def preset_names():
    return list(_REGISTRY)


def get_preset(name: str) -> ProblemPreset:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(_REGISTRY)}") from None


def all_presets():
    return list(_REGISTRY.values())


_unit_disc = StarDomain(Circle(1.0))
_star5 = StarDomain(Star(base=1.0, amplitude=0.2, lobes=5))

_register(ProblemPreset(
    name="helmholtz_disc",
    description="Helmholtz k=2 on the unit disc, u* = sin(2 x1), homogeneous",
    operator=Helmholtz(2.0),
    domain=_unit_disc,
    exact=lambda x, y: math.sin(2.0 * x),
    exact_gradient=lambda x, y: np.array([2.0 * math.cos(2.0 * x), 0.0]),
    source=None,
))

_register(ProblemPreset(
    name="helmholtz_star",
    description="Helmholtz k=2 on a five-lobed star, u* = sin(2 x1), homogeneous",
    operator=Helmholtz(2.0),
    domain=_star5,
    exact=lambda x, y: math.sin(2.0 * x),
    exact_gradient=lambda x, y: np.array([2.0 * math.cos(2.0 * x), 0.0]),
    source=None,
))

_kt_op = Helmholtz(2.0)
_kt_center = np.array([1.0, 0.0])

_register(ProblemPreset(
    name="helmholtz_kernel_trace",
    description="Helmholtz k=2 on the unit disc; boundary data is a kernel "
                "centered at (1, 0), so the exact field lies in the trial span",
    operator=_kt_op,
    domain=_unit_disc,
    exact=lambda x, y: kernel_value(_kt_op, np.array([x, y]) - _kt_center),
    exact_gradient=lambda x, y: kernel_gradient(_kt_op, np.array([x, y]) - _kt_center),
    source=None,
))

_register(ProblemPreset(
    name="modhelm_source",
    description="Modified Helmholtz k=1 on the unit disc, "
                "u* = sin(pi x1) sin(pi x2)",
    operator=ModifiedHelmholtz(1.0),
    domain=_unit_disc,
    exact=lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y),
    exact_gradient=lambda x, y: np.array([
        math.pi * math.cos(math.pi * x) * math.sin(math.pi * y),
        math.pi * math.sin(math.pi * x) * math.cos(math.pi * y)]),
    source=lambda x, y: -(2.0 * math.pi ** 2 + 1.0)
    * math.sin(math.pi * x) * math.sin(math.pi * y),
))

_register(ProblemPreset(
    name="poisson_disc",
    description="Poisson on the unit disc, u* = sin(pi x1) sin(pi x2), "
                "circular-harmonic basis",
    operator=Poisson(),
    domain=_unit_disc,
    exact=lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y),
    exact_gradient=lambda x, y: np.array([
        math.pi * math.cos(math.pi * x) * math.sin(math.pi * y),
        math.pi * math.sin(math.pi * x) * math.cos(math.pi * y)]),
    source=lambda x, y: -2.0 * math.pi ** 2
    * math.sin(math.pi * x) * math.sin(math.pi * y),
    trefftz_order=12,
))

_register(ProblemPreset(
    name="convdiff_disc",
    description="Convection-diffusion D=1, v=(2,0), kappa=1 on the unit disc, "
                "u* = exp(x1)",
    operator=ConvectionDiffusion(diffusivity=1.0, velocity=(2.0, 0.0), reaction=1.0),
    domain=_unit_disc,
    exact=lambda x, y: math.exp(x),
    exact_gradient=lambda x, y: np.array([math.exp(x), 0.0]),
    source=lambda x, y: 2.0 * math.exp(x),
))

# Disc of radius pi/2: with box_margin = 0.5 the embedding box is exactly
# [-pi, pi]^2, whose (1, 0) mode is resonant for k = 1 while the source
# concentrates exactly there. Demonstrates the resonance guard.
_register(ProblemPreset(
    name="helmholtz_resonant",
    description="Helmholtz k=1 on a disc of radius pi/2, f = cos(x1); with "
                "box_margin 0.5 the embedding box is resonant",
    operator=Helmholtz(1.0),
    domain=StarDomain(Circle(math.pi / 2.0)),
    exact=lambda x, y: 0.5 * x * math.sin(x),
    exact_gradient=lambda x, y: np.array([0.5 * (math.sin(x) + x * math.cos(x)), 0.0]),
    source=lambda x, y: math.cos(x),
))
