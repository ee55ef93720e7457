"""Particular solution on a periodic embedding box via FFT.

The source f is multiplied by a C-infinity taper so that its periodic
extension over the square box is smooth and compactly supported; the
equation L u = f_tapered is then solved mode-by-mode by dividing the FFT
coefficients by the operator's Fourier symbol. The resulting field
satisfies the governing equation exactly on the physical domain (where
the taper is 1), which is all a particular solution has to do.

Zero-symbol modes are repaired by closed-form compensators:

    Poisson:                u_c = mean * |x - c|^2 / 4
    conv-diff, kappa = 0:   u_c = mean * v.(x - c) / |v|^2

Near-resonant Helmholtz modes with non-negligible source energy abort
the solve with ResonantBoxError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigurationError, DomainError, ResonantBoxError
from .geometry import Box2, StarDomain, bounding_box
from .operators import (ConvectionDiffusion, Helmholtz, ModifiedHelmholtz,
                        OperatorSpec, Poisson)

RESONANCE_SYMBOL_TOL = 1e-8
RESONANCE_SOURCE_TOL = 1e-10

_GRID_SIZES = (32, 64, 128, 256, 512, 1024)


@dataclass(frozen=True)
class TaperSpec:
    """Normalized half-width of the smooth rise region per box axis."""
    inner_fraction: float = 0.15

    def __post_init__(self):
        if not (0.0 < self.inner_fraction < 0.5):
            raise ConfigurationError(
                f"taper inner_fraction must lie in (0, 0.5), got {self.inner_fraction}")


@dataclass(frozen=True)
class PoissonQuad:
    """Compensator u_c = mean * |x - center|^2 / 4 with laplace(u_c) = mean."""
    mean: float
    center: np.ndarray

    def value(self, x1: float, x2: float) -> float:
        return self.mean * ((x1 - self.center[0]) ** 2 + (x2 - self.center[1]) ** 2) / 4.0

    def gradient(self, x1: float, x2: float) -> np.ndarray:
        return self.mean * np.array([x1 - self.center[0], x2 - self.center[1]]) / 2.0


@dataclass(frozen=True)
class ConvectionLinear:
    """Compensator u_c = mean * v.(x - center) / |v|^2 with v.grad(u_c) = mean."""
    mean: float
    velocity: np.ndarray
    center: np.ndarray

    def value(self, x1: float, x2: float) -> float:
        v = self.velocity
        return self.mean * (v[0] * (x1 - self.center[0]) + v[1] * (x2 - self.center[1])) \
            / float(v @ v)

    def gradient(self, x1: float, x2: float) -> np.ndarray:
        v = self.velocity
        return self.mean * v / float(v @ v)


Compensator = Union[None, PoissonQuad, ConvectionLinear]


@dataclass(frozen=True)
class SourceGrid:
    box: Box2
    n: int
    samples: np.ndarray

    def __post_init__(self):
        if self.n not in _GRID_SIZES:
            raise ConfigurationError(
                f"grid size must be a power of two in [32, 1024], got {self.n}")
        if self.samples.shape != (self.n, self.n):
            raise ConfigurationError(
                f"samples must be {self.n}x{self.n}, got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ConfigurationError("source samples must be finite")
        side = self.box.side
        if abs(side[0] - side[1]) > 1e-12 * side[0]:
            raise ConfigurationError("embedding box must be square")


@dataclass(frozen=True)
class SpectralField:
    """Truncated Fourier series u_p(x) = Re sum_m c_m exp(i w_m.(x - min_corner))
    plus an optional zero-mode compensator."""
    box: Box2
    n: int
    coeffs: np.ndarray
    compensator: Compensator = None

    def _phase_vectors(self, x1: float, x2: float):
        side = float(self.box.side[0])
        m = np.fft.fftfreq(self.n) * self.n  # integer mode numbers
        w = 2.0 * np.pi * m / side
        ex = np.exp(1j * w * (x1 - self.box.min_corner[0]))
        ey = np.exp(1j * w * (x2 - self.box.min_corner[1]))
        return w, ex, ey

    def _require_inside(self, x1: float, x2: float):
        if not self.box.contains((x1, x2)):
            raise DomainError(f"point ({x1}, {x2}) lies outside the embedding box")


def taper_weight(box: Box2, taper: TaperSpec, x) -> float:
    """Separable C-infinity bump weight: 0 on the box edge, 1 on the plateau."""
    x = np.asarray(x, dtype=float)
    if not box.contains(x):
        raise DomainError(f"taper_weight: point {x} lies outside the box")
    xi = (x - box.min_corner) / box.side
    return float(_axis_weight(xi[0], taper.inner_fraction)
                 * _axis_weight(xi[1], taper.inner_fraction))


def _bump(s):
    """exp(-1/s) for s > 0, else 0; vectorized."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def _eta(s):
    """Smooth step: 0 for s <= 0, 1 for s >= 1, eta(s) + eta(1-s) = 1."""
    a = _bump(s)
    b = _bump(1.0 - np.asarray(s, dtype=float))
    return a / (a + b)


def _axis_weight(xi, t: float):
    xi = np.asarray(xi, dtype=float)
    rise = _eta(xi / t)
    fall = _eta((1.0 - xi) / t)
    return np.minimum(rise, fall)


def required_margin(taper: TaperSpec) -> float:
    """Smallest box_margin for which the taper plateau contains the domain."""
    t = taper.inner_fraction
    return t / (1.0 - 2.0 * t)


def extend_source(f: Callable[[float, float], float], domain: StarDomain,
                  box: Box2, n: int, taper: TaperSpec) -> SourceGrid:
    """Sample the tapered extension of f on the n x n periodic grid.

    Inside the physical domain the taper weight is 1, so samples there
    equal f exactly; the check below enforces that the domain's tight
    bounding box lies within the taper plateau.
    """
    t = taper.inner_fraction
    tight = bounding_box(domain, 0.0)
    plateau_lo = box.min_corner + t * box.side
    plateau_hi = box.max_corner - t * box.side
    if np.any(tight.min_corner < plateau_lo) or np.any(tight.max_corner > plateau_hi):
        raise ConfigurationError(
            "taper plateau does not contain the physical domain; "
            f"with inner_fraction={t} the box needs box_margin >= "
            f"{required_margin(taper):.4g}")
    side = float(box.side[0])
    coords = box.min_corner[0] + side * np.arange(n) / n, \
        box.min_corner[1] + side * np.arange(n) / n
    x1g, x2g = np.meshgrid(coords[0], coords[1], indexing="ij")
    xi1 = (x1g - box.min_corner[0]) / side
    xi2 = (x2g - box.min_corner[1]) / side
    weight = _axis_weight(xi1, t) * _axis_weight(xi2, t)
    samples = np.empty((n, n))
    for i in range(n):
        x1 = float(coords[0][i])
        row = samples[i]
        for j in range(n):
            w = weight[i, j]
            row[j] = w * f(x1, float(coords[1][j])) if w != 0.0 else 0.0
    return SourceGrid(box=box, n=n, samples=samples)


def solve_particular(op: OperatorSpec, grid: SourceGrid) -> SpectralField:
    """Divide FFT coefficients by the Fourier symbol; O(n^2 log n)."""
    n = grid.n
    side = float(grid.box.side[0])
    fhat = np.fft.fft2(grid.samples)
    m = np.fft.fftfreq(n) * n
    w1 = 2.0 * np.pi * m / side
    wx, wy = np.meshgrid(w1, w1, indexing="ij")
    w2 = wx ** 2 + wy ** 2

    mean = float(grid.samples.mean())
    center = grid.box.center
    compensator: Compensator = None

    if isinstance(op, Poisson):
        sigma = -w2.astype(complex)
        fhat = fhat.copy()
        fhat[0, 0] = 0.0
        sigma[0, 0] = 1.0  # placeholder; coefficient is zero anyway
        compensator = PoissonQuad(mean=mean, center=center)
    elif isinstance(op, ModifiedHelmholtz):
        sigma = (-(op.k ** 2 + w2)).astype(complex)
    elif isinstance(op, Helmholtz):
        sigma = (op.k ** 2 - w2).astype(complex)
    elif isinstance(op, ConvectionDiffusion):
        sigma = (-op.diffusivity * w2 - op.reaction) \
            + 1j * (op.velocity[0] * wx + op.velocity[1] * wy)
        if op.reaction == 0.0:
            fhat = fhat.copy()
            fhat[0, 0] = 0.0
            sigma[0, 0] = 1.0
            compensator = ConvectionLinear(mean=mean, velocity=op.velocity, center=center)
    else:
        raise ConfigurationError(f"unknown operator {op!r}")

    coeffs = np.zeros_like(fhat)
    if isinstance(op, Helmholtz):
        near = np.abs(sigma) <= RESONANCE_SYMBOL_TOL * max(1.0, op.k ** 2)
        if np.any(near):
            fmax = float(np.abs(fhat).max())
            bad = near & (np.abs(fhat) > RESONANCE_SOURCE_TOL * fmax)
            if np.any(bad):
                idx = np.argwhere(bad)[0]
                raise ResonantBoxError(
                    f"Fourier mode {tuple(int(m[i]) for i in idx)} of the embedding box "
                    f"is resonant for Helmholtz k={op.k} and carries source energy; "
                    "change box_margin or the grid size to detune the box")
            safe = ~near
            coeffs[safe] = fhat[safe] / sigma[safe]
        else:
            coeffs = fhat / sigma
    else:
        coeffs = fhat / sigma

    coeffs = coeffs / (n * n)
    return SpectralField(box=grid.box, n=n, coeffs=coeffs, compensator=compensator)


def eval_particular(sf: SpectralField, x) -> float:
    """Direct summation of the truncated Fourier series at an off-grid point."""
    x = np.asarray(x, dtype=float)
    x1, x2 = float(x[0]), float(x[1])
    sf._require_inside(x1, x2)
    _, ex, ey = sf._phase_vectors(x1, x2)
    val = float(np.real(ex @ sf.coeffs @ ey))
    if sf.compensator is not None:
        val += sf.compensator.value(x1, x2)
    return val


def eval_particular_gradient(sf: SpectralField, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    x1, x2 = float(x[0]), float(x[1])
    sf._require_inside(x1, x2)
    w, ex, ey = sf._phase_vectors(x1, x2)
    cey = sf.coeffs @ ey
    gx = float(np.real((1j * w * ex) @ cey))
    gy = float(np.real(ex @ (sf.coeffs @ (1j * w * ey))))
    g = np.array([gx, gy])
    if sf.compensator is not None:
        g = g + sf.compensator.gradient(x1, x2)
    return g
