"""Boundary-knot collocation for the homogeneous part of the split.

Kernel mode (Helmholtz / modified Helmholtz / convection-diffusion):
centers coincide with the boundary collocation knots, the kernel is
finite at r = 0, and the system is square by default. Poisson instead
uses the circular-harmonic (Trefftz) basis

    { 1, (rho/R)^m cos(m theta), (rho/R)^m sin(m theta) },  m = 1..order,

about a given center with scale R, every member of which is harmonic.

Dense solves are LU with partial pivoting, or truncated SVD for
ill-conditioned systems; condition estimates are always reported so the
ill-conditioning of the full collocation matrix is observable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, SingularMatrixError
from .geometry import BoundaryNode
from .operators import OperatorSpec, Poisson, kernel_gradient, kernel_value

DEFAULT_TSVD_CUTOFF = 1e-12
_COND_SIZE_LIMIT = 512  # compute SVD-based condition estimates up to this N


@dataclass(frozen=True)
class Dirichlet:
    value: float


@dataclass(frozen=True)
class Neumann:
    value: float


BoundaryCondition = Union[Dirichlet, Neumann]


@dataclass(frozen=True)
class KernelMode:
    op: OperatorSpec


@dataclass(frozen=True)
class TrefftzMode:
    order: int
    center: np.ndarray
    scale: float


Mode = Union[KernelMode, TrefftzMode]


@dataclass(frozen=True)
class LU:
    pass


@dataclass(frozen=True)
class TSVD:
    cutoff: float = DEFAULT_TSVD_CUTOFF


Strategy = Union[LU, TSVD]


@dataclass(frozen=True)
class CollocationSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    centers: List[BoundaryNode]
    mode: Mode


@dataclass(frozen=True)
class SolveDiagnostics:
    condition_estimate: float
    effective_rank: int
    residual_norm: float
    strategy_used: str


@dataclass(frozen=True)
class HomogeneousSolution:
    mode: Mode
    coefficients: np.ndarray
    centers: List[BoundaryNode]


def trefftz_terms(order: int, center, scale: float, x1: float, x2: float):
    """Values and gradients of the 2*order+1 circular-harmonic basis terms."""
    z = complex(x1 - center[0], x2 - center[1]) / scale
    values = np.empty(2 * order + 1)
    grads = np.empty((2 * order + 1, 2))
    values[0] = 1.0
    grads[0] = 0.0
    zpow = 1.0 + 0.0j
    for m in range(1, order + 1):
        dz = m * zpow / scale  # d/dz of z^m, in box coordinates
        zpow = zpow * z
        values[2 * m - 1] = zpow.real
        values[2 * m] = zpow.imag
        # for holomorphic f = u + i v: grad u = (Re f', -Im f'), grad v = (Im f', Re f')
        grads[2 * m - 1] = (dz.real, -dz.imag)
        grads[2 * m] = (dz.imag, dz.real)
    return values, grads


def assemble(op: OperatorSpec, nodes: Sequence[BoundaryNode],
             bc: Sequence[BoundaryCondition],
             trefftz_order: int = None,
             trefftz_center=None, trefftz_scale: float = None) -> CollocationSystem:
    """Build the dense collocation system for the homogeneous solve."""
    n = len(nodes)
    if n < 1 or len(bc) != n:
        raise ConfigurationError(
            f"need matching nodes and boundary conditions, got {n} and {len(bc)}")
    if isinstance(op, Poisson):
        if trefftz_order is None:
            raise ConfigurationError("Poisson requires a trefftz_order")
        m = 2 * trefftz_order + 1
        if m > n:
            raise ConfigurationError(
                f"Trefftz basis size 2*order+1 = {m} exceeds node count {n}")
        center = np.zeros(2) if trefftz_center is None else np.asarray(trefftz_center, float)
        scale = 1.0 if trefftz_scale is None else float(trefftz_scale)
        if not scale > 0:
            raise ConfigurationError(f"Trefftz scale must be positive, got {scale}")
        matrix = np.empty((n, m))
        rhs = np.empty(n)
        for i, (node, cond) in enumerate(zip(nodes, bc)):
            values, grads = trefftz_terms(trefftz_order, center, scale,
                                          node.position[0], node.position[1])
            matrix[i] = values if isinstance(cond, Dirichlet) else grads @ node.normal
            rhs[i] = cond.value
        mode: Mode = TrefftzMode(order=trefftz_order, center=center, scale=scale)
        return CollocationSystem(matrix=matrix, rhs=rhs, centers=list(nodes), mode=mode)

    matrix = np.empty((n, n))
    rhs = np.empty(n)
    for i, (node, cond) in enumerate(zip(nodes, bc)):
        if isinstance(cond, Dirichlet):
            for j, cnode in enumerate(nodes):
                matrix[i, j] = kernel_value(op, node.position - cnode.position)
        else:
            for j, cnode in enumerate(nodes):
                matrix[i, j] = float(
                    node.normal @ kernel_gradient(op, node.position - cnode.position))
        rhs[i] = cond.value
    return CollocationSystem(matrix=matrix, rhs=rhs, centers=list(nodes),
                             mode=KernelMode(op=op))


def solve_dense(system: CollocationSystem,
                strategy: Strategy = LU()) -> Tuple[np.ndarray, SolveDiagnostics]:
    a = system.matrix
    b = system.rhs
    n, m = a.shape

    svals = None
    if max(n, m) <= _COND_SIZE_LIMIT or isinstance(strategy, TSVD):
        u, svals, vt = np.linalg.svd(a, full_matrices=False)

    if isinstance(strategy, LU):
        if n != m:
            raise ConfigurationError("LU requires a square system; use TSVD")
        try:
            coeffs = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(
                "collocation matrix is exactly singular; retry with the TSVD "
                "strategy") from exc
        if not np.all(np.isfinite(coeffs)):
            raise SingularMatrixError(
                "LU solve produced non-finite coefficients; retry with TSVD")
        strategy_name = "lu"
        if svals is not None:
            eff_rank = int(np.sum(svals > svals[0] * np.finfo(float).eps * max(n, m)))
        else:
            eff_rank = min(n, m)
    else:
        keep = svals > strategy.cutoff * svals[0]
        eff_rank = int(np.sum(keep))
        inv = np.zeros_like(svals)
        inv[keep] = 1.0 / svals[keep]
        coeffs = vt.T @ (inv * (u.T @ b))
        strategy_name = f"tsvd(cutoff={strategy.cutoff:g})"

    if svals is not None and svals[-1] > 0:
        cond = float(svals[0] / svals[-1])
    elif svals is not None:
        cond = math.inf
    else:
        cond = float("nan")
    residual = float(np.linalg.norm(a @ coeffs - b))
    diag = SolveDiagnostics(condition_estimate=cond, effective_rank=eff_rank,
                            residual_norm=residual, strategy_used=strategy_name)
    return coeffs, diag


def eval_homogeneous(sol: HomogeneousSolution, x) -> float:
    x = np.asarray(x, dtype=float)
    if isinstance(sol.mode, KernelMode):
        total = 0.0
        for alpha, node in zip(sol.coefficients, sol.centers):
            total += alpha * kernel_value(sol.mode.op, x - node.position)
        return total
    values, _ = trefftz_terms(sol.mode.order, sol.mode.center, sol.mode.scale,
                              float(x[0]), float(x[1]))
    return float(sol.coefficients @ values)


def eval_homogeneous_gradient(sol: HomogeneousSolution, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if isinstance(sol.mode, KernelMode):
        total = np.zeros(2)
        for alpha, node in zip(sol.coefficients, sol.centers):
            total += alpha * kernel_gradient(sol.mode.op, x - node.position)
        return total
    _, grads = trefftz_terms(sol.mode.order, sol.mode.center, sol.mode.scale,
                             float(x[0]), float(x[1]))
    return grads.T @ sol.coefficients
