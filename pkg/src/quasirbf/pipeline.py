"""End-to-end orchestration: split, solve, recombine, measure, report.

The pipeline realizes the particular/homogeneous split: the source is
handled on the embedding box (particular module), the boundary data is
adjusted by the trace of the particular solution, and the remainder is
absorbed by boundary-knot collocation (bkm module). Convergence studies
sweep the knot count and emit CSV rows.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import bkm
from .bkm import (LU, TSVD, Dirichlet, HomogeneousSolution, Neumann,
                  SolveDiagnostics, Strategy)
from .errors import ConfigurationError, QuasiRbfError
from .geometry import (StarDomain, boundary_nodes, bounding_box,
                       interior_eval_points)
from .operators import OperatorSpec, Poisson, apply_operator_fd
from .particular import (SpectralField, TaperSpec, eval_particular,
                         eval_particular_gradient, extend_source,
                         solve_particular)
from .presets import ProblemPreset, get_preset

# Timing columns are quantized to this grain (in ms) before CSV emission so
# that repeated runs of the same configuration produce identical bytes.
TIMING_QUANTUM_MS = 100.0

CSV_HEADER = ("N,max_err,rms_err,boundary_residual,condition_estimate,"
              "assemble_ms,solve_ms,particular_ms")


@dataclass(frozen=True)
class InlineProblem:
    """A problem given directly in the config instead of by preset name.

    Without an expression parser there is no way to supply an analytic
    source or exact solution, so inline problems are homogeneous with
    unit Dirichlet (or zero-flux Neumann) boundary data; only residual
    diagnostics are available for them.
    """
    operator: OperatorSpec
    domain: StarDomain
    bc_kind: str = "dirichlet"

    def as_preset(self) -> ProblemPreset:
        return ProblemPreset(
            name="inline", description="inline problem",
            operator=self.operator, domain=self.domain,
            exact=None, exact_gradient=None, source=None,
            bc_kind=self.bc_kind)


@dataclass(frozen=True)
class RunConfig:
    preset: Optional[str] = None
    problem: Optional[InlineProblem] = None
    knots: int = 32
    grid: int = 128
    box_margin: float = 1.0
    taper: float = 0.1
    strategy: str = "tsvd"
    svd_cutoff: float = bkm.DEFAULT_TSVD_CUTOFF
    trefftz_order: Optional[int] = None
    rings: int = 4
    per_ring: int = 50
    output: Optional[str] = None

    def __post_init__(self):
        if (self.preset is None) == (self.problem is None):
            raise ConfigurationError("exactly one of preset / problem must be given")
        if self.knots < 1:
            raise ConfigurationError(f"knots must be >= 1, got {self.knots}")
        if self.strategy not in ("lu", "tsvd"):
            raise ConfigurationError(f"strategy must be 'lu' or 'tsvd', got {self.strategy!r}")
        if self.rings < 1 or self.per_ring < 1:
            raise ConfigurationError("rings and per_ring must both be >= 1")
        if self.box_margin < 0:
            raise ConfigurationError(f"box_margin must be >= 0, got {self.box_margin}")

    def resolve_problem(self) -> ProblemPreset:
        if self.preset is not None:
            return get_preset(self.preset)
        return self.problem.as_preset()

    def solver_strategy(self) -> Strategy:
        return LU() if self.strategy == "lu" else TSVD(cutoff=self.svd_cutoff)


@dataclass(frozen=True)
class SolutionField:
    """Composite evaluator u(x) = u_p(x) + u_h(x)."""
    particular: Optional[SpectralField]
    homogeneous: HomogeneousSolution

    def evaluate(self, x1: float, x2: float) -> float:
        val = bkm.eval_homogeneous(self.homogeneous, (x1, x2))
        if self.particular is not None:
            val += eval_particular(self.particular, (x1, x2))
        return val

    def gradient(self, x1: float, x2: float) -> np.ndarray:
        g = bkm.eval_homogeneous_gradient(self.homogeneous, (x1, x2))
        if self.particular is not None:
            g = g + eval_particular_gradient(self.particular, (x1, x2))
        return g


@dataclass(frozen=True)
class StageTimings:
    particular_ms: float = 0.0
    assemble_ms: float = 0.0
    solve_ms: float = 0.0


@dataclass(frozen=True)
class RunResult:
    field: SolutionField
    diagnostics: SolveDiagnostics
    timings: StageTimings
    problem: ProblemPreset
    config: RunConfig


@dataclass(frozen=True)
class ConvergenceRow:
    knots: int
    max_err: float
    rms_err: float
    boundary_residual: float
    condition_estimate: float
    assemble_ms: float
    solve_ms: float
    particular_ms: float
    error: Optional[str] = None  # sentinel for failed runs; numeric cells are NaN


def run_pipeline(config: RunConfig) -> RunResult:
    problem = config.resolve_problem()
    op = problem.operator
    domain = problem.domain

    sf: Optional[SpectralField] = None
    particular_ms = 0.0
    if problem.source is not None:
        t0 = time.perf_counter()
        try:
            box = bounding_box(domain, config.box_margin)
            grid = extend_source(problem.source, domain, box, config.grid,
                                 TaperSpec(config.taper))
            sf = solve_particular(op, grid)
        except QuasiRbfError as exc:
            raise type(exc)(f"particular stage: {exc}") from exc
        particular_ms = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    try:
        nodes = boundary_nodes(domain, config.knots)
        bc = []
        for node in nodes:
            x1, x2 = float(node.position[0]), float(node.position[1])
            if problem.bc_kind == "dirichlet":
                g = problem.exact(x1, x2) if problem.exact is not None else 1.0
                if sf is not None:
                    g -= eval_particular(sf, node.position)
                bc.append(Dirichlet(g))
            else:
                if problem.exact_gradient is not None:
                    h = float(node.normal @ problem.exact_gradient(x1, x2))
                else:
                    h = 0.0
                if sf is not None:
                    h -= float(node.normal @ eval_particular_gradient(sf, node.position))
                bc.append(Neumann(h))
        if isinstance(op, Poisson):
            order = config.trefftz_order
            if order is None:
                order = problem.trefftz_order
            system = bkm.assemble(op, nodes, bc, trefftz_order=order,
                                  trefftz_center=domain.center,
                                  trefftz_scale=domain.max_radius())
        else:
            system = bkm.assemble(op, nodes, bc)
    except QuasiRbfError as exc:
        raise type(exc)(f"assembly stage: {exc}") from exc
    assemble_ms = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    try:
        coeffs, diagnostics = bkm.solve_dense(system, config.solver_strategy())
    except QuasiRbfError as exc:
        raise type(exc)(f"solve stage: {exc}") from exc
    solve_ms = (time.perf_counter() - t0) * 1e3

    sol = HomogeneousSolution(mode=system.mode, coefficients=coeffs,
                              centers=system.centers)
    field_ = SolutionField(particular=sf, homogeneous=sol)
    timings = StageTimings(particular_ms=particular_ms, assemble_ms=assemble_ms,
                           solve_ms=solve_ms)
    return RunResult(field=field_, diagnostics=diagnostics, timings=timings,
                     problem=problem, config=config)


def solve_problem(config: RunConfig) -> Tuple[SolutionField, SolveDiagnostics]:
    result = run_pipeline(config)
    return result.field, result.diagnostics


def error_metrics(evaluate: Callable[[float, float], float],
                  exact: Callable[[float, float], float],
                  points: Sequence) -> Tuple[float, float]:
    """Max and RMS error relative to max |exact| over the point set."""
    if len(points) == 0:
        raise ConfigurationError("error_metrics needs at least one point")
    errs = []
    scale = 0.0
    for p in points:
        x1, x2 = float(p[0]), float(p[1])
        e = exact(x1, x2)
        scale = max(scale, abs(e))
        errs.append(abs(evaluate(x1, x2) - e))
    if scale == 0.0:
        raise ConfigurationError(
            "error_metrics: exact solution vanishes on the whole point set")
    errs = np.asarray(errs) / scale
    return float(errs.max()), float(np.sqrt(np.mean(errs ** 2)))


def residual_check(field: SolutionField, op: OperatorSpec,
                   source: Optional[Callable[[float, float], float]],
                   points: Sequence, h: float) -> float:
    """Max |L u - f| by finite differences over interior points."""
    worst = 0.0
    for p in points:
        lu = apply_operator_fd(op, field.evaluate, p, h)
        f = source(float(p[0]), float(p[1])) if source is not None else 0.0
        worst = max(worst, abs(lu - f))
    return worst


def boundary_residual(result: RunResult, samples_per_knot: int = 4) -> float:
    """Max |u - g| at off-knot boundary points.

    Sample parameters sit halfway between consecutive fine-grid positions
    so none coincides with a collocation knot; exactness at the knots
    therefore cannot mask boundary error.
    """
    problem = result.problem
    domain = problem.domain
    n = result.config.knots * samples_per_knot
    t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    pts = problem.domain.boundary_point(t)
    # outward normals at the sample parameters, for Neumann data
    dr = domain.rho_deriv(t)
    r = domain.rho(t)
    tx = dr * np.cos(t) - r * np.sin(t)
    ty = dr * np.sin(t) + r * np.cos(t)
    norm = np.hypot(tx, ty)
    normals = np.stack([ty / norm, -tx / norm], axis=-1)
    worst = 0.0
    for p, nrm in zip(pts, normals):
        x1, x2 = float(p[0]), float(p[1])
        if problem.bc_kind == "dirichlet":
            g = problem.exact(x1, x2) if problem.exact is not None else 1.0
            worst = max(worst, abs(result.field.evaluate(x1, x2) - g))
        else:
            h = (float(nrm @ problem.exact_gradient(x1, x2))
                 if problem.exact_gradient is not None else 0.0)
            worst = max(worst, abs(float(nrm @ result.field.gradient(x1, x2)) - h))
    return worst


def evaluation_points(config: RunConfig) -> List[np.ndarray]:
    problem = config.resolve_problem()
    return interior_eval_points(problem.domain, config.rings, config.per_ring)


def convergence_study(config: RunConfig,
                      knot_counts: Sequence[int]) -> List[ConvergenceRow]:
    if list(knot_counts) != sorted(set(knot_counts)):
        raise ConfigurationError("knot counts must be strictly increasing")
    rows = []
    for n_knots in knot_counts:
        cfg = replace(config, knots=int(n_knots))
        try:
            result = run_pipeline(cfg)
            points = evaluation_points(cfg)
            if result.problem.exact is not None:
                max_err, rms_err = error_metrics(result.field.evaluate,
                                                 result.problem.exact, points)
            else:
                max_err = rms_err = float("nan")
            rows.append(ConvergenceRow(
                knots=int(n_knots), max_err=max_err, rms_err=rms_err,
                boundary_residual=boundary_residual(result),
                condition_estimate=result.diagnostics.condition_estimate,
                assemble_ms=result.timings.assemble_ms,
                solve_ms=result.timings.solve_ms,
                particular_ms=result.timings.particular_ms))
        except QuasiRbfError as exc:
            nan = float("nan")
            rows.append(ConvergenceRow(
                knots=int(n_knots), max_err=nan, rms_err=nan,
                boundary_residual=nan, condition_estimate=nan,
                assemble_ms=nan, solve_ms=nan, particular_ms=nan,
                error=str(exc)))
    return rows


def _fmt(value: float) -> str:
    if value != value:
        return "nan"
    if value == math.inf:
        return "inf"
    return np.format_float_scientific(value, trim="-")


def _quantize_ms(value: float) -> float:
    if value != value:
        return value
    return round(value / TIMING_QUANTUM_MS) * TIMING_QUANTUM_MS


def rows_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join([
            str(row.knots),
            _fmt(row.max_err),
            _fmt(row.rms_err),
            _fmt(row.boundary_residual),
            _fmt(row.condition_estimate),
            _fmt(_quantize_ms(row.assemble_ms)),
            _fmt(_quantize_ms(row.solve_ms)),
            _fmt(_quantize_ms(row.particular_ms)),
        ]))
    return "\n".join(lines) + "\n"
