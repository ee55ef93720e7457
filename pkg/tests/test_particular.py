import math

import numpy as np
import pytest

from quasirbf.errors import (ConfigurationError, DomainError,
                             ResonantBoxError)
from quasirbf.geometry import Box2, Circle, StarDomain, bounding_box
from quasirbf.operators import (ConvectionDiffusion, Helmholtz,
                                ModifiedHelmholtz, Poisson, apply_operator_fd)
from quasirbf.particular import (ConvectionLinear, PoissonQuad, SourceGrid,
                                 SpectralField, TaperSpec, eval_particular,
                                 eval_particular_gradient, extend_source,
                                 required_margin, solve_particular,
                                 taper_weight)

UNIT_DISC = StarDomain(Circle(1.0))
TWO_PI = 2.0 * math.pi


def _grid_samples(box: Box2, n: int, f) -> SourceGrid:
    side = float(box.side[0])
    c1 = box.min_corner[0] + side * np.arange(n) / n
    c2 = box.min_corner[1] + side * np.arange(n) / n
    x1, x2 = np.meshgrid(c1, c2, indexing="ij")
    return SourceGrid(box=box, n=n, samples=f(x1, x2))


def _pi_box() -> Box2:
    return Box2(np.array([-math.pi, -math.pi]), np.array([math.pi, math.pi]))


class TestTaper:
    def test_invalid_fraction(self):
        for bad in (0.0, 0.5, -0.1, 0.7):
            with pytest.raises(ConfigurationError):
                TaperSpec(bad)

    def test_plateau_is_one(self):
        box = Box2(np.zeros(2), np.ones(2))
        assert taper_weight(box, TaperSpec(0.2), (0.5, 0.5)) == 1.0
        assert taper_weight(box, TaperSpec(0.2), (0.3, 0.7)) == 1.0

    def test_edge_is_zero(self):
        box = Box2(np.zeros(2), np.ones(2))
        assert taper_weight(box, TaperSpec(0.2), (0.0, 0.5)) == 0.0
        assert taper_weight(box, TaperSpec(0.2), (0.4, 1.0)) == 0.0

    def test_rise_midpoint_is_half(self):
        # eta(1/2) = e/(e+e) = 1/2 exactly, even in floating point
        box = Box2(np.zeros(2), np.ones(2))
        assert taper_weight(box, TaperSpec(0.2), (0.1, 0.5)) == 0.5

    def test_monotone_rise(self):
        box = Box2(np.zeros(2), np.ones(2))
        xs = np.linspace(0.0, 0.2, 50)
        ws = [taper_weight(box, TaperSpec(0.2), (x, 0.5)) for x in xs]
        assert all(b >= a for a, b in zip(ws, ws[1:]))

    def test_outside_box_rejected(self):
        box = Box2(np.zeros(2), np.ones(2))
        with pytest.raises(DomainError):
            taper_weight(box, TaperSpec(0.2), (1.5, 0.5))

    def test_required_margin(self):
        assert abs(required_margin(TaperSpec(0.1)) - 0.125) <= 1e-15
        assert abs(required_margin(TaperSpec(0.2)) - 1.0 / 3.0) <= 1e-15


class TestSourceGrid:
    def test_bad_grid_size(self):
        box = bounding_box(UNIT_DISC, 1.0)
        with pytest.raises(ConfigurationError):
            SourceGrid(box=box, n=33, samples=np.zeros((33, 33)))

    def test_shape_mismatch(self):
        box = bounding_box(UNIT_DISC, 1.0)
        with pytest.raises(ConfigurationError):
            SourceGrid(box=box, n=32, samples=np.zeros((32, 16)))

    def test_nonfinite_samples(self):
        box = bounding_box(UNIT_DISC, 1.0)
        samples = np.zeros((32, 32))
        samples[3, 4] = np.nan
        with pytest.raises(ConfigurationError):
            SourceGrid(box=box, n=32, samples=samples)

    def test_rectangular_box_rejected(self):
        box = Box2(np.zeros(2), np.array([2.0, 1.0]))
        with pytest.raises(ConfigurationError):
            SourceGrid(box=box, n=32, samples=np.zeros((32, 32)))


class TestExtendSource:
    def test_domain_samples_untouched(self):
        box = bounding_box(UNIT_DISC, 1.0)
        grid = _grid_samples(box, 64, lambda a, b: np.ones_like(a))
        ext = extend_source(lambda a, b: 1.0, UNIT_DISC, box, 64, TaperSpec(0.1))
        side = float(box.side[0])
        c = box.min_corner[0] + side * np.arange(64) / 64
        x1, x2 = np.meshgrid(c, c, indexing="ij")
        inside = x1 ** 2 + x2 ** 2 < 1.0
        assert np.array_equal(ext.samples[inside], grid.samples[inside])

    def test_boundary_ring_is_zero(self):
        box = bounding_box(UNIT_DISC, 1.0)
        ext = extend_source(lambda a, b: 1.0, UNIT_DISC, box, 64, TaperSpec(0.1))
        assert np.all(ext.samples[0, :] == 0.0)
        assert np.all(ext.samples[:, 0] == 0.0)

    def test_plateau_containment_enforced(self):
        box = bounding_box(UNIT_DISC, 0.0)
        with pytest.raises(ConfigurationError, match="box_margin"):
            extend_source(lambda a, b: 1.0, UNIT_DISC, box, 64, TaperSpec(0.1))

    def test_determinism(self):
        box = bounding_box(UNIT_DISC, 1.0)
        f = lambda a, b: math.sin(a) * math.cos(b)
        g1 = extend_source(f, UNIT_DISC, box, 64, TaperSpec(0.1))
        g2 = extend_source(f, UNIT_DISC, box, 64, TaperSpec(0.1))
        assert np.array_equal(g1.samples, g2.samples)


class TestSolveParticular:
    def test_zero_source_zero_field(self):
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.zeros_like(a))
        sf = solve_particular(ModifiedHelmholtz(1.0), grid)
        assert np.all(sf.coeffs == 0.0)
        assert eval_particular(sf, (0.3, -0.4)) == 0.0

    def test_single_cosine_mode(self):
        # L = lap - 1 applied to cos(x1) gives -2 cos(x1); feeding
        # f = cos(x1) therefore must return u_p = -cos(x1)/2.
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.cos(a))
        sf = solve_particular(ModifiedHelmholtz(1.0), grid)
        assert abs(eval_particular(sf, (0.0, 0.0)) + 0.5) <= 1e-12
        assert abs(eval_particular(sf, (1.0, 0.5)) + 0.5 * math.cos(1.0)) <= 1e-12

    def test_helmholtz_detuned_mode(self):
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.cos(2.0 * a))
        sf = solve_particular(Helmholtz(1.0), grid)
        # sigma(2, 0) = 1 - 4 = -3
        assert abs(eval_particular(sf, (0.0, 0.0)) + 1.0 / 3.0) <= 1e-12

    def test_resonant_mode_raises(self):
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.cos(a))
        with pytest.raises(ResonantBoxError, match="resonant"):
            solve_particular(Helmholtz(1.0), grid)

    def test_resonant_mode_without_energy_clamped(self):
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.cos(2.0 * a))
        sf = solve_particular(Helmholtz(1.0), grid)
        assert np.all(np.isfinite(sf.coeffs))

    def test_poisson_compensator_attached(self):
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.ones_like(a))
        sf = solve_particular(Poisson(), grid)
        assert isinstance(sf.compensator, PoissonQuad)
        assert abs(sf.compensator.mean - 1.0) <= 1e-14

    def test_convdiff_zero_reaction_compensator(self):
        op = ConvectionDiffusion(diffusivity=1.0, velocity=(2.0, 0.0), reaction=0.0)
        grid = _grid_samples(_pi_box(), 32, lambda a, b: np.ones_like(a))
        sf = solve_particular(op, grid)
        assert isinstance(sf.compensator, ConvectionLinear)


class TestCompensators:
    def test_poisson_quad(self):
        c = PoissonQuad(mean=2.0, center=np.zeros(2))
        assert c.value(1.0, 0.0) == 0.5
        assert np.allclose(c.gradient(1.0, 0.0), (1.0, 0.0))

    def test_convection_linear(self):
        c = ConvectionLinear(mean=3.0, velocity=np.array([2.0, 0.0]),
                             center=np.zeros(2))
        assert c.value(1.0, 0.0) == 1.5
        assert np.allclose(c.gradient(1.0, 0.0), (1.5, 0.0))

    def test_compensator_only_field(self):
        sf = SpectralField(box=_pi_box(), n=32,
                           coeffs=np.zeros((32, 32), dtype=complex),
                           compensator=PoissonQuad(mean=2.0, center=np.zeros(2)))
        assert eval_particular(sf, (1.0, 0.0)) == 0.5
        assert np.allclose(eval_particular_gradient(sf, (1.0, 0.0)), (1.0, 0.0))


class TestEvaluation:
    def _field(self, n=64):
        f = lambda a, b: np.cos(a) * np.sin(2.0 * b) + 0.5 * np.cos(3.0 * a + b)
        grid = _grid_samples(_pi_box(), n, f)
        return solve_particular(ModifiedHelmholtz(1.0), grid)

    def test_grid_point_matches_ifft(self):
        sf = self._field()
        n = sf.n
        field_samples = np.fft.ifft2(sf.coeffs * n * n).real
        side = float(sf.box.side[0])
        for i, j in [(0, 0), (5, 11), (32, 17)]:
            x = sf.box.min_corner + side * np.array([i, j]) / n
            got = eval_particular(sf, x)
            assert abs(got - field_samples[i, j]) <= 1e-12 * max(
                1.0, abs(field_samples[i, j]))

    def test_spectral_exactness(self):
        # band-limited source: the discrete solve is exact up to roundoff
        sf = self._field()
        exact = lambda a, b: (-math.cos(a) * math.sin(2.0 * b) / 6.0
                              - 0.5 * math.cos(3.0 * a + b) / 11.0)
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = rng.uniform(-2.5, 2.5, size=2)
            assert abs(eval_particular(sf, p) - exact(p[0], p[1])) <= 1e-10

    def test_gradient_matches_central_differences(self):
        sf = self._field()
        rng = np.random.default_rng(9)
        for _ in range(8):
            p = rng.uniform(-2.0, 2.0, size=2)
            h = 1e-6
            fd = np.array([
                (eval_particular(sf, p + (h, 0)) - eval_particular(sf, p - (h, 0))),
                (eval_particular(sf, p + (0, h)) - eval_particular(sf, p - (0, h))),
            ]) / (2.0 * h)
            assert np.allclose(eval_particular_gradient(sf, p), fd, atol=1e-6)

    def test_outside_box_rejected(self):
        sf = self._field()
        with pytest.raises(DomainError):
            eval_particular(sf, (10.0, 0.0))
        with pytest.raises(DomainError):
            eval_particular_gradient(sf, (0.0, -10.0))


class TestEndToEndResidual:
    """extend_source + solve_particular must satisfy L u_p = f inside the
    physical domain, where the taper weight is identically one."""

    PROBES = [(0.0, 0.0), (0.5, 0.2), (-0.3, 0.6), (0.1, -0.7), (-0.5, -0.4)]

    def _residual(self, op, f, n):
        box = bounding_box(UNIT_DISC, 1.0)
        grid = extend_source(f, UNIT_DISC, box, n, TaperSpec(0.1))
        sf = solve_particular(op, grid)
        u = lambda a, b: eval_particular(sf, (a, b))
        worst = 0.0
        for p in self.PROBES:
            r = apply_operator_fd(op, u, p, 1e-3) - f(p[0], p[1])
            worst = max(worst, abs(r))
        return worst

    def test_modhelm_residual_small(self):
        f = lambda a, b: math.sin(math.pi * a) * math.sin(math.pi * b)
        assert self._residual(ModifiedHelmholtz(1.0), f, 128) <= 1e-3

    def test_convdiff_residual_small(self):
        op = ConvectionDiffusion(diffusivity=1.0, velocity=(2.0, 0.0), reaction=1.0)
        f = lambda a, b: 2.0 * math.exp(a)
        assert self._residual(op, f, 128) <= 1e-3

    def test_refinement_improves_residual(self):
        f = lambda a, b: math.sin(math.pi * a) * math.sin(math.pi * b)
        coarse = self._residual(ModifiedHelmholtz(1.0), f, 64)
        fine = self._residual(ModifiedHelmholtz(1.0), f, 128)
        assert fine <= coarse
