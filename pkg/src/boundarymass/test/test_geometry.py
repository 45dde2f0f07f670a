import math

import numpy as np
import pytest
import sympy

from boundarymass.datasets import DatasetDescriptor, build_dataset
from boundarymass.errors import (
    DegenerateLapseError,
    DomainError,
    EvalError,
    InputError,
    SingularMetricError,
    StencilError)
from boundarymass.geometry import (
    ChartDomain,
    InitialDataSet,
    TensorField,
    boundary_geometry,
    constant_field,
    curvature,
    difference,
    fd_derivative,
    killing_development_check,
    metric_inverse,
    zero_field)
from boundarymass.models import (
    killing_basis,
    reference_metric,
    static_potentials)


def warped_metric(n):
    """
    ``dx_n^2 + (1 + x_n)^2 (dx_1^2 + ... + dx_(n-1)^2)``.
    """
    def _evaluate(p):
        g = (1.0 + p[-1]) ** 2 * np.eye(n)
        g[-1, -1] = 1.0
        return g
    return TensorField(_evaluate, symmetric=True, name='warped')


def conformal_oracle(n, point):
    """
    Scalar curvature of ``exp(2u) delta`` at ``point`` from the conformal
    change formula, and the field itself.
    """
    xs = sympy.symbols('x1:{}'.format(n + 1))
    u = sympy.Rational(1, 10) * xs[0] * xs[-1] + sympy.Rational(1, 20) * (
        xs[1] ** 2)
    grad = [sympy.diff(u, x) for x in xs]
    lap = sum(sympy.diff(u, x, 2) for x in xs)
    scalar = sympy.exp(-2 * u) * (
        -2 * (n - 1) * lap - (n - 2) * (n - 1) * sum(d ** 2 for d in grad))
    value = float(scalar.subs(dict(zip(xs, point))))
    u_func = sympy.lambdify(xs, u)

    def _evaluate(p):
        return math.exp(2.0 * u_func(*p)) * np.eye(n)

    return value, TensorField(_evaluate, symmetric=True, name='conformal')


class TestChartDomain:
    """
    Tests for `ChartDomain`.
    """
    def test_contains(self):
        """
        Points need a non-negative last coordinate, and must lie in the unit
        ball for the ball model.
        """
        flat = ChartDomain(3)
        assert flat.contains([5.0, -2.0, 0.0])
        assert not flat.contains([0.0, 0.0, -1e-9])
        assert not flat.contains([0.0, 0.0])
        ball = ChartDomain(3, 'hyperbolic-ball', 0.5)
        assert ball.contains([0.5, 0.0, 0.1])
        assert not ball.contains([0.9, 0.5, 0.0])

    def test_on_boundary(self):
        domain = ChartDomain(4)
        assert domain.on_boundary([1.0, 2.0, 3.0, 0.0])
        assert not domain.on_boundary([1.0, 2.0, 3.0, 1e-3])

    def test_check_point(self):
        with pytest.raises(DomainError):
            ChartDomain(3).check_point([0.0, 0.0, -1.0])

    @pytest.mark.parametrize('args', [
        (2, 'flat', 1.0),
        (3, 'spherical', 1.0),
        (3, 'flat', 0.0),
        (3, 'hyperbolic-ball', 1.5),
    ])
    def test_invalid(self, args):
        with pytest.raises(InputError):
            ChartDomain(*args)


class TestTensorField:
    """
    Tests for `TensorField`.
    """
    def test_non_finite(self):
        """
        Non-finite values raise `EvalError` naming the field.
        """
        field = TensorField(lambda p: np.full((3, 3), np.nan), name='bad')
        with pytest.raises(EvalError) as e:
            field([1.0, 1.0, 1.0])
        assert e.value.name == 'bad'

    def test_check_symmetric(self):
        skew = TensorField(lambda p: np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert not skew.check_symmetric([[0.0, 1.0]])
        assert constant_field(np.eye(2), (0, 2)).check_symmetric([[0.0, 1.0]])


class TestDifference:
    """
    Tests for `difference`.
    """
    def test_central(self):
        value = difference(lambda q: q[0] ** 3, [1.0, 1.0], 0, 1e-3)
        assert value == pytest.approx(3.0, abs=1e-5)

    def test_one_sided_at_boundary(self):
        """
        At the boundary the stencil points into the domain and stays second
        order.
        """
        domain = ChartDomain(3)
        value = difference(lambda q: q[2] ** 2 + q[2], [0.3, 0.2, 0.0], 2,
                           1e-3, domain.contains)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_stencil_error(self):
        with pytest.raises(StencilError) as e:
            difference(lambda q: q[0], [0.0, 0.0], 1, 1e-3,
                       lambda q: q[1] == 0.0)
        assert e.value.axis == 1

    def test_fd_derivative_mixed(self):
        field = TensorField(lambda p: np.array(p[0] ** 2 * p[1]),
                            rank=(0, 0))
        value = fd_derivative(field, [1.5, 2.0], (0, 1), 1e-4)
        assert float(value) == pytest.approx(3.0, abs=1e-6)


class TestMetricInverse:
    """
    Tests for `metric_inverse`.
    """
    def test_inverse(self):
        g = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert np.allclose(metric_inverse(g) @ g, np.eye(2))

    def test_indefinite(self):
        with pytest.raises(SingularMetricError):
            metric_inverse(np.diag([1.0, -1.0]), [0.0, 1.0])

    def test_lorentzian(self):
        g = np.diag([-1.0, 1.0, 2.0])
        assert np.allclose(metric_inverse(g, lorentzian=True) @ g, np.eye(3))

    def test_lorentzian_singular(self):
        with pytest.raises(SingularMetricError):
            metric_inverse(np.diag([-1.0, 1.0, 0.0]), [0.0, 1.0],
                           lorentzian=True)


class TestCurvature:
    """
    Tests for `curvature`.
    """
    @pytest.mark.parametrize('model', ['hyperbolic-polar', 'hyperbolic-ball'])
    def test_hyperbolic_constant_curvature(self, model):
        """
        The hyperbolic metric has sectional curvature -1.
        """
        domain = ChartDomain(3, model, 0.5)
        b = reference_metric(domain)
        p = np.array([0.2, -0.1, 0.3])
        bundle = curvature(b, p)
        gp = b(p)
        expected = -(np.einsum('ik,jl->ijkl', gp, gp) -
                     np.einsum('il,jk->ijkl', gp, gp))
        assert np.max(np.abs(bundle.riemann - expected)) < 1e-9
        assert np.max(np.abs(bundle.ricci + 2.0 * gp)) < 1e-9
        assert bundle.scalar == pytest.approx(-6.0, abs=1e-9)
        assert bundle.symmetry_residual < 1e-9
        assert bundle.bianchi_residual < 1e-9

    def test_conformal_scalar_curvature(self):
        """
        Finite-difference scalar curvature matches the symbolic value.
        """
        point = [0.4, -0.3, 0.7]
        expected, g = conformal_oracle(3, point)
        bundle = curvature(g, point, 1e-4)
        assert bundle.scalar == pytest.approx(expected, abs=1e-5)


class TestBoundaryGeometry:
    """
    Tests for `boundary_geometry`.
    """
    def test_warped_boundary(self):
        """
        The boundary of ``dx_n^2 + (1 + x_n)^2 delta`` is umbilic with mean
        curvature ``n - 1`` with respect to the inward normal.
        """
        n = 4
        geo = boundary_geometry(warped_metric(n), [0.3, -0.2, 0.5, 0.0])
        assert np.allclose(geo.normal, [0.0, 0.0, 0.0, 1.0])
        assert np.allclose(geo.second_fundamental_form, np.eye(n - 1),
                           atol=1e-7)
        assert geo.mean_curvature == pytest.approx(n - 1, abs=1e-6)

    def test_not_on_boundary(self):
        with pytest.raises(DomainError):
            boundary_geometry(warped_metric(3), [0.0, 0.0, 1.0])


class TestInitialDataSet:
    """
    Tests for `InitialDataSet`.
    """
    def test_decay_threshold(self):
        domain = ChartDomain(3, 'hyperbolic-polar')
        b = reference_metric(domain)
        with pytest.raises(InputError):
            InitialDataSet(domain, b, zero_field(3, (0, 2)), decay=1.5)

    def test_cosmological_constant(self):
        domain = ChartDomain(3)
        g = reference_metric(domain)
        data = InitialDataSet(domain, g, zero_field(3, (0, 2)), decay=1.0)
        assert data.cosmological_constant == 0.0
        with pytest.raises(InputError):
            InitialDataSet(domain, g, zero_field(3, (0, 2)), 1.0,
                           cosmological_constant=-1.0)


class TestKillingDevelopmentCheck:
    """
    Tests for `killing_development_check`.
    """
    def trivial(self):
        domain = ChartDomain(3)
        return InitialDataSet(domain, reference_metric(domain),
                              zero_field(3, (0, 2)), decay=1.0)

    def test_flat_translation(self):
        data = self.trivial()
        report = killing_development_check(
            data, static_potentials(data.domain)[0],
            killing_basis(data.domain)[0], [0.2, 0.1, 1.0], 1e-3)
        assert report.precondition_ok
        assert not report.refused
        assert report.max_residual < 1e-6

    def test_refused(self):
        """
        A rotation has non-constant norm, so the development is refused.
        """
        data = self.trivial()
        rotation = TensorField(
            lambda p: np.array([-p[1], p[0], 0.0]), rank=(1, 0),
            d_eval=lambda p: np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0],
                                       [0.0, 0.0, 0.0]]))
        report = killing_development_check(
            data, static_potentials(data.domain)[0], rotation,
            [0.2, 0.1, 1.0], 1e-3)
        assert report.refused
        assert not report.precondition_ok
        assert report.spatial_residual is None

    def test_degenerate_lapse(self):
        data = self.trivial()
        lapse = constant_field(0.0, (0, 0))
        with pytest.raises(DegenerateLapseError):
            killing_development_check(
                data, lapse, killing_basis(data.domain)[0], [0.0, 0.0, 1.0])

    def test_flat_static(self):
        """
        ``V = 1`` and ``W = 0`` on flat data develop into Minkowski space.
        """
        data = self.trivial()
        report = killing_development_check(
            data, constant_field(1.0, (0, 0)), zero_field(3, (1, 0)),
            [0.2, 0.1, 1.0], 1e-3)
        assert not report.refused
        assert report.max_residual < 1e-8

    def test_schwarzschild_product(self):
        """
        The static development of a time-symmetric slice is a product, so its
        spatial curvature is that of the slice and the rest vanishes.
        """
        data = build_dataset(DatasetDescriptor('schwarzschild'))
        report = killing_development_check(
            data, constant_field(1.0, (0, 0)), zero_field(3, (1, 0)),
            [1.0, 0.5, 2.0], 1e-3)
        assert report.precondition_ok
        assert report.spatial_residual < 1e-4
        assert report.mixed_residual < 1e-4
        assert report.normal_residual < 1e-4

    def test_umbilic_precondition(self):
        """
        ``h = c delta`` with ``V = 1`` and ``W = 0`` violates the Killing
        equation and is refused.
        """
        domain = ChartDomain(3)
        data = InitialDataSet(domain, reference_metric(domain),
                              constant_field(0.3 * np.eye(3), (0, 2)),
                              decay=1.0)
        report = killing_development_check(
            data, constant_field(1.0, (0, 0)), zero_field(3, (1, 0)),
            [0.2, 0.1, 1.0], 1e-3)
        assert report.refused
        assert report.lie_residual == pytest.approx(0.6)
