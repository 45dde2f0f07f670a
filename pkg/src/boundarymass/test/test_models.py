import math

import numpy as np
import pytest

from boundarymass.errors import (
    DomainError,
    InputError,
    InvalidIsometryError)
from boundarymass.geometry import ChartDomain, InitialDataSet, zero_field
from boundarymass.models import (
    CausalClass,
    FlatIsometry,
    HyperbolicIsometry,
    ball_to_polar,
    boost_matrix,
    boundary_alignment,
    causal_classify,
    change_model,
    from_hyperboloid,
    isometry_apply,
    killing_basis,
    killing_residual,
    lorentz_inner,
    perturbation,
    polar_to_ball,
    reference_metric,
    rotation_about_normal,
    static_potentials,
    static_residual,
    to_hyperboloid,
    transport_field)


MODELS = ['flat', 'hyperbolic-polar', 'hyperbolic-ball']


def sample_points(model):
    if model == 'hyperbolic-ball':
        return [[0.1, -0.2, 0.3], [0.3, 0.2, 0.0], [-0.4, 0.1, 0.05]]
    return [[0.7, -1.2, 0.9], [1.5, 0.5, 0.0], [-2.0, 0.3, 2.5]]


def reference_data(model, n=3):
    domain = ChartDomain(n, model, 0.5)
    return InitialDataSet(domain, reference_metric(domain),
                          zero_field(n, (0, 2)),
                          decay=float(n) if domain.is_hyperbolic else 1.0)


class TestStaticPotentials:
    """
    Tests for `static_potentials`.
    """
    @pytest.mark.parametrize('model', MODELS)
    def test_count(self, model):
        domain = ChartDomain(4, model, 0.5)
        expected = 1 if domain.is_flat else 4
        assert len(static_potentials(domain)) == expected

    @pytest.mark.parametrize('model', MODELS)
    def test_static_equations(self, model):
        """
        Every basis potential solves the interior static equation, and the
        boundary equation at boundary points.
        """
        domain = ChartDomain(3, model, 0.5)
        for V in static_potentials(domain):
            for p in sample_points(model):
                interior, boundary = static_residual(domain, V, p)
                assert interior < 1e-10
                if domain.on_boundary(p):
                    assert boundary < 1e-10
                else:
                    assert boundary is None

    def test_model_change(self):
        """
        The polar and ball potentials agree under the change of model.
        """
        polar = static_potentials(ChartDomain(3, 'hyperbolic-polar'))
        ball = static_potentials(ChartDomain(3, 'hyperbolic-ball', 0.5))
        z = np.array([0.2, -0.3, 0.1])
        for Vp, Vb in zip(polar, ball):
            assert float(Vp(ball_to_polar(z))) == pytest.approx(
                float(Vb(z)), abs=1e-12)


class TestKillingBasis:
    """
    Tests for `killing_basis`.
    """
    @pytest.mark.parametrize('model', MODELS)
    def test_killing(self, model):
        domain = ChartDomain(3, model, 0.5)
        for W in killing_basis(domain):
            for p in sample_points(model):
                assert killing_residual(domain, W, p) < 1e-10

    @pytest.mark.parametrize('model', MODELS)
    def test_boundary_alignment(self, model):
        """
        Translations are tangent to the flat boundary, the hyperbolic fields
        are normal to it.
        """
        domain = ChartDomain(3, model, 0.5)
        p = sample_points(model)[1]
        for W in killing_basis(domain):
            assert boundary_alignment(domain, W, p) < 1e-12

    def test_normal_on_boundary(self):
        """
        ``W_(a) = V_(a) * normal`` along the hyperbolic boundary.
        """
        domain = ChartDomain(3, 'hyperbolic-polar')
        p = np.array([1.5, 0.5, 0.0])
        normal = np.array([0.0, 0.0, 1.0])
        for V, W in zip(static_potentials(domain), killing_basis(domain)):
            assert np.allclose(W(p), float(V(p)) * normal, atol=1e-12)

    def test_alignment_off_boundary(self):
        domain = ChartDomain(3)
        with pytest.raises(DomainError):
            boundary_alignment(domain, killing_basis(domain)[0],
                               [0.0, 0.0, 1.0])


class TestModelChange:
    """
    Tests for `change_model` and the hyperboloid maps.
    """
    def test_inverse_maps(self):
        y = np.array([1.2, -0.4, 0.8])
        assert np.allclose(ball_to_polar(polar_to_ball(y)), y, atol=1e-12)

    @pytest.mark.parametrize('model', ['hyperbolic-polar', 'hyperbolic-ball'])
    def test_hyperboloid(self, model):
        domain = ChartDomain(3, model, 0.5)
        for p in sample_points(model):
            x = to_hyperboloid(domain, p)
            assert lorentz_inner(x, x) == pytest.approx(1.0, abs=1e-12)
            assert x[0] > 0
            assert np.allclose(from_hyperboloid(domain, x), p, atol=1e-12)

    def test_reference_metric(self):
        """
        The pulled back polar metric is the ball metric.
        """
        data = reference_data('hyperbolic-polar')
        ball = change_model(data, 'hyperbolic-ball')
        b = reference_metric(ball.domain)
        for z in sample_points('hyperbolic-ball'):
            assert np.allclose(ball.g(z), b(z), atol=1e-10)
        assert ball.domain.r0 == pytest.approx(
            0.5 / (1.0 + math.sqrt(1.25)))

    def test_round_trip_radius(self):
        data = reference_data('hyperbolic-polar')
        back = change_model(change_model(data, 'hyperbolic-ball'),
                            'hyperbolic-polar')
        assert back.domain.r0 == pytest.approx(data.domain.r0)

    def test_flat(self):
        with pytest.raises(InputError):
            change_model(reference_data('flat'), 'hyperbolic-ball')


class TestTransportField:
    """
    Tests for `transport_field`.
    """
    def test_static_potential(self):
        polar = ChartDomain(3, 'hyperbolic-polar', 0.5)
        ball = ChartDomain(3, 'hyperbolic-ball', 0.2)
        V = transport_field(static_potentials(ball)[0], polar)
        expected = static_potentials(polar)[0]
        for y in sample_points('hyperbolic-polar'):
            assert float(V(y)) == pytest.approx(float(expected(y)))
            assert np.allclose(V.d_eval(y), expected.d_eval(y), atol=1e-10)

    def test_rotation(self):
        """
        Rotations about the normal axis are the same field in both models.
        """
        polar = ChartDomain(3, 'hyperbolic-polar', 0.5)
        ball = ChartDomain(3, 'hyperbolic-ball', 0.2)
        W = transport_field(killing_basis(ball)[1], polar)
        expected = killing_basis(polar)[1]
        for y in sample_points('hyperbolic-polar'):
            assert np.allclose(W(y), expected(y), atol=1e-10)
        back = transport_field(W, ball)
        for z in sample_points('hyperbolic-ball'):
            assert np.allclose(back(z), killing_basis(ball)[1](z),
                               atol=1e-10)

    def test_same_model(self):
        polar = ChartDomain(3, 'hyperbolic-polar', 0.5)
        V = static_potentials(polar)[0]
        assert transport_field(V, polar) is V

    def test_invalid(self):
        polar = ChartDomain(3, 'hyperbolic-polar', 0.5)
        with pytest.raises(DomainError):
            transport_field(static_potentials(ChartDomain(3))[0], polar)
        with pytest.raises(InputError):
            transport_field(reference_metric(ChartDomain(3, 'hyperbolic-ball',
                                                         0.2)), polar)


class TestPerturbation:
    """
    Tests for `perturbation`.
    """
    @pytest.mark.parametrize('model', MODELS)
    def test_reference_vanishes(self, model):
        data = reference_data(model)
        f = perturbation(data)
        for p in sample_points(model):
            assert np.max(np.abs(f(p))) == 0.0
            assert np.max(np.abs(f.d_eval(p))) == 0.0
            assert np.max(np.abs(f.dd_eval(p))) == 0.0


class TestIsometries:
    """
    Tests for `FlatIsometry`, `HyperbolicIsometry` and `isometry_apply`.
    """
    def test_flat_invalid(self):
        Q = np.eye(3)
        Q[2, 2] = -1.0
        with pytest.raises(InvalidIsometryError):
            FlatIsometry(Q)
        with pytest.raises(InvalidIsometryError):
            FlatIsometry(np.eye(3), [0.0, 0.0, 1.0])

    def test_flat_momentum(self):
        A = FlatIsometry(rotation_about_normal(3, math.pi / 2))
        assert np.allclose(A.transform_momentum([1.0, 0.0]), [0.0, -1.0])
        assert A.transform_energy(2.0) == 2.0

    def test_hyperbolic_invalid(self):
        domain = ChartDomain(3, 'hyperbolic-polar')
        with pytest.raises(InvalidIsometryError):
            HyperbolicIsometry(2.0 * np.eye(4), domain)
        L = np.eye(4)
        L[0, 0] = L[3, 3] = math.cosh(0.5)
        L[0, 3] = L[3, 0] = math.sinh(0.5)
        with pytest.raises(InvalidIsometryError):
            HyperbolicIsometry(L, domain)
        with pytest.raises(InvalidIsometryError):
            HyperbolicIsometry(np.eye(4), ChartDomain(3))

    def test_boost_axis(self):
        with pytest.raises(InputError):
            boost_matrix(3, 0.5, axis=3)
        with pytest.raises(InputError):
            rotation_about_normal(3, 0.5, (0, 2))

    @pytest.mark.parametrize('model', ['hyperbolic-polar', 'hyperbolic-ball'])
    def test_boost_preserves_reference(self, model):
        """
        Boosts are isometries of the model and keep the boundary in place.
        """
        data = reference_data(model)
        A = HyperbolicIsometry(boost_matrix(3, 0.4), data.domain)
        moved = isometry_apply(data.domain, A, data)
        for p in sample_points(model):
            assert np.allclose(moved.g(p), data.g(p), atol=1e-10)
            if data.domain.on_boundary(p):
                assert A(p)[-1] == pytest.approx(0.0, abs=1e-12)

    def test_transform_energy_inverse(self):
        domain = ChartDomain(3, 'hyperbolic-polar')
        L = boost_matrix(3, 0.3)
        A = HyperbolicIsometry(L, domain)
        E = np.array([1.0, 0.2, 0.0])
        assert np.allclose(L[:3, :3] @ A.transform_energy(E), E)

    def test_wrong_chart(self):
        data = reference_data('hyperbolic-polar')
        other = ChartDomain(3, 'hyperbolic-polar', 2.0)
        A = HyperbolicIsometry(boost_matrix(3, 0.4), other)
        with pytest.raises(InputError):
            isometry_apply(other, A, data)


class TestCausalClassify:
    """
    Tests for `causal_classify`.
    """
    @pytest.mark.parametrize('v, expected', [
        ([0.0, 0.0, 0.0], CausalClass.ZERO),
        ([2.0, 1.0, 0.0], CausalClass.TIMELIKE_FUTURE),
        ([-2.0, 1.0, 0.0], CausalClass.TIMELIKE_PAST),
        ([1.0, 0.6, 0.8], CausalClass.NULL_FUTURE),
        ([-1.0, 0.0, 1.0], CausalClass.NULL_PAST),
        ([0.5, 1.0, 0.0], CausalClass.SPACELIKE),
    ])
    def test_classes(self, v, expected):
        assert causal_classify(v) == expected

    def test_tolerance(self):
        v = [1.0, 1.0 - 1e-9, 0.0]
        assert causal_classify(v) == CausalClass.TIMELIKE_FUTURE
        assert causal_classify(v, eps=1e-6) == CausalClass.NULL_FUTURE
