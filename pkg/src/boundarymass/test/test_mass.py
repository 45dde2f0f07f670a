import math

import numpy as np
import pytest
import sympy

from boundarymass.constraints import check_dec, dec_sample
from boundarymass.datasets import DatasetDescriptor, build_dataset
from boundarymass.errors import ConvergenceError, DomainError, InputError
from boundarymass.geometry import ChartDomain
from boundarymass.mass import (
    FluxSampler,
    adm_normalization,
    build_hemisphere_rule,
    default_exponent,
    einstein_energy_crosscheck,
    energy_momentum_flat,
    energy_momentum_pair,
    extrapolate,
    invariance_test,
    mass_functional_hyp,
    mass_inequality_report)
from boundarymass.models import (
    CausalClass,
    FlatIsometry,
    HyperbolicIsometry,
    boost_matrix,
    change_model,
    rotation_about_normal,
    static_potentials)


RADII = [16.0, 32.0, 64.0, 128.0]
ORDERS = (8, 16)


def example(name, n=3, **kw):
    return build_dataset(DatasetDescriptor(name, n, **kw))


class TestHemisphereRule:
    """
    Tests for `build_hemisphere_rule`.
    """
    def test_flat_area(self):
        rule = build_hemisphere_rule(ChartDomain(3), 3.0, ORDERS)
        assert math.fsum(rule.weights) == pytest.approx(18.0 * math.pi)
        assert math.fsum(rule.corner_weights) == pytest.approx(6.0 * math.pi)
        assert np.allclose(np.linalg.norm(rule.normals, axis=1), 1.0)

    def test_polar_area(self):
        """
        The polar chart measures coordinate spheres with their Euclidean
        area, and the unit radial normal has Euclidean length
        ``sqrt(1 + r^2)``.
        """
        rule = build_hemisphere_rule(
            ChartDomain(3, 'hyperbolic-polar'), 2.0, ORDERS)
        assert math.fsum(rule.weights) == pytest.approx(8.0 * math.pi)
        assert np.allclose(np.linalg.norm(rule.normals, axis=1),
                           math.sqrt(5.0))

    def test_ball_area(self):
        r = 0.5
        rule = build_hemisphere_rule(
            ChartDomain(3, 'hyperbolic-ball', 0.2), r, ORDERS)
        sinh = 2.0 * r / (1.0 - r * r)
        assert math.fsum(rule.weights) == pytest.approx(
            2.0 * math.pi * sinh ** 2)

    def test_inside(self):
        with pytest.raises(DomainError):
            build_hemisphere_rule(ChartDomain(3, r0=2.0), 1.0, ORDERS)
        with pytest.raises(InputError):
            build_hemisphere_rule(ChartDomain(3), 3.0, (1, 4))


class TestExtrapolate:
    """
    Tests for `extrapolate`.
    """
    def test_exact(self):
        radii = [10.0, 20.0, 40.0, 80.0]
        values = [3.0 + 5.0 / r ** 2 for r in radii]
        fit = extrapolate(radii, values, 2.0)
        assert fit.value == pytest.approx(3.0, abs=1e-12)
        assert fit.error < 1e-12
        assert math.isnan(fit.extrapolants[0])
        assert len(fit.extrapolants) == len(radii)

    def test_divergent(self):
        radii = [10.0, 20.0, 40.0]
        with pytest.raises(ConvergenceError) as e:
            extrapolate(radii, [r ** 2 for r in radii], 1.0, label='E')
        assert e.value.radii[-1] == 40.0

    def test_too_few(self):
        with pytest.raises(InputError):
            extrapolate([10.0, 20.0], [1.0, 1.0], 1.0)
        with pytest.raises(InputError):
            extrapolate([10.0, 20.0, 30.0], [1.0, 1.0, 1.0], 0.0)


class TestFlatMass:
    """
    Tests for `energy_momentum_flat`.
    """
    def test_trivial(self):
        report = energy_momentum_flat(
            example('flat-trivial'), RADII[:3], ORDERS)
        assert report.E == 0.0
        assert np.all(report.P == 0.0)
        assert report.causal_class == CausalClass.ZERO

    def test_schwarzschild(self):
        """
        The energy of Schwarzschild data is ``8 pi m`` in three dimensions,
        that is ``m`` after ADM normalization.
        """
        report = energy_momentum_flat(example('schwarzschild'), RADII, ORDERS)
        assert report.E == pytest.approx(8.0 * math.pi, rel=1e-3)
        assert report.adm_normalized == pytest.approx(1.0, rel=1e-3)
        assert np.max(np.abs(report.P)) < 1e-10
        assert report.causal_class == CausalClass.TIMELIKE_FUTURE
        assert len(report.table) == len(RADII)
        assert default_exponent(example('schwarzschild')) == 1.0

    def test_radius_sequence_independence(self):
        """
        Doubling and tripling radius sequences extrapolate to the same
        energy within the combined error estimates.
        """
        data = example('schwarzschild')
        doubling = energy_momentum_flat(
            data, [10.0 * 2 ** k for k in range(4)], ORDERS)
        tripling = energy_momentum_flat(
            data, [10.0 * 3 ** k for k in range(4)], ORDERS)
        assert abs(doubling.E - tripling.E) <= (
            doubling.E_error + tripling.E_error + 1e-9 * doubling.E)
        for report in (doubling, tripling):
            assert report.E == pytest.approx(8.0 * math.pi, rel=1e-2)

    def test_schwarzschild_higher_dimension(self):
        data = example('schwarzschild', 4, params={'m': 0.5})
        report = energy_momentum_flat(data, RADII, ORDERS)
        assert report.adm_normalized == pytest.approx(0.5, rel=1e-3)

    def test_bowen_york(self):
        """
        Bowen-York data carry momentum ``8 pi p`` and no energy.
        """
        report = energy_momentum_flat(
            example('bowen-york', params={'p': [0.1, -0.05, 0.0]}),
            RADII[:3], ORDERS)
        assert report.E == 0.0
        assert report.P == pytest.approx(
            8.0 * math.pi * np.array([0.1, -0.05]), rel=1e-8)
        assert report.causal_class == CausalClass.SPACELIKE

    def test_bowen_york_angular_integral(self):
        """
        The momentum matches the hemisphere integral of ``2 h(nu, .)``,
        computed symbolically.
        """
        theta, phi = sympy.symbols('theta phi')
        p = [sympy.Rational(1, 10), sympy.Rational(-1, 20), 0]
        nu = [sympy.sin(theta) * sympy.cos(phi),
              sympy.sin(theta) * sympy.sin(phi), sympy.cos(theta)]
        p_nu = sum(a * b for a, b in zip(p, nu))
        c = sympy.Rational(3, 2)
        expected = [
            float(sympy.integrate(
                2 * c * (p[i] + nu[i] * p_nu) * sympy.sin(theta),
                (theta, 0, sympy.pi / 2), (phi, 0, 2 * sympy.pi)))
            for i in range(2)]
        report = energy_momentum_flat(
            example('bowen-york', params={'p': [0.1, -0.05, 0.0]}),
            RADII[:3], ORDERS)
        assert report.P == pytest.approx(np.array(expected), rel=1e-8)

    def test_hyperbolic(self):
        with pytest.raises(DomainError):
            energy_momentum_flat(example('hyperbolic-trivial'), RADII, ORDERS)


class TestHyperbolicMass:
    """
    Tests for `energy_momentum_pair` and `mass_functional_hyp`.
    """
    def test_ads_schwarzschild(self):
        report = energy_momentum_pair(
            example('ads-schwarzschild'), RADII, ORDERS)
        assert report.energy[0] == pytest.approx(0.8 * math.pi, rel=1e-3)
        # The spatial components vanish by symmetry, up to the 1% accuracy of
        # the finite-difference flux.
        assert np.max(np.abs(report.energy[1:])) < 1e-2 * report.energy[0]
        assert np.max(np.abs(report.momentum)) == 0.0
        assert report.energy_class == CausalClass.TIMELIKE_FUTURE
        assert report.momentum_class == CausalClass.ZERO
        assert report.adm_normalized[0] == pytest.approx(
            0.8 * math.pi / adm_normalization(3), rel=1e-3)

    def test_ball_matches_polar(self):
        """
        Ball data with the ball potential give the polar value. The metric
        pulled back twice loses its analytic derivatives, so the flux
        carries finite-difference roundoff that grows with the radius.
        """
        data = example('ads-schwarzschild')
        ball = change_model(data, 'hyperbolic-ball')
        polar = mass_functional_hyp(
            data, static_potentials(data.domain)[0], None, RADII, ORDERS)
        converted = mass_functional_hyp(
            ball, static_potentials(ball.domain)[0], None, RADII, ORDERS)
        assert converted.value == pytest.approx(polar.value, rel=2e-3)

    def test_gauge_perturbation(self):
        """
        A pure gauge perturbation has vanishing mass.
        """
        report = energy_momentum_pair(
            example('gauge-perturbation'), RADII, ORDERS)
        assert np.max(np.abs(report.energy)) < 1e-4

    def test_flat(self):
        with pytest.raises(DomainError):
            energy_momentum_pair(example('flat-trivial'), RADII, ORDERS)


class TestFluxSampler:
    """
    Tests for `FluxSampler`.
    """
    def test_missing_terms(self):
        data = example('bowen-york')
        sampler = FluxSampler(
            data, build_hemisphere_rule(data.domain, 10.0, ORDERS))
        assert sampler.flux(None, None) == (0.0, 0.0, 0.0)


class TestEinsteinCrosscheck:
    """
    Tests for `einstein_energy_crosscheck`.
    """
    def test_schwarzschild(self):
        data = example('schwarzschild')
        check = einstein_energy_crosscheck(
            data, RADII, (6, 12), reference=8.0 * math.pi)
        assert check.relative_deviation < 1e-2


class TestInvariance:
    """
    Tests for `invariance_test`.
    """
    def test_rotation(self):
        data = example('bowen-york', params={'p': [0.1, 0.05, 0.0]})
        A = FlatIsometry(rotation_about_normal(3, 0.7))
        report = invariance_test(data, A, RADII[:3], ORDERS, tol=1e-6)
        assert report.passed

    def test_boost(self):
        data = example('ads-schwarzschild')
        A = HyperbolicIsometry(boost_matrix(3, 0.3), data.domain)
        report = invariance_test(
            data, A, [8.0, 16.0, 32.0, 64.0], (16, 32), tol=1e-4)
        assert report.passed
        assert report.after.energy[1] != pytest.approx(0.0, abs=1e-3)


class TestMassInequality:
    """
    Tests for `mass_inequality_report`.
    """
    def test_dec_violated(self):
        data = example('bowen-york')
        report = energy_momentum_flat(data, RADII[:3], ORDERS)
        dec = check_dec(data, dec_sample(data.domain, points=3))
        inequality = mass_inequality_report(report, dec)
        assert not inequality.dec_passed
        assert not inequality.inequality_holds
        assert inequality.margin < 0
        assert 'no inequality is expected' in inequality.message

    def test_schwarzschild(self):
        data = example('schwarzschild')
        report = energy_momentum_flat(data, RADII, ORDERS)
        dec = check_dec(data, dec_sample(data.domain, points=3), 1e-8)
        inequality = mass_inequality_report(report, dec)
        assert inequality.dec_passed
        assert inequality.inequality_holds
        assert inequality.classes == ['timelike-future']
