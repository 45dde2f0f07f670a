"""
Energy-momentum invariants of asymptotically flat and asymptotically
hyperbolic initial data sets with non-compact boundary.

Invariants are limits of hemisphere fluxes plus a corner-sphere term. Fluxes
are sampled on a sequence of coordinate radii and the limit is extrapolated
by fitting ``c0 + c1 r^(-s)``. Unit normals and areas are taken with respect
to the model metric. No normalization constants are inserted; the
``adm_normalized`` values divide by ``(n - 1) |S^(n-1)|`` for comparison with
the usual ADM conventions.
"""
import math
from collections import OrderedDict
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial

from . import _log as log
from . import _quadrature as quadrature
from ._types import Array
from .constraints import DecReport
from .errors import ConvergenceError, DomainError, InputError
from .geometry import (
    InitialDataSet,
    TensorField,
    christoffel,
    default_step,
    divergence,
    einstein_and_newton,
    gradient,
    metric_inverse)
from .models import (
    CausalClass,
    change_model,
    causal_classify,
    isometry_apply,
    killing_basis,
    lorentz_inner,
    perturbation,
    reference_metric,
    static_potentials,
    transport_field)


class HemisphereRule(NamedTuple):
    """
    Quadrature on the coordinate hemisphere of radius ``radius`` and its
    corner sphere, with model-metric areas and unit (co)normals.
    """
    radius: float
    nodes: Array
    weights: Array
    #: Outward unit normals, coordinate components.
    normals: Array
    corner_nodes: Array
    corner_weights: Array
    #: Outward unit conormals of the corner sphere inside the boundary.
    conormals: Array


def _radial_factors(model: str, r: float):
    # The model metric is A(r) dr^2 + B(r) r^2 (round metric).
    if model == 'flat':
        return 1.0, 1.0
    if model == 'hyperbolic-polar':
        return 1.0 / (1.0 + r * r), 1.0
    A = 4.0 / (1.0 - r * r) ** 2
    return A, A


def build_hemisphere_rule(domain, r: float,
                          orders: Sequence[int]) -> HemisphereRule:
    """
    Product rule on ``S^(n-1)_(r,+)`` and ``S^(n-2)_r``.
    """
    if not r > domain.r0:
        raise DomainError('Radius must exceed the inner radius', r, domain.r0)
    if min(orders) < 2:
        raise InputError('Quadrature orders must be at least 2', orders)
    n = domain.n
    A, B = _radial_factors(domain.model, r)
    cap = quadrature.hemisphere_rule(n, orders)
    ring = quadrature.corner_rule(n, orders)
    return HemisphereRule(
        float(r),
        r * cap.nodes,
        cap.weights * r ** (n - 1) * B ** ((n - 1) / 2.0),
        cap.nodes / math.sqrt(A),
        r * ring.nodes,
        ring.weights * r ** (n - 2) * B ** ((n - 2) / 2.0),
        ring.nodes / math.sqrt(A))


class FluxSampler(object):
    """
    Model-linearized integrands on one hemisphere rule, cached so that every
    pair of static potential and Killing field reuses them.
    """
    def __init__(self, data: InitialDataSet, rule: HemisphereRule,
                 step_scale: float = 1e-4):
        self.rule = rule
        domain = data.domain
        n = data.n
        g0 = reference_metric(domain)
        f = perturbation(data)
        self._ginv, self._omega, self._f_mu, self._trf = [], [], [], []
        self._pi_mu = []
        for x, mu in zip(rule.nodes, rule.normals):
            eta = default_step(x, step_scale)
            gx = g0(x)
            ginv = metric_inverse(gx, x)
            dg = g0.d_eval(x)
            fx, df = f(x), gradient(f, x, eta)
            G = christoffel(ginv, dg)
            dginv = -np.einsum('km,amn,nl->akl', ginv, dg, ginv)
            dtr = (np.einsum('akl,kl->a', dginv, fx) +
                   np.einsum('kl,akl->a', ginv, df))
            omega = divergence(ginv, fx, df, G) - dtr
            hx = data.h(x)
            pi = hx - float(np.einsum('ij,ij->', ginv, hx)) * gx
            self._ginv.append(ginv)
            self._omega.append(float(omega @ mu))
            self._f_mu.append(fx @ mu)
            self._trf.append(float(np.einsum('ij,ij->', ginv, fx)))
            self._pi_mu.append(pi @ mu)
        self._corner = []
        for x, theta in zip(rule.corner_nodes, rule.conormals):
            ginv = metric_inverse(g0(x), x)
            normal = ginv[:, n - 1] / math.sqrt(ginv[n - 1, n - 1])
            self._corner.append(float(normal @ f(x) @ theta))

    def flux(self, V: Optional[TensorField] = None,
             W: Optional[TensorField] = None):
        """
        Hemisphere, corner and momentum parts of the flux of ``(V, W)``;
        a missing ``V`` or ``W`` counts as zero.
        """
        rule = self.rule
        hemisphere, momentum, corner = [], [], []
        for k, (x, mu, w) in enumerate(zip(rule.nodes, rule.normals,
                                           rule.weights)):
            if V is not None:
                v, dv = float(V(x)), gradient(V, x)
                hemisphere.append(w * (
                    v * self._omega[k] -
                    float((self._ginv[k] @ dv) @ self._f_mu[k]) +
                    self._trf[k] * float(dv @ mu)))
            if W is not None:
                momentum.append(w * 2.0 * float(W(x) @ self._pi_mu[k]))
        if V is not None:
            for x, w, c in zip(rule.corner_nodes, rule.corner_weights,
                               self._corner):
                corner.append(w * float(V(x)) * c)
        return math.fsum(hemisphere), math.fsum(corner), math.fsum(momentum)


class Extrapolation(NamedTuple):
    value: float
    error: float
    #: One entry per radius, ``nan`` until a full window is available.
    extrapolants: List[float]


def default_exponent(data: InitialDataSet) -> float:
    """
    Exponent ``s`` of the leading remainder ``r^(-s)`` of the fluxes.
    """
    n = data.n
    if data.domain.is_flat:
        return 2.0 * data.decay - (n - 2)
    return 2.0 * data.decay - n


def extrapolate(radii: Sequence[float], values: Sequence[float],
                exponent: float, window: int = 2,
                tol: float = 1e-2, label: Optional[str] = None
                ) -> Extrapolation:
    """
    Least-squares fits of ``c0 + c1 r^(-exponent)`` over sliding windows of
    radii; the last ``c0`` is the limit and the gap between the last two is
    its error.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(radii) < window + 1:
        raise InputError(
            'Extrapolation needs at least {} radii'.format(window + 1),
            list(radii))
    if not exponent > 0:
        raise InputError('Extrapolation exponent must be positive', exponent)
    extrapolants = [math.nan] * (window - 1)
    for end in range(window, len(radii) + 1):
        t = radii[end - window:end] ** -exponent
        c0, _ = polynomial.polyfit(t, values[end - window:end], 1)
        extrapolants.append(float(c0))
    value = extrapolants[-1]
    error = abs(extrapolants[-1] - extrapolants[-2])
    if (not np.all(np.isfinite(values)) or not math.isfinite(value) or
            error > tol * max(1.0, abs(value))):
        raise ConvergenceError(radii, extrapolants, label)
    log.debug(f'Extrapolated {label or "flux"}: {value} +- {error}')
    return Extrapolation(value, error, extrapolants)


def adm_normalization(n: int) -> float:
    return (n - 1) * quadrature.sphere_area(n - 1)


def _check_radii(radii: Sequence[float]) -> List[float]:
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError('Radii must be increasing', radii)
    return radii


class FlatMassReport(NamedTuple):
    """
    Energy and linear momentum of asymptotically flat data.
    """
    n: int
    radii: List[float]
    table: List[OrderedDict]
    E: float
    P: Array
    E_error: float
    P_error: Array

    @property
    def lorentz_norm(self) -> float:
        """``-E^2 + |P|^2``."""
        return -self.E ** 2 + float(self.P @ self.P)

    @property
    def causal_class(self) -> CausalClass:
        return causal_classify(np.concatenate([[self.E], self.P]))

    @property
    def adm_normalized(self) -> float:
        return self.E / adm_normalization(self.n)


def energy_momentum_flat(data: InitialDataSet, radii: Sequence[float],
                         orders: Sequence[int] = (48, 96),
                         window: int = 2, exponent: Optional[float] = None,
                         tol: float = 1e-2,
                         step_scale: float = 1e-4) -> FlatMassReport:
    """
    ``E`` from the hemisphere flux of ``div f - d tr f`` plus the corner
    flux of ``f(d_n, conormal)``, and ``P_A = 2 * flux of pi(d_A, .)``.
    """
    if not data.domain.is_flat:
        raise DomainError('Expecting flat data', data.domain)
    radii = _check_radii(radii)
    n = data.n
    V = static_potentials(data.domain)[0]
    basis = killing_basis(data.domain)
    s = default_exponent(data) if exponent is None else exponent
    hemispheres, corners, momenta = [], [], []
    for r in radii:
        sampler = FluxSampler(
            data, build_hemisphere_rule(data.domain, r, orders), step_scale)
        hemisphere, corner, _ = sampler.flux(V, None)
        hemispheres.append(hemisphere)
        corners.append(corner)
        momenta.append([sampler.flux(None, W)[2] for W in basis])
        log.debug(f'Flat fluxes of {data.name} at r={r}: E {hemisphere} + '
                  f'{corner}, P {momenta[-1]}')
    energy = extrapolate(
        radii, np.add(hemispheres, corners), s, window, tol, 'E')
    P, P_error = [], []
    for A in range(n - 1):
        fit = extrapolate(radii, [m[A] for m in momenta], s, window, tol,
                          'P_{}'.format(A + 1))
        P.append(fit.value)
        P_error.append(fit.error)
    table = []
    for k, r in enumerate(radii):
        row = OrderedDict([('r', r), ('flux_E', hemispheres[k]),
                           ('flux_corner', corners[k])])
        for A in range(n - 1):
            row['flux_P_{}'.format(A + 1)] = momenta[k][A]
        row['extrapolant'] = energy.extrapolants[k]
        table.append(row)
    return FlatMassReport(n, radii, table, energy.value, np.array(P),
                          energy.error, np.array(P_error))


def _polar(data: InitialDataSet) -> InitialDataSet:
    if data.domain.is_flat:
        raise DomainError('Expecting hyperbolic data', data.domain)
    if data.domain.model == 'hyperbolic-ball':
        return change_model(data, 'hyperbolic-polar')
    return data


class FunctionalValue(NamedTuple):
    value: float
    error: float
    table: List[OrderedDict]


def mass_functional_hyp(data: InitialDataSet, V: Optional[TensorField],
                        W: Optional[TensorField], radii: Sequence[float],
                        orders: Sequence[int] = (48, 96), window: int = 2,
                        exponent: Optional[float] = None, tol: float = 1e-2,
                        step_scale: float = 1e-4) -> FunctionalValue:
    """
    The mass functional ``m(V, W)`` of asymptotically hyperbolic data.

    Ball data are converted to the polar model, and ball-model ``V`` and
    ``W`` are transported along with them.
    """
    data = _polar(data)
    if V is not None:
        V = transport_field(V, data.domain)
    if W is not None:
        W = transport_field(W, data.domain)
    radii = _check_radii(radii)
    s = default_exponent(data) if exponent is None else exponent
    totals, table = [], []
    for r in radii:
        sampler = FluxSampler(
            data, build_hemisphere_rule(data.domain, r, orders), step_scale)
        hemisphere, corner, momentum = sampler.flux(V, W)
        totals.append(hemisphere + corner + momentum)
        table.append(OrderedDict([
            ('r', r), ('flux_E', hemisphere), ('flux_corner', corner),
            ('flux_P', momentum)]))
    fit = extrapolate(radii, totals, s, window, tol, 'm(V, W)')
    for row, value in zip(table, fit.extrapolants):
        row['extrapolant'] = value
    return FunctionalValue(fit.value, fit.error, table)


class HyperbolicMassReport(NamedTuple):
    """
    Energy and momentum vectors of asymptotically hyperbolic data.
    """
    n: int
    radii: List[float]
    table: List[OrderedDict]
    energy: Array
    momentum: Array
    energy_error: Array
    momentum_error: Array

    @property
    def energy_norm(self) -> float:
        return lorentz_inner(self.energy, self.energy)

    @property
    def momentum_norm(self) -> float:
        return lorentz_inner(self.momentum, self.momentum)

    @property
    def energy_class(self) -> CausalClass:
        return causal_classify(self.energy)

    @property
    def momentum_class(self) -> CausalClass:
        return causal_classify(self.momentum)

    @property
    def adm_normalized(self) -> Array:
        return self.energy / adm_normalization(self.n)


def energy_momentum_pair(data: InitialDataSet, radii: Sequence[float],
                         orders: Sequence[int] = (48, 96), window: int = 2,
                         exponent: Optional[float] = None,
                         tol: float = 1e-2,
                         step_scale: float = 1e-4) -> HyperbolicMassReport:
    """
    ``E_a = m(V_(a), 0)`` and ``P_a = m(0, W_(a))`` over the model bases.
    """
    data = _polar(data)
    radii = _check_radii(radii)
    n = data.n
    potentials = static_potentials(data.domain)
    fields = killing_basis(data.domain)
    s = default_exponent(data) if exponent is None else exponent
    energies, corners, momenta = [], [], []
    for r in radii:
        sampler = FluxSampler(
            data, build_hemisphere_rule(data.domain, r, orders), step_scale)
        row_e, row_c = [], []
        for V in potentials:
            hemisphere, corner, _ = sampler.flux(V, None)
            row_e.append(hemisphere + corner)
            row_c.append(corner)
        energies.append(row_e)
        corners.append(row_c)
        momenta.append([sampler.flux(None, W)[2] for W in fields])
        log.debug(f'Hyperbolic fluxes of {data.name} at r={r}: '
                  f'E {row_e}, P {momenta[-1]}')
    energy = [extrapolate(radii, [e[a] for e in energies], s, window, tol,
                          'E_{}'.format(a)) for a in range(n)]
    momentum = [extrapolate(radii, [m[a] for m in momenta], s, window, tol,
                            'P_{}'.format(a)) for a in range(n)]
    table = []
    for k, r in enumerate(radii):
        row = OrderedDict([('r', r)])
        for a in range(n):
            row['flux_E_{}'.format(a)] = energies[k][a]
        for a in range(n):
            row['flux_corner_{}'.format(a)] = corners[k][a]
        for a in range(n):
            row['flux_P_{}'.format(a)] = momenta[k][a]
        row['extrapolant'] = energy[0].extrapolants[k]
        table.append(row)
    return HyperbolicMassReport(
        n, radii, table,
        np.array([fit.value for fit in energy]),
        np.array([fit.value for fit in momentum]),
        np.array([fit.error for fit in energy]),
        np.array([fit.error for fit in momentum]))


class EinsteinCrosscheck(NamedTuple):
    energy: float
    error: float
    reference: float
    relative_deviation: float
    table: List[OrderedDict]


def einstein_energy_crosscheck(data: InitialDataSet, radii: Sequence[float],
                               orders: Sequence[int] = (48, 96),
                               window: int = 2,
                               exponent: Optional[float] = None,
                               tol: float = 1e-2,
                               step_scale: float = 1e-4,
                               reference: Optional[float] = None
                               ) -> EinsteinCrosscheck:
    """
    Recompute ``E`` from the fluxes of the Einstein tensor through the
    hemispheres and of the boundary Newton tensor through the corner:
    ``E = 2/(2-n) lim [int G(x, mu) - int N(x, conormal)]``.
    """
    if not data.domain.is_flat:
        raise DomainError('Expecting flat data', data.domain)
    radii = _check_radii(radii)
    n = data.n
    s = default_exponent(data) if exponent is None else exponent
    totals, table = [], []
    for r in radii:
        rule = build_hemisphere_rule(data.domain, r, orders)
        bulk = []
        for x, mu, w in zip(rule.nodes, rule.normals, rule.weights):
            G, _ = einstein_and_newton(
                data.g, x, default_step(x, step_scale), boundary=False)
            bulk.append(w * float(x @ G @ mu))
        edge = []
        for x, theta, w in zip(rule.corner_nodes, rule.conormals,
                               rule.corner_weights):
            _, N = einstein_and_newton(
                data.g, x, default_step(x, step_scale), boundary=True)
            edge.append(w * float(x[:n - 1] @ N @ theta[:n - 1]))
        total = 2.0 / (2.0 - n) * (math.fsum(bulk) - math.fsum(edge))
        totals.append(total)
        table.append(OrderedDict([('r', r), ('flux_G', math.fsum(bulk)),
                                  ('flux_N', math.fsum(edge)),
                                  ('energy', total)]))
    fit = extrapolate(radii, totals, s, window, tol, 'E (Einstein)')
    for row, value in zip(table, fit.extrapolants):
        row['extrapolant'] = value
    if reference is None:
        reference = energy_momentum_flat(
            data, radii, orders, window, exponent, tol, step_scale).E
    deviation = abs(fit.value - reference) / max(abs(reference), 1e-12)
    log.info(f'Einstein energy {fit.value} vs flux energy {reference}')
    return EinsteinCrosscheck(fit.value, fit.error, reference, deviation,
                              table)


class InvarianceReport(NamedTuple):
    before: object
    after: object
    #: Invariants predicted for the transformed data.
    predicted: Array
    observed: Array
    relative_deviation: float
    norm_deviation: float
    passed: bool


def _relative(a: Array, b: Array) -> float:
    scale = max(float(np.max(np.abs(b), initial=0.0)), 1e-12)
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


def invariance_test(data: InitialDataSet, A, radii: Sequence[float],
                    orders: Sequence[int] = (48, 96), window: int = 2,
                    exponent: Optional[float] = None, tol: float = 1e-6,
                    convergence_tol: float = 1e-2,
                    step_scale: float = 1e-4) -> InvarianceReport:
    """
    Compare the invariants of ``data`` and of its pullback along a
    boundary-preserving isometry with the predicted transformation law.
    """
    moved = isometry_apply(data.domain, A, data)
    kw = dict(orders=orders, window=window, exponent=exponent,
              tol=convergence_tol, step_scale=step_scale)
    if data.domain.is_flat:
        before = energy_momentum_flat(data, radii, **kw)
        after = energy_momentum_flat(moved, radii, **kw)
        predicted = np.concatenate([
            [A.transform_energy(before.E)], A.transform_momentum(before.P)])
        observed = np.concatenate([[after.E], after.P])
        norm_deviation = abs(after.lorentz_norm - before.lorentz_norm) / max(
            abs(before.lorentz_norm), 1e-12)
    else:
        before = energy_momentum_pair(data, radii, **kw)
        after = energy_momentum_pair(moved, radii, **kw)
        predicted = np.concatenate([
            A.transform_energy(before.energy),
            A.transform_momentum(before.momentum)])
        observed = np.concatenate([after.energy, after.momentum])
        norm_deviation = abs(after.energy_norm - before.energy_norm) / max(
            abs(before.energy_norm), 1e-12)
    deviation = _relative(observed, predicted)
    passed = deviation <= tol and norm_deviation <= tol
    log.info(f'Invariance of {data.name}: deviation {deviation:.3e}, '
             f'norm deviation {norm_deviation:.3e}')
    return InvarianceReport(before, after, predicted, observed, deviation,
                            norm_deviation, passed)


class InequalityReport(NamedTuple):
    """
    Positive mass statements against the sampled energy conditions.
    """
    model: str
    #: ``E - |P|`` (flat) or ``None``.
    margin: Optional[float]
    classes: List[str]
    dec_passed: bool
    inequality_holds: bool
    message: str


_FUTURE = (CausalClass.ZERO, CausalClass.TIMELIKE_FUTURE,
           CausalClass.NULL_FUTURE)


def mass_inequality_report(report, dec: DecReport,
                           tol: float = 1e-9) -> InequalityReport:
    """
    ``E >= |P|`` (flat) or future causality of both vectors (hyperbolic),
    stated together with whether the energy conditions hold.
    """
    if isinstance(report, FlatMassReport):
        margin = report.E - float(np.linalg.norm(report.P))
        classes = [report.causal_class.value]
        holds = margin >= -tol
        model = 'flat'
    else:
        margin = None
        classes = [report.energy_class.value, report.momentum_class.value]
        holds = (report.energy_class in _FUTURE and
                 report.momentum_class in _FUTURE)
        model = 'hyperbolic'
    if dec.passed:
        message = ('energy conditions hold; the inequality is expected and '
                   + ('holds' if holds else 'FAILS'))
    else:
        message = ('energy conditions are violated; the hypotheses of the '
                   'positive mass statement fail and no inequality is '
                   'expected')
    if dec.passed and not holds:
        log.warning(f'Mass inequality fails although DEC holds: {classes}')
    return InequalityReport(model, margin, classes, dec.passed, holds,
                            message)
