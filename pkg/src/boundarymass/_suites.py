"""
Identity-verification suites run by ``boundarymass verify``.

Every suite returns rows of a residual table; a suite passes when every row
does.
"""
import math
from collections import OrderedDict
from typing import Callable, List

import numpy as np

from . import _log as log
from ._config import Config
from ._report import residual_row
from ._util import observed_order
from .clifford import (
    PROJECTOR_KINDS,
    boundary_projector,
    build_rep,
    clifford_orthogonality_residual,
    expected_pm_spectrum,
    expected_R_spectrum,
    killing_charge,
    killing_dirac_shift_check,
    mit_cancellation_residual,
    operator_R,
    operator_T,
    operator_U,
    operator_W,
    random_spinor,
    spectrum_residual,
    verify_decomposition,
    verify_killing_decomposition,
    verify_weitzenbock)
from .constraints import verify_divergence_identity, verify_gauge_charge
from .datasets import (
    FLAT_EXAMPLES,
    HYPERBOLIC_EXAMPLES,
    DatasetDescriptor,
    build_dataset,
    gauge_field)
from .geometry import (
    ChartDomain,
    InitialDataSet,
    TensorField,
    constant_field,
    killing_development_check,
    zero_field)
from .mass import invariance_test
from .models import (
    FlatIsometry,
    HyperbolicIsometry,
    boost_matrix,
    killing_basis,
    perturbation,
    reference_metric,
    rotation_about_normal,
    static_potentials)


#: Relative tolerance of the hyperbolic invariance comparison.
HYPERBOLIC_INVARIANCE_TOL = 1e-4

#: Residuals below this carry finite-difference roundoff, not an order.
ORDER_FLOOR = 1e-9

Suite = Callable[[Config, int, np.random.Generator], List[OrderedDict]]


def _sample(p) -> List[float]:
    return [round(float(x), 12) for x in p]


def _interior_points(n: int, rng: np.random.Generator,
                     count: int = 3) -> List[np.ndarray]:
    return [np.concatenate([rng.uniform(-1.0, 1.0, n - 1),
                            rng.uniform(0.5, 1.5, 1)])
            for _ in range(count)]


def _symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return 0.5 * (A + A.T)


def _bump(domain: ChartDomain, center, matrix, scale: float,
          name: str) -> TensorField:
    """
    ``scale exp(-|x - center|^2) matrix``.
    """
    c = np.asarray(center, dtype=float)
    M = np.asarray(matrix, dtype=float)

    def _evaluate(x):
        d = x - c
        return scale * math.exp(-(d @ d)) * M

    def _d(x):
        d = x - c
        return np.einsum('a,ij->aij', -2.0 * scale * math.exp(-(d @ d)) * d,
                         M)

    return TensorField(_evaluate, rank=(0, 2), d_eval=_d, symmetric=True,
                       domain=domain, name=name)


def _order_row(identity: str, sample, pairs, tol: float,
               min_order: float, **extra) -> OrderedDict:
    """
    Row for the worst of ``(coarse, fine)`` residual pairs at halved steps.

    The row fails when the worst fine residual exceeds ``tol`` or when any
    pair above the roundoff floor converges slower than ``min_order``.
    """
    worst = max(pairs, key=lambda pair: pair[1])
    orders = [observed_order(coarse, fine) for coarse, fine in pairs
              if fine > ORDER_FLOOR]
    slow = [order for order in orders if not order >= min_order]
    if slow:
        order = slow[0]
    else:
        order = min(orders) if orders else observed_order(*worst)
    row = residual_row(identity, sample, worst[1], tol, order=order,
                       samples=len(pairs), **extra)
    if slow:
        row['passed'] = False
    return row


def _worst_row(identity: str, sample, residuals, tol: float,
               **extra) -> OrderedDict:
    residuals = list(residuals)
    return residual_row(identity, sample, max(residuals), tol,
                        samples=len(residuals), **extra)


def _identity_pair(domain: ChartDomain):
    """
    ``V = 1`` and ``W = d_1`` on the flat model, ``V_(0)`` and the rotation
    ``W_(1)`` on the hyperbolic ones.
    """
    if domain.is_flat:
        return static_potentials(domain)[0], killing_basis(domain)[0]
    return static_potentials(domain)[0], killing_basis(domain)[1]


def _exterior_points(n: int, rng: np.random.Generator, r0: float,
                     count: int = 2) -> List[np.ndarray]:
    points = []
    for _ in range(count):
        tangent = rng.standard_normal(n - 1)
        tangent /= np.linalg.norm(tangent)
        height = rng.uniform(0.3, 0.9)
        direction = np.concatenate(
            [math.sqrt(1.0 - height ** 2) * tangent, [height]])
        points.append(rng.uniform(3.0, 5.0) * r0 * direction)
    return points


def divergence_suite(config: Config, n: int,
                     rng: np.random.Generator) -> List[OrderedDict]:
    rows = []
    steps = (config.identity_step, 0.5 * config.identity_step)

    def pairs(domain, f, h, V, W, points):
        return [tuple(verify_divergence_identity(domain, f, h, V, W, p, s)
                      for s in steps) for p in points]

    for example in FLAT_EXAMPLES + HYPERBOLIC_EXAMPLES:
        data = build_dataset(DatasetDescriptor(example, n))
        V, W = _identity_pair(data.domain)
        points = _exterior_points(n, rng, data.domain.r0)
        rows.append(_order_row(
            'divergence identity ({})'.format(example),
            [_sample(p) for p in points],
            pairs(data.domain, perturbation(data), data.h, V, W, points),
            config.identity_tol, config.min_order, step=steps[1]))
    for model in ('flat', 'hyperbolic-polar'):
        domain = ChartDomain(n, model)
        V, W = _identity_pair(domain)
        results = []
        for _ in range(config.random_samples):
            center = _interior_points(n, rng, 1)[0]
            f = _bump(domain, center, _symmetric(n, rng), 0.1, 'f')
            h = _bump(domain, center, _symmetric(n, rng), 0.1, 'h')
            results.extend(pairs(domain, f, h, V, W,
                                 _interior_points(n, rng, 1)))
        rows.append(_order_row(
            'divergence identity (random bumps, {})'.format(model),
            'bumps={}'.format(config.random_samples), results,
            config.identity_tol, config.min_order, step=steps[1]))
    return rows


def gauge_charge_suite(config: Config, n: int,
                       rng: np.random.Generator) -> List[OrderedDict]:
    rows = []
    domain = ChartDomain(n, 'hyperbolic-polar')
    zeta = gauge_field(
        domain, DatasetDescriptor('gauge-perturbation', n).params)
    potentials = static_potentials(domain)
    fields = killing_basis(domain)
    steps = (config.identity_step, 0.5 * config.identity_step)
    for a in (0, n - 1):
        for p in _interior_points(n, rng, 2):
            residuals = tuple(
                verify_gauge_charge(domain, zeta, potentials[a], fields[a],
                                    p, s)
                for s in steps)
            rows.append(_order_row(
                'gauge charge is a divergence (V_({0}), W_({0}))'.format(a),
                _sample(p), [residuals], config.identity_tol,
                config.min_order, step=steps[1]))
    return rows


def decomposition_suite(config: Config, n: int,
                        rng: np.random.Generator) -> List[OrderedDict]:
    rep = build_rep(n)
    return [_worst_row(
        'connection decomposition',
        'h={}'.format(config.random_samples),
        (verify_decomposition(rep, _symmetric(n, rng))
         for _ in range(config.random_samples)),
        config.algebra_tol)]


def weitzenbock_suite(config: Config, n: int,
                      rng: np.random.Generator) -> List[OrderedDict]:
    rep = build_rep(n)
    domain = ChartDomain(n, 'flat')
    center = _interior_points(n, rng, 1)[0]
    h_field = _bump(domain, center, _symmetric(n, rng), 0.3, 'h')
    base = random_spinor(rep, rng)
    slope = random_spinor(rep, rng)
    c = np.asarray(center)

    def psi(x):
        d = x - c
        return math.exp(-0.5 * (d @ d)) * (base + x[0] * slope)

    rows = []
    steps = (config.identity_step, 0.5 * config.identity_step)
    for p in _interior_points(n, rng, 2):
        residuals = [verify_weitzenbock(rep, h_field, psi, p, s)
                     for s in steps]
        rows.append(_order_row(
            'Weitzenbock formula', _sample(p), [tuple(residuals)],
            config.identity_tol, config.min_order, step=steps[1]))
    return rows


def _radial_boost(domain: ChartDomain) -> TensorField:
    # W = grad V_(0) = V_(0) y on the polar chart.
    def _evaluate(y):
        return math.sqrt(1.0 + y @ y) * y

    def _d(y):
        v = math.sqrt(1.0 + y @ y)
        return np.outer(y, y) / v + v * np.eye(len(y))

    return TensorField(_evaluate, rank=(1, 0), d_eval=_d, domain=domain,
                       name='grad V_(0)')


def killing_dev_suite(config: Config, n: int,
                      rng: np.random.Generator) -> List[OrderedDict]:
    rows = []
    hyperbolic = ChartDomain(n, 'hyperbolic-polar')
    b = reference_metric(hyperbolic)
    umbilic = InitialDataSet(hyperbolic, b, b, float(n), name='umbilic')
    V = static_potentials(hyperbolic)[0]
    W = _radial_boost(hyperbolic)
    flat = ChartDomain(n, 'flat')
    trivial = InitialDataSet(
        flat, reference_metric(flat), zero_field(n, (0, 2), flat),
        float(n - 2), name='flat')
    schwarzschild = build_dataset(DatasetDescriptor('schwarzschild', n))
    cases = [
        ('hyperboloid in Minkowski space', umbilic, V, W,
         _interior_points(n, rng, 2)),
        ('translation of Euclidean space', trivial,
         static_potentials(flat)[0], killing_basis(flat)[0],
         _interior_points(n, rng, 2)),
        ('static Schwarzschild', schwarzschild,
         constant_field(1.0, (0, 0), flat), zero_field(n, (1, 0), flat),
         _exterior_points(n, rng, schwarzschild.domain.r0)),
    ]
    for label, data, lapse, shift, points in cases:
        for p in points:
            report = killing_development_check(
                data, lapse, shift, p, config.identity_step,
                config.identity_tol)
            residual = math.inf if report.refused else report.max_residual
            rows.append(residual_row(
                'Killing development curvature ({})'.format(label),
                _sample(p), residual, config.identity_tol,
                refused=report.refused))
    # Static potential without shift violates the precondition.
    still = InitialDataSet(hyperbolic, b, zero_field(n, (0, 2), hyperbolic),
                           float(n), name='static')
    p = _interior_points(n, rng, 1)[0]
    report = killing_development_check(
        still, V, zero_field(n, (1, 0), hyperbolic), p,
        config.identity_step, config.identity_tol)
    rows.append(residual_row(
        'Killing development refuses a non-Killing pair', _sample(p),
        0.0 if report.refused else math.inf, 0.0, refused=report.refused))
    return rows


def invariance_suite(config: Config, n: int,
                     rng: np.random.Generator) -> List[OrderedDict]:
    kw = dict(orders=config.orders, window=config.fit_window,
              exponent=config.fit_exponent,
              convergence_tol=config.convergence_tol,
              step_scale=config.step)
    rows = []
    angle = float(rng.uniform(0.1, 2.0))
    flat = build_dataset(DatasetDescriptor(
        'bowen-york', n, params={'p': [0.1] + [0.05] * (n - 2) + [0.0]}))
    A = FlatIsometry(rotation_about_normal(n, angle))
    report = invariance_test(flat, A, config.radii, tol=1e-6, **kw)
    rows.append(residual_row(
        'energy-momentum transformation (rotation)',
        'angle={:.6f}'.format(angle),
        max(report.relative_deviation, report.norm_deviation), 1e-6))
    rapidity = float(rng.uniform(0.1, 0.5))
    hyperbolic = build_dataset(DatasetDescriptor('ads-schwarzschild', n))
    L = HyperbolicIsometry(boost_matrix(n, rapidity), hyperbolic.domain)
    report = invariance_test(hyperbolic, L, config.radii,
                             tol=HYPERBOLIC_INVARIANCE_TOL, **kw)
    rows.append(residual_row(
        'energy-momentum transformation (boost)',
        'rapidity={:.6f}'.format(rapidity),
        max(report.relative_deviation, report.norm_deviation),
        HYPERBOLIC_INVARIANCE_TOL))
    return rows


def clifford_spectra_suite(config: Config, n: int,
                           rng: np.random.Generator) -> List[OrderedDict]:
    rep = build_rep(n)
    tol = config.algebra_tol
    count = config.random_samples
    label = 'inputs={}'.format(count)
    R, W, U, T, commutator = [], [], [], [], []
    for _ in range(count):
        rho = float(rng.uniform(0.0, 2.0))
        J = rng.standard_normal(n)
        expected = expected_R_spectrum(rep, rho, J)
        R.append(spectrum_residual(operator_R(rep, rho, J), expected))
        W.append(spectrum_residual(operator_W(rep, rho, J), expected))
        pi_t = rng.standard_normal(n - 1)
        U.append(spectrum_residual(
            operator_U(rep, pi_t), expected_pm_spectrum(rep, pi_t)))
        P = rng.standard_normal(n - 1)
        spectrum = operator_T(rep, P)
        T.append(spectrum_residual(spectrum, expected_pm_spectrum(rep, P)))
        commutator.append(spectrum.commutator)
    sample = 'n={}'.format(n)
    return [
        residual_row('Clifford relations', sample, rep.clifford_residual(),
                     tol),
        residual_row('generator hermiticity', sample,
                     rep.hermiticity_residual(), tol),
        _worst_row('spectrum of R', label, R, tol),
        _worst_row('spectrum of W', label, W, tol),
        _worst_row('spectrum of U', label, U, tol),
        _worst_row('spectrum of T', label, T, tol),
        _worst_row('T commutes with i gamma_n', label, commutator, tol),
    ]


def shift_suite(config: Config, n: int,
                rng: np.random.Generator) -> List[OrderedDict]:
    rep = build_rep(n)
    tol = config.algebra_tol
    rows = []
    h = _symmetric(n, rng)
    for sign in (1, -1):
        rows.append(residual_row(
            'Dirac shift of the Killing connection', 'sign={:+d}'.format(sign),
            killing_dirac_shift_check(rep, sign), tol))
        rows.append(residual_row(
            'wrong-sign shift is detected', 'sign={:+d}'.format(sign),
            abs(killing_dirac_shift_check(rep, sign, flip=True) - n), tol))
        rows.append(residual_row(
            'Killing connection decomposition', 'sign={:+d}'.format(sign),
            verify_killing_decomposition(rep, h, sign), tol))
    return rows


def _unit_spinor(rep, rng):
    psi = random_spinor(rep, rng)
    return psi / np.linalg.norm(psi)


def boundary_conditions_suite(config: Config, n: int,
                              rng: np.random.Generator
                              ) -> List[OrderedDict]:
    rep = build_rep(n)
    tol = config.algebra_tol
    rows = []
    for kind in PROJECTOR_KINDS:
        projector = boundary_projector(rep, kind)
        M = projector.matrix
        rows.append(residual_row(
            'projector is idempotent', kind,
            float(np.max(np.abs(M @ M - M))), tol))
        rows.append(residual_row(
            'projector has half rank', kind,
            float(abs(projector.rank - rep.N // 2)), tol))
    chi = {kind: boundary_projector(rep, kind).matrix
           for kind in ('CHI+', 'CHI-')}
    residuals = OrderedDict(
        (key, []) for key in ('mit', 'orthogonality', 'adjoint', 'CHI+',
                              'CHI-', 'causal'))
    margin = math.inf
    for _ in range(config.spinor_samples):
        phi, xi = _unit_spinor(rep, rng), _unit_spinor(rep, rng)
        residuals['mit'].append(mit_cancellation_residual(rep, phi, xi))
        residuals['orthogonality'].append(
            clifford_orthogonality_residual(rep, phi))
        X = rng.standard_normal(n + 1)
        residuals['adjoint'].append(rep.adjoint_residual(X, phi, xi))
        for kind, P in chi.items():
            residuals[kind].append(
                killing_charge(rep, P @ phi, kind).boundary_residual)
        charge = killing_charge(rep, phi)
        residuals['causal'].append(max(0.0, -charge.margin))
        margin = min(margin, charge.margin)
    label = 'spinors={}'.format(config.spinor_samples)
    rows.extend([
        _worst_row('MIT cancellation <gamma_n phi, xi> = 0', label,
                   residuals['mit'], tol),
        _worst_row('Clifford orthogonality', label,
                   residuals['orthogonality'], tol),
        _worst_row('adjoint of Clifford multiplication', label,
                   residuals['adjoint'], tol),
    ])
    for kind in chi:
        rows.append(_worst_row(
            'charge vector of a CHI eigenspinor is normal',
            '{} {}'.format(kind, label), residuals[kind], tol))
    rows.append(_worst_row(
        'charge vector is future causal', label, residuals['causal'], tol,
        margin=margin))
    return rows


SUITES = OrderedDict([
    ('divergence', divergence_suite),
    ('gauge-charge', gauge_charge_suite),
    ('decomposition', decomposition_suite),
    ('weitzenbock', weitzenbock_suite),
    ('killing-dev', killing_dev_suite),
    ('invariance', invariance_suite),
    ('clifford-spectra', clifford_spectra_suite),
    ('shift', shift_suite),
    ('boundary-conditions', boundary_conditions_suite),
])


def run_suite(name: str, config: Config, n: int,
              seed: int) -> List[OrderedDict]:
    """
    Run a named suite with a seeded generator.
    """
    suite = SUITES[name]
    log.info(f'Running suite {name} (n={n}, seed={seed})')
    return suite(config, n, np.random.default_rng(seed))
