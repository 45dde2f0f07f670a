"""
Finite-difference tensor calculus on half-space charts.

Tensor components are plain numpy arrays in coordinate components. Derivative
arrays put the differentiation index first: ``dg[a, b, c]`` is
``d_a g_bc`` and ``ddg[a, b, c, d]`` is ``d_a d_b g_cd``. Riemann components
follow ``R_ijkl = g(R(e_k, e_l) e_j, e_i)`` so that a space of constant
sectional curvature ``K`` has ``R_ijkl = K (g_ik g_jl - g_il g_jk)``.
"""
import math
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import _log as log
from ._types import Array, Evaluator, OptionalEvaluator, Point, Rank
from .errors import (
    DegenerateLapseError,
    DomainError,
    EvalError,
    InputError,
    SingularMetricError,
    StencilError)


MODELS = ('flat', 'hyperbolic-polar', 'hyperbolic-ball')

#: Relative finite-difference step, ``eta = DEFAULT_STEP * max(1, |p|)``.
DEFAULT_STEP = 1e-4

#: Reciprocal condition number below which an indefinite metric is singular.
SINGULAR_RCOND = 1e-12


def as_point(p: Point) -> Array:
    return np.asarray(p, dtype=float)


def default_step(p: Point, scale: float = DEFAULT_STEP) -> float:
    """
    Default finite-difference step at ``p``.
    """
    return scale * max(1.0, float(np.linalg.norm(as_point(p))))


class ChartDomain(object):
    """
    A half-space chart of one of the model geometries.

    The boundary is the hyperplane where the last coordinate vanishes; the
    ball model is further restricted to the open unit ball.
    """
    __slots__ = ['n', 'model', 'r0']

    def __init__(self, n: int, model: str = 'flat', r0: float = 1.0):
        if int(n) != n or n < 3:
            raise InputError('Dimension must be an integer n >= 3', n)
        if model not in MODELS:
            raise InputError('Expecting model to be one of', MODELS, model)
        if not r0 > 0:
            raise InputError('Inner radius must be positive', r0)
        if model == 'hyperbolic-ball' and r0 >= 1:
            raise InputError('Ball model needs an inner radius below 1', r0)
        self.n = int(n)
        self.model = model
        self.r0 = float(r0)

    def __repr__(self):
        return 'ChartDomain(n={}, model={!r}, r0={})'.format(
            self.n, self.model, self.r0)

    def __eq__(self, other):
        return (isinstance(other, ChartDomain) and
                (self.n, self.model, self.r0) ==
                (other.n, other.model, other.r0))

    def __hash__(self):
        return hash((self.n, self.model, self.r0))

    @property
    def is_flat(self) -> bool:
        return self.model == 'flat'

    @property
    def is_hyperbolic(self) -> bool:
        return self.model != 'flat'

    def contains(self, p: Point) -> bool:
        """
        Is ``p`` in the closed half-space (and inside the ball, for the ball
        model)?
        """
        p = as_point(p)
        if p.shape != (self.n,) or p[-1] < 0.0:
            return False
        if self.model == 'hyperbolic-ball':
            return float(np.dot(p, p)) < 1.0
        return True

    def on_boundary(self, p: Point, tol: float = 1e-12) -> bool:
        """
        Is ``p`` a point of the boundary hyperplane?
        """
        p = as_point(p)
        scale = max(1.0, float(np.linalg.norm(p)))
        return self.contains(p) and abs(p[-1]) <= tol * scale

    def check_point(self, p: Point) -> Array:
        """
        Validate and return ``p`` as an array.
        """
        p = as_point(p)
        if not self.contains(p):
            raise DomainError('Point is outside the chart', p, self)
        return p


class _ProductDomain(object):
    """
    The chart ``R x D`` of a Killing development, the extra coordinate first.
    """
    def __init__(self, base: ChartDomain):
        self.base = base
        self.n = base.n + 1

    def contains(self, q: Point) -> bool:
        return self.base.contains(as_point(q)[1:])


class TensorField(object):
    """
    A tensor field given by an evaluation map from points to component
    arrays, with optional analytic derivative maps.

    ``rank`` is the (contravariant, covariant) valence: metrics are
    ``(0, 2)``, vector fields ``(1, 0)``, covectors ``(0, 1)`` and scalars
    ``(0, 0)``.
    """
    def __init__(self,
                 evaluate: Evaluator,
                 rank: Rank = (0, 2),
                 d_eval: OptionalEvaluator = None,
                 dd_eval: OptionalEvaluator = None,
                 symmetric: bool = False,
                 domain: Optional[ChartDomain] = None,
                 name: Optional[str] = None):
        self.evaluate = evaluate
        self.rank = tuple(rank)
        self.d_eval = d_eval
        self.dd_eval = dd_eval
        self.symmetric = symmetric
        self.domain = domain
        self.name = name

    def __repr__(self):
        return 'TensorField(name={!r}, rank={})'.format(self.name, self.rank)

    @property
    def valence(self) -> int:
        return sum(self.rank)

    def __call__(self, p: Point) -> Array:
        p = as_point(p)
        value = np.asarray(self.evaluate(p), dtype=float)
        if not np.all(np.isfinite(value)):
            raise EvalError(p, self.name)
        return value

    def contains(self, p: Point) -> bool:
        return self.domain is None or self.domain.contains(p)

    def check_symmetric(self, points: Sequence[Point],
                        tol: float = 1e-12) -> bool:
        """
        Do sampled values of a two-index field come out symmetric?
        """
        if self.valence != 2:
            return False
        for p in points:
            value = self(p)
            if np.max(np.abs(value - value.T), initial=0.0) > tol * max(
                    1.0, float(np.max(np.abs(value), initial=0.0))):
                return False
        return True

    def with_domain(self, domain: ChartDomain) -> 'TensorField':
        return TensorField(
            self.evaluate, rank=self.rank, d_eval=self.d_eval,
            dd_eval=self.dd_eval, symmetric=self.symmetric, domain=domain,
            name=self.name)


def constant_field(value, rank: Rank, domain: Optional[ChartDomain] = None,
                   name: Optional[str] = None) -> TensorField:
    """
    A field with the same components everywhere, and exact zero derivatives.
    """
    value = np.array(value, dtype=float)

    def _d(p):
        return np.zeros((len(p),) + value.shape)

    def _dd(p):
        return np.zeros((len(p), len(p)) + value.shape)

    return TensorField(
        lambda p: value.copy(), rank=rank, d_eval=_d, dd_eval=_dd,
        symmetric=value.ndim == 2 and np.allclose(value, value.T),
        domain=domain, name=name)


def zero_field(n: int, rank: Rank, domain: Optional[ChartDomain] = None,
               name: Optional[str] = None) -> TensorField:
    return constant_field(np.zeros((n,) * sum(rank)), rank, domain, name)


def difference(func: Callable[[Array], Array],
               p: Point,
               axis: int,
               step: float,
               contains: Optional[Callable[[Array], bool]] = None) -> Array:
    """
    Second-order difference quotient of ``func`` along a coordinate axis.

    Central differences are used when both neighbours lie in the domain,
    otherwise a one-sided three-point stencil pointing into the domain.
    """
    p = as_point(p)
    e = np.zeros_like(p)
    e[axis] = step
    if contains is None:
        def contains(q):
            return True
    forward, backward = contains(p + e), contains(p - e)
    if forward and backward:
        return (np.asarray(func(p + e)) - np.asarray(func(p - e))) / (
            2.0 * step)
    if forward and contains(p + 2 * e):
        return (-3.0 * np.asarray(func(p)) + 4.0 * np.asarray(func(p + e)) -
                np.asarray(func(p + 2 * e))) / (2.0 * step)
    if backward and contains(p - 2 * e):
        return (3.0 * np.asarray(func(p)) - 4.0 * np.asarray(func(p - e)) +
                np.asarray(func(p - 2 * e))) / (2.0 * step)
    raise StencilError(p, axis)


def _field_contains(field: TensorField):
    return field.contains


def _gradient(field: TensorField, p: Array, eta: float) -> Array:
    if field.d_eval is not None:
        return np.asarray(field.d_eval(p), dtype=float)
    return np.stack([
        difference(field, p, a, eta, field.contains)
        for a in range(len(p))])


def _hessian(field: TensorField, p: Array, eta: float) -> Array:
    if field.dd_eval is not None:
        return np.asarray(field.dd_eval(p), dtype=float)
    return np.stack([
        difference(lambda q: _gradient(field, q, eta), p, a, eta,
                   field.contains)
        for a in range(len(p))])


def gradient(field: TensorField, p: Point,
             step: Optional[float] = None) -> Array:
    """
    All first derivatives of a field, differentiation index first.
    """
    p = as_point(p)
    return _gradient(field, p, default_step(p) if step is None else step)


def hessian(field: TensorField, p: Point,
            step: Optional[float] = None) -> Array:
    """
    All second derivatives of a field, differentiation indices first.
    """
    p = as_point(p)
    return _hessian(field, p, default_step(p) if step is None else step)


def fd_derivative(field: TensorField,
                  p: Point,
                  multi_index: Sequence[int],
                  step: Optional[float] = None) -> Array:
    """
    Partial derivative of a field along ``multi_index`` at ``p``.

    Analytic derivative maps are used when the field provides them; higher
    orders are nested first differences with a common step.
    """
    p = as_point(p)
    if field.domain is not None and not field.domain.contains(p):
        raise DomainError('Point is outside the chart', p, field.domain)
    multi_index = tuple(multi_index)
    eta = default_step(p) if step is None else step
    if not multi_index:
        return field(p)
    if len(multi_index) == 1 and field.d_eval is not None:
        return np.asarray(field.d_eval(p), dtype=float)[multi_index[0]]
    if len(multi_index) == 2 and field.dd_eval is not None:
        return np.asarray(field.dd_eval(p), dtype=float)[multi_index]
    head, rest = multi_index[0], multi_index[1:]
    return difference(
        lambda q: fd_derivative(field, q, rest, eta), p, head, eta,
        field.contains)


def metric_inverse(gp: Array, p: Optional[Point] = None,
                   lorentzian: bool = False) -> Array:
    """
    Inverse of a metric matrix.

    Riemannian metrics must be positive definite. With ``lorentzian`` any
    signature is accepted and only a numerically singular matrix is refused.
    """
    if lorentzian:
        if (not np.all(np.isfinite(gp)) or
                np.linalg.cond(gp) > 1.0 / SINGULAR_RCOND):
            raise SingularMetricError(p)
        return np.linalg.inv(gp)
    try:
        np.linalg.cholesky(gp)
    except np.linalg.LinAlgError:
        raise SingularMetricError(p)
    return np.linalg.inv(gp)


def _lowered_christoffel(dg: Array) -> Array:
    # low[i, j, l] = g_lk Gamma^k_ij
    return 0.5 * (dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0))


def christoffel(ginv: Array, dg: Array) -> Array:
    """
    Christoffel symbols ``G[k, i, j] = Gamma^k_ij``.
    """
    return np.einsum('kl,ijl->kij', ginv, _lowered_christoffel(dg))


def christoffel_derivative(ginv: Array, dg: Array, ddg: Array) -> Array:
    """
    First derivatives ``dG[a, k, i, j] = d_a Gamma^k_ij``.
    """
    low = _lowered_christoffel(dg)
    dlow = 0.5 * (ddg + ddg.transpose(0, 2, 1, 3) - ddg.transpose(0, 2, 3, 1))
    dginv = -np.einsum('km,amn,nl->akl', ginv, dg, ginv)
    return (np.einsum('kl,aijl->akij', ginv, dlow) +
            np.einsum('akl,ijl->akij', dginv, low))


def riemann_from_christoffel(gp: Array, G: Array, dG: Array) -> Array:
    """
    Fully covariant Riemann tensor from Christoffel symbols and their
    derivatives.
    """
    rup = (np.einsum('mrns->rsmn', dG) - np.einsum('nrms->rsmn', dG) +
           np.einsum('rml,lns->rsmn', G, G) -
           np.einsum('rnl,lms->rsmn', G, G))
    return np.einsum('ir,rjkl->ijkl', gp, rup)


def covariant_derivative(T: Array, dT: Array, G: Array) -> Array:
    """
    Covariant derivative ``nabla_a T_bc`` of a covariant two-tensor.
    """
    return (dT - np.einsum('lab,lc->abc', G, T) -
            np.einsum('lac,bl->abc', G, T))


def divergence(ginv: Array, T: Array, dT: Array, G: Array) -> Array:
    """
    Divergence ``g^ab nabla_a T_bc`` of a covariant two-tensor.
    """
    return np.einsum('ab,abc->c', ginv, covariant_derivative(T, dT, G))


def covector_divergence(ginv: Array, w: Array, dw: Array, G: Array) -> float:
    """
    Divergence ``g^ab nabla_a w_b`` of a covector.
    """
    return float(np.einsum('ab,ab->', ginv,
                           dw - np.einsum('lab,l->ab', G, w)))


class CurvatureBundle(NamedTuple):
    """
    Levi-Civita curvature at one point.
    """
    christoffel: Array
    riemann: Array
    ricci: Array
    scalar: float
    symmetry_residual: float
    bianchi_residual: float


def _curvature_from_derivatives(gp, ginv, dg, ddg) -> CurvatureBundle:
    G = christoffel(ginv, dg)
    dG = christoffel_derivative(ginv, dg, ddg)
    R = riemann_from_christoffel(gp, G, dG)
    ric = np.einsum('ik,ijkl->jl', ginv, R)
    scalar = float(np.einsum('jl,jl->', ginv, ric))
    symmetry = max(
        float(np.max(np.abs(R + R.transpose(1, 0, 2, 3)))),
        float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))),
        float(np.max(np.abs(R - R.transpose(2, 3, 0, 1)))))
    bianchi = float(np.max(np.abs(
        R + np.einsum('iklj->ijkl', R) + np.einsum('iljk->ijkl', R))))
    return CurvatureBundle(G, R, ric, scalar, symmetry, bianchi)


def curvature(g: TensorField, p: Point,
              step: Optional[float] = None,
              lorentzian: bool = False) -> CurvatureBundle:
    """
    Christoffel symbols, Riemann and Ricci tensors and scalar curvature of a
    metric field at ``p``. Pass ``lorentzian`` for indefinite metrics.
    """
    p = as_point(p)
    eta = default_step(p) if step is None else step
    gp = g(p)
    ginv = metric_inverse(gp, p, lorentzian)
    dg = _gradient(g, p, eta)
    ddg = _hessian(g, p, eta)
    # Mixed nested differences commute only up to truncation.
    ddg = 0.5 * (ddg + ddg.transpose(1, 0, 2, 3))
    return _curvature_from_derivatives(gp, ginv, dg, ddg)


def orthonormal_frame(gp: Array, normal: Optional[Array] = None) -> Array:
    """
    Gram-Schmidt frame of ``gp`` from the coordinate vectors, as columns.

    With ``normal`` given, the tangential coordinate vectors are
    orthonormalized and ``normal`` becomes the last frame vector.
    """
    n = gp.shape[0]
    count = n - 1 if normal is not None else n
    frame = []
    for k in range(count):
        v = np.zeros(n)
        v[k] = 1.0
        for e in frame:
            v = v - (e @ gp @ v) * e
        frame.append(v / math.sqrt(v @ gp @ v))
    if normal is not None:
        frame.append(np.asarray(normal, dtype=float))
    return np.stack(frame, axis=1)


class BoundaryGeometry(NamedTuple):
    """
    Geometry of the boundary hyperplane at one point.
    """
    #: Unit inward normal, coordinate components.
    normal: Array
    #: Second fundamental form in the tangential coordinate directions.
    second_fundamental_form: Array
    mean_curvature: float
    induced_metric: Array
    #: Orthonormal frame as columns, last column the normal.
    frame: Array


def _require_boundary(field: TensorField, p: Array):
    if field.domain is not None:
        if not field.domain.on_boundary(p):
            raise DomainError('Point is not on the boundary', p)
    elif abs(p[-1]) > 1e-12 * max(1.0, float(np.linalg.norm(p))):
        raise DomainError('Point is not on the boundary', p)


def boundary_geometry(g: TensorField, p: Point,
                      step: Optional[float] = None) -> BoundaryGeometry:
    """
    Unit inward normal, second fundamental form and mean curvature of the
    boundary at ``p``.

    The second fundamental form is ``b(X, Y) = g(nabla_X normal, Y)``, so
    boundaries bending towards the interior have positive mean curvature.
    """
    p = as_point(p)
    _require_boundary(g, p)
    eta = default_step(p) if step is None else step
    gp = g(p)
    ginv = metric_inverse(gp, p)
    n = len(p)
    normal = ginv[:, n - 1] / math.sqrt(ginv[n - 1, n - 1])
    low = _lowered_christoffel(_gradient(g, p, eta))
    b = -np.einsum('l,ABl->AB', normal, low[:n - 1, :n - 1, :])
    gamma = gp[:n - 1, :n - 1]
    H = float(np.einsum('AB,AB->', np.linalg.inv(gamma), b))
    return BoundaryGeometry(
        normal, b, H, gamma, orthonormal_frame(gp, normal))


def einstein_and_newton(g: TensorField, p: Point,
                        step: Optional[float] = None,
                        boundary: Optional[bool] = None):
    """
    Einstein tensor ``Ric - R g / 2`` and, at boundary points, the first
    Newton tensor ``H gamma - b`` of the boundary.

    ``boundary`` forces or suppresses the Newton tensor; by default it is
    computed whenever ``p`` lies on the boundary.
    """
    p = as_point(p)
    bundle = curvature(g, p, step)
    gp = g(p)
    G = bundle.ricci - 0.5 * bundle.scalar * gp
    if boundary is None:
        boundary = abs(p[-1]) <= 1e-12 * max(1.0, float(np.linalg.norm(p)))
    N = None
    if boundary:
        geo = boundary_geometry(g, p, step)
        N = (geo.mean_curvature * geo.induced_metric -
             geo.second_fundamental_form)
    return G, N


def lie_derivative_metric(g: TensorField, W: TensorField, p: Point,
                          step: Optional[float] = None) -> Array:
    """
    ``(L_W g)_ij = W^k d_k g_ij + g_kj d_i W^k + g_ik d_j W^k``.
    """
    p = as_point(p)
    eta = default_step(p) if step is None else step
    gp, wp = g(p), W(p)
    dg, dw = _gradient(g, p, eta), _gradient(W, p, eta)
    return (np.einsum('k,kij->ij', wp, dg) + np.einsum('kj,ik->ij', gp, dw) +
            np.einsum('ik,jk->ij', gp, dw))


class InitialDataSet(object):
    """
    Metric and second fundamental form on a half-space chart of the
    asymptotic region.
    """
    def __init__(self,
                 domain: ChartDomain,
                 g: TensorField,
                 h: TensorField,
                 decay: float,
                 cosmological_constant: Optional[float] = None,
                 name: Optional[str] = None):
        n = domain.n
        threshold = n / 2.0 if domain.is_hyperbolic else (n - 2) / 2.0
        if not decay > threshold:
            raise InputError(
                'Decay exponent must exceed {}'.format(threshold), decay)
        lambda_n = -n * (n - 1) / 2.0
        if cosmological_constant is None:
            cosmological_constant = lambda_n if domain.is_hyperbolic else 0.0
        if cosmological_constant not in (0.0, lambda_n):
            raise InputError(
                'Cosmological constant must be 0 or {}'.format(lambda_n),
                cosmological_constant)
        self.domain = domain
        self.g = g.with_domain(domain)
        self.h = h.with_domain(domain)
        self.decay = float(decay)
        self.cosmological_constant = float(cosmological_constant)
        self.name = name

    def __repr__(self):
        return 'InitialDataSet(name={!r}, domain={!r})'.format(
            self.name, self.domain)

    @property
    def n(self) -> int:
        return self.domain.n


class KillingDevelopmentReport(NamedTuple):
    """
    Residuals of the curvature formulas of a Killing development.
    """
    point: Array
    lie_residual: float
    norm_residual: float
    precondition_ok: bool
    refused: bool
    spatial_residual: Optional[float] = None
    mixed_residual: Optional[float] = None
    mixed_gauss_residual: Optional[float] = None
    normal_residual: Optional[float] = None

    @property
    def max_residual(self) -> float:
        values = [self.spatial_residual, self.mixed_residual,
                  self.mixed_gauss_residual, self.normal_residual]
        return max((v for v in values if v is not None), default=math.nan)


def development_metric(data: InitialDataSet, V: TensorField,
                       W: TensorField) -> TensorField:
    """
    The Lorentzian metric ``-V^2 du^2 + g(dx - W du, dx - W du)`` on the
    product chart, coordinate ``u`` first.
    """
    n = data.n

    def _evaluate(q):
        x = q[1:]
        gp, vp, wp = data.g(x), float(V(x)), W(x)
        gw = gp @ wp
        out = np.empty((n + 1, n + 1))
        out[0, 0] = -vp * vp + float(wp @ gw)
        out[0, 1:] = out[1:, 0] = -gw
        out[1:, 1:] = gp
        return out

    return TensorField(_evaluate, rank=(0, 2), symmetric=True,
                       domain=_ProductDomain(data.domain),
                       name='development')


def killing_development_check(data: InitialDataSet,
                              V: TensorField,
                              W: TensorField,
                              p: Point,
                              step: Optional[float] = None,
                              tol: float = 1e-5) -> KillingDevelopmentReport:
    """
    Compare the curvature of the Killing development of ``(g, h)`` along
    ``(V, W)`` with its expression through the curvature of ``g`` and ``h``.

    The comparison is refused, with a warning, when ``L_W g = 2 V h`` or
    ``d(V^2 - |W|^2) = 0`` fail at ``p`` by more than ``tol``.
    """
    p = data.domain.check_point(p)
    eta = default_step(p) if step is None else step
    vp = float(V(p))
    if not vp > 0:
        raise DegenerateLapseError(p, vp)
    n = data.n
    hp = data.h(p)
    lie = lie_derivative_metric(data.g, W, p, eta) - 2.0 * vp * hp

    def _norm_gap(q):
        wq = W(q)
        return float(V(q)) ** 2 - float(wq @ data.g(q) @ wq)

    dnorm = np.array([
        difference(_norm_gap, p, a, eta, data.domain.contains)
        for a in range(n)])
    lie_residual = float(np.max(np.abs(lie)))
    norm_residual = float(np.max(np.abs(dnorm)))
    ok = lie_residual <= tol and norm_residual <= tol
    if not ok:
        log.warning(
            f'Killing development precondition fails at {p}: '
            f'|L_W g - 2Vh|={lie_residual:.3e}, '
            f'|d(V^2-|W|^2)|={norm_residual:.3e}')
        return KillingDevelopmentReport(
            p, lie_residual, norm_residual, False, True)

    base = curvature(data.g, p, eta)
    wp = W(p)
    q = np.concatenate([[0.0], p])
    Rt = curvature(development_metric(data, V, W), q, eta,
                   lorentzian=True).riemann
    e0 = np.concatenate([[1.0], wp]) / vp
    Rt_spatial = Rt[1:, 1:, 1:, 1:]
    Rt_mixed = np.einsum('ijkd,d->ijk', Rt[1:, 1:, 1:, :], e0)
    Rt_normal = np.einsum('ibkd,b,d->ik', Rt[1:, :, 1:, :], e0, e0)

    gauss = (base.riemann + np.einsum('ik,jt->ijkt', hp, hp) -
             np.einsum('it,jk->ijkt', hp, hp))
    nabla_h = covariant_derivative(
        hp, _gradient(data.h, p, eta), base.christoffel)
    # nabla_h[a, b, c] = h_bc;a
    codazzi = (np.einsum('ikj->ijk', nabla_h) -
               np.einsum('jki->ijk', nabla_h))
    normal = np.einsum('kit,t->ik', nabla_h, wp) / vp - np.einsum(
        'tik,t->ik', nabla_h, wp) / vp
    report = KillingDevelopmentReport(
        p, lie_residual, norm_residual, True, False,
        spatial_residual=float(np.max(np.abs(Rt_spatial - gauss))),
        mixed_residual=float(np.max(np.abs(Rt_mixed - codazzi))),
        mixed_gauss_residual=float(np.max(np.abs(
            Rt_mixed - np.einsum('ijkt,t->ijk', gauss, wp) / vp))),
        normal_residual=float(np.max(np.abs(Rt_normal - normal))))
    log.debug(f'Killing development residuals at {p}: {report}')
    return report
