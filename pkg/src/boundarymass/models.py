"""
Model geometries of the asymptotic region: Euclidean half-space with
``delta`` and hyperbolic half-space with ``b`` in polar or half-ball
coordinates, together with their static potentials, boundary-adapted Killing
fields and boundary-preserving isometries.

Hyperbolic charts are tied to the hyperboloid ``x_0^2 - |y|^2 = 1`` by
``x = (sqrt(1 + |y|^2), y)`` (polar) and ``y = 2 z / (1 - |z|^2)`` (ball).
"""
import enum
import math
from typing import List, Optional, Sequence

import numpy as np

from . import _log as log
from ._types import Array, Point
from .errors import DomainError, InputError, InvalidIsometryError
from .geometry import (
    ChartDomain,
    InitialDataSet,
    TensorField,
    as_point,
    christoffel,
    constant_field,
    lie_derivative_metric,
    metric_inverse)


class StaticPotential(TensorField):
    """
    A static potential ``V_(a)`` with exact gradient and Hessian.
    """
    def __init__(self, index: int, evaluate, grad, hess,
                 domain: ChartDomain):
        TensorField.__init__(
            self, evaluate, rank=(0, 0), d_eval=grad, dd_eval=hess,
            domain=domain, name='V_({})'.format(index))
        self.index = index


class KillingField(TensorField):
    """
    A basis element ``W_(a)`` of the boundary-adapted Killing fields.
    """
    def __init__(self, index: int, evaluate, d_eval, domain: ChartDomain):
        TensorField.__init__(
            self, evaluate, rank=(1, 0), d_eval=d_eval, domain=domain,
            name='W_({})'.format(index))
        self.index = index

    @property
    def model(self) -> str:
        return self.domain.model


def _polar_metric(p):
    s = 1.0 + p @ p
    return np.eye(len(p)) - np.outer(p, p) / s


def _polar_metric_d(p):
    n = len(p)
    s = 1.0 + p @ p
    eye = np.eye(n)
    yy = np.outer(p, p)
    return (-(np.einsum('ai,j->aij', eye, p) + np.einsum('i,aj->aij', p, eye))
            / s + 2.0 * np.einsum('a,ij->aij', p, yy) / s ** 2)


def _polar_metric_dd(p):
    n = len(p)
    s = 1.0 + p @ p
    eye = np.eye(n)
    yy = np.outer(p, p)
    sym = np.einsum('ai,j->aij', eye, p) + np.einsum('i,aj->aij', p, eye)
    return (-(np.einsum('ai,cj->acij', eye, eye) +
              np.einsum('ci,aj->acij', eye, eye)) / s +
            2.0 * np.einsum('c,aij->acij', p, sym) / s ** 2 +
            2.0 * (np.einsum('ac,ij->acij', eye, yy) +
                   np.einsum('a,cij->acij', p, sym)) / s ** 2 -
            8.0 * np.einsum('ac,ij->acij', yy, yy) / s ** 3)


def _ball_metric(p):
    u = 1.0 - p @ p
    return 4.0 / u ** 2 * np.eye(len(p))


def _ball_metric_d(p):
    u = 1.0 - p @ p
    return np.einsum('a,ij->aij', 16.0 * p / u ** 3, np.eye(len(p)))


def _ball_metric_dd(p):
    n = len(p)
    u = 1.0 - p @ p
    conformal = 16.0 * np.eye(n) / u ** 3 + 96.0 * np.outer(p, p) / u ** 4
    return np.einsum('ac,ij->acij', conformal, np.eye(n))


def reference_metric(domain: ChartDomain) -> TensorField:
    """
    The model metric ``g_0`` of a chart, with exact derivatives.
    """
    if domain.is_flat:
        return constant_field(np.eye(domain.n), (0, 2), domain, 'delta')
    if domain.model == 'hyperbolic-polar':
        return TensorField(
            _polar_metric, rank=(0, 2), d_eval=_polar_metric_d,
            dd_eval=_polar_metric_dd, symmetric=True, domain=domain,
            name='b')
    return TensorField(
        _ball_metric, rank=(0, 2), d_eval=_ball_metric_d,
        dd_eval=_ball_metric_dd, symmetric=True, domain=domain, name='b')


def reference_ricci_factor(domain: ChartDomain) -> float:
    """
    ``Ric_{g_0} = factor * g_0``.
    """
    return 0.0 if domain.is_flat else -(domain.n - 1.0)


def _flat_potentials(domain):
    n = domain.n
    return [StaticPotential(
        0, lambda p: np.array(1.0), lambda p: np.zeros(n),
        lambda p: np.zeros((n, n)), domain)]


def _polar_potentials(domain):
    n = domain.n

    def v0(p):
        p = as_point(p)
        return np.array(math.sqrt(1.0 + p @ p))

    def v0_grad(p):
        p = as_point(p)
        return p / math.sqrt(1.0 + p @ p)

    def v0_hess(p):
        p = as_point(p)
        root = math.sqrt(1.0 + p @ p)
        return np.eye(n) / root - np.outer(p, p) / root ** 3

    def coordinate(k):
        return StaticPotential(
            k, lambda p: np.array(p[k - 1]),
            lambda p: np.eye(n)[k - 1],
            lambda p: np.zeros((n, n)), domain)

    return ([StaticPotential(0, v0, v0_grad, v0_hess, domain)] +
            [coordinate(k) for k in range(1, n)])


def _ball_potentials(domain):
    n = domain.n
    eye = np.eye(n)

    def v0(p):
        return np.array(2.0 / (1.0 - p @ p) - 1.0)

    def v0_grad(p):
        return 4.0 * p / (1.0 - p @ p) ** 2

    def v0_hess(p):
        u = 1.0 - p @ p
        return 4.0 * eye / u ** 2 + 16.0 * np.outer(p, p) / u ** 3

    def coordinate(k):
        A = k - 1

        def value(p):
            return np.array(2.0 * p[A] / (1.0 - p @ p))

        def grad(p):
            u = 1.0 - p @ p
            return 2.0 * eye[A] / u + 4.0 * p[A] * p / u ** 2

        def hess(p):
            u = 1.0 - p @ p
            return (4.0 * (np.outer(eye[A], p) + np.outer(p, eye[A]) +
                           p[A] * eye) / u ** 2 +
                    16.0 * p[A] * np.outer(p, p) / u ** 3)

        return StaticPotential(k, value, grad, hess, domain)

    return ([StaticPotential(0, v0, v0_grad, v0_hess, domain)] +
            [coordinate(k) for k in range(1, n)])


def static_potentials(domain: ChartDomain) -> List[StaticPotential]:
    """
    Basis of static potentials: the constant 1 on the flat model and
    ``V_(0), ..., V_(n-1)`` on the hyperbolic models.
    """
    if domain.is_flat:
        return _flat_potentials(domain)
    if domain.model == 'hyperbolic-polar':
        return _polar_potentials(domain)
    return _ball_potentials(domain)


def _flat_killing(domain):
    n = domain.n

    def translation(k):
        e = np.eye(n)[k - 1]
        return KillingField(
            k, lambda p: e.copy(), lambda p: np.zeros((n, n)), domain)

    return [translation(k) for k in range(1, n)]


def _polar_killing(domain):
    n = domain.n
    N = n - 1
    eye = np.eye(n)

    def boost(p):
        return math.sqrt(1.0 + p @ p) * eye[N]

    def boost_d(p):
        return np.outer(p / math.sqrt(1.0 + p @ p), eye[N])

    def rotation(k):
        A = k - 1

        def value(p):
            return p[A] * eye[N] - p[N] * eye[A]

        def d_eval(p):
            return np.outer(eye[A], eye[N]) - np.outer(eye[N], eye[A])

        return KillingField(k, value, d_eval, domain)

    return ([KillingField(0, boost, boost_d, domain)] +
            [rotation(k) for k in range(1, n)])


def _ball_killing(domain):
    n = domain.n
    N = n - 1
    eye = np.eye(n)

    def boost(p):
        return 0.5 * (1.0 + p @ p) * eye[N] - p[N] * p

    def boost_d(p):
        return (np.outer(p, eye[N]) - np.outer(eye[N], p) - p[N] * eye)

    def rotation(k):
        A = k - 1

        def value(p):
            return p[A] * eye[N] - p[N] * eye[A]

        def d_eval(p):
            return np.outer(eye[A], eye[N]) - np.outer(eye[N], eye[A])

        return KillingField(k, value, d_eval, domain)

    return ([KillingField(0, boost, boost_d, domain)] +
            [rotation(k) for k in range(1, n)])


def killing_basis(domain: ChartDomain) -> List[KillingField]:
    """
    Killing fields paired with the static potentials: boundary translations
    ``d_A`` on the flat model, ``L_(a)n`` on the hyperbolic models.

    On the hyperbolic boundary ``W_(a) = V_(a) * normal``.
    """
    if domain.is_flat:
        return _flat_killing(domain)
    if domain.model == 'hyperbolic-polar':
        return _polar_killing(domain)
    return _ball_killing(domain)


def static_residual(domain: ChartDomain, V: TensorField, p: Point):
    """
    Residuals of the static equations of ``V`` at ``p``: the interior
    equation ``Hess V - (Lap V) g_0 - V Ric`` and, at boundary points, the
    boundary equation ``(dV/d normal) gamma_0 + V b``.
    """
    p = domain.check_point(p)
    g0 = reference_metric(domain)
    gp = g0(p)
    ginv = metric_inverse(gp, p)
    G = christoffel(ginv, g0.d_eval(p))
    dv = V.d_eval(p)
    hess = V.dd_eval(p) - np.einsum('kij,k->ij', G, dv)
    lap = float(np.einsum('ij,ij->', ginv, hess))
    v = float(V(p))
    interior = hess - lap * gp - v * reference_ricci_factor(domain) * gp
    boundary = None
    if domain.on_boundary(p):
        n = domain.n
        normal = ginv[:, n - 1] / math.sqrt(ginv[n - 1, n - 1])
        low = 0.5 * (g0.d_eval(p) + g0.d_eval(p).transpose(1, 0, 2) -
                     g0.d_eval(p).transpose(1, 2, 0))
        b = -np.einsum('l,ABl->AB', normal, low[:n - 1, :n - 1, :])
        boundary = float(np.max(np.abs(
            float(normal @ dv) * gp[:n - 1, :n - 1] + v * b)))
    return float(np.max(np.abs(interior))), boundary


def killing_residual(domain: ChartDomain, W: TensorField, p: Point,
                     step: Optional[float] = None) -> float:
    """
    ``max |L_W g_0|`` at ``p``.
    """
    p = domain.check_point(p)
    return float(np.max(np.abs(
        lie_derivative_metric(reference_metric(domain), W, p, step))))


def boundary_alignment(domain: ChartDomain, W: TensorField, p: Point) -> float:
    """
    How far a Killing field is from its expected boundary behaviour at a
    boundary point: the tangential part ``|g_0(W, e_A)|`` on hyperbolic
    models, the normal part ``|W^n|`` on the flat model.
    """
    p = domain.check_point(p)
    if not domain.on_boundary(p):
        raise DomainError('Point is not on the boundary', p)
    wp = W(p)
    if domain.is_flat:
        return abs(float(wp[-1]))
    gp = reference_metric(domain)(p)
    return float(np.max(np.abs(gp[:-1, :] @ wp)))


def perturbation(data: InitialDataSet) -> TensorField:
    """
    ``f = g - g_0``, with analytic derivatives when ``g`` has them.
    """
    g, g0 = data.g, reference_metric(data.domain)
    d_eval = dd_eval = None
    if g.d_eval is not None:
        def d_eval(p):
            p = as_point(p)
            return g.d_eval(p) - g0.d_eval(p)
    if g.dd_eval is not None:
        def dd_eval(p):
            p = as_point(p)
            return g.dd_eval(p) - g0.dd_eval(p)
    return TensorField(
        lambda p: g(p) - g0(p), rank=(0, 2), d_eval=d_eval, dd_eval=dd_eval,
        symmetric=True, domain=data.domain, name='f')


# Hyperboloid coordinates.

def to_hyperboloid(domain: ChartDomain, p: Point) -> Array:
    """
    Hyperboloid point ``(x_0, y)`` of a hyperbolic chart point.
    """
    p = as_point(p)
    if domain.model == 'hyperbolic-polar':
        return np.concatenate([[math.sqrt(1.0 + p @ p)], p])
    if domain.model == 'hyperbolic-ball':
        u = 1.0 - p @ p
        return np.concatenate([[(1.0 + p @ p) / u], 2.0 * p / u])
    raise DomainError('No hyperboloid for model', domain.model)


def from_hyperboloid(domain: ChartDomain, x: Point) -> Array:
    """
    Chart point of a point ``(x_0, y)`` of the upper hyperboloid.
    """
    x = as_point(x)
    if domain.model == 'hyperbolic-polar':
        return x[1:].copy()
    if domain.model == 'hyperbolic-ball':
        return x[1:] / (1.0 + x[0])
    raise DomainError('No hyperboloid for model', domain.model)


def _to_hyperboloid_jacobian(domain, p):
    n = len(p)
    if domain.model == 'hyperbolic-polar':
        return np.vstack([p / math.sqrt(1.0 + p @ p), np.eye(n)])
    u = 1.0 - p @ p
    return np.vstack([4.0 * p / u ** 2,
                      2.0 * np.eye(n) / u + 4.0 * np.outer(p, p) / u ** 2])


def _from_hyperboloid_jacobian(domain, x):
    n = len(x) - 1
    if domain.model == 'hyperbolic-polar':
        return np.hstack([np.zeros((n, 1)), np.eye(n)])
    y, scale = x[1:], 1.0 / (1.0 + x[0])
    return np.hstack([-(y * scale ** 2)[:, None], scale * np.eye(n)])


def polar_to_ball(p: Point) -> Array:
    """
    ``z = y / (1 + sqrt(1 + |y|^2))``.
    """
    p = as_point(p)
    return p / (1.0 + math.sqrt(1.0 + p @ p))


def ball_to_polar(p: Point) -> Array:
    """
    ``y = 2 z / (1 - |z|^2)``.
    """
    p = as_point(p)
    return 2.0 * p / (1.0 - p @ p)


def _polar_to_ball_jacobian(p):
    root = math.sqrt(1.0 + p @ p)
    return (np.eye(len(p)) / (1.0 + root) -
            np.outer(p, p) / (root * (1.0 + root) ** 2))


def _ball_to_polar_jacobian(p):
    u = 1.0 - p @ p
    return 2.0 * np.eye(len(p)) / u + 4.0 * np.outer(p, p) / u ** 2


def pullback(field: TensorField, mapping, jacobian,
             domain: ChartDomain) -> TensorField:
    """
    Pull a covariant two-tensor back along ``mapping``.
    """
    def _evaluate(p):
        J = jacobian(p)
        return J.T @ field(mapping(p)) @ J

    return TensorField(_evaluate, rank=field.rank, symmetric=field.symmetric,
                       domain=domain, name=field.name)


def change_model(data: InitialDataSet, target: str) -> InitialDataSet:
    """
    Re-express hyperbolic data in another coordinate model.
    """
    source = data.domain
    if source.is_flat or target not in ('hyperbolic-polar', 'hyperbolic-ball'):
        raise InputError('Model change needs hyperbolic models', target)
    if target == source.model:
        return data
    if target == 'hyperbolic-ball':
        r0 = source.r0 / (1.0 + math.sqrt(1.0 + source.r0 ** 2))
        mapping, jacobian = ball_to_polar, _ball_to_polar_jacobian
    else:
        r0 = 2.0 * source.r0 / (1.0 - source.r0 ** 2)
        mapping, jacobian = polar_to_ball, _polar_to_ball_jacobian
    domain = ChartDomain(source.n, target, r0)
    log.debug(f'Changing {data.name} from {source.model} to {target}')
    return InitialDataSet(
        domain,
        pullback(data.g, mapping, jacobian, domain),
        pullback(data.h, mapping, jacobian, domain),
        data.decay, data.cosmological_constant, data.name)


def transport_field(field: TensorField, domain: ChartDomain) -> TensorField:
    """
    Re-express a scalar or vector field of one hyperbolic model on ``domain``
    of the other. Fields without a domain, or already on ``domain``'s model,
    are returned unchanged.
    """
    source = field.domain
    if source is None or source.model == domain.model:
        return field
    if source.is_flat or domain.is_flat:
        raise DomainError('Transport needs hyperbolic models', domain.model)
    if domain.model == 'hyperbolic-polar':
        to_source = polar_to_ball
        back, forward = _polar_to_ball_jacobian, _ball_to_polar_jacobian
    else:
        to_source = ball_to_polar
        back, forward = _ball_to_polar_jacobian, _polar_to_ball_jacobian
    if field.rank == (0, 0):
        d_eval = None
        if field.d_eval is not None:
            def d_eval(p):
                p = as_point(p)
                return back(p).T @ np.asarray(field.d_eval(to_source(p)))
        return TensorField(
            lambda p: field(to_source(p)), rank=(0, 0), d_eval=d_eval,
            domain=domain, name=field.name)
    if field.rank == (1, 0):
        def _evaluate(p):
            q = to_source(p)
            return forward(q) @ field(q)

        return TensorField(_evaluate, rank=(1, 0), domain=domain,
                           name=field.name)
    raise InputError('Only scalars and vectors are transported', field.rank)


# Isometries.

class FlatIsometry(object):
    """
    ``x -> Q x + t`` with ``Q`` orthogonal fixing the normal axis and ``t``
    tangent to the boundary.
    """
    def __init__(self, rotation, shift=None):
        Q = np.array(rotation, dtype=float)
        n = Q.shape[0]
        t = np.zeros(n) if shift is None else np.array(shift, dtype=float)
        e = np.eye(n)[n - 1]
        if (Q.shape != (n, n) or
                not np.allclose(Q.T @ Q, np.eye(n), atol=1e-12) or
                not np.allclose(Q[n - 1], e) or
                not np.allclose(Q[:, n - 1], e) or
                t.shape != (n,) or t[n - 1] != 0.0):
            raise InvalidIsometryError(
                'Not a boundary-preserving Euclidean isometry', Q, t)
        self.rotation = Q
        self.shift = t

    def __call__(self, p: Point) -> Array:
        return self.rotation @ as_point(p) + self.shift

    def jacobian(self, p: Point) -> Array:
        return self.rotation

    def transform_energy(self, E: float) -> float:
        return E

    def transform_momentum(self, P: Sequence[float]) -> Array:
        R = self.rotation[:-1, :-1]
        return R.T @ np.asarray(P, dtype=float)


def lorentz_form(n: int) -> Array:
    return np.diag([1.0] + [-1.0] * n)


class HyperbolicIsometry(object):
    """
    A Lorentz transformation of the hyperboloid fixing the ``x_n`` axis,
    acting on a hyperbolic chart.
    """
    def __init__(self, matrix, domain: ChartDomain):
        L = np.array(matrix, dtype=float)
        n = domain.n
        e = np.eye(n + 1)[n]
        if (not domain.is_hyperbolic or L.shape != (n + 1, n + 1) or
                not np.allclose(L.T @ lorentz_form(n) @ L, lorentz_form(n),
                                atol=1e-10) or
                not np.allclose(L[n], e) or not np.allclose(L[:, n], e) or
                not L[0, 0] > 0):
            raise InvalidIsometryError(
                'Not a boundary-preserving orthochronous Lorentz matrix', L)
        self.matrix = L
        self.domain = domain

    def __call__(self, p: Point) -> Array:
        return from_hyperboloid(
            self.domain, self.matrix @ to_hyperboloid(self.domain, p))

    def jacobian(self, p: Point) -> Array:
        p = as_point(p)
        x = self.matrix @ to_hyperboloid(self.domain, p)
        return (_from_hyperboloid_jacobian(self.domain, x) @ self.matrix @
                _to_hyperboloid_jacobian(self.domain, p))

    def _restricted_inverse(self):
        n = self.domain.n
        return np.linalg.inv(self.matrix[:n, :n])

    def transform_energy(self, E: Sequence[float]) -> Array:
        return self._restricted_inverse() @ np.asarray(E, dtype=float)

    def transform_momentum(self, P: Sequence[float]) -> Array:
        return self._restricted_inverse() @ np.asarray(P, dtype=float)


def rotation_about_normal(n: int, angle: float,
                          plane: Sequence[int] = (0, 1)) -> Array:
    """
    Rotation by ``angle`` in a plane of tangential coordinates.
    """
    i, j = plane
    if max(i, j) >= n - 1 or i == j:
        raise InputError('Rotation plane must be tangential', plane)
    Q = np.eye(n)
    c, s = math.cos(angle), math.sin(angle)
    Q[i, i] = Q[j, j] = c
    Q[i, j], Q[j, i] = -s, s
    return Q


def boost_matrix(n: int, rapidity: float, axis: int = 1) -> Array:
    """
    Lorentz boost of the hyperboloid in the ``(x_0, x_axis)`` plane.
    """
    if not 1 <= axis < n:
        raise InputError('Boost axis must be tangential', axis)
    L = np.eye(n + 1)
    c, s = math.cosh(rapidity), math.sinh(rapidity)
    L[0, 0] = L[axis, axis] = c
    L[0, axis] = L[axis, 0] = s
    return L


def _boundary_samples(domain: ChartDomain, count: int = 8) -> List[Array]:
    n = domain.n
    radius = 0.5 * domain.r0 if domain.model == 'hyperbolic-ball' else (
        2.0 * domain.r0)
    samples = []
    for k in range(count):
        angle = 2.0 * math.pi * k / count
        p = np.zeros(n)
        p[0] = radius * math.cos(angle)
        p[1] = radius * math.sin(angle)
        samples.append(p)
    return samples


def isometry_apply(domain: ChartDomain, A, data: InitialDataSet,
                   tol: float = 1e-10) -> InitialDataSet:
    """
    Pull initial data back along a boundary-preserving model isometry.
    """
    if data.domain != domain:
        raise InputError('Data and isometry live on different charts',
                         data.domain, domain)
    for p in _boundary_samples(domain):
        q = A(p)
        if abs(q[-1]) > tol * max(1.0, float(np.linalg.norm(q))):
            raise InvalidIsometryError(
                'Isometry moves a boundary point off the boundary', p, q)
    log.debug(f'Pulling back {data.name} along {type(A).__name__}')
    return InitialDataSet(
        domain,
        pullback(data.g, A, A.jacobian, domain),
        pullback(data.h, A, A.jacobian, domain),
        data.decay, data.cosmological_constant, data.name)


# Lorentzian bookkeeping.

class CausalClass(str, enum.Enum):
    ZERO = 'zero'
    TIMELIKE_FUTURE = 'timelike-future'
    TIMELIKE_PAST = 'timelike-past'
    NULL_FUTURE = 'null-future'
    NULL_PAST = 'null-past'
    SPACELIKE = 'spacelike'


def lorentz_inner(v: Sequence[float], w: Sequence[float]) -> float:
    """
    ``<<v, w>> = v_0 w_0 - v_1 w_1 - ... - v_(n-1) w_(n-1)``.
    """
    v, w = np.asarray(v, dtype=float), np.asarray(w, dtype=float)
    return float(v[0] * w[0] - v[1:] @ w[1:])


def causal_classify(v: Sequence[float], eps: float = 1e-12) -> CausalClass:
    """
    Causal character of ``v``; ``|<<v, v>>| <= eps |v|^2`` counts as null.
    """
    v = np.asarray(v, dtype=float)
    norm2 = float(v @ v)
    if norm2 == 0.0:
        return CausalClass.ZERO
    q = lorentz_inner(v, v)
    if abs(q) <= eps * norm2:
        return (CausalClass.NULL_FUTURE if v[0] > 0
                else CausalClass.NULL_PAST)
    if q > 0:
        return (CausalClass.TIMELIKE_FUTURE if v[0] > 0
                else CausalClass.TIMELIKE_PAST)
    return CausalClass.SPACELIKE
