"""
Constraint maps of initial data sets with boundary, their linearization at
the model, the charge density and the dominant energy conditions.
"""
import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from . import _log as log
from . import _quadrature as quadrature
from ._types import Array, Box, Point
from ._util import lexicographic
from .errors import DomainError, InvalidGaugeError
from .geometry import (
    DEFAULT_STEP,
    ChartDomain,
    InitialDataSet,
    TensorField,
    as_point,
    boundary_geometry,
    christoffel,
    covariant_derivative,
    covector_divergence,
    curvature,
    default_step,
    difference,
    divergence,
    gradient,
    hessian,
    lie_derivative_metric,
    metric_inverse,
    zero_field)
from .models import perturbation, reference_metric, reference_ricci_factor


def _step(p: Array, step: Optional[float],
          scale: float = DEFAULT_STEP) -> float:
    return default_step(p, scale) if step is None else step


def _inner2(ginv: Array, a: Array, b: Array) -> float:
    return float(np.einsum('ik,jl,ij,kl->', ginv, ginv, a, b))


def _trace_derivative(ginv: Array, dg: Array, T: Array, dT: Array) -> Array:
    # d_a (g^ij T_ij)
    dginv = -np.einsum('km,amn,nl->akl', ginv, dg, ginv)
    return (np.einsum('akl,kl->a', dginv, T) +
            np.einsum('kl,akl->a', ginv, dT))


def conjugate_momentum(g: TensorField, h: TensorField, p: Point) -> Array:
    """
    ``pi = h - (tr_g h) g``.
    """
    p = as_point(p)
    gp, hp = g(p), h(p)
    ginv = metric_inverse(gp, p)
    return hp - float(np.einsum('ij,ij->', ginv, hp)) * gp


def covector_norm(gp: Array, w: Array) -> float:
    """
    ``|w|_g`` of a covector.
    """
    return math.sqrt(max(0.0, float(w @ np.linalg.solve(gp, w))))


def interior_constraints(data: InitialDataSet, p: Point,
                         step: Optional[float] = None):
    """
    Energy density ``rho = (R - 2 Lambda - |h|^2 + (tr h)^2) / 2`` and
    momentum density ``J = div h - d tr h`` at ``p``.
    """
    p = data.domain.check_point(p)
    eta = _step(p, step)
    bundle = curvature(data.g, p, eta)
    gp, hp = data.g(p), data.h(p)
    ginv = metric_inverse(gp, p)
    dg = gradient(data.g, p, eta)
    dh = gradient(data.h, p, eta)
    trace = float(np.einsum('ij,ij->', ginv, hp))
    rho = 0.5 * (bundle.scalar - 2.0 * data.cosmological_constant -
                 _inner2(ginv, hp, hp) + trace ** 2)
    J = (divergence(ginv, hp, dh, bundle.christoffel) -
         _trace_derivative(ginv, dg, hp, dh))
    return rho, J


def boundary_constraints(data: InitialDataSet, p: Point,
                         step: Optional[float] = None):
    """
    Mean curvature and the components ``pi_nA``, ``pi_nn`` of the conjugate
    momentum in the adapted orthonormal frame at a boundary point.
    """
    p = data.domain.check_point(p)
    if not data.domain.on_boundary(p):
        raise DomainError('Point is not on the boundary', p)
    geo = boundary_geometry(data.g, p, step)
    pi = conjugate_momentum(data.g, data.h, p)
    framed = geo.frame.T @ pi @ geo.frame
    n = data.n
    return (geo.mean_curvature, framed[n - 1, :n - 1].copy(),
            float(framed[n - 1, n - 1]))


class ConstraintValues(NamedTuple):
    """
    Constraint quantities at one point; boundary entries are ``None`` in the
    interior.
    """
    point: Array
    rho: float
    J: Array
    J_norm: float
    H: Optional[float] = None
    pi_tangential: Optional[Array] = None
    pi_normal: Optional[float] = None


def evaluate_constraints(data: InitialDataSet, p: Point,
                         step: Optional[float] = None) -> ConstraintValues:
    p = data.domain.check_point(p)
    rho, J = interior_constraints(data, p, step)
    values = ConstraintValues(p, rho, J, covector_norm(data.g(p), J))
    if data.domain.on_boundary(p):
        H, pi_t, pi_n = boundary_constraints(data, p, step)
        values = values._replace(H=H, pi_tangential=pi_t, pi_normal=pi_n)
    return values


class Worst(NamedTuple):
    margin: float
    point: Optional[Array]
    passed: bool


def _worst(margins: List[float], points: List[Array], tol: float) -> Worst:
    if not margins:
        return Worst(math.inf, None, True)
    # argmin keeps the first occurrence, points are in lexicographic order.
    k = int(np.argmin(margins))
    return Worst(float(margins[k]), points[k], bool(margins[k] >= -tol))


class DecReport(NamedTuple):
    """
    Sampled dominant energy conditions.
    """
    interior: Worst
    boundary_tangential: Worst
    boundary_normal: Worst
    trapped_plus: Worst
    trapped_minus: Worst
    values: List[ConstraintValues]

    @property
    def passed(self) -> bool:
        return (self.interior.passed and self.boundary_tangential.passed and
                self.boundary_normal.passed)


def check_dec(data: InitialDataSet, points: Sequence[Point],
              tol: float = 1e-9, step: Optional[float] = None,
              step_scale: float = DEFAULT_STEP) -> DecReport:
    """
    Evaluate the interior and both boundary dominant energy conditions at
    sample points, reporting the worst margin of each.
    """
    if len(points) == 0:
        raise DomainError('DEC sample set is empty')
    points = lexicographic(points)
    values = [evaluate_constraints(data, p, _step(p, step, step_scale))
              for p in points]
    interior = [v.rho - v.J_norm for v in values]
    bpoints, tangential, normal, plus, minus = [], [], [], [], []
    for v in values:
        if v.H is None:
            continue
        bpoints.append(v.point)
        tangential.append(v.H - float(np.linalg.norm(v.pi_tangential)))
        plus.append(v.H + v.pi_normal)
        minus.append(v.H - v.pi_normal)
        normal.append(min(plus[-1], minus[-1]))
    report = DecReport(
        _worst(interior, points, tol),
        _worst(tangential, bpoints, tol),
        _worst(normal, bpoints, tol),
        _worst(plus, bpoints, tol),
        _worst(minus, bpoints, tol),
        values)
    if not report.passed:
        log.warning(
            f'Dominant energy condition fails for {data.name}: '
            f'interior {report.interior.margin:.3e}, '
            f'tangential {report.boundary_tangential.margin:.3e}, '
            f'normal {report.boundary_normal.margin:.3e}')
    return report


def dec_sample(domain: ChartDomain, box: Optional[Box] = None,
               points: int = 5) -> List[Array]:
    """
    Tensor-product grid of the exterior region inside ``box``; the default
    box is ``[-4 r0, 4 r0]^(n-1) x [0, 4 r0]`` (the unit cube for the ball
    model). The lowest layer lies on the boundary.
    """
    n = domain.n
    if box is None:
        R = 1.0 if domain.model == 'hyperbolic-ball' else 4.0 * domain.r0
        box = [(-R, R)] * (n - 1) + [(0.0, R)]
    if len(box) != n:
        raise DomainError('Sample box must have one interval per axis', box)
    axes = [np.linspace(lo, hi, points) for lo, hi in box]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, n)
    kept = [p for p in grid
            if domain.contains(p) and np.linalg.norm(p) >= domain.r0]
    return lexicographic(kept)


class _Background(object):
    """
    Model metric quantities at one point.
    """
    def __init__(self, domain: ChartDomain, p: Array):
        g0 = reference_metric(domain)
        self.domain = domain
        self.g0 = g0
        self.gp = g0(p)
        self.ginv = metric_inverse(self.gp, p)
        self.dg = g0.d_eval(p)
        self.G = christoffel(self.ginv, self.dg)
        self.ricci = reference_ricci_factor(domain) * self.gp

    def trace(self, T: Array) -> float:
        return float(np.einsum('ij,ij->', self.ginv, T))


def _div_minus_dtrace(domain: ChartDomain, f: TensorField, q: Array,
                      eta: float) -> Array:
    bg = _Background(domain, q)
    fq = f(q)
    df = gradient(f, q, eta)
    return (divergence(bg.ginv, fq, df, bg.G) -
            _trace_derivative(bg.ginv, bg.dg, fq, df))


def _covector_field_divergence(domain: ChartDomain, func, p: Array,
                               eta: float) -> float:
    bg = _Background(domain, p)
    w = func(p)
    dw = np.stack([difference(func, p, a, eta, domain.contains)
                   for a in range(domain.n)])
    return covector_divergence(bg.ginv, w, dw, bg.G)


class LinearizedValues(NamedTuple):
    psi_scalar: float
    psi_covector: Array
    phi_scalar: Optional[float] = None
    phi_covector: Optional[Array] = None


def linearized_constraints(domain: ChartDomain, f: TensorField,
                           h: TensorField, p: Point,
                           step: Optional[float] = None,
                           boundary: Optional[bool] = None
                           ) -> LinearizedValues:
    """
    Linearized interior and boundary constraint maps at the model data
    ``(g_0, 0)`` applied to ``(f, h)``.
    """
    p = domain.check_point(p)
    eta = _step(p, step)
    bg = _Background(domain, p)
    fp, hp = f(p), h(p)
    dh = gradient(h, p, eta)

    def omega(q):
        return _div_minus_dtrace(domain, f, q, eta)

    psi_scalar = (_covector_field_divergence(domain, omega, p, eta) -
                  _inner2(bg.ginv, bg.ricci, fp))
    psi_covector = 2.0 * (divergence(bg.ginv, hp, dh, bg.G) -
                          _trace_derivative(bg.ginv, bg.dg, hp, dh))
    values = LinearizedValues(psi_scalar, psi_covector)
    if boundary is None:
        boundary = domain.on_boundary(p)
    if not boundary:
        return values
    if not domain.on_boundary(p):
        raise DomainError('Point is not on the boundary', p)

    n = domain.n
    geo = boundary_geometry(bg.g0, p, eta)
    gamma_inv = np.linalg.inv(geo.induced_metric)

    def normal_contraction(q):
        ginv = metric_inverse(bg.g0(q), q)
        normal = ginv[:, n - 1] / math.sqrt(ginv[n - 1, n - 1])
        return normal @ f(q)[:, :n - 1]

    alpha = normal_contraction(p)
    dalpha = np.stack([difference(normal_contraction, p, A, eta)
                       for A in range(n - 1)])
    gamma_G = christoffel(gamma_inv, bg.dg[:n - 1, :n - 1, :n - 1])
    div_alpha = covector_divergence(gamma_inv, alpha, dalpha, gamma_G)
    pi_pairing = float(np.einsum(
        'AC,BD,AB,CD->', gamma_inv, gamma_inv,
        geo.second_fundamental_form, fp[:n - 1, :n - 1]))
    phi_scalar = float(omega(p) @ geo.normal) + div_alpha - pi_pairing
    phi_covector = 2.0 * geo.normal @ (hp - bg.trace(hp) * bg.gp)
    return values._replace(phi_scalar=phi_scalar, phi_covector=phi_covector)


def charge_density(domain: ChartDomain, f: TensorField, h: TensorField,
                   V: TensorField, W: TensorField, p: Point,
                   step: Optional[float] = None) -> Array:
    """
    The covector ``V (div f - d tr f) - f(grad V, .) + (tr f) dV
    + 2 (h(W, .) - (tr h) W_flat)`` of the model metric.
    """
    p = domain.check_point(p)
    eta = _step(p, step)
    bg = _Background(domain, p)
    fp, hp, wp = f(p), h(p), W(p)
    v = float(V(p))
    dv = gradient(V, p, eta)
    grad_v = bg.ginv @ dv
    return (v * _div_minus_dtrace(domain, f, p, eta) - grad_v @ fp +
            bg.trace(fp) * dv +
            2.0 * (wp @ hp - bg.trace(hp) * (bg.gp @ wp)))


def adjoint_constraint(domain: ChartDomain, V: TensorField, W: TensorField,
                       p: Point, step: Optional[float] = None):
    """
    ``(Hess V - (Lap V) g_0 - V Ric, -L_W g_0 + 2 (div W) g_0)``.
    """
    p = domain.check_point(p)
    eta = _step(p, step)
    bg = _Background(domain, p)
    dv = gradient(V, p, eta)
    hess = hessian(V, p, eta) - np.einsum('kij,k->ij', bg.G, dv)
    lap = bg.trace(hess)
    first = hess - lap * bg.gp - float(V(p)) * bg.ricci
    wp, dw = W(p), gradient(W, p, eta)
    div_w = float(np.trace(dw) + np.einsum('kkl,l->', bg.G, wp))
    second = -lie_derivative_metric(bg.g0, W, p, eta) + 2.0 * div_w * bg.gp
    return first, second


def verify_divergence_identity(domain: ChartDomain, f: TensorField,
                               h: TensorField, V: TensorField,
                               W: TensorField, p: Point,
                               step: Optional[float] = None) -> float:
    """
    Residual of ``V DPsi_0 + W . DPsi_1 = div U + <f, F_1> + <h, F_2>``.
    """
    p = domain.check_point(p)
    eta = _step(p, step)
    bg = _Background(domain, p)
    lin = linearized_constraints(domain, f, h, p, eta, boundary=False)
    lhs = float(V(p)) * lin.psi_scalar + float(W(p) @ lin.psi_covector)
    div_u = _covector_field_divergence(
        domain, lambda q: charge_density(domain, f, h, V, W, q, eta), p, eta)
    first, second = adjoint_constraint(domain, V, W, p, eta)
    rhs = (div_u + _inner2(bg.ginv, f(p), first) +
           _inner2(bg.ginv, h(p), second))
    residual = abs(lhs - rhs)
    log.debug(f'Divergence identity at {p}, step {eta}: {residual:.3e}')
    return residual


def gauge_perturbation(domain: ChartDomain, zeta: TensorField,
                       step: Optional[float] = None) -> TensorField:
    """
    ``f = L_zeta g_0`` as a field.
    """
    g0 = reference_metric(domain)
    return TensorField(
        lambda q: lie_derivative_metric(g0, zeta, q, step), rank=(0, 2),
        symmetric=True, domain=domain, name='L_zeta g0')


def check_gauge_tangency(domain: ChartDomain, zeta: TensorField, p: Point,
                         tol: float = 1e-10):
    """
    Require ``zeta^n = 0`` at the boundary foot of ``p`` and nearby
    boundary points.
    """
    p = as_point(p)
    foot = p.copy()
    foot[-1] = 0.0
    scale = max(1.0, float(np.linalg.norm(foot)))
    offsets = [np.zeros_like(p)]
    for A in range(domain.n - 1):
        for sign in (1.0, -1.0):
            e = np.zeros_like(p)
            e[A] = sign * 0.1 * scale
            offsets.append(e)
    for offset in offsets:
        q = foot + offset
        if not domain.contains(q):
            continue
        normal = float(zeta(q)[-1])
        if abs(normal) > tol * scale:
            raise InvalidGaugeError(
                'Gauge field is not tangent to the boundary', q, normal)


def verify_gauge_charge(domain: ChartDomain, zeta: TensorField,
                        V: TensorField, W: TensorField, p: Point,
                        step: Optional[float] = None,
                        tol: float = 1e-10) -> float:
    """
    Residual of ``U_(L_zeta b, 0)(V, W) = div_b Vbb`` with
    ``Vbb_ik = V (zeta_i;k - zeta_k;i) + 2 (zeta_k V_i - zeta_i V_k)``,
    the divergence taken on the second index.
    """
    if not domain.is_hyperbolic:
        raise DomainError('Gauge charge needs a hyperbolic model', domain)
    p = domain.check_point(p)
    check_gauge_tangency(domain, zeta, p, tol)
    eta = _step(p, step)
    f = gauge_perturbation(domain, zeta, eta)
    h = zero_field(domain.n, (0, 2), domain)
    charge = charge_density(domain, f, h, V, W, p, eta)

    g0 = reference_metric(domain)

    def potential(q):
        gq = g0(q)
        zq, dz = zeta(q), gradient(zeta, q, eta)
        lowered = gq @ zq
        # dlow[k, i] = d_k zeta_i
        dlow = np.einsum('kij,j->ki', g0.d_eval(q), zq) + dz @ gq.T
        curl = dlow.T - dlow
        dv = gradient(V, q, eta)
        return (float(V(q)) * curl + 2.0 * (np.outer(dv, lowered) -
                                            np.outer(lowered, dv)))

    bg = _Background(domain, p)
    P = potential(p)
    dP = np.stack([difference(potential, p, a, eta, domain.contains)
                   for a in range(domain.n)])
    nabla = covariant_derivative(P, dP, bg.G)
    div_p = np.einsum('lk,lik->i', bg.ginv, nabla)
    residual = float(np.max(np.abs(charge - div_p)))
    log.debug(f'Gauge charge identity at {p}, step {eta}: {residual:.3e}')
    return residual


def hamiltonian_density(data: InitialDataSet, V: TensorField,
                        W: TensorField, p: Point, boundary: bool = False,
                        step: Optional[float] = None) -> float:
    """
    Interior density ``V rho + W . J`` or, with ``boundary``, the boundary
    density ``V H + W . (normal -| pi)``.
    """
    p = data.domain.check_point(p)
    v, wp = float(V(p)), W(p)
    if not boundary:
        rho, J = interior_constraints(data, p, step)
        return v * rho + float(wp @ J)
    if not data.domain.on_boundary(p):
        raise DomainError('Point is not on the boundary', p)
    geo = boundary_geometry(data.g, p, step)
    pi = conjugate_momentum(data.g, data.h, p)
    return v * geo.mean_curvature + float(wp @ (pi @ geo.normal))


class TruncatedHamiltonian(NamedTuple):
    radius: float
    interior: float
    boundary: float

    @property
    def total(self) -> float:
        return self.interior + self.boundary


def truncated_hamiltonian(data: InitialDataSet, V: TensorField,
                          W: TensorField, radius: float,
                          orders: Sequence[int] = (6, 12),
                          step: Optional[float] = None
                          ) -> TruncatedHamiltonian:
    """
    Integrals of the Hamiltonian densities over the exterior region
    ``r0 <= |x| <= radius`` and its boundary.
    """
    domain = data.domain
    if not radius > domain.r0:
        raise DomainError('Radius must exceed the inner radius', radius)
    n = data.n
    volume = quadrature.half_annulus_rule(n, domain.r0, radius, orders)
    interior = 0.0
    for x, w in zip(volume.nodes, volume.weights):
        gx = data.g(x)
        interior += w * math.sqrt(np.linalg.det(gx)) * hamiltonian_density(
            data, V, W, x, False, step)
    area = quadrature.boundary_annulus_rule(n, domain.r0, radius, orders)
    boundary = 0.0
    for x, w in zip(area.nodes, area.weights):
        gamma = data.g(x)[:n - 1, :n - 1]
        boundary += w * math.sqrt(np.linalg.det(gamma)) * hamiltonian_density(
            data, V, W, x, True, step)
    log.debug(f'Truncated Hamiltonian of {data.name} to r={radius}: '
              f'{interior:.6e} + {boundary:.6e}')
    return TruncatedHamiltonian(radius, interior, boundary)


# Decay audit.

def _norm(ginv: Array, T: Array) -> float:
    contracted = T
    for axis in range(T.ndim):
        contracted = np.tensordot(ginv, contracted, axes=([1], [axis]))
        contracted = np.moveaxis(contracted, 0, axis)
    return math.sqrt(max(0.0, float(np.sum(contracted * T))))


def _weighted_decay(data: InitialDataSet, f: TensorField, x: Array,
                    eta: float) -> float:
    r = float(np.linalg.norm(x))
    fx, hx = f(x), data.h(x)
    df, dh = gradient(f, x, eta), gradient(data.h, x, eta)
    if data.domain.is_flat:
        ddf = hessian(f, x, eta)
        return (r ** data.decay * (np.linalg.norm(fx) +
                                   r * np.linalg.norm(df) +
                                   r ** 2 * np.linalg.norm(ddf)) +
                r ** (data.decay + 1.0) * (np.linalg.norm(hx) +
                                           r * np.linalg.norm(dh)))
    bg = _Background(data.domain, x)

    def nabla_f(q):
        local = _Background(data.domain, q)
        return covariant_derivative(f(q), gradient(f, q, eta), local.G)

    nf = nabla_f(x)
    dnf = np.stack([difference(nabla_f, x, a, eta, data.domain.contains)
                    for a in range(data.n)])
    nnf = (dnf - np.einsum('lab,lcd->abcd', bg.G, nf) -
           np.einsum('lac,bld->abcd', bg.G, nf) -
           np.einsum('lad,bcl->abcd', bg.G, nf))
    nh = covariant_derivative(hx, dh, bg.G)
    return r ** data.decay * (
        _norm(bg.ginv, fx) + _norm(bg.ginv, nf) + _norm(bg.ginv, nnf) +
        _norm(bg.ginv, hx) + _norm(bg.ginv, nh))


class DecayReport(NamedTuple):
    """
    Sampled decay rates and constraint integrals on growing annuli.
    """
    radii: List[float]
    weighted_sup: List[float]
    decay_slope: float
    decay_passed: bool
    annulus_integrals: List[float]
    integrals_passed: bool

    @property
    def passed(self) -> bool:
        return self.decay_passed and self.integrals_passed


def _tail_slope(radii, values) -> float:
    a, b = values[-2], values[-1]
    if a <= 0.0 or b <= 0.0:
        return 0.0
    return math.log(b / a) / math.log(radii[-1] / radii[-2])


def decay_audit(data: InitialDataSet, radii: Sequence[float],
                orders: Sequence[int] = (6, 12),
                step: Optional[float] = None,
                slope_tol: float = 0.05,
                abs_tol: float = 1e-10,
                step_scale: float = DEFAULT_STEP) -> DecayReport:
    """
    Sample the weighted decay quantities on hemispheres of the given radii
    and integrate the constraint norms over the annuli between them.

    The decay check passes when the weighted supremum stops growing between
    the two largest radii; the integral check when the last annulus carries
    less than 90% of the previous one.
    """
    domain = data.domain
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError('Audit radii must be increasing', radii)
    if radii[0] < domain.r0:
        raise DomainError('Audit radii must not be below r0', radii)
    if domain.model == 'hyperbolic-ball':
        raise DomainError('Decay audit runs in polar coordinates', domain)
    n = data.n
    f = perturbation(data)
    cap = quadrature.hemisphere_rule(n, orders)
    sups = []
    for r in radii:
        sup = 0.0
        for u in cap.nodes:
            x = r * u
            sup = max(sup, _weighted_decay(
                data, f, x, _step(x, step, step_scale)))
        sups.append(sup)
        log.debug(f'Decay of {data.name} at r={r}: {sup:.6e}')
    slope = _tail_slope(radii, sups)
    decay_passed = slope <= slope_tol or sups[-1] <= abs_tol

    integrals = []
    for r_in, r_out in zip(radii, radii[1:]):
        volume = quadrature.half_annulus_rule(n, r_in, r_out, orders)
        total = 0.0
        for x, w in zip(volume.nodes, volume.weights):
            gx = data.g(x)
            rho, J = interior_constraints(
                data, x, _step(x, step, step_scale))
            weight = 1.0 if domain.is_flat else float(np.linalg.norm(x))
            total += (w * weight * math.sqrt(np.linalg.det(gx)) * 2.0 *
                      math.sqrt(rho ** 2 + covector_norm(gx, J) ** 2))
        area = quadrature.boundary_annulus_rule(n, r_in, r_out, orders)
        for x, w in zip(area.nodes, area.weights):
            H, pi_t, pi_n = boundary_constraints(
                data, x, _step(x, step, step_scale))
            gamma = data.g(x)[:n - 1, :n - 1]
            if domain.is_flat:
                density = math.sqrt(H ** 2 + float(pi_t @ pi_t))
            else:
                density = float(np.linalg.norm(x)) * math.sqrt(
                    H ** 2 + pi_n ** 2)
            total += w * math.sqrt(np.linalg.det(gamma)) * 2.0 * density
        integrals.append(total)
        log.debug(f'Constraint integral of {data.name} on '
                  f'[{r_in}, {r_out}]: {total:.6e}')
    integrals_passed = (len(integrals) < 2 or
                        integrals[-1] <= 0.9 * integrals[-2] or
                        integrals[-1] <= abs_tol)
    report = DecayReport(radii, sups, slope, decay_passed, integrals,
                         integrals_passed)
    if not report.passed:
        log.warning(f'Decay audit fails for {data.name}: slope {slope:.3f}, '
                    f'integrals {integrals}')
    return report
