"""
Complex representations of the Clifford algebra of Minkowski space and the
spinor endomorphisms entering the Witten-type positivity arguments.

Generators satisfy ``g_a g_b + g_b g_a = -2 eta_ab`` with
``eta = diag(-1, 1, ..., 1)``: ``g_0`` is hermitian and squares to the
identity, spatial ``g_i`` are anti-hermitian and square to minus the
identity. The hermitian product ``<psi, phi>`` is linear in ``psi``.
"""
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from . import _log as log
from ._types import Array, Point
from .constraints import interior_constraints
from .errors import InputError
from .geometry import (
    ChartDomain,
    InitialDataSet,
    TensorField,
    as_point,
    constant_field,
    default_step,
    difference)


_S1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_S2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_S3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PROJECTOR_KINDS = ('MIT+', 'MIT-', 'CHI+', 'CHI-')


def euclidean_generators(count: int) -> List[Array]:
    """
    ``count`` anticommuting hermitian involutions of the smallest size,
    built by recursive Kronecker products of Pauli matrices.
    """
    if count < 2:
        raise InputError('Expecting at least two generators', count)
    gam = [_S1, _S2]
    while len(gam) + 1 < count:
        m = gam[0].shape[0]
        eye = np.eye(m, dtype=complex)
        gam = ([np.kron(_S1, g) for g in gam] +
               [np.kron(_S2, eye), np.kron(_S3, eye)])
    if len(gam) == count:
        return gam
    # Chirality of the even set completes an odd count.
    last = (1j) ** (len(gam) // 2) * gam[0]
    for g in gam[1:]:
        last = last @ g
    return gam + [last]


class CliffordRep(object):
    """
    Generators ``gamma[0], ..., gamma[n]`` acting on ``C^N`` with
    ``N = 2^floor((n+1)/2)``.
    """
    def __init__(self, n: int):
        if int(n) != n or n < 3:
            raise InputError('Dimension must be an integer n >= 3', n)
        self.n = int(n)
        euclid = euclidean_generators(self.n + 1)
        self.gamma = [euclid[0]] + [1j * e for e in euclid[1:]]
        self.N = self.gamma[0].shape[0]
        self.identity = np.eye(self.N, dtype=complex)

    def __repr__(self):
        return 'CliffordRep(n={}, N={})'.format(self.n, self.N)

    def inner(self, psi: Array, phi: Array) -> complex:
        """
        Positive definite hermitian product, linear in ``psi``.
        """
        return complex(np.vdot(phi, psi))

    def indefinite(self, psi: Array, phi: Array) -> complex:
        """
        ``(psi, phi) = <gamma_0 psi, phi>``.
        """
        return self.inner(self.gamma[0] @ psi, phi)

    def clifford_residual(self) -> float:
        """
        Largest deviation from the defining relations.
        """
        eta = np.diag([-1.0] + [1.0] * self.n)
        worst = 0.0
        for a, ga in enumerate(self.gamma):
            for b, gb in enumerate(self.gamma):
                anti = ga @ gb + gb @ ga + 2.0 * eta[a, b] * self.identity
                worst = max(worst, float(np.max(np.abs(anti))))
        return worst

    def hermiticity_residual(self) -> float:
        """
        ``gamma_0`` hermitian, spatial generators anti-hermitian.
        """
        g = self.gamma
        worst = float(np.max(np.abs(g[0] - g[0].conj().T)))
        for gi in g[1:]:
            worst = max(worst, float(np.max(np.abs(gi + gi.conj().T))))
        return worst

    def clifford_multiply(self, X: Sequence[float]) -> Array:
        """
        Matrix of Clifford multiplication by ``X = X^a e_a``.
        """
        return sum(x * g for x, g in zip(X, self.gamma))

    def adjoint_residual(self, X: Sequence[float], psi: Array,
                         phi: Array) -> float:
        """
        Residual of ``<X psi, phi> = <psi, theta(X) phi>`` where ``theta``
        flips the spatial components.
        """
        X = np.asarray(X, dtype=float)
        theta = np.concatenate([X[:1], -X[1:]])
        return abs(self.inner(self.clifford_multiply(X) @ psi, phi) -
                   self.inner(psi, self.clifford_multiply(theta) @ phi))


def build_rep(n: int) -> CliffordRep:
    rep = CliffordRep(n)
    log.debug(f'Built {rep}: clifford residual {rep.clifford_residual():.1e}')
    return rep


class BoundaryProjector(NamedTuple):
    kind: str
    matrix: Array
    #: The hermitian involution the projector is built from.
    involution: Array

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix).real)))

    def basis(self) -> Array:
        """
        Orthonormal basis of the range, as columns.
        """
        return scipy.linalg.orth(self.matrix)


def boundary_involution(rep: CliffordRep, family: str) -> Array:
    """
    ``omega = i gamma_n`` (MIT) or ``Q = gamma_0 gamma_n`` (CHI).
    """
    if family == 'MIT':
        return 1j * rep.gamma[rep.n]
    if family == 'CHI':
        return rep.gamma[0] @ rep.gamma[rep.n]
    raise InputError('Expecting MIT or CHI', family)


def boundary_projector(rep: CliffordRep, kind: str) -> BoundaryProjector:
    """
    ``(I +- omega) / 2`` or ``(I +- Q) / 2``.
    """
    if kind not in PROJECTOR_KINDS:
        raise InputError('Expecting projector kind to be one of',
                         PROJECTOR_KINDS, kind)
    X = boundary_involution(rep, kind[:3])
    sign = 1.0 if kind[3] == '+' else -1.0
    return BoundaryProjector(kind, 0.5 * (rep.identity + sign * X), X)


class Spectrum(NamedTuple):
    matrix: Array
    eigenvalues: Array

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def is_psd(self, tol: float = 1e-12) -> bool:
        return self.min_eigenvalue >= -tol


def _spectrum(matrix: Array) -> Spectrum:
    return Spectrum(matrix, scipy.linalg.eigh(matrix, eigvals_only=True))


def _covector(rep: CliffordRep, J: Sequence[float], count: int) -> Array:
    J = np.asarray(J, dtype=float)
    if J.shape != (count,):
        raise InputError('Expecting {} components'.format(count), J)
    return J


def operator_R(rep: CliffordRep, rho: float,
               J: Sequence[float]) -> Spectrum:
    """
    ``(rho + J_i gamma_i gamma_0) / 2``; eigenvalues ``(rho +- |J|) / 2``.
    """
    J = _covector(rep, J, rep.n)
    g = rep.gamma
    matrix = 0.5 * (rho * rep.identity +
                    sum(J[i] * g[i + 1] @ g[0] for i in range(rep.n)))
    return _spectrum(matrix)


def operator_W(rep: CliffordRep, rho_lambda: float,
               J: Sequence[float]) -> Spectrum:
    """
    The cosmological analogue of ``operator_R`` with ``rho`` taken relative
    to the negative cosmological constant.
    """
    return operator_R(rep, rho_lambda, J)


def operator_U(rep: CliffordRep, pi_tangential: Sequence[float]) -> Spectrum:
    """
    ``pi_An gamma_0 gamma_A``; eigenvalues ``+-|pi_An|``.
    """
    pi = _covector(rep, pi_tangential, rep.n - 1)
    g = rep.gamma
    matrix = sum(pi[A] * g[0] @ g[A + 1] for A in range(rep.n - 1))
    return _spectrum(np.asarray(matrix, dtype=complex))


class TSpectrum(NamedTuple):
    matrix: Array
    eigenvalues: Array
    commutator: float
    #: Per MIT kind, eigenvalues and eigenvectors (columns) of ``T``
    #: restricted to that eigenspace of ``i gamma_n``.
    simultaneous: Dict[str, tuple]


def operator_T(rep: CliffordRep, P: Sequence[float]) -> TSpectrum:
    """
    ``P_A gamma_0 gamma_A``, which commutes with ``i gamma_n``; its
    eigenvalues are ``+-|P|`` and it diagonalizes inside each eigenspace of
    ``i gamma_n``.
    """
    P = _covector(rep, P, rep.n - 1)
    g = rep.gamma
    matrix = np.asarray(
        sum(P[A] * g[0] @ g[A + 1] for A in range(rep.n - 1)), dtype=complex)
    omega = boundary_involution(rep, 'MIT')
    commutator = float(np.max(np.abs(matrix @ omega - omega @ matrix)))
    simultaneous = {}
    for kind in ('MIT+', 'MIT-'):
        B = boundary_projector(rep, kind).basis()
        values, vectors = scipy.linalg.eigh(B.conj().T @ matrix @ B)
        simultaneous[kind] = (values, B @ vectors)
    return TSpectrum(matrix, scipy.linalg.eigh(matrix, eigvals_only=True),
                     commutator, simultaneous)


def _check_symmetric(h: Array, n: int) -> Array:
    h = np.asarray(h, dtype=float)
    if h.shape != (n, n) or not np.allclose(h, h.T, atol=1e-14):
        raise InputError('Expecting a symmetric {0}x{0} matrix'.format(n), h)
    return h


def _connection_terms(rep: CliffordRep, h: Array) -> List[Array]:
    # A_i = -h_ij gamma_0 gamma_j / 2
    g = rep.gamma
    return [-0.5 * sum(h[i, j] * g[0] @ g[j + 1] for j in range(rep.n))
            for i in range(rep.n)]


def verify_decomposition(rep: CliffordRep, h: Array) -> float:
    """
    Residual of the zero-order identity
    ``A_i + gamma_i (gamma_k A_k) = -pi_ij gamma_0 gamma_j / 2`` with
    ``pi = h - (tr h) delta``.
    """
    n = rep.n
    h = _check_symmetric(h, n)
    g = rep.gamma
    A = _connection_terms(rep, h)
    dirac = sum(g[k + 1] @ A[k] for k in range(n))
    pi = h - np.trace(h) * np.eye(n)
    worst = 0.0
    for i in range(n):
        lhs = A[i] + g[i + 1] @ dirac
        rhs = -0.5 * sum(pi[i, j] * g[0] @ g[j + 1] for j in range(n))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def verify_killing_decomposition(rep: CliffordRep, h: Array,
                                 sign: int = 1) -> float:
    """
    As ``verify_decomposition`` for the shifted connection
    ``A_i + sign (i/2) gamma_i`` and Dirac operator shifted by
    ``-sign n i / 2``; the zero-order part becomes
    ``-pi_ij gamma_0 gamma_j / 2 - sign ((n-1)/2) i gamma_i``.
    """
    if sign not in (1, -1):
        raise InputError('Expecting sign +1 or -1', sign)
    n = rep.n
    h = _check_symmetric(h, n)
    g = rep.gamma
    A = _connection_terms(rep, h)
    dirac = (sum(g[k + 1] @ A[k] for k in range(n)) -
             sign * 0.5j * n * rep.identity)
    pi = h - np.trace(h) * np.eye(n)
    worst = 0.0
    for i in range(n):
        lhs = A[i] + sign * 0.5j * g[i + 1] + g[i + 1] @ dirac
        rhs = (-0.5 * sum(pi[i, j] * g[0] @ g[j + 1] for j in range(n)) -
               sign * 0.5j * (n - 1) * g[i + 1])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def killing_dirac_shift_check(rep: CliffordRep, sign: int = 1,
                              flip: bool = False) -> float:
    """
    Residual of ``sum_i gamma_i (sign (i/2) gamma_i) = -sign (n i/2) I``.

    ``flip`` compares against the wrong sign, a control whose residual is
    ``n``.
    """
    total = sum(g @ (sign * 0.5j * g) for g in rep.gamma[1:])
    expected = -sign * 0.5j * rep.n * rep.identity
    if flip:
        expected = -expected
    return float(np.max(np.abs(total - expected)))


SpinorField = Callable[[Array], Array]


def verify_weitzenbock(rep: CliffordRep, h_field: TensorField,
                       psi_field: SpinorField, p: Point,
                       step: Optional[float] = None) -> float:
    """
    Residual of ``D^2 psi = nabla* nabla psi + R psi`` on the flat
    background, where ``nabla_i = d_i + A_i``, ``D = gamma_i nabla_i``,
    ``nabla*_i = -nabla_i + h_ij gamma_j gamma_0`` and
    ``R = (rho + J_i gamma_i gamma_0) / 2`` with ``(rho, J)`` the constraints
    of ``(delta, h)``.
    """
    n = rep.n
    p = as_point(p)
    eta = default_step(p) if step is None else step
    contains = h_field.contains
    g = rep.gamma

    def connection(q):
        return _connection_terms(rep, h_field(q))

    def nabla(q, i, field):
        return (difference(field, q, i, eta, contains) +
                connection(q)[i] @ field(q))

    def dirac(q):
        return sum(g[i + 1] @ nabla(q, i, psi_field) for i in range(n))

    lhs = sum(g[i + 1] @ nabla(p, i, dirac) for i in range(n))

    hp = h_field(p)
    rough = np.zeros(rep.N, dtype=complex)
    for i in range(n):
        def component(q, i=i):
            return nabla(q, i, psi_field)

        rough = rough - nabla(p, i, component)
        rough = rough + sum(hp[i, j] * g[j + 1] @ g[0] @ component(p)
                            for j in range(n))

    domain = h_field.domain or ChartDomain(n, 'flat')
    data = InitialDataSet(domain, constant_field(np.eye(n), (0, 2)),
                          h_field, decay=float(n), name='weitzenbock')
    rho, J = interior_constraints(data, p, eta)
    R = operator_R(rep, rho, J).matrix
    residual = float(np.max(np.abs(lhs - rough - R @ psi_field(p))))
    log.debug(f'Weitzenbock residual at {p}, step {eta}: {residual:.3e}')
    return residual


class KillingCharge(NamedTuple):
    V: float
    W: Array
    #: ``V^2 - |W|^2``.
    margin: float
    #: ``|W - (+-V) e_n|`` when a CHI kind was given.
    boundary_residual: Optional[float] = None


def killing_charge(rep: CliffordRep, phi: Array,
                   kind: Optional[str] = None) -> KillingCharge:
    """
    ``V = <phi, phi>`` and ``W_i = <gamma_0 gamma_i phi, phi>``.
    """
    phi = np.asarray(phi, dtype=complex)
    g = rep.gamma
    V = rep.inner(phi, phi).real
    W = np.array([rep.inner(g[0] @ g[i] @ phi, phi).real
                  for i in range(1, rep.n + 1)])
    charge = KillingCharge(V, W, V * V - float(W @ W))
    if kind is None:
        return charge
    if kind not in ('CHI+', 'CHI-'):
        raise InputError('Boundary relation needs a CHI kind', kind)
    expected = np.zeros(rep.n)
    expected[-1] = V if kind == 'CHI+' else -V
    return charge._replace(
        boundary_residual=float(np.max(np.abs(W - expected))))


def mit_cancellation_residual(rep: CliffordRep, phi: Array,
                              xi: Array) -> float:
    """
    ``|<gamma_n phi, xi>|`` after projecting ``phi`` to MIT+ and ``xi`` to
    MIT-.
    """
    phi = boundary_projector(rep, 'MIT+').matrix @ phi
    xi = boundary_projector(rep, 'MIT-').matrix @ xi
    return abs(rep.inner(rep.gamma[rep.n] @ phi, xi))


def clifford_orthogonality_residual(rep: CliffordRep, eta: Array) -> float:
    """
    Residual of ``Re <gamma_i eta, gamma_j eta> = delta_ij |eta|^2``.
    """
    eta = np.asarray(eta, dtype=complex)
    norm2 = rep.inner(eta, eta).real
    worst = 0.0
    for i in range(1, rep.n + 1):
        for j in range(1, rep.n + 1):
            value = rep.inner(rep.gamma[i] @ eta, rep.gamma[j] @ eta).real
            worst = max(worst, abs(value - (norm2 if i == j else 0.0)))
    return worst


class QuadraticForm(NamedTuple):
    matrix: Array
    eigenvalues: Array
    passed: bool

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])


MassValues = Callable[[int, str], float]


def mass_values_from(energy: Sequence[float],
                     momentum: Sequence[float]) -> MassValues:
    """
    ``mass_values(a, 'V') = E_a`` and ``mass_values(a, 'W') = P_a``.
    """
    energy, momentum = list(energy), list(momentum)

    def mass_values(a: int, kind: str) -> float:
        return energy[a] if kind == 'V' else momentum[a]

    return mass_values


def quadratic_form_Ktilde(rep: CliffordRep, mass_values: MassValues,
                          kind: str = 'CHI+', d: Optional[int] = None,
                          tol: float = 1e-12) -> QuadraticForm:
    """
    Hermitian matrix of ``phi -> m(V_phi, W_phi)`` on a ``d``-dimensional
    subspace of a CHI eigenspace.

    ``V_phi = sum_a v_a V_(a)`` with ``v = (<phi, phi>, <i gamma_A phi, phi>)``
    over the boundary-tangent directions ``A`` and ``W_phi = +-sum_a v_a
    W_(a)``, so the form is ``<(sum_a u_a M_a) phi, phi>`` with
    ``u_a = E_a +- P_a``, ``M_0 = I`` and ``M_A = i gamma_A``. Each ``i
    gamma_A`` commutes with ``gamma_0 gamma_n`` and so preserves the CHI
    eigenspaces; on a whole eigenspace the form is positive semi-definite
    exactly when ``u_0 >= |u_A|``.
    """
    if kind not in ('CHI+', 'CHI-'):
        raise InputError('Expecting a CHI projector kind', kind)
    basis = boundary_projector(rep, kind).basis()
    half = basis.shape[1]
    d = half if d is None else int(d)
    if not 1 <= d <= half:
        raise InputError(
            'Parameter dimension must lie in [1, {}]'.format(half), d)
    basis = basis[:, :d]
    sign = 1.0 if kind == 'CHI+' else -1.0
    g = rep.gamma
    operator = np.zeros((rep.N, rep.N), dtype=complex)
    for a in range(rep.n):
        u = mass_values(a, 'V') + sign * mass_values(a, 'W')
        M = rep.identity if a == 0 else 1j * g[a]
        operator = operator + u * M
    matrix = basis.conj().T @ operator @ basis
    matrix = 0.5 * (matrix + matrix.conj().T)
    values = scipy.linalg.eigh(matrix, eigvals_only=True)
    return QuadraticForm(matrix, values, bool(values[0] >= -tol))


def random_spinor(rep: CliffordRep, rng: np.random.Generator) -> Array:
    return rng.standard_normal(rep.N) + 1j * rng.standard_normal(rep.N)


def spectrum_residual(spectrum: Spectrum, expected: Sequence[float]) -> float:
    """
    Largest gap between computed and closed-form eigenvalues, both sorted.
    """
    expected = np.sort(np.asarray(expected, dtype=float))
    return float(np.max(np.abs(spectrum.eigenvalues - expected)))


def expected_R_spectrum(rep: CliffordRep, rho: float,
                        J: Sequence[float]) -> List[float]:
    norm = math.sqrt(float(np.dot(J, J)))
    half = rep.N // 2
    return [0.5 * (rho - norm)] * half + [0.5 * (rho + norm)] * half


def expected_pm_spectrum(rep: CliffordRep,
                         vector: Sequence[float]) -> List[float]:
    norm = math.sqrt(float(np.dot(vector, vector)))
    half = rep.N // 2
    return [-norm] * half + [norm] * half
