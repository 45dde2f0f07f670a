"""
Built-in example initial data sets and the dataset file format.

A dataset file is a single canonical JSON document describing how to build
the data (example name, dimension, model, parameters); field values are never
stored in it, except for ``custom-grid`` data whose values live in a separate
grid file.
"""
import json
import math
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from fs.base import FS
from fs.path import basename, dirname, join, splitext
from scipy.interpolate import RegularGridInterpolator

from . import _log as log
from ._types import Array
from .errors import InputError
from .geometry import (
    MODELS,
    ChartDomain,
    InitialDataSet,
    TensorField,
    as_point,
    zero_field)
from .models import change_model, reference_metric


FORMAT = 'boundarymass-dataset'
FORMAT_VERSION = 1

FLAT_EXAMPLES = ('flat-trivial', 'schwarzschild', 'bowen-york',
                 'conformal-bump')
HYPERBOLIC_EXAMPLES = ('hyperbolic-trivial', 'ads-schwarzschild',
                       'gauge-perturbation')
EXAMPLES = FLAT_EXAMPLES + HYPERBOLIC_EXAMPLES + ('custom-grid',)

#: Closed forms echoed into dataset files; ``r = |x|`` and ``nu = x / r``.
FORMULAS = {
    'flat-trivial': {'g': 'delta_ij', 'h': '0'},
    'schwarzschild': {
        'g': '(1 + m / (2 r^(n-2)))^(4/(n-2)) delta_ij', 'h': '0'},
    'bowen-york': {
        'g': 'delta_ij',
        'h': '(2n/(n+1)) r^(1-n) (p_i nu_j + p_j nu_i '
             '- (2/(n-1)) (delta_ij - nu_i nu_j) p.nu)'},
    'conformal-bump': {
        'g': '(1 + amplitude exp(-|x - center|^2 / width^2)) delta_ij',
        'h': '0'},
    'hyperbolic-trivial': {'g': 'b_ij', 'h': '0'},
    'ads-schwarzschild': {
        'g': 'dr^2 / (1 + r^2 - 2 m r^(2-n)) + r^2 (round metric)',
        'h': '0'},
    'gauge-perturbation': {
        'g': 'b_ij + (L_zeta b)_ij, zeta = (eps1 exp(-|y - center|^2) '
             '+ eps2 (1 + |y|^2)^(-(n+1))) d/dy_1',
        'h': '0'},
    'custom-grid': {'g': 'n-linear interpolation of grid values',
                    'h': 'n-linear interpolation of grid values, or 0'},
}


def _vector(value, n: int, hint: str) -> List[float]:
    try:
        vec = [float(x) for x in value]
    except TypeError:
        raise InputError('Expecting a list of numbers', hint, value)
    if len(vec) != n or not all(math.isfinite(x) for x in vec):
        raise InputError(
            'Expecting {} finite components'.format(n), hint, value)
    return vec


def _scalar(value, hint: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError('Expecting a number', hint, value)
    if not math.isfinite(value):
        raise InputError('Expecting a finite number', hint, value)
    return value


def _bump_center(n: int, seed: int) -> List[float]:
    rng = np.random.default_rng(seed)
    center = rng.uniform(-2.0, 2.0, size=n)
    center[-1] = rng.uniform(0.5, 2.5)
    return [float(x) for x in center]


def _resolve_params(example: str, n: int, params: Dict) -> OrderedDict:
    """
    Validate example parameters and fill in defaults.
    """
    params = dict(params or {})
    resolved = OrderedDict()

    def take(key, default):
        return params.pop(key, default)

    if example in ('schwarzschild', 'ads-schwarzschild'):
        m = _scalar(take('m', 1.0 if example == 'schwarzschild' else 0.1),
                    'm')
        if m < 0:
            raise InputError('Mass parameter must be non-negative', m)
        resolved['m'] = m
    elif example == 'bowen-york':
        resolved['p'] = _vector(
            take('p', [0.1] + [0.0] * (n - 1)), n, 'p')
    elif example == 'conformal-bump':
        seed = int(take('seed', 0))
        amplitude = _scalar(take('amplitude', 0.1), 'amplitude')
        width = _scalar(take('width', 1.0), 'width')
        if amplitude <= -1.0:
            raise InputError('Bump amplitude must exceed -1', amplitude)
        if width <= 0.0:
            raise InputError('Bump width must be positive', width)
        center = take('center', None)
        resolved['amplitude'] = amplitude
        resolved['center'] = (
            _bump_center(n, seed) if center is None
            else _vector(center, n, 'center'))
        resolved['seed'] = seed
        resolved['width'] = width
    elif example == 'gauge-perturbation':
        resolved['center'] = _vector(
            take('center', [0.0] * (n - 1) + [2.0]), n, 'center')
        resolved['eps1'] = _scalar(take('eps1', 0.1), 'eps1')
        resolved['eps2'] = _scalar(take('eps2', 0.1), 'eps2')
    if params:
        raise InputError(
            'Unknown parameters for {}'.format(example), sorted(params))
    return resolved


def default_decay(example: str, n: int, model: str) -> float:
    """
    Decay exponent declared for an example when none is given.
    """
    if example == 'gauge-perturbation' or model != 'flat':
        return float(n)
    return float(n - 2)


class DatasetDescriptor(object):
    """
    Everything needed to rebuild an initial data set.

    ``r0`` is always a radius in the natural chart of the example (the
    Euclidean or hyperbolic polar chart); data requested in the ball model
    are converted after construction.
    """
    __slots__ = ['n', 'model', 'example', 'params', 'r0', 'decay', 'grid']

    def __init__(self,
                 example: str,
                 n: int = 3,
                 model: Optional[str] = None,
                 params: Optional[Dict] = None,
                 r0: float = 1.0,
                 decay: Optional[float] = None,
                 grid: Optional[str] = None):
        if example not in EXAMPLES:
            raise InputError('Expecting example to be one of',
                             EXAMPLES, example)
        if int(n) != n or n < 3:
            raise InputError('Dimension must be an integer n >= 3', n)
        n = int(n)
        if model is None:
            model = ('hyperbolic-polar' if example in HYPERBOLIC_EXAMPLES
                     else 'flat')
        if model not in MODELS:
            raise InputError('Expecting model to be one of', MODELS, model)
        if example in FLAT_EXAMPLES and model != 'flat':
            raise InputError('Example needs the flat model', example, model)
        if example in HYPERBOLIC_EXAMPLES and model == 'flat':
            raise InputError(
                'Example needs a hyperbolic model', example, model)
        if (example == 'custom-grid') != (grid is not None):
            raise InputError(
                'A grid file is required exactly for custom-grid', grid)
        r0 = _scalar(r0, 'r0')
        if r0 <= 0.0:
            raise InputError('Inner radius must be positive', r0)
        self.n = n
        self.model = model
        self.example = example
        self.params = _resolve_params(example, n, params)
        self.r0 = r0
        self.decay = (default_decay(example, n, model) if decay is None
                      else _scalar(decay, 'decay'))
        self.grid = grid

    def __repr__(self):
        return 'DatasetDescriptor({})'.format(
            ', '.join('{}={!r}'.format(key, getattr(self, key))
                      for key in self.__slots__))

    def __eq__(self, other):
        return (isinstance(other, DatasetDescriptor) and
                self.as_dict() == other.as_dict())

    def as_dict(self) -> OrderedDict:
        return OrderedDict([
            ('decay', self.decay),
            ('example', self.example),
            ('grid', self.grid),
            ('model', self.model),
            ('n', self.n),
            ('params', OrderedDict(self.params)),
            ('r0', self.r0),
        ])

    def replace(self, **kw) -> 'DatasetDescriptor':
        values = self.as_dict()
        values.update(kw)
        return DatasetDescriptor(**values)


def dump_dataset(descriptor: DatasetDescriptor) -> str:
    """
    Canonical JSON text of a dataset file.
    """
    document = descriptor.as_dict()
    document['format'] = FORMAT
    document['formula'] = FORMULAS[descriptor.example]
    document['version'] = FORMAT_VERSION
    return json.dumps(document, sort_keys=True, indent=2) + '\n'


def load_dataset(text: str) -> DatasetDescriptor:
    """
    Parse a dataset file.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError('Dataset is not valid JSON', str(e))
    if not isinstance(document, dict) or document.get('format') != FORMAT:
        raise InputError('Not a dataset document', FORMAT)
    if document.get('version') != FORMAT_VERSION:
        raise InputError('Unsupported dataset version',
                         document.get('version'))
    try:
        return DatasetDescriptor(
            example=document['example'],
            n=document['n'],
            model=document.get('model'),
            params=document.get('params'),
            r0=document.get('r0', 1.0),
            decay=document.get('decay'),
            grid=document.get('grid'))
    except KeyError as e:
        raise InputError('Dataset is missing a key', str(e))


# Radial metrics ``a(r) delta + q(r) y y^T``.

def radial_metric(domain: ChartDomain, profile, name: str) -> TensorField:
    """
    The metric ``a(r) delta_ij + q(r) y_i y_j`` with exact derivatives.

    ``profile(r)`` returns ``(a, a', a'', q, q', q'')``.
    """
    eye = np.eye(domain.n)

    def _radial(p):
        r = math.sqrt(p @ p)
        a, da, dda, q, dq, ddq = profile(r)
        a1, q1 = da / r, dq / r
        return a, a1, (dda - a1) / r ** 2, q, q1, (ddq - q1) / r ** 2

    def _evaluate(p):
        a, _, _, q, _, _ = _radial(p)
        return a * eye + q * np.outer(p, p)

    def _d(p):
        _, a1, _, q, q1, _ = _radial(p)
        yy = np.outer(p, p)
        return (np.einsum('c,ij->cij', a1 * p, eye) +
                np.einsum('c,ij->cij', q1 * p, yy) +
                q * (np.einsum('ci,j->cij', eye, p) +
                     np.einsum('i,cj->cij', p, eye)))

    def _dd(p):
        _, a1, a2, q, q1, q2 = _radial(p)
        yy = np.outer(p, p)
        sym = np.einsum('ci,j->cij', eye, p) + np.einsum('i,cj->cij', p, eye)
        return (np.einsum('cd,ij->cdij', a2 * yy + a1 * eye, eye) +
                np.einsum('cd,ij->cdij', q2 * yy + q1 * eye, yy) +
                q1 * (np.einsum('c,dij->cdij', p, sym) +
                      np.einsum('d,cij->cdij', p, sym)) +
                q * (np.einsum('ci,dj->cdij', eye, eye) +
                     np.einsum('di,cj->cdij', eye, eye)))

    return TensorField(_evaluate, rank=(0, 2), d_eval=_d, dd_eval=_dd,
                       symmetric=True, domain=domain, name=name)


def _schwarzschild_profile(n: int, m: float):
    k = n - 2
    e = 4.0 / k

    def profile(r):
        w = 1.0 + m / (2.0 * r ** k)
        dw = -k * m / (2.0 * r ** (k + 1))
        ddw = k * (k + 1) * m / (2.0 * r ** (k + 2))
        a = w ** e
        da = e * w ** (e - 1) * dw
        dda = e * (e - 1) * w ** (e - 2) * dw ** 2 + e * w ** (e - 1) * ddw
        return a, da, dda, 0.0, 0.0, 0.0

    return profile


def _ads_schwarzschild_profile(n: int, m: float):
    def profile(r):
        F = 1.0 + r ** 2 - 2.0 * m * r ** (2 - n)
        dF = 2.0 * r + 2.0 * m * (n - 2) * r ** (1 - n)
        ddF = 2.0 - 2.0 * m * (n - 2) * (n - 1) * r ** (-n)
        u = 1.0 / F - 1.0
        du = -dF / F ** 2
        ddu = -ddF / F ** 2 + 2.0 * dF ** 2 / F ** 3
        q = u / r ** 2
        dq = du / r ** 2 - 2.0 * u / r ** 3
        ddq = ddu / r ** 2 - 4.0 * du / r ** 3 + 6.0 * u / r ** 4
        return 1.0, 0.0, 0.0, q, dq, ddq

    return profile


def _bowen_york(domain: ChartDomain, p: Sequence[float]) -> TensorField:
    n = domain.n
    P = np.asarray(p, dtype=float)
    c = 2.0 * n / (n + 1.0)
    eye = np.eye(n)

    def _evaluate(x):
        r = math.sqrt(x @ x)
        nu = x / r
        pn = P @ nu
        return c / r ** (n - 1) * (
            np.outer(P, nu) + np.outer(nu, P) -
            2.0 / (n - 1) * (eye - np.outer(nu, nu)) * pn)

    return TensorField(_evaluate, rank=(0, 2), symmetric=True, domain=domain,
                       name='h')


def _conformal_bump(domain: ChartDomain, amplitude: float,
                    center: Sequence[float], width: float) -> TensorField:
    c = np.asarray(center, dtype=float)
    eye = np.eye(domain.n)

    def _phi(x):
        d = x - c
        return amplitude * math.exp(-(d @ d) / width ** 2), d

    def _evaluate(x):
        phi, _ = _phi(x)
        return (1.0 + phi) * eye

    def _d(x):
        phi, d = _phi(x)
        return np.einsum('a,ij->aij', -2.0 * phi * d / width ** 2, eye)

    def _dd(x):
        phi, d = _phi(x)
        hess = phi * (4.0 * np.outer(d, d) / width ** 4 -
                      2.0 * eye / width ** 2)
        return np.einsum('ab,ij->abij', hess, eye)

    return TensorField(_evaluate, rank=(0, 2), d_eval=_d, dd_eval=_dd,
                       symmetric=True, domain=domain, name='g')


def _gauge_profile(n: int, params: Dict):
    """
    ``s(y) = eps1 exp(-|y - center|^2) + eps2 (1 + |y|^2)^(-(n+1))`` with its
    gradient and Hessian.
    """
    c = np.asarray(params['center'], dtype=float)
    eps1, eps2 = params['eps1'], params['eps2']

    def profile(y):
        d = y - c
        bump = eps1 * math.exp(-(d @ d))
        s = 1.0 + y @ y
        tail = eps2 * s ** (-(n + 1))
        grad = -2.0 * bump * d - 2.0 * (n + 1) * tail / s * y
        hess = (bump * (4.0 * np.outer(d, d) - 2.0 * np.eye(n)) +
                tail * (4.0 * (n + 1) * (n + 2) / s ** 2 * np.outer(y, y) -
                        2.0 * (n + 1) / s * np.eye(n)))
        return bump + tail, grad, hess

    return profile


def gauge_field(domain: ChartDomain, params: Dict) -> TensorField:
    """
    The boundary-tangent vector field ``zeta = s(y) d/dy_1`` generating the
    ``gauge-perturbation`` example, with exact derivatives.
    """
    profile = _gauge_profile(domain.n, params)
    e1 = np.zeros(domain.n)
    e1[0] = 1.0
    return TensorField(
        lambda y: profile(y)[0] * e1, rank=(1, 0),
        d_eval=lambda y: np.outer(profile(y)[1], e1),
        domain=domain, name='zeta')


def _gauge_metric(domain: ChartDomain, params: Dict) -> TensorField:
    b = reference_metric(domain)
    profile = _gauge_profile(domain.n, params)

    def _evaluate(y):
        s, ds, _ = profile(y)
        bp, db = b(y), b.d_eval(y)
        return (bp + s * db[0] + np.outer(ds, bp[0]) +
                np.outer(bp[0], ds))

    def _d(y):
        s, ds, dds = profile(y)
        bp, db, ddb = b(y), b.d_eval(y), b.dd_eval(y)
        # d_a of (s d_0 b_ij + d_i s b_0j + b_i0 d_j s)
        lie = (np.einsum('a,ij->aij', ds, db[0]) + s * ddb[:, 0] +
               np.einsum('ai,j->aij', dds, bp[0]) +
               np.einsum('i,aj->aij', ds, db[:, 0]) +
               np.einsum('ai,j->aij', db[:, :, 0], ds) +
               np.einsum('i,aj->aij', bp[0], dds))
        return db + lie

    return TensorField(_evaluate, rank=(0, 2), d_eval=_d, symmetric=True,
                       domain=domain, name='g')


# Custom grids.

class GridField(object):
    """
    Component values on a regular grid, interpolated n-linearly and clamped
    to the grid at its faces.
    """
    def __init__(self, origin: Sequence[float], spacing: Sequence[float],
                 values: Array, fields: Sequence[str]):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        self.fields = list(fields)
        dims = values.shape[:-1]
        self.n = len(dims)
        axes = tuple(o + h * np.arange(k)
                     for o, h, k in zip(self.origin, self.spacing, dims))
        self.lower = np.array([a[0] for a in axes])
        self.upper = np.array([a[-1] for a in axes])
        self._interpolator = RegularGridInterpolator(
            axes, values, method='linear')

    def __call__(self, p) -> Array:
        q = np.clip(as_point(p), self.lower, self.upper)
        return self._interpolator(q[None, :])[0]

    def has_tensor(self, prefix: str) -> bool:
        return any(name.startswith(prefix + '_') for name in self.fields)

    def tensor(self, prefix: str, domain: ChartDomain) -> TensorField:
        """
        Symmetric two-tensor assembled from the ``<prefix>_ij`` columns.
        """
        n = self.n
        slots = []
        for i in range(n):
            for j in range(i, n):
                name = '{}_{}{}'.format(prefix, i + 1, j + 1)
                if name not in self.fields:
                    raise InputError('Grid is missing a component', name)
                slots.append((i, j, self.fields.index(name)))

        def _evaluate(p):
            row = self(p)
            value = np.empty((n, n))
            for i, j, k in slots:
                value[i, j] = value[j, i] = row[k]
            return value

        return TensorField(_evaluate, rank=(0, 2), symmetric=True,
                           domain=domain, name=prefix)


def _grid_header(header: Dict, n: int) -> Tuple[List[int], List[float],
                                                List[float], List[str]]:
    try:
        dims = [int(k) for k in header['dims']]
        spacing = [float(h) for h in header['spacing']]
        origin = [float(o) for o in header['origin']]
        fields = [str(name) for name in header['fields']]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError('Malformed grid header', str(e))
    if not len(dims) == len(spacing) == len(origin) == n:
        raise InputError(
            'Grid header dimensions do not match n={}'.format(n),
            dims, spacing, origin)
    if min(dims) < 2 or min(spacing) <= 0:
        raise InputError('Grid needs two nodes per axis and positive '
                         'spacing', dims, spacing)
    if not fields or len(set(fields)) != len(fields):
        raise InputError('Grid fields must be distinct and non-empty', fields)
    return dims, spacing, origin, fields


def load_grid(grid_fs: FS, header_path: str, n: int) -> GridField:
    """
    Load a grid header and its little-endian float64 value file.

    The value file is named by the header's ``data`` key (relative to the
    header), defaulting to the header path with a ``.raw`` extension. Values
    are row-major over the grid with fields interleaved per node.
    """
    try:
        header = json.loads(grid_fs.readtext(header_path))
    except json.JSONDecodeError as e:
        raise InputError('Grid header is not valid JSON', str(e))
    if not isinstance(header, dict):
        raise InputError('Grid header must be a JSON object', header_path)
    dims, spacing, origin, fields = _grid_header(header, n)
    data_path = join(dirname(header_path), header.get(
        'data', splitext(basename(header_path))[0] + '.raw'))
    raw = grid_fs.readbytes(data_path)
    expected = int(np.prod(dims)) * len(fields) * 8
    if len(raw) != expected:
        raise InputError(
            'Grid value file size does not match header',
            data_path, len(raw), expected)
    values = np.frombuffer(raw, dtype='<f8').reshape(
        tuple(dims) + (len(fields),))
    if not np.all(np.isfinite(values)):
        raise InputError('Grid values must be finite', data_path)
    log.debug(f'Loaded grid {header_path}: dims={dims} fields={fields}')
    return GridField(origin, spacing, values.astype(float), fields)


def build_dataset(descriptor: DatasetDescriptor,
                  grid_fs: Optional[FS] = None) -> InitialDataSet:
    """
    Build the initial data set a descriptor names.

    ``grid_fs`` is where ``custom-grid`` files are read from.
    """
    example, n, params = descriptor.example, descriptor.n, descriptor.params
    natural = ('flat' if descriptor.model == 'flat' else 'hyperbolic-polar')
    if example == 'custom-grid':
        natural = descriptor.model
    domain = ChartDomain(n, natural, descriptor.r0)
    h = zero_field(n, (0, 2), domain, 'h')
    log.debug(f'Building {example} on {domain}')
    if example in ('flat-trivial', 'hyperbolic-trivial'):
        g = reference_metric(domain)
    elif example == 'schwarzschild':
        g = radial_metric(domain, _schwarzschild_profile(n, params['m']), 'g')
    elif example == 'bowen-york':
        g = reference_metric(domain)
        h = _bowen_york(domain, params['p'])
    elif example == 'conformal-bump':
        g = _conformal_bump(domain, params['amplitude'], params['center'],
                            params['width'])
    elif example == 'ads-schwarzschild':
        r0 = descriptor.r0
        if 1.0 + r0 ** 2 - 2.0 * params['m'] * r0 ** (2 - n) <= 0.0:
            raise InputError('Inner radius lies inside the horizon', r0,
                             params['m'])
        g = radial_metric(
            domain, _ads_schwarzschild_profile(n, params['m']), 'g')
    elif example == 'gauge-perturbation':
        g = _gauge_metric(domain, params)
    else:
        if grid_fs is None:
            raise InputError('No filesystem to read the grid from',
                             descriptor.grid)
        grid = load_grid(grid_fs, descriptor.grid, n)
        g = grid.tensor('g', domain)
        if grid.has_tensor('h'):
            h = grid.tensor('h', domain)
    data = InitialDataSet(domain, g, h, descriptor.decay, name=example)
    if descriptor.model != domain.model:
        data = change_model(data, descriptor.model)
    return data
