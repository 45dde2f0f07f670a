from collections import OrderedDict
from typing import Container, List, Optional, TextIO, TypeVar

from . import _yaml


T = TypeVar('T')

MODEL_COORDS = {'polar', 'ball'}

DEFAULTS = OrderedDict([
    ('step', 1e-4),
    ('identity_step', 1e-3),
    ('model_tol', 1e-6),
    ('identity_tol', 1e-5),
    ('dec_tol', 1e-9),
    ('algebra_tol', 1e-12),
    ('min_order', 1.9),
    ('convergence_tol', 1e-2),
    ('radii', [16.0, 32.0, 64.0, 128.0]),
    ('orders', [48, 96]),
    ('fit_window', 2),
    ('fit_exponent', None),
    ('audit_box', None),
    ('audit_points', 5),
    ('decay_radii', [10.0, 20.0, 40.0, 80.0]),
    ('decay_orders', [6, 12]),
    ('random_samples', 100),
    ('spinor_samples', 1000),
    ('seed', 0),
    ('model_coords', 'polar'),
])


def validate_defined(value: Optional[T], hint=None) -> T:
    """
    Validate that a value is defined.
    """
    if value is None:
        raise ValueError('Nonexistent or missing value', value, hint)
    return value


def validate_oneof(
        value: Optional[T],
        container: Container[T],
        hint=None) -> T:
    """
    Validate that a value is one of a set of values.
    """
    if value is None or value not in container:
        raise ValueError(
            'Expecting value to be one of', container, value, hint)
    return value


def validate_positive(value, hint=None):
    """
    Validate that a number, or every number in a list, is strictly positive.
    """
    values = value if isinstance(value, (list, tuple)) else [value]
    if not values or any(v is None or v <= 0 for v in values):
        raise ValueError('Expecting positive value', value, hint)
    return value


def validate_increasing(values: List[float], hint=None) -> List[float]:
    """
    Validate that a list of numbers is strictly increasing.
    """
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError('Expecting increasing values', values, hint)
    return values


class Config(object):
    """
    Numerical defaults: finite-difference steps, tolerances, quadrature and
    extrapolation settings, and audit sampling.
    """
    __slots__ = list(DEFAULTS)

    def __init__(self, **kw):
        super(Config, self).__init__()
        for key, val in kw.items():
            setattr(self, key, val)

    def __repr__(self):
        obj = {key: getattr(self, key) for key in self.__slots__}
        return repr(obj)

    @classmethod
    def default(cls) -> 'Config':
        """
        The built-in configuration.
        """
        return cls._from_mapping(OrderedDict())

    @classmethod
    def parse(cls, fd: TextIO) -> 'Config':
        """
        Parse a YAML config.
        """
        return cls._from_mapping(_yaml.load(fd) or OrderedDict())

    @classmethod
    def _from_mapping(cls, config) -> 'Config':
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ValueError('Unknown configuration keys', sorted(unknown))
        for key, value in DEFAULTS.items():
            config.setdefault(
                key, list(value) if isinstance(value, list) else value)
        for key in ['step', 'identity_step', 'model_tol', 'identity_tol',
                    'dec_tol', 'algebra_tol', 'min_order', 'convergence_tol',
                    'radii', 'orders', 'fit_window', 'audit_points',
                    'decay_radii', 'decay_orders', 'random_samples',
                    'spinor_samples']:
            validate_positive(validate_defined(config[key], key), key)
        config['radii'] = validate_increasing(
            [float(r) for r in config['radii']], 'radii')
        config['decay_radii'] = validate_increasing(
            [float(r) for r in config['decay_radii']], 'decay_radii')
        config['orders'] = [int(o) for o in config['orders']]
        config['decay_orders'] = [int(o) for o in config['decay_orders']]
        for key in ['random_samples', 'spinor_samples']:
            config[key] = int(config[key])
        config['model_coords'] = validate_oneof(
            config['model_coords'], MODEL_COORDS, 'model_coords')
        return Config(**config)

    def replace(self, **kw) -> 'Config':
        """
        Copy of this configuration with some values replaced, ignoring
        values that are ``None``.
        """
        values = OrderedDict(
            (key, getattr(self, key)) for key in self.__slots__)
        values.update((k, v) for k, v in kw.items() if v is not None)
        return Config(**values)

    def as_dict(self) -> OrderedDict:
        """
        Plain mapping of the configuration, in declaration order.
        """
        return OrderedDict(
            (key, getattr(self, key)) for key in self.__slots__)
