import io
import json
import math
import os.path
from collections import OrderedDict, namedtuple

import numpy as np
import pytest

from boundarymass import _yaml
from boundarymass._config import Config, DEFAULTS
from boundarymass._report import (
    ReportEnvelope,
    all_passed,
    jsonable,
    residual_row,
    table_csv)
from boundarymass.models import CausalClass


def load_test_config() -> Config:
    path = os.path.join(os.path.dirname(__file__), 'data', 'config.yaml')
    with open(path) as fd:
        return Config.parse(fd)


class TestConfig:
    """
    Tests for `Config`.
    """
    def test_default(self):
        config = Config.default()
        assert list(config.as_dict()) == list(DEFAULTS)
        assert config.radii == [16.0, 32.0, 64.0, 128.0]
        assert config.orders == [48, 96]
        assert config.fit_exponent is None
        assert config.model_coords == 'polar'
        assert config.random_samples == 100
        assert config.spinor_samples == 1000

    def test_default_is_a_copy(self):
        """
        List defaults are not shared between configurations.
        """
        a = Config.default()
        a.radii.append(256.0)
        assert Config.default().radii == [16.0, 32.0, 64.0, 128.0]

    def test_parse(self):
        config = load_test_config()
        assert config.step == 2e-4
        assert config.dec_tol == 1e-8
        assert config.radii == [10.0, 20.0, 40.0]
        assert config.orders == [8, 16]
        assert config.model_coords == 'ball'
        assert config.identity_tol == DEFAULTS['identity_tol']

    def test_exponent_floats(self):
        """
        Floats written without a dot are still numbers.
        """
        config = Config.parse(
            io.StringIO('step: 1e-4\nradii: [1e1, 2e1, 4e1]\n'))
        assert config.step == 1e-4
        assert config.radii == [10.0, 20.0, 40.0]

    def test_dump(self):
        text = _yaml.dump(OrderedDict([
            ('step', np.float64(1e-4)), ('orders', (8, np.int64(16)))]))
        assert text == 'step: 0.0001\norders:\n- 8\n- 16\n'

    def test_empty(self):
        config = Config.parse(io.StringIO(''))
        assert config.as_dict() == Config.default().as_dict()

    @pytest.mark.parametrize('text', [
        'radius: [1, 2]',
        'step: -1',
        'radii: [20, 10]',
        'orders: []',
        'model_coords: cartesian',
        'dec_tol: null',
        'spinor_samples: 0',
    ])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            Config.parse(io.StringIO(text))

    def test_replace(self):
        config = Config.default()
        other = config.replace(step=1e-3, dec_tol=None)
        assert other.step == 1e-3
        assert other.dec_tol == config.dec_tol
        assert config.step == 1e-4


class TestJsonable:
    """
    Tests for `jsonable`.
    """
    def test_values(self):
        Row = namedtuple('Row', ['a', 'b'])
        value = {
            'class': CausalClass.SPACELIKE,
            'array': np.array([[1.0, np.nan], [np.inf, 2.0]]),
            'count': np.int64(3),
            'flag': np.bool_(True),
            'complex': 1 + 2j,
            'row': Row(np.float64(0.5), None),
        }
        assert jsonable(value) == {
            'class': 'spacelike',
            'array': [[1.0, None], [None, 2.0]],
            'count': 3,
            'flag': True,
            'complex': [1.0, 2.0],
            'row': {'a': 0.5, 'b': None},
        }
        assert json.dumps(jsonable(value))

    def test_nan(self):
        assert jsonable(math.nan) is None
        assert jsonable(-math.inf) is None


class TestReportEnvelope:
    """
    Tests for `ReportEnvelope`.
    """
    def test_deterministic(self):
        """
        Without timing, identical payloads serialize identically.
        """
        payload = OrderedDict([('E', np.float64(1.5)), ('passed', True)])
        first = ReportEnvelope('mass', {'example': 'schwarzschild'})
        second = ReportEnvelope('mass', {'example': 'schwarzschild'})
        text = first.finish(payload).to_json(timing=False)
        assert text == second.finish(payload).to_json(timing=False)
        document = json.loads(text)
        assert document['tool'] == 'boundarymass'
        assert document['payload'] == {'E': 1.5, 'passed': True}
        assert 'timing' not in document

    def test_timing(self):
        envelope = ReportEnvelope('audit').finish(OrderedDict())
        document = json.loads(envelope.to_json())
        assert document['timing']['seconds'] >= 0.0
        assert document['descriptor'] is None


class TestTables:
    """
    Tests for `residual_row`, `all_passed` and `table_csv`.
    """
    def test_residual_row(self):
        row = residual_row('identity', [0.0, 1.0], 1e-6, 1e-5, order=2.0)
        assert row['passed']
        assert row['order'] == 2.0
        assert not residual_row('identity', 'x', 1e-4, 1e-5)['passed']
        assert not residual_row('identity', 'x', math.nan, 1e-5)['passed']

    def test_all_passed(self):
        rows = [residual_row('a', 's', 0.0, 0.0),
                residual_row('b', 's', 1.0, 0.5)]
        assert all_passed(rows[:1])
        assert not all_passed(rows)

    def test_csv(self):
        rows = [OrderedDict([('radius', 10.0), ('value', np.float64(1.5))]),
                OrderedDict([('radius', 20.0), ('value', math.nan)])]
        assert table_csv(rows) == 'radius,value\n10.0,1.5\n20.0,\n'
        assert table_csv([]) == ''

    def test_csv_extra_columns(self):
        rows = [OrderedDict([('identity', 'a'), ('residual', 0.0)]),
                OrderedDict([('identity', 'b'), ('residual', 1.0),
                             ('samples', 3)])]
        assert table_csv(rows) == (
            'identity,residual,samples\na,0.0,\nb,1.0,3\n')
