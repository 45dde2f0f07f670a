import json
import math

import numpy as np
import pytest
import sympy
from fs import open_fs

from boundarymass.datasets import (
    EXAMPLES,
    FORMAT,
    DatasetDescriptor,
    build_dataset,
    dump_dataset,
    gauge_field,
    load_dataset,
    load_grid)
from boundarymass.errors import InputError
from boundarymass.geometry import TensorField, gradient, lie_derivative_metric
from boundarymass.models import reference_metric


def write_grid(grid_fs, n=3, dims=(3, 3, 3), fields=None, data=None,
               header='grid.json', origin=None, spacing=None):
    """
    Write a grid whose ``g_ij`` components are ``(1 + 0.01 x_1) delta_ij``.
    """
    if fields is None:
        fields = ['g_{}{}'.format(i + 1, j + 1)
                  for i in range(n) for j in range(i, n)]
    origin = [0.0] * n if origin is None else origin
    spacing = [1.0] * n if spacing is None else spacing
    axes = [o + h * np.arange(k) for o, h, k in zip(origin, spacing, dims)]
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    values = np.zeros(tuple(dims) + (len(fields),))
    for k, name in enumerate(fields):
        i, j = int(name[2]), int(name[3])
        if i == j:
            values[..., k] = 1.0 + 0.01 * mesh[..., 0]
    document = {'dims': list(dims), 'origin': origin, 'spacing': spacing,
                'fields': fields}
    if data is not None:
        document['data'] = data
    grid_fs.writetext(header, json.dumps(document))
    raw = data or header.replace('.json', '.raw')
    grid_fs.writebytes(raw, values.astype('<f8').tobytes())
    return values


class TestDatasetDescriptor:
    """
    Tests for `DatasetDescriptor`.
    """
    def test_defaults(self):
        d = DatasetDescriptor('schwarzschild')
        assert d.model == 'flat'
        assert d.params == {'m': 1.0}
        assert d.decay == 1.0
        h = DatasetDescriptor('ads-schwarzschild', 4)
        assert h.model == 'hyperbolic-polar'
        assert h.params == {'m': 0.1}
        assert h.decay == 4.0
        assert DatasetDescriptor('bowen-york', 4).params['p'] == [
            0.1, 0.0, 0.0, 0.0]

    def test_seeded_bump(self):
        """
        The bump center is reproducible from its seed and lies above the
        boundary.
        """
        a = DatasetDescriptor('conformal-bump', params={'seed': 5})
        b = DatasetDescriptor('conformal-bump', params={'seed': 5})
        c = DatasetDescriptor('conformal-bump', params={'seed': 6})
        assert a == b
        assert a.params['center'] != c.params['center']
        assert a.params['center'][-1] > 0

    @pytest.mark.parametrize('args, kw', [
        (('nonsense',), {}),
        (('schwarzschild', 2), {}),
        (('schwarzschild',), {'params': {'m': -1.0}}),
        (('schwarzschild',), {'params': {'mass': 1.0}}),
        (('schwarzschild',), {'model': 'hyperbolic-polar'}),
        (('hyperbolic-trivial',), {'model': 'flat'}),
        (('bowen-york',), {'params': {'p': [0.1, 0.0]}}),
        (('conformal-bump',), {'params': {'amplitude': -1.0}}),
        (('conformal-bump',), {'params': {'width': 0.0}}),
        (('custom-grid',), {}),
        (('flat-trivial',), {'grid': 'grid.json'}),
        (('flat-trivial',), {'r0': 0.0}),
    ])
    def test_invalid(self, args, kw):
        with pytest.raises(InputError):
            DatasetDescriptor(*args, **kw)

    def test_replace(self):
        d = DatasetDescriptor('schwarzschild')
        e = d.replace(r0=2.0)
        assert e.r0 == 2.0
        assert d.r0 == 1.0
        assert e.params == d.params


class TestDatasetFile:
    """
    Tests for `dump_dataset` and `load_dataset`.
    """
    def test_round_trip(self):
        d = DatasetDescriptor('bowen-york', 4, params={'p': [0, 1, 0, 0]})
        text = dump_dataset(d)
        assert load_dataset(text) == d
        assert dump_dataset(load_dataset(text)) == text

    def test_canonical(self):
        document = json.loads(dump_dataset(DatasetDescriptor('schwarzschild')))
        assert document['format'] == FORMAT
        assert document['version'] == 1
        assert 'delta_ij' in document['formula']['g']
        assert list(document) == sorted(document)

    @pytest.mark.parametrize('text', [
        'not json',
        '[]',
        '{"format": "other", "version": 1}',
        json.dumps({'format': FORMAT, 'version': 2, 'example': 'flat-trivial',
                    'n': 3}),
        json.dumps({'format': FORMAT, 'version': 1, 'n': 3}),
    ])
    def test_invalid(self, text):
        with pytest.raises(InputError):
            load_dataset(text)


class TestBuildDataset:
    """
    Tests for `build_dataset`.
    """
    @pytest.mark.parametrize('example', [
        e for e in EXAMPLES if e != 'custom-grid'])
    def test_builds(self, example):
        data = build_dataset(DatasetDescriptor(example))
        p = [0.5, -1.0, 2.0]
        g = data.g(p)
        assert np.allclose(g, g.T)
        assert np.all(np.linalg.eigvalsh(g) > 0)
        assert data.name == example

    def test_schwarzschild_derivatives(self):
        """
        Analytic derivatives of the radial profile agree with symbolic ones.
        """
        xs = sympy.symbols('x1:4')
        r = sympy.sqrt(sum(x ** 2 for x in xs))
        a = (1 + sympy.Rational(1, 2) / r) ** 4
        point = {x: v for x, v in zip(xs, [1.0, -0.5, 2.0])}
        data = build_dataset(DatasetDescriptor('schwarzschild'))
        p = np.array([1.0, -0.5, 2.0])
        for c in range(3):
            expected = float(sympy.diff(a, xs[c]).subs(point))
            assert data.g.d_eval(p)[c, 0, 0] == pytest.approx(expected)
            for d in range(3):
                expected = float(sympy.diff(a, xs[c], xs[d]).subs(point))
                assert data.g.dd_eval(p)[c, d, 1, 1] == pytest.approx(
                    expected)

    def test_ads_schwarzschild_derivatives(self):
        data = build_dataset(DatasetDescriptor('ads-schwarzschild'))
        p = np.array([1.2, 0.4, 0.9])
        plain = TensorField(data.g.evaluate, symmetric=True)
        assert np.allclose(data.g.d_eval(p), gradient(plain, p, 1e-5),
                           atol=1e-8)

    def test_ads_schwarzschild_far_field(self):
        data = build_dataset(DatasetDescriptor('ads-schwarzschild'))
        b = reference_metric(data.domain)
        p = np.array([300.0, 0.0, 400.0])
        assert np.max(np.abs(data.g(p) - b(p))) < 1e-9

    def test_horizon(self):
        with pytest.raises(InputError):
            build_dataset(DatasetDescriptor(
                'ads-schwarzschild', params={'m': 2.0}, r0=1.0))

    def test_gauge_perturbation(self):
        """
        The metric is ``b + L_zeta b`` with a boundary-tangent ``zeta``.
        """
        descriptor = DatasetDescriptor('gauge-perturbation')
        data = build_dataset(descriptor)
        zeta = gauge_field(data.domain, descriptor.params)
        b = reference_metric(data.domain)
        p = np.array([0.3, -0.4, 1.7])
        expected = b(p) + lie_derivative_metric(b, zeta, p)
        assert np.allclose(data.g(p), expected, atol=1e-12)
        assert zeta([0.3, 2.0, 0.0])[-1] == 0.0
        plain = TensorField(data.g.evaluate, symmetric=True)
        assert np.allclose(data.g.d_eval(p), gradient(plain, p, 1e-5),
                           atol=1e-8)

    def test_ball(self):
        data = build_dataset(DatasetDescriptor(
            'hyperbolic-trivial', model='hyperbolic-ball', r0=1.0))
        assert data.domain.model == 'hyperbolic-ball'
        assert data.domain.r0 == pytest.approx(1.0 / (1.0 + math.sqrt(2.0)))
        z = np.array([0.2, 0.1, 0.5])
        assert np.allclose(data.g(z), reference_metric(data.domain)(z))

    def test_bowen_york_traceless(self):
        data = build_dataset(DatasetDescriptor('bowen-york'))
        for p in ([1.0, 2.0, 0.5], [-3.0, 0.0, 0.0]):
            assert np.trace(data.h(p)) == pytest.approx(0.0, abs=1e-14)


class TestCustomGrid:
    """
    Tests for `load_grid` and custom-grid datasets.
    """
    def test_interpolation(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs)
        grid = load_grid(grid_fs, 'grid.json', 3)
        assert grid.fields[0] == 'g_11'
        # n-linear interpolation reproduces linear data.
        assert grid([0.5, 1.5, 0.7])[0] == pytest.approx(1.005)
        # Clamped outside the grid.
        assert grid([10.0, 1.0, 1.0])[0] == pytest.approx(1.02)

    def test_build(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs, data='values.bin')
        descriptor = DatasetDescriptor('custom-grid', grid='grid.json')
        data = build_dataset(descriptor, grid_fs)
        assert np.allclose(data.g([1.0, 1.0, 1.0]), 1.01 * np.eye(3))
        assert np.all(data.h([1.0, 1.0, 1.0]) == 0.0)

    def test_hyperbolic_model(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs)
        descriptor = DatasetDescriptor(
            'custom-grid', model='hyperbolic-polar', grid='grid.json')
        assert descriptor.decay == 3.0
        data = build_dataset(descriptor, grid_fs)
        assert data.domain.model == 'hyperbolic-polar'

    def test_dimension_mismatch(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs, n=3)
        with pytest.raises(InputError):
            load_grid(grid_fs, 'grid.json', 4)

    def test_size_mismatch(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs)
        grid_fs.writebytes('grid.raw', b'\0' * 16)
        with pytest.raises(InputError):
            load_grid(grid_fs, 'grid.json', 3)

    def test_missing_component(self):
        grid_fs = open_fs('mem://')
        write_grid(grid_fs, fields=['g_11', 'g_22', 'g_33'])
        with pytest.raises(InputError):
            build_dataset(
                DatasetDescriptor('custom-grid', grid='grid.json'), grid_fs)

    @pytest.mark.parametrize('header', [
        '[1, 2]',
        '{"dims": [3, 3, 3]}',
        json.dumps({'dims': [1, 3, 3], 'origin': [0, 0, 0],
                    'spacing': [1, 1, 1], 'fields': ['g_11']}),
        json.dumps({'dims': [3, 3, 3], 'origin': [0, 0, 0],
                    'spacing': [1, 1, 1], 'fields': ['g_11', 'g_11']}),
    ])
    def test_invalid_header(self, header):
        grid_fs = open_fs('mem://')
        grid_fs.writetext('grid.json', header)
        with pytest.raises(InputError):
            load_grid(grid_fs, 'grid.json', 3)
