import math

import numpy as np
import pytest

from boundarymass._util import lexicographic, observed_order, pluralize


class TestPluralize:
    """
    Tests for `pluralize`.
    """
    def test_forms(self):
        assert pluralize(1, 'point', 'points') == 'point'
        assert pluralize(0, 'point', 'points') == 'points'
        assert pluralize(3, 'point', 'points') == 'points'


class TestObservedOrder:
    """
    Tests for `observed_order`.
    """
    def test_second_order(self):
        assert observed_order(4e-6, 1e-6) == pytest.approx(2.0)

    def test_degenerate(self):
        assert observed_order(1e-6, 0.0) == math.inf
        assert math.isnan(observed_order(0.0, 0.0))
        assert observed_order(0.0, 1e-6) == -math.inf


class TestLexicographic:
    """
    Tests for `lexicographic`.
    """
    def test_sorted(self):
        points = lexicographic([[1, 0], [0, 2], [0, 1]])
        assert [p.tolist() for p in points] == [[0, 1], [0, 2], [1, 0]]
        assert all(isinstance(p, np.ndarray) for p in points)
