"""
Tensor-product quadrature on spheres, hemispheres and half-annuli.

Directions are unit vectors of ``R^n``; the polar angle is measured from the
last axis so the hemisphere ``x_n >= 0`` is ``theta <= pi/2`` and its corner
sphere is ``theta = pi/2``.
"""
import math
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InputError


class Rule(NamedTuple):
    #: Nodes as rows.
    nodes: np.ndarray
    weights: np.ndarray


def _gauss(a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _check_orders(orders: Sequence[int]) -> Tuple[int, int]:
    if len(orders) != 2 or min(orders) < 1:
        raise InputError('Expecting two positive quadrature orders', orders)
    return int(orders[0]), int(orders[1])


def sphere_rule(m: int, orders: Sequence[int]) -> Rule:
    """
    Rule for the unit sphere ``S^m`` in ``R^(m+1)``: Gauss-Legendre in the
    polar angles and the trapezoid rule in the azimuth.
    """
    polar, azimuth = _check_orders(orders)
    if m == 0:
        return Rule(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    if m == 1:
        phi = 2.0 * math.pi * np.arange(azimuth) / azimuth
        return Rule(np.stack([np.cos(phi), np.sin(phi)], axis=1),
                    np.full(azimuth, 2.0 * math.pi / azimuth))
    theta, w = _gauss(0.0, math.pi, polar)
    return _cap(sphere_rule(m - 1, orders), theta,
                w * np.sin(theta) ** (m - 1))


def _cap(lower: Rule, theta: np.ndarray, w: np.ndarray) -> Rule:
    nodes = np.concatenate([
        np.hstack([np.sin(t) * lower.nodes,
                   np.full((len(lower.nodes), 1), np.cos(t))])
        for t in theta])
    weights = np.concatenate([wt * lower.weights for wt in w])
    return Rule(nodes, weights)


def hemisphere_rule(n: int, orders: Sequence[int]) -> Rule:
    """
    Rule for the closed upper unit hemisphere of ``S^(n-1)``.
    """
    polar, _ = _check_orders(orders)
    theta, w = _gauss(0.0, 0.5 * math.pi, polar)
    return _cap(sphere_rule(n - 2, orders), theta,
                w * np.sin(theta) ** (n - 2))


def corner_rule(n: int, orders: Sequence[int]) -> Rule:
    """
    Rule for the corner sphere ``S^(n-2)`` of the hemisphere, embedded in the
    boundary hyperplane.
    """
    lower = sphere_rule(n - 2, orders)
    return Rule(np.hstack([lower.nodes, np.zeros((len(lower.nodes), 1))]),
                lower.weights)


def half_annulus_rule(n: int, r_in: float, r_out: float,
                      orders: Sequence[int]) -> Rule:
    """
    Euclidean volume rule for ``r_in <= |x| <= r_out, x_n >= 0``.
    """
    radial, w = _gauss(r_in, r_out, _check_orders(orders)[0])
    cap = hemisphere_rule(n, orders)
    nodes = np.concatenate([r * cap.nodes for r in radial])
    weights = np.concatenate([
        wr * r ** (n - 1) * cap.weights for r, wr in zip(radial, w)])
    return Rule(nodes, weights)


def boundary_annulus_rule(n: int, r_in: float, r_out: float,
                          orders: Sequence[int]) -> Rule:
    """
    Euclidean area rule for ``r_in <= |x| <= r_out`` in the boundary
    hyperplane.
    """
    radial, w = _gauss(r_in, r_out, _check_orders(orders)[0])
    ring = corner_rule(n, orders)
    nodes = np.concatenate([r * ring.nodes for r in radial])
    weights = np.concatenate([
        wr * r ** (n - 2) * ring.weights for r, wr in zip(radial, w)])
    return Rule(nodes, weights)


def sphere_area(m: int) -> float:
    """
    Area of the unit sphere ``S^m``.
    """
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)
