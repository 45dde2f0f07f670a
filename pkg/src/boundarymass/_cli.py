import json
from collections import OrderedDict

import click


def _split(value: str):
    return [part.strip() for part in value.split(',') if part.strip()]


def float_list(ctx, param, value):
    """
    Accept a comma-separated list of increasing positive numbers.
    """
    if value is None:
        return None
    try:
        values = [float(part) for part in _split(value)]
    except ValueError:
        raise click.BadParameter('Expecting comma-separated numbers')
    if not values or any(v <= 0 for v in values):
        raise click.BadParameter('Expecting positive numbers')
    if any(b <= a for a, b in zip(values, values[1:])):
        raise click.BadParameter('Expecting increasing numbers')
    return values


def order_pair(ctx, param, value):
    """
    Accept two positive quadrature orders, ``polar,azimuthal``.
    """
    if value is None:
        return None
    try:
        orders = [int(part) for part in _split(value)]
    except ValueError:
        raise click.BadParameter('Expecting two comma-separated integers')
    if len(orders) != 2 or min(orders) < 1:
        raise click.BadParameter('Expecting two positive integers')
    return orders


def sample_box(ctx, param, value):
    """
    Accept a sampling box ``lo:hi,lo:hi,...`` with one interval per axis.
    """
    if value is None:
        return None
    box = []
    for interval in _split(value):
        try:
            lo, hi = (float(x) for x in interval.split(':'))
        except ValueError:
            raise click.BadParameter(
                'Invalid interval {!r}, should be lo:hi'.format(interval))
        if not lo < hi:
            raise click.BadParameter(
                'Empty interval {!r}'.format(interval))
        box.append((lo, hi))
    if not box:
        raise click.BadParameter('Expecting at least one interval')
    return box


def split_params(ctx, param, value):
    """
    Split ``key=value`` example parameters; values are parsed as JSON, so
    vectors are written ``p=[0.1,0,0]``.
    """
    params = OrderedDict()
    for item in value:
        key, sep, raw = item.partition('=')
        if not sep or not key.strip():
            raise click.BadParameter(
                'Invalid parameter {!r}, should be key=value'.format(item))
        try:
            params[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            raise click.BadParameter(
                'Invalid value for {!r}: {!r}'.format(key, raw))
    return params
