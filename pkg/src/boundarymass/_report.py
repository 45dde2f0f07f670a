import csv
import enum
import io
import json
import math
import time
from collections import OrderedDict
from typing import Dict, Iterable, List, Optional

import numpy as np

from . import __version__
from ._types import Payload


TOOL = 'boundarymass'


def jsonable(value):
    """
    Convert report values to plain JSON types.

    Numpy scalars and arrays become numbers and lists, named tuples become
    mappings and non-finite floats become ``None``.
    """
    if isinstance(value, enum.Enum):
        return value.value
    if hasattr(value, '_asdict'):
        return jsonable(value._asdict())
    if isinstance(value, dict):
        return OrderedDict((str(k), jsonable(v)) for k, v in value.items())
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return [jsonable(value.real), jsonable(value.imag)]
    return value


class ReportEnvelope(object):
    """
    The document every command writes: tool version, the dataset descriptor,
    the command payload and timing.
    """
    __slots__ = ['command', 'descriptor', 'payload', 'started', 'timing']

    def __init__(self, command: str, descriptor: Optional[Dict] = None):
        self.command = command
        self.descriptor = descriptor
        self.payload = OrderedDict()  # type: Payload
        self.started = time.perf_counter()
        self.timing = OrderedDict()

    def finish(self, payload: Payload) -> 'ReportEnvelope':
        self.payload = payload
        self.timing['seconds'] = time.perf_counter() - self.started
        return self

    def as_dict(self, timing: bool = True) -> OrderedDict:
        document = OrderedDict([
            ('tool', TOOL),
            ('version', __version__),
            ('command', self.command),
            ('descriptor', self.descriptor),
            ('payload', self.payload),
        ])
        if timing:
            document['timing'] = self.timing
        return jsonable(document)

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), sort_keys=True,
                          indent=2) + '\n'


def table_csv(rows: Iterable[Dict]) -> str:
    """
    Render rows of a table as CSV, columns in order of first appearance.
    Cells of columns a row lacks are left empty.
    """
    rows = [jsonable(row) for row in rows]
    if not rows:
        return ''
    fieldnames = list(OrderedDict.fromkeys(key for row in rows for key in row))
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return out.getvalue()


def residual_row(identity: str, sample, residual: float, tolerance: float,
                 **extra) -> OrderedDict:
    """
    One row of an identity-suite residual table.
    """
    row = OrderedDict([
        ('identity', identity),
        ('sample', sample),
        ('residual', residual),
        ('tolerance', tolerance),
        ('passed', bool(residual <= tolerance)),
    ])
    row.update(extra)
    return row


def all_passed(rows: List[Dict]) -> bool:
    return all(row['passed'] for row in rows)
