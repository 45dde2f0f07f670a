import re
from collections import OrderedDict

import numpy as np
import yaml


class _Loader(yaml.SafeLoader):
    """
    Safe loader keeping mapping order.
    """


class _Dumper(yaml.SafeDumper):
    """
    Safe dumper for configuration values, including numpy scalars.
    """


# YAML 1.1 only reads floats with a dot, so ``1e-4`` would be a string.
_Loader.add_implicit_resolver(
    'tag:yaml.org,2002:float',
    re.compile(r'''^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                  |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                  |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                  |[-+]?\.(?:inf|Inf|INF)
                  |\.(?:nan|NaN|NAN))$''', re.X),
    list('-+0123456789.'))
_Loader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG,
    lambda loader, node: OrderedDict(loader.construct_pairs(node)))

_Dumper.add_representer(
    OrderedDict,
    lambda dumper, data: dumper.represent_dict(data.items()))
_Dumper.add_multi_representer(
    np.floating,
    lambda dumper, data: dumper.represent_float(float(data)))
_Dumper.add_multi_representer(
    np.integer,
    lambda dumper, data: dumper.represent_int(int(data)))
_Dumper.add_representer(
    tuple,
    lambda dumper, data: dumper.represent_list(list(data)))


def load(fd):
    """
    Load a YAML file.
    """
    return yaml.load(fd, Loader=_Loader)


def dump(data):
    """
    Dump a YAML file, block style.
    """
    return yaml.dump(data, Dumper=_Dumper, default_flow_style=False)
