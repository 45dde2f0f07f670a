import math
from typing import Iterable, List, Sequence

import numpy as np


def pluralize(n: int, singular: str, plural: str) -> str:
    """
    Use the plural or singular form based on some count.
    """
    return singular if n == 1 else plural


def observed_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    """
    Observed convergence order from errors at two steps differing by
    ``ratio``.

    Returns ``inf`` when the finer error vanishes and ``nan`` when both do.
    """
    coarse, fine = abs(coarse), abs(fine)
    if fine == 0.0:
        return math.inf if coarse > 0.0 else math.nan
    if coarse == 0.0:
        return -math.inf
    return math.log(coarse / fine) / math.log(ratio)


def lexicographic(points: Iterable[Sequence[float]]) -> List[np.ndarray]:
    """
    Sort points lexicographically by their coordinates.
    """
    return [np.asarray(p, dtype=float)
            for p in sorted(tuple(float(x) for x in p) for p in points)]
