from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np


Array = np.ndarray
# A point of a chart, as coordinate components.
Point = Union[Sequence[float], np.ndarray]
Evaluator = Callable[[np.ndarray], np.ndarray]
OptionalEvaluator = Optional[Evaluator]
# Contravariant and covariant valence.
Rank = Tuple[int, int]
Box = List[Tuple[float, float]]
# TODO: Python 3.7 doesn't have `TypedDict`.
Payload = Dict[str, object]
