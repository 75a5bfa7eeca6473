"""Golden-section search for the 1-D EE-optimal powers of the symmetric model"""

import math
from numbers import Number
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5) - 1)/2
INV_PHI_SQUARE = (3 - math.sqrt(5))/2


def golden_section_maximize(
        func: Callable[[float], float], low: Number, high: Number,
        tol: Number = 1e-9
    ) -> Tuple[float, float]:
    """Return (argmax, max) of a unimodal ``func`` on [low, high], the
    argmax located to within ``tol``

    Examples
    --------
    >>> x, fx = golden_section_maximize(lambda x: -(x - 0.3)**2, 0, 1)
    >>> round(x, 6)
    0.3
    """
    if tol <= 0:
        raise ValueError("A non-positive tolerance was passed. Please only pass positive values")
    low, high = min(low, high), max(low, high)
    width = high - low
    if width <= tol:
        mid = (low + high)/2
        return mid, func(mid)

    steps = int(math.ceil(math.log(tol/width)/math.log(INV_PHI)))
    c = low + INV_PHI_SQUARE*width
    d = low + INV_PHI*width
    fc = func(c)
    fd = func(d)
    for _ in range(steps - 1):
        width *= INV_PHI
        if fc > fd:
            high, d, fd = d, c, fc
            c = low + INV_PHI_SQUARE*width
            fc = func(c)
        else:
            low, c, fc = c, d, fd
            d = low + INV_PHI*width
            fd = func(d)

    # the bracket endpoints are never evaluated otherwise
    candidates = [(c, fc), (d, fd), (low, func(low)), (high, func(high))]
    return max(candidates, key=lambda pair: pair[1])
