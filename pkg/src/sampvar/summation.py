"""Order-independent floating point accumulation.

The accumulator keeps the running sum as a list of non-overlapping partials
(Shewchuk's expansion arithmetic), so the represented value is the *exact*
sum of everything added so far.  Rounding happens once, in :meth:`value`.
Because the exact sum does not depend on the order of the additions, two
accumulators fed the same terms in any order, or in any partition that is
later merged, round to the same float.  That is what makes chunked or
parallel reductions reproduce the serial result bit for bit.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


class ExactSum:
    """Exact running sum of floats.

    Examples
    --------
    >>> acc = ExactSum()
    >>> acc.add_many([1e100, 1.0, -1e100])
    >>> acc.value()
    1.0
    """

    __slots__ = ("_partials",)

    def __init__(self, values: Iterable[float] = ()):
        self._partials: list[float] = []
        self.add_many(values)

    def add(self, x: float) -> None:
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"non-finite term {x!r}")
        partials = self._partials
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]

    def add_many(self, values: Iterable[float]) -> None:
        for v in values:
            self.add(v)

    def merge(self, other: "ExactSum") -> None:
        """Fold another accumulator in; exact, so merge order is irrelevant."""
        for p in other._partials:
            self.add(p)

    @property
    def partials(self) -> tuple[float, ...]:
        return tuple(self._partials)

    def value(self) -> float:
        return math.fsum(self._partials)


def exact_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum; independent of the iteration order."""
    return math.fsum(values)


def exact_dot(weights, values) -> float:
    """Correctly rounded sum of the rounded products ``w_i * v_i``.

    The individual products are ordinary IEEE products, so the result is
    exact only up to one rounding per product, but it is still
    independent of the order in which the pairs are visited.
    """
    prods = np.multiply(np.asarray(weights, dtype=float), np.asarray(values, dtype=float))
    return math.fsum(prods.tolist())
