"""Integer coefficient tables for the moments and cumulants of ``s^2``.

Everything here is data.  A monomial is written the way it reads in the
literature, ``"1^4 2"`` for ``mu_1^4 mu_2`` and so on, and maps to the
symmetric-moment pattern with the same exponent multiset (``2.1.1.1.1``).

Tables keyed by ``(i, j)`` hold numerators over ``(n-1)^i n^j``.
Closed-form terms carry ``coef * prod(n - r for r in roots) * poly(n)``
over ``(n-1)^i n^j``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .symmetric import ExponentPattern

__all__ = [
    "monomial",
    "KAPPA2_A",
    "KAPPA2_REST",
    "KAPPA3_A",
    "KAPPA4_A",
    "MOMENT3_REGROUPED_AS_PRINTED",
    "MOMENT3_REGROUPED",
    "MOMENT2_CLOSED_FORM",
    "MOMENT3_CLOSED_FORM",
    "MOMENT4_CLOSED_FORM",
    "ClosedFormTerm",
]


def monomial(text: str) -> ExponentPattern:
    """``"1^2 2 3"`` -> ``ExponentPattern((3, 2, 1, 1))``."""
    exps = []
    for tok in text.split():
        base, _, power = tok.partition("^")
        exps.extend([int(base)] * int(power or 1))
    return ExponentPattern(tuple(exps))


def _table(raw: Mapping[tuple[int, int], list[tuple[int, str]]]) -> dict[tuple[int, int], tuple[tuple[int, ExponentPattern], ...]]:
    return {ij: tuple((c, monomial(m)) for c, m in terms) for ij, terms in raw.items()}


# kappa_2 = A(1,0)/(n-1) + A(0,1)/n + A(1,1)/((n-1)n) + R_2
KAPPA2_A = _table({
    (1, 0): [(-4, "1^4"), (8, "1^2 2"), (-1, "2^2")],
    (0, 1): [(1, "4"), (-4, "1 3")],
    (1, 1): [(6, "1^4"), (-12, "1^2 2"), (3, "2^2")],
})

# R_2 = (2^2) - 2 (1^2 2) + (1^4) - kappa_1^2; the linear part lives here
KAPPA2_REST = tuple((c, monomial(m)) for c, m in [(1, "2^2"), (-2, "1^2 2"), (1, "1^4")])

KAPPA3_A = _table({
    (2, 0): [(-40, "1^6"), (120, "1^4 2"), (-56, "1^3 3"), (-78, "1^2 2^2"), (48, "1 2 3"), (2, "2^3"), (-6, "3^2")],
    (1, 1): [(18, "1^2 4"), (-3, "2 4")],
    (0, 2): [(1, "6"), (-6, "1 5")],
    (2, 1): [(136, "1^6"), (-408, "1^4 2"), (160, "1^3 3"), (288, "1^2 2^2"), (-144, "1 2 3"), (-24, "2^3"), (12, "3^2")],
    (1, 2): [(15, "2 4"), (-30, "1^2 4")],
    (2, 2): [(-120, "1^6"), (360, "1^4 2"), (-120, "1^3 3"), (-270, "1^2 2^2"), (120, "1 2 3"), (30, "2^3"), (-10, "3^2")],
})

KAPPA4_A = _table({
    (3, 0): [
        (-672, "1^8"), (2688, "1^6 2"), (-1216, "1^5 3"), (-3120, "1^4 2^2"), (400, "1^4 4"),
        (2240, "1^3 2 3"), (960, "1^2 2^3"), (-384, "3^2 1^2"), (-480, "1^2 2 4"), (-624, "1 2^2 3"),
        (144, "1 3 4"), (-6, "2^4"), (96, "2 3^2"), (-3, "4^2"), (12, "2^2 4"),
    ],
    (2, 1): [(-128, "1^3 5"), (96, "1 2 5"), (-24, "3 5")],
    (1, 2): [(32, "1^2 6"), (-4, "2 6")],
    (0, 3): [(1, "8"), (-8, "1 7")],
    (3, 1): [
        (3792, "1^8"), (-15168, "1^6 2"), (6144, "1^5 3"), (18144, "1^4 2^2"), (-1920, "1^4 4"),
        (-11520, "1^3 2 3"), (-6336, "2^3 1^2"), (1680, "1^2 3^2"), (2520, "1^2 2 4"), (3600, "1 2^2 3"),
        (-624, "1 3 4"), (234, "2^4"), (-432, "2 3^2"), (33, "4^2"), (-252, "2^2 4"),
    ],
    (2, 2): [(400, "1^3 5"), (-336, "1 2 5"), (48, "3 5")],
    (1, 3): [(28, "2 6"), (-56, "1^2 6")],
    (3, 2): [
        (-7440, "1^8"), (29760, "1^6 2"), (-10880, "1^5 3"), (-36480, "1^4 2^2"), (3104, "1^4 4"),
        (20992, "1^3 2 3"), (13824, "1^2 2^3"), (-2752, "1^2 3^2"), (-4368, "1^2 2 4"), (-7248, "1 2^2 3"),
        (976, "1 3 4"), (-738, "2^4"), (800, "2 3^2"), (-57, "4^2"), (612, "2^2 4"),
    ],
    (2, 3): [(-336, "1^3 5"), (336, "1 2 5"), (-56, "3 5")],
    (3, 3): [
        (5040, "1^8"), (-20160, "1^6 2"), (6720, "1^5 3"), (25200, "1^4 2^2"), (-1680, "1^4 4"),
        (-13440, "1^3 2 3"), (-10080, "1^2 2^3"), (1680, "1^2 3^2"), (2520, "1^2 2 4"), (5040, "1 2^2 3"),
        (-560, "1 3 4"), (630, "2^4"), (-560, "2 3^2"), (35, "4^2"), (-420, "2^2 4"),
    ],
})

# E[s^6] = M(0,0) + sum M(i,j) / ((n-1)^i n^j).  Exactly as printed: the
# second (1,0) block is the (0,1) entry, and the (2,0) and (1,1) blocks do
# not reproduce the closed form below.
MOMENT3_REGROUPED_AS_PRINTED = _table({
    (2, 0): [(-60, "1^6"), (180, "1^4 2"), (-68, "1^3 3"), (-129, "1^2 2^2"), (60, "2 3 1"), (13, "2^3"), (-6, "3^2")],
    (0, 0): [(-1, "1^6"), (3, "1^4 2"), (-3, "1^2 2^2"), (1, "2^3")],
    (2, 2): [(-120, "1^6"), (360, "1^4 2"), (-120, "1^3 3"), (-270, "1^2 2^2"), (120, "1 2 3"), (30, "2^3"), (-10, "3^2")],
    (1, 0): [(12, "1^6"), (-36, "1^4 2"), (12, "1^3 3"), (27, "1^2 2^2"), (-12, "1 2 3"), (-3, "2^3")],
    (2, 1): [(154, "1^6"), (-462, "2 1^4"), (172, "1^3 3"), (333, "1^2 2^2"), (-156, "1 2 3"), (-33, "2^3"), (12, "3^2")],
    (0, 1): [(-3, "1^2 4"), (3, "2 4")],
    (1, 2): [(15, "2 4"), (-30, "1^2 4")],
    (1, 1): [(21, "1^2 4"), (-6, "2 4")],
    (0, 2): [(1, "6"), (-6, "1 5")],
})

# Regrouped table consistent with the closed form: (2,0) and (1,1) repaired.
MOMENT3_REGROUPED = {
    **MOMENT3_REGROUPED_AS_PRINTED,
    **_table({
        (2, 0): [(-58, "1^6"), (174, "1^4 2"), (-68, "1^3 3"), (-123, "1^2 2^2"), (60, "2 3 1"), (11, "2^3"), (-6, "3^2")],
        (1, 1): [(18, "1^2 4"), (-3, "2 4")],
    }),
}


class ClosedFormTerm(tuple):
    """``(coef, pattern, roots, poly, i, j)``: see module docstring."""

    __slots__ = ()

    def __new__(cls, coef: int, mono: str, roots: tuple[int, ...], poly: tuple[int, ...], i: int, j: int):
        return super().__new__(cls, (coef, monomial(mono), tuple(roots), tuple(poly), i, j))

    @property
    def pattern(self) -> ExponentPattern:
        return self[1]

    def weight(self, n: int) -> float:
        return float(self.exact_weight(n))

    def exact_weight(self, n: int) -> Fraction:
        coef, _, roots, poly, i, j = self
        num = coef
        for r in roots:
            num *= n - r
        if poly:
            val = 0
            for c in poly:
                val = val * n + c
            num *= val
        return Fraction(num, (n - 1) ** i * n**j)


_T = ClosedFormTerm

# E[s^4], the standard second-moment expansion of the sample variance
MOMENT2_CLOSED_FORM = (
    _T(1, "1^4", (3, 2), (), 1, 1),
    _T(-2, "2 1^2", (3, 2), (), 1, 1),
    _T(1, "2^2", (), (1, -2, 3), 1, 1),
    _T(-4, "3 1", (), (), 0, 1),
    _T(1, "4", (), (), 0, 1),
)

# E[s^6]; printed with an "E[s_n^8]" label but every term is of degree six
MOMENT3_CLOSED_FORM = (
    _T(-1, "1^6", (5, 4, 3, 2), (), 2, 2),
    _T(3, "2 1^4", (5, 4, 3, 2), (), 2, 2),
    _T(4, "3 1^3", (3, 2), (3, -5), 2, 2),
    _T(-3, "2^2 1^2", (3, 2), (1, -6, 15), 2, 2),
    _T(-3, "4 1^2", (5, 2), (), 1, 2),
    _T(-12, "2 3 1", (2,), (1, -4, 5), 2, 2),
    _T(-6, "5 1", (), (), 0, 2),
    _T(-2, "3^2", (), (3, -6, 5), 2, 2),
    _T(3, "2 4", (), (1, -2, 5), 1, 2),
    _T(1, "6", (), (), 0, 2),
    _T(1, "2^3", (2,), (1, -3, 9, -15), 2, 2),
)

MOMENT4_CLOSED_FORM = (
    _T(1, "1^8", (7, 6, 5, 4, 3, 2), (), 3, 3),
    _T(-4, "2 1^6", (7, 6, 5, 4, 3, 2), (), 3, 3),
    _T(-8, "3 1^5", (5, 4, 3, 2), (3, -7), 3, 3),
    _T(6, "2^2 1^4", (5, 4, 3, 2), (1, -10, 35), 3, 3),
    _T(2, "4 1^4", (4, 3, 2), (3, -30, 35), 3, 3),
    _T(16, "2 3 1^3", (4, 3, 2), (3, -20, 35), 3, 3),
    _T(8, "5 1^3", (3, 2), (3, -7), 2, 3),
    _T(-4, "2^3 1^2", (4, 3, 2), (1, -9, 45, -105), 3, 3),
    _T(8, "3^2 1^2", (3, 2), (9, -30, 35), 3, 3),
    _T(-12, "2 4 1^2", (3, 2), (1, -9, 35, -35), 3, 3),
    _T(-4, "6 1^2", (7, 2), (), 1, 3),
    _T(-24, "2^2 3 1", (3, 2), (1, -7, 25, -35), 3, 3),
    _T(-8, "3 4 1", (2,), (3, -21, 45, -35), 3, 3),
    _T(-24, "2 5 1", (2,), (1, -4, 7), 2, 3),
    _T(-8, "7 1", (), (), 0, 3),
    _T(1, "2^4", (3, 2), (1, -4, 18, -60, 105), 3, 3),
    _T(-8, "2 3^2", (2,), (3, -15, 35, -35), 3, 3),
    _T(1, "4^2", (), (3, -12, 42, -60, 35), 3, 3),
    _T(6, "2^2 4", (2,), (1, -4, 16, -40, 35), 3, 3),
    _T(-8, "3 5", (), (3, -6, 7), 2, 3),
    _T(4, "2 6", (), (1, -2, 7), 1, 3),
    _T(1, "8", (), (), 0, 3),
)
