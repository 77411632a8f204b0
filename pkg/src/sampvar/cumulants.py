"""First four cumulants of the sample variance ``s^2``.

Two engines are provided.

*Moment route* (authoritative).  ``E[s^2]``, ``E[s^4]``, ``E[s^6]`` and
``E[s^8]`` are exact linear combinations of symmetric moments with
coefficients rational in ``n``; the cumulants then follow from the usual
moment-cumulant relations.  This holds for any joint law, dependent or not.

*Cumulant route* (diagnostic).  The tabulated ``A`` coefficients give
``kappa_2`` exactly; for ``kappa_3`` and ``kappa_4`` the closing rest terms
are not fully determined, so those values are only reported through their
residual against the moment route.

Linear combinations are evaluated in exact rational arithmetic over the
float inputs, so each returned number carries a single rounding.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import coefficients as coef
from .process import ProcessModel, is_degenerate
from .symmetric import (
    ExponentPattern,
    InsufficientSampleSizeError,
    SymmetricMomentTable,
    build_tables,
    table_lookup,
)

__all__ = [
    "MomentSet",
    "CumulantSet",
    "kappa1",
    "kappa2",
    "rest2",
    "moment2",
    "moment3",
    "moment4",
    "moment3_from_tables",
    "moment4_from_tables",
    "moment_set",
    "kappa3_cumulant_route",
    "kappa4_cumulant_route",
    "cumulants_from_moments",
    "cumulants_moment_route",
    "chisq_deviation",
    "chisq_exactness_check",
    "MIN_N",
]

#: Smallest sample length for which each cumulant order is available.
MIN_N = {1: 2, 2: 4, 3: 6, 4: 8}

A12_DENOMINATORS = ("(n-1)n^2", "(n-1)^2n")


@dataclass(frozen=True)
class MomentSet:
    """Raw moments ``E[s^2], E[s^4], E[s^6], E[s^8]``; trailing ones may be absent."""

    n: int
    m1: float
    m2: float
    m3: float | None = None
    m4: float | None = None

    def __post_init__(self):
        vals = [v for v in (self.m1, self.m2, self.m3, self.m4) if v is not None]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("moments must be finite")
        slack = 1e-12
        if self.m2 < self.m1**2 - slack * max(1.0, self.m1**2):
            raise ValueError("E[s^4] < E[s^2]^2")
        if self.m4 is not None and self.m4 < self.m2**2 - slack * max(1.0, self.m2**2):
            raise ValueError("E[s^8] < E[s^4]^2")


@dataclass
class CumulantSet:
    """``kappa_1..kappa_4`` of ``s^2`` together with engine provenance.

    ``residuals`` holds cumulant-route minus moment-route differences:
    ``r2``, ``r3`` (A(1,2) over ``(n-1) n^2``), ``r3_alt`` (A(1,2) over
    ``(n-1)^2 n``) and ``r4`` (rest term taken as zero).  Also present
    for the moment route: ``rest2``, the value of the kappa_2 rest term.
    """

    n: int
    k1: float
    k2: float | None = None
    k3: float | None = None
    k4: float | None = None
    engine: str = "moment-route"
    residuals: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.k2 is not None and self.k2 < -1e-12 * max(1.0, abs(self.k1) ** 2):
            raise ValueError(f"negative variance kappa_2 = {self.k2!r}")

    @property
    def kappas(self) -> tuple[float | None, ...]:
        return (self.k1, self.k2, self.k3, self.k4)

    @property
    def order(self) -> int:
        return sum(k is not None for k in self.kappas)

    def kappa(self, r: int) -> float:
        val = self.kappas[r - 1]
        if val is None:
            raise ValueError(f"kappa_{r} not available")
        return val

    def to_dict(self) -> dict:
        out = asdict(self)
        out["residuals"] = dict(sorted(self.residuals.items()))
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "CumulantSet":
        return cls(
            n=int(data["n"]),
            k1=data["k1"],
            k2=data.get("k2"),
            k3=data.get("k3"),
            k4=data.get("k4"),
            engine=data.get("engine", "moment-route"),
            residuals=dict(data.get("residuals", {})),
        )


# ---------------------------------------------------------------------------
# Exact evaluation helpers
# ---------------------------------------------------------------------------


def _q(x: float) -> Fraction:
    return Fraction(x)


def _linear(table: SymmetricMomentTable, terms: Iterable[tuple[int, ExponentPattern]]) -> Fraction:
    return sum((c * _q(table[p]) for c, p in terms), Fraction(0))


def _over(n: int, i: int, j: int) -> Fraction:
    return Fraction(1, (n - 1) ** i * n**j)


def _grouped(table: SymmetricMomentTable, data: Mapping, n: int, denominators: Mapping | None = None) -> Fraction:
    total = Fraction(0)
    for (i, j), terms in data.items():
        i, j = (denominators or {}).get((i, j), (i, j))
        total += _linear(table, terms) * _over(n, i, j)
    return total


def _closed(table: SymmetricMomentTable, terms, n: int) -> Fraction:
    return sum((t.exact_weight(n) * _q(table[t.pattern]) for t in terms), Fraction(0))


def _need(n: int, order: int) -> None:
    if n < MIN_N[order]:
        raise InsufficientSampleSizeError(
            f"insufficient sample size: kappa_{order} / E[s^{2 * order}] needs n >= {MIN_N[order]}, got n = {n}"
        )


# ---------------------------------------------------------------------------
# Cumulant route
# ---------------------------------------------------------------------------


def _kappa1(tables) -> Fraction:
    t1 = table_lookup(tables, 1)
    return _q(t1["2"]) - _q(t1["1.1"])


def kappa1(tables: Sequence[SymmetricMomentTable]) -> float:
    """``E[s^2]``: the order-one symmetric moments ``(2)`` minus ``(1.1)``."""
    return float(_kappa1(tables))


def _rest2(tables) -> Fraction:
    t2 = table_lookup(tables, 2)
    return _linear(t2, coef.KAPPA2_REST) - _kappa1(tables) ** 2


def rest2(tables: Sequence[SymmetricMomentTable]) -> float:
    """The kappa_2 rest term; vanishes for independent identically distributed data."""
    return float(_rest2(tables))


def _kappa2(tables, n: int) -> Fraction:
    _need(n, 2)
    return _grouped(table_lookup(tables, 2), coef.KAPPA2_A, n) + _rest2(tables)


def kappa2(tables: Sequence[SymmetricMomentTable], n: int) -> float:
    """``Var(s^2)`` from the A(1,0), A(0,1), A(1,1) table plus its rest term."""
    return float(_kappa2(tables, n))


def kappa3_cumulant_route(
    tables: Sequence[SymmetricMomentTable], n: int, lower: MomentSet, a12_denominator: str = "(n-1)n^2"
) -> float:
    """Tabulated kappa_3 with rest ``-3 E[s^4] E[s^2] + 2 kappa_1^3``.

    Diagnostic only: the tabulated terms omit part of the expansion, so the
    value does not equal kappa_3 in general.  ``a12_denominator`` selects
    where the A(1,2) numerator is divided, ``"(n-1)n^2"`` or ``"(n-1)^2n"``.
    """
    _need(n, 3)
    if a12_denominator not in A12_DENOMINATORS:
        raise ValueError(f"a12_denominator must be one of {A12_DENOMINATORS}")
    remap = {(1, 2): (2, 1)} if a12_denominator == "(n-1)^2n" else None
    k1 = _kappa1(tables)
    rest = -3 * _q(lower.m2) * _q(lower.m1) + 2 * k1**3
    return float(_grouped(table_lookup(tables, 3), coef.KAPPA3_A, n, remap) + rest)


def kappa4_cumulant_route(tables: Sequence[SymmetricMomentTable], n: int) -> float:
    """Sum of the ten tabulated kappa_4 terms; the rest term is taken as 0."""
    _need(n, 4)
    return float(_grouped(table_lookup(tables, 4), coef.KAPPA4_A, n))


# ---------------------------------------------------------------------------
# Moment route
# ---------------------------------------------------------------------------


def _moment2(tables, n: int) -> Fraction:
    _need(n, 2)
    return _closed(table_lookup(tables, 2), coef.MOMENT2_CLOSED_FORM, n)


def moment2(tables: Sequence[SymmetricMomentTable], n: int) -> float:
    """``E[s^4]``."""
    return float(_moment2(tables, n))


_M3_FORMS = {
    "regrouped": coef.MOMENT3_REGROUPED,
    "printed": coef.MOMENT3_REGROUPED_AS_PRINTED,
}


def _moment3(tables, n: int, form: str = "regrouped") -> Fraction:
    _need(n, 3)
    t3 = table_lookup(tables, 3)
    if form == "closed":
        return _closed(t3, coef.MOMENT3_CLOSED_FORM, n)
    if form not in _M3_FORMS:
        raise ValueError(f"unknown form {form!r}")
    return _grouped(t3, _M3_FORMS[form], n)


def moment3_from_tables(tables: Sequence[SymmetricMomentTable], n: int, form: str = "regrouped") -> float:
    """``E[s^6]``.

    ``form`` is ``"regrouped"`` (nine-block table, repaired), ``"closed"``
    (one rational weight per pattern) or ``"printed"`` (the regrouped table
    with its original, inconsistent coefficients; for comparison only).
    """
    return float(_moment3(tables, n, form))


def _moment4(tables, n: int) -> Fraction:
    _need(n, 4)
    return _closed(table_lookup(tables, 4), coef.MOMENT4_CLOSED_FORM, n)


def moment4_from_tables(tables: Sequence[SymmetricMomentTable], n: int) -> float:
    """``E[s^8]`` from the 22-term expansion."""
    return float(_moment4(tables, n))


def moment3(model: ProcessModel, n: int, form: str = "regrouped", method: str = "auto") -> float:
    """``E[s^6]`` for a process; needs ``n >= 6``."""
    _need(n, 3)
    return moment3_from_tables(build_tables(model, n, 3, method=method), n, form)


def moment4(model: ProcessModel, n: int, method: str = "auto") -> float:
    """``E[s^8]`` for a process; needs ``n >= 8``."""
    _need(n, 4)
    return moment4_from_tables(build_tables(model, n, 4, method=method), n)


def _cumulants(m: Sequence[Fraction]) -> list[Fraction]:
    m1 = m[0]
    out = [m1]
    if len(m) > 1:
        out.append(m[1] - m1**2)
    if len(m) > 2:
        out.append(m[2] - 3 * m[1] * m1 + 2 * m1**3)
    if len(m) > 3:
        out.append(m[3] - 4 * m1 * m[2] - 3 * m[1] ** 2 + 12 * m1**2 * m[1] - 6 * m1**4)
    return out


def cumulants_from_moments(moments: Sequence[float]) -> tuple[float, ...]:
    """kappa_1..kappa_r from raw moments mu'_1..mu'_r (r <= 4)."""
    if not 1 <= len(moments) <= 4:
        raise ValueError("between one and four moments required")
    return tuple(float(k) for k in _cumulants([_q(float(x)) for x in moments]))


def cumulants_moment_route(
    model: ProcessModel | None,
    n: int,
    max_order: int | None = None,
    tables: Sequence[SymmetricMomentTable] | None = None,
    method: str = "auto",
    workers: int | None = None,
) -> CumulantSet:
    """Cumulants of ``s^2`` via the moments of ``s^2``.

    Parameters
    ----------
    model : ProcessModel or None
        Ignored when ``tables`` are supplied.
    n : int
        Sample length.
    max_order : int, optional
        Highest cumulant wanted; defaults to the largest ``n`` allows (<= 4).
    tables : list of SymmetricMomentTable, optional
        Precomputed symmetric moments (groups ``1..max_order``).

    Returns
    -------
    CumulantSet
        ``engine == "moment-route"``; residuals against the cumulant route
        for every order computed from 2 up.
    """
    if max_order is None:
        max_order = max(o for o, m in MIN_N.items() if n >= m) if n >= 2 else 1
    if max_order not in MIN_N:
        raise ValueError("max_order must be 1..4")
    _need(n, max_order)
    if tables is None:
        if model is None:
            raise ValueError("either a model or tables are required")
        if is_degenerate(model):
            # s^2 is identically zero; computing it would only add cancellation noise
            keys = {2: ("rest2", "r2"), 3: ("r3", "r3_alt"), 4: ("r4",)}
            res = {k: 0.0 for order in range(2, max_order + 1) for k in keys[order]}
            zeros = [0.0] * max_order + [None] * (4 - max_order)
            return CumulantSet(n, *zeros, engine="moment-route", residuals=res)
        tables = build_tables(model, n, max_order, method=method, workers=workers)

    moments = [_kappa1(tables)]
    if max_order >= 2:
        moments.append(_moment2(tables, n))
    if max_order >= 3:
        moments.append(_moment3(tables, n))
    if max_order >= 4:
        moments.append(_moment4(tables, n))
    kap = _cumulants(moments)

    residuals: dict[str, float] = {}
    if max_order >= 2:
        residuals["rest2"] = float(_rest2(tables))
        residuals["r2"] = float(_kappa2(tables, n) - kap[1])
    if max_order >= 3:
        lower = MomentSet(n, float(moments[0]), float(moments[1]))
        for key, den in zip(("r3", "r3_alt"), A12_DENOMINATORS):
            residuals[key] = kappa3_cumulant_route(tables, n, lower, den) - float(kap[2])
    if max_order >= 4:
        residuals["r4"] = kappa4_cumulant_route(tables, n) - float(kap[3])

    vals = [float(k) for k in kap] + [None] * (4 - len(kap))
    return CumulantSet(n, *vals, engine="moment-route", residuals=residuals)


def moment_set(tables: Sequence[SymmetricMomentTable], n: int) -> MomentSet:
    """All raw moments of ``s^2`` the tables support."""
    groups = {t.group for t in tables}
    m = [float(_kappa1(tables)), float(_moment2(tables, n))]
    m3 = float(_moment3(tables, n)) if 3 in groups else None
    m4 = float(_moment4(tables, n)) if 4 in groups else None
    return MomentSet(n, m[0], m[1], m3, m4)


# ---------------------------------------------------------------------------
# Chi-squared exactness
# ---------------------------------------------------------------------------


def _centering(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def chisq_deviation(covariance) -> float:
    """``max |B Sigma B - B|`` with ``B = I - 11'/n``."""
    cov = np.asarray(covariance, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"covariance must be square, got shape {cov.shape}")
    B = _centering(cov.shape[0])
    return float(np.max(np.abs(B @ cov @ B - B)))


def chisq_exactness_check(covariance, tol: float = 1e-10) -> bool:
    """Whether ``(n-1) s^2`` of ``N(0, Sigma)`` data is exactly chi-squared.

    That happens iff ``B Sigma B = B``.  The comparison is entrywise with
    absolute tolerance ``tol``.

    >>> chisq_exactness_check(np.eye(4))
    True
    >>> chisq_exactness_check(np.diag([1.0, 2.0]))
    False
    """
    return chisq_deviation(covariance) <= tol
