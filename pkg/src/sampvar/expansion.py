"""Gram-Charlier A and Edgeworth approximations built from cumulants.

With ``mu = kappa_1``, ``sigma^2 = kappa_2`` and ``z = (x - mu) / sigma``,
both series are

    f(x) = phi_{mu,sigma}(x) * sum_j c_j He_j(z),
    c_j  = B_j(0, 0, kappa_3, ..., kappa_j) / (j! sigma^j),

where ``He_j`` are the probabilists' Hermite polynomials and ``B_j`` the
complete Bell polynomials.  They differ only in which terms are kept:

* Gram-Charlier of degree ``J`` keeps every ``j <= J`` (``J`` in 0, 3, 4, 6).
* Edgeworth of order 1 keeps the ``kappa_3`` term; order 2 adds ``kappa_4``
  and the ``kappa_3^2`` part of ``B_6``.  The grouping follows powers of
  ``n^{-1/2}`` of the standardized statistic, where ``lambda_3 =
  kappa_3 / kappa_2^{3/2}`` is of order ``n^{-1/2}`` and ``lambda_4``,
  ``lambda_3^2`` are of order ``n^{-1}``.

Cumulants above the fourth are zero here, so ``B_5 = 0`` and
``B_6 = 10 kappa_3^2``.  Truncated series can dip below zero;
:func:`negativity` reports where, and nothing is clamped.

The CDF uses ``int_{-inf}^z He_j(t) phi(t) dt = -He_{j-1}(z) phi(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .cumulants import CumulantSet

__all__ = [
    "GC_ORDERS",
    "EDGEWORTH_ORDERS",
    "ExpansionSpec",
    "SeriesCoefficients",
    "NegativityReport",
    "hermite_he",
    "bell_polynomial",
    "bell_coefficient",
    "series_coefficients",
    "density",
    "cdf",
    "gc_density",
    "gc_cdf",
    "edgeworth_density",
    "edgeworth_cdf",
    "normal_density",
    "negativity",
    "affine_cumulants",
    "density_grid",
    "GRID_COLUMNS",
]

GC_ORDERS = (0, 3, 4, 6)
EDGEWORTH_ORDERS = (1, 2)
_MAX_HERMITE = 12


def hermite_he(j: int, x):
    """Probabilists' Hermite polynomial ``He_j(x)``.

    Evaluated by the recurrence ``He_{k+1} = x He_k - k He_{k-1}``;
    ``x`` may be a scalar or an array.

    >>> hermite_he(3, 2.0), hermite_he(4, 1.0)
    (2.0, -2.0)
    """
    if not 0 <= j <= _MAX_HERMITE:
        raise ValueError(f"degree must be in 0..{_MAX_HERMITE}")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x
    if j == 0:
        out = prev
    else:
        for k in range(1, j):
            prev, cur = cur, x * cur - k * prev
        out = cur
    return float(out) if out.ndim == 0 else out


def bell_polynomial(j: int, x: Sequence[float]) -> float:
    """Complete Bell polynomial ``B_j(x_1, ..., x_j)``; missing ``x_k`` are 0.

    ``B_0 = 1``, ``B_{m+1} = sum_k C(m, k) x_{k+1} B_{m-k}``.
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    xs = list(x) + [0.0] * max(0, j - len(x))
    B = [1.0]
    for m in range(j):
        B.append(math.fsum(math.comb(m, k) * xs[k] * B[m - k] for k in range(m + 1)))
    return B[j]


def bell_coefficient(j: int, kappas: Sequence[float] = ()) -> float:
    """``B_j(0, 0, kappa_3, ..., kappa_j)``.

    ``kappas`` starts at ``kappa_3``; absent higher cumulants count as 0.

    >>> bell_coefficient(6, [2.0, 0.0])
    40.0
    """
    if not 0 <= j <= 6:
        raise ValueError("j must be in 0..6")
    return bell_polynomial(j, [0.0, 0.0, *kappas])


@dataclass(frozen=True)
class ExpansionSpec:
    """Which series, how far, and around which cumulants."""

    kind: str
    order: int
    cumulants: CumulantSet

    def __post_init__(self):
        if self.kind not in ("gram-charlier", "edgeworth"):
            raise ValueError(f"unknown expansion kind {self.kind!r}")
        allowed = GC_ORDERS if self.kind == "gram-charlier" else EDGEWORTH_ORDERS
        if self.order not in allowed:
            raise ValueError(f"{self.kind} order must be one of {allowed}, got {self.order}")
        k2 = self.cumulants.k2
        if k2 is None or not k2 > 0:
            raise ValueError("expansion needs kappa_2 > 0")
        need = {0: 2, 3: 3, 4: 4, 6: 3} if self.kind == "gram-charlier" else {1: 3, 2: 4}
        if self.cumulants.order < need[self.order]:
            raise ValueError(f"{self.kind} order {self.order} needs kappa_1..kappa_{need[self.order]}")

    @property
    def mu(self) -> float:
        return self.cumulants.k1

    @property
    def sigma(self) -> float:
        return math.sqrt(self.cumulants.k2)


@dataclass(frozen=True)
class SeriesCoefficients:
    """``c_j`` by Hermite degree; degrees absent from ``terms`` are zero."""

    terms: Mapping[int, float] = field(default_factory=dict)

    def __getitem__(self, j: int) -> float:
        return self.terms.get(j, 0.0)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.terms))


def _kappa_tail(cs: CumulantSet) -> list[float]:
    return [cs.k3 or 0.0, cs.k4 or 0.0]


def series_coefficients(spec: ExpansionSpec) -> SeriesCoefficients:
    sigma = spec.sigma
    kap = _kappa_tail(spec.cumulants)
    if spec.kind == "gram-charlier":
        degrees = [0, 1, 2] + [j for j in (3, 4, 5, 6) if j <= spec.order]
        terms = {j: bell_coefficient(j, kap) / (math.factorial(j) * sigma**j) for j in degrees}
    else:
        k3, k4 = kap
        terms = {0: 1.0, 3: k3 / (6 * sigma**3)}
        if spec.order == 2:
            terms[4] = k4 / (24 * sigma**4)
            terms[6] = k3 * k3 / (72 * sigma**6)
    return SeriesCoefficients(terms)


def _standardize(spec: ExpansionSpec, x):
    return (np.asarray(x, dtype=float) - spec.mu) / spec.sigma


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def density(spec: ExpansionSpec, x):
    """Truncated series density at ``x`` (scalar or array)."""
    z = _standardize(spec, x)
    coefs = series_coefficients(spec)
    poly = sum(c * hermite_he(j, z) for j, c in sorted(coefs.terms.items()) if c != 0.0)
    phi = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    return _out(phi / spec.sigma * poly)


def cdf(spec: ExpansionSpec, x):
    """Antiderivative of :func:`density` from ``-inf``."""
    z = _standardize(spec, x)
    coefs = series_coefficients(spec)
    tail = sum(c * hermite_he(j - 1, z) for j, c in sorted(coefs.terms.items()) if j >= 1 and c != 0.0)
    phi = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    return _out(special.ndtr(z) - phi * tail)


def _spec(kind: str, spec_or_cumulants, order: int | None) -> ExpansionSpec:
    if isinstance(spec_or_cumulants, ExpansionSpec):
        if spec_or_cumulants.kind != kind:
            raise ValueError(f"expected a {kind} spec")
        return spec_or_cumulants
    default = 4 if kind == "gram-charlier" else 2
    return ExpansionSpec(kind, default if order is None else order, spec_or_cumulants)


def gc_density(spec, x, order: int | None = None):
    """Gram-Charlier density; ``spec`` may be a spec or a :class:`CumulantSet`."""
    return density(_spec("gram-charlier", spec, order), x)


def gc_cdf(spec, x, order: int | None = None):
    return cdf(_spec("gram-charlier", spec, order), x)


def edgeworth_density(spec, x, order: int | None = None):
    return density(_spec("edgeworth", spec, order), x)


def edgeworth_cdf(spec, x, order: int | None = None):
    return cdf(_spec("edgeworth", spec, order), x)


def normal_density(cumulants: CumulantSet, x):
    return gc_density(cumulants, x, order=0)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NegativityReport:
    """Where a truncated density is negative within ``mu +- 12 sigma``."""

    intervals: tuple[tuple[float, float], ...]
    negative_mass: float

    @property
    def is_nonnegative(self) -> bool:
        return not self.intervals

    def contains(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)


def negativity(spec: ExpansionSpec, points: int = 4001, atol: float = 1e-10) -> NegativityReport:
    """Locate the negative regions of the series density and their mass.

    Sign changes are bracketed on a uniform grid over ``mu +- 12 sigma``
    and refined with Brent's method; the mass is integrated adaptively.
    Regions narrower than the grid spacing can be missed.
    """
    lo, hi = spec.mu - 12 * spec.sigma, spec.mu + 12 * spec.sigma
    xs = np.linspace(lo, hi, points)
    f = lambda t: density(spec, t)  # noqa: E731
    vals = np.asarray(f(xs))
    neg = vals < 0
    intervals = []
    i = 0
    while i < points:
        if not neg[i]:
            i += 1
            continue
        j = i
        while j + 1 < points and neg[j + 1]:
            j += 1
        a = lo if i == 0 else optimize.brentq(f, xs[i - 1], xs[i], xtol=1e-14)
        b = hi if j == points - 1 else optimize.brentq(f, xs[j], xs[j + 1], xtol=1e-14)
        intervals.append((float(a), float(b)))
        i = j + 1
    mass = math.fsum(integrate.quad(f, a, b, epsabs=atol, limit=200)[0] for a, b in intervals)
    return NegativityReport(tuple(intervals), mass)


def affine_cumulants(cumulants: CumulantSet, a: float, b: float) -> CumulantSet:
    """Cumulants of ``a Y + b`` given those of ``Y``."""
    if a == 0:
        raise ValueError("a must be non-zero")
    ks = [cumulants.k1 * a + b] + [None if k is None else k * a**r for r, k in enumerate(cumulants.kappas[1:], 2)]
    return CumulantSet(cumulants.n, *ks, engine=cumulants.engine)


GRID_COLUMNS = ("normal", "gc3", "gc4", "gc6", "edgeworth1", "edgeworth2")
_COLUMN_SPEC = {
    "normal": ("gram-charlier", 0),
    "gc3": ("gram-charlier", 3),
    "gc4": ("gram-charlier", 4),
    "gc6": ("gram-charlier", 6),
    "edgeworth1": ("edgeworth", 1),
    "edgeworth2": ("edgeworth", 2),
}


def density_grid(cumulants: CumulantSet, xs, columns: Sequence[str] = GRID_COLUMNS, kind: str = "density") -> dict[str, np.ndarray]:
    """Evaluate several approximations on one grid.

    Returns an ordered mapping ``{"x": xs, column: values, ...}``; columns
    whose cumulants are unavailable are skipped.
    """
    fn = density if kind == "density" else cdf
    if kind not in ("density", "cdf"):
        raise ValueError("kind must be 'density' or 'cdf'")
    xs = np.asarray(xs, dtype=float)
    out = {"x": xs}
    for col in columns:
        if col not in _COLUMN_SPEC:
            raise ValueError(f"unknown column {col!r}")
        k, o = _COLUMN_SPEC[col]
        try:
            spec = ExpansionSpec(k, o, cumulants)
        except ValueError:
            continue
        out[col] = np.asarray(fn(spec, xs), dtype=float)
    return out
