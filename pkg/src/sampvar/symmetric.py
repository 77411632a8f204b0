"""Symmetric joint moments over distinct observation labels.

For an exponent multiset ``e = (e_1, ..., e_k)`` the symmetric moment is

    m(e) = sum over injective (i_1..i_k) of E[X_{i_1}^{e_1} ... X_{i_k}^{e_k}] / (n)_k

with ``(n)_k = n (n-1) ... (n-k+1)`` the number of injective tuples.  For
i.i.d. data it collapses to ``prod mu_{e_j}``.  The moment expansions of
``s^2`` are linear in these quantities, and the tables of group ``g`` hold
every pattern of total order ``2g`` (the integer partitions of ``2g``).

Four evaluation paths are provided and are interchangeable up to rounding:

``enumerate``
    Brute force over index combinations times distinct exponent
    arrangements, calling :func:`~sampvar.process.joint_moment`.  Works for
    any model; it is the reference the fast paths are tested against.
``iid``
    Product of raw moments.
``finite``
    Dynamic programming over coordinates, vectorized over the atoms of a
    :class:`~sampvar.process.FiniteJoint`.
``stationary``
    For :class:`~sampvar.process.GaussianStationary`: enumerate only the
    combinations that start at the first label and weight each by its
    number of translates, evaluating Isserlis sums vectorized over the
    combinations.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .process import MAX_ORDER, FiniteJoint, GaussianStationary, IIDProcess, ProcessModel, joint_moment
from .summation import ExactSum

__all__ = [
    "ExponentPattern",
    "SymmetricMomentTable",
    "InsufficientSampleSizeError",
    "group_patterns",
    "symmetric_moment",
    "enumerate_symmetric_moment",
    "build_tables",
    "table_lookup",
]

#: Naive enumeration refuses larger samples for wide patterns.
NAIVE_N_CAP = 64
NAIVE_ARITY_CAP = 6
#: Index combinations evaluated per vectorized block.
_CHUNK = 1 << 15
#: Largest number of anchored combinations the stationary path will visit.
STATIONARY_COMBINATION_CAP = 2 * 10**7


class InsufficientSampleSizeError(ValueError):
    """The sample is too short for the requested pattern (``n < arity``)."""


@dataclass(frozen=True, order=True)
class ExponentPattern:
    """Multiset of positive exponents, stored sorted in descending order.

    >>> ExponentPattern.parse("1.3.1.2")
    ExponentPattern(exponents=(3, 2, 1, 1))
    >>> str(ExponentPattern((2, 1, 1)))
    '2.1.1'
    """

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(sorted((int(e) for e in self.exponents), reverse=True))
        if not exps or exps[-1] < 1:
            raise ValueError("exponents must be positive integers")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def parse(cls, label: str) -> "ExponentPattern":
        return cls(tuple(int(t) for t in label.split(".")))

    @classmethod
    def of(cls, *exponents: int) -> "ExponentPattern":
        return cls(exponents)

    @property
    def order(self) -> int:
        return sum(self.exponents)

    @property
    def arity(self) -> int:
        return len(self.exponents)

    @property
    def multiplicities(self) -> Counter:
        return Counter(self.exponents)

    @property
    def symmetry(self) -> int:
        """Arrangements of the exponents that leave the tuple unchanged."""
        return math.prod(math.factorial(m) for m in self.multiplicities.values())

    def arrangements(self) -> list[tuple[int, ...]]:
        """Distinct orderings of the exponents, lexicographically sorted."""
        return sorted(set(itertools.permutations(self.exponents)))

    def __str__(self) -> str:
        return ".".join(map(str, self.exponents))


def _integer_partitions(total: int, largest: int | None = None) -> Iterable[tuple[int, ...]]:
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _integer_partitions(total - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def group_patterns(group: int) -> tuple[ExponentPattern, ...]:
    """All patterns of total order ``2 * group``: 2, 5, 11, 22 for groups 1-4."""
    if group not in (1, 2, 3, 4):
        raise ValueError("group must be 1, 2, 3 or 4")
    return tuple(ExponentPattern(p) for p in _integer_partitions(2 * group))


def _as_pattern(pattern) -> ExponentPattern:
    if isinstance(pattern, ExponentPattern):
        return pattern
    if isinstance(pattern, str):
        return ExponentPattern.parse(pattern)
    return ExponentPattern(tuple(pattern))


def _check_sample(pattern: ExponentPattern, n: int) -> None:
    if pattern.order > MAX_ORDER:
        raise ValueError(f"pattern order {pattern.order} exceeds {MAX_ORDER}")
    if n < pattern.arity:
        raise InsufficientSampleSizeError(
            f"insufficient sample size: pattern {pattern} needs n >= {pattern.arity}, got n = {n}"
        )


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def _enumerate_chunk(model: ProcessModel, pattern: ExponentPattern, n: int, start: int, stop: int) -> tuple[float, ...]:
    acc = ExactSum()
    arrangements = pattern.arrangements()
    combos = itertools.islice(itertools.combinations(range(1, n + 1), pattern.arity), start, stop)
    for combo in combos:
        for arr in arrangements:
            acc.add(joint_moment(model, zip(combo, arr), n))
    return acc.partials


def enumerate_symmetric_moment(model: ProcessModel, pattern, n: int, workers: int | None = None) -> float:
    """Reference evaluation by explicit enumeration of index tuples.

    Every unordered set of labels is visited once, with each distinct
    arrangement of the exponents on it; the symmetry factor of the pattern
    restores the count of ordered tuples.  Partial sums are exact, so the
    result does not depend on ``workers``.
    """
    pattern = _as_pattern(pattern)
    _check_sample(pattern, n)
    if n > NAIVE_N_CAP and pattern.arity >= NAIVE_ARITY_CAP:
        raise ValueError(
            f"naive enumeration refused for n = {n} > {NAIVE_N_CAP} with arity {pattern.arity}; use a fast path"
        )
    total = math.comb(n, pattern.arity)
    bounds = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    acc = ExactSum()
    if workers and workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_enumerate_chunk, model, pattern, n, s, e) for s, e in bounds]
            for fut in futures:
                acc.add_many(fut.result())
    else:
        for s, e in bounds:
            acc.add_many(_enumerate_chunk(model, pattern, n, s, e))
    return acc.value() * pattern.symmetry / math.perm(n, pattern.arity)


# ---------------------------------------------------------------------------
# Fast paths
# ---------------------------------------------------------------------------


def _iid_value(model: IIDProcess, pattern: ExponentPattern) -> float:
    return math.prod(model.raw_moment(e) for e in pattern.exponents)


_ATOM_BLOCK = 1 << 16


def _finite_value(model: FiniteJoint, pattern: ExponentPattern, n: int) -> float:
    if n != model.n:
        raise ValueError(f"finite joint law has n = {model.n}, asked for n = {n}")
    types = sorted(pattern.multiplicities.items(), reverse=True)
    exps = [e for e, _ in types]
    full = tuple(m for _, m in types)
    # states are remaining counts per exponent type, visited in a fixed order
    states = list(itertools.product(*(range(m + 1) for m in full)))
    acc = ExactSum()
    atoms, probs = model.atoms, model.probs
    for lo in range(0, atoms.shape[0], _ATOM_BLOCK):
        block = atoms[lo : lo + _ATOM_BLOCK]
        dp = {s: None for s in states}
        dp[full] = np.ones(block.shape[0])
        for i in range(n):
            powers = {e: block[:, i] ** e for e in exps}
            new = {s: (None if v is None else v.copy()) for s, v in dp.items()}
            for s, v in dp.items():
                if v is None:
                    continue
                for t, e in enumerate(exps):
                    if s[t] == 0:
                        continue
                    target = s[:t] + (s[t] - 1,) + s[t + 1 :]
                    contrib = v * powers[e]
                    new[target] = contrib if new[target] is None else new[target] + contrib
            dp = new
        done = dp[tuple(0 for _ in full)]
        if done is not None:
            acc.add(math.fsum((probs[lo : lo + _ATOM_BLOCK] * done).tolist()))
    return acc.value() * pattern.symmetry / math.perm(n, pattern.arity)


def _pairings(items: tuple[int, ...]) -> Iterable[tuple[tuple[int, int], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k, other in enumerate(rest):
        for tail in _pairings(rest[:k] + rest[k + 1 :]):
            yield ((first, other),) + tail


@lru_cache(maxsize=None)
def _pairing_graphs(arrangement: tuple[int, ...]) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    """Isserlis pairings of the expanded factor list, grouped by edge multiset.

    ``arrangement[p]`` is the exponent at position ``p``.  Returns
    ``(multiplicity, edges)`` pairs with edges between positions.
    """
    items = tuple(p for p, a in enumerate(arrangement) for _ in range(a))
    if len(items) % 2:
        return ()
    graphs: Counter = Counter()
    for pairing in _pairings(items):
        graphs[tuple(sorted(pairing))] += 1
    return tuple((mult, edges) for edges, mult in sorted(graphs.items()))


def _stationary_value(model: GaussianStationary, pattern: ExponentPattern, n: int) -> float:
    if pattern.order % 2:
        return 0.0
    k = pattern.arity
    n_combos = math.comb(n - 1, k - 1)
    if n_combos > STATIONARY_COMBINATION_CAP:
        raise ValueError(f"{n_combos} anchored combinations exceeds cap {STATIONARY_COMBINATION_CAP}")
    gam = np.array([model.gamma(h) for h in range(n)])
    arrangements = [(arr, _pairing_graphs(arr)) for arr in pattern.arrangements()]
    acc = ExactSum()
    combos = itertools.combinations(range(1, n), k - 1)
    while True:
        block = list(itertools.islice(combos, _CHUNK))
        if not block:
            break
        pos = np.zeros((len(block), k), dtype=np.intp)
        if k > 1:
            pos[:, 1:] = np.array(block, dtype=np.intp).reshape(len(block), k - 1)
        translates = (n - pos[:, -1]).astype(float)
        lag = {}
        for a in range(k):
            for b in range(a, k):
                lag[a, b] = gam[np.abs(pos[:, b] - pos[:, a])]
        value = np.zeros(len(block))
        for _, graphs in arrangements:
            for mult, edges in graphs:
                term = np.full(len(block), float(mult))
                for a, b in edges:
                    term = term * lag[a, b]
                value += term
        acc.add(math.fsum((translates * value).tolist()))
    return acc.value() * pattern.symmetry / math.perm(n, k)


def symmetric_moment(model: ProcessModel, pattern, n: int, method: str = "auto", workers: int | None = None) -> float:
    """Symmetric moment of ``pattern`` for a sample of length ``n``.

    Parameters
    ----------
    model : ProcessModel
    pattern : ExponentPattern, str like ``"3.2.1.1"``, or tuple of ints
    n : int
    method : {"auto", "enumerate", "iid", "finite", "stationary"}
        ``"auto"`` picks the fast path matching the model type.
    workers : int, optional
        Process count for ``"enumerate"``; the value is independent of it.

    Raises
    ------
    InsufficientSampleSizeError
        If ``n`` is smaller than the number of distinct labels the pattern
        needs.
    """
    pattern = _as_pattern(pattern)
    _check_sample(pattern, n)
    if method == "auto":
        method = {IIDProcess: "iid", FiniteJoint: "finite", GaussianStationary: "stationary"}.get(type(model))
        if method is None:
            raise TypeError(f"unsupported process model {type(model).__name__}")
    if method == "enumerate":
        return enumerate_symmetric_moment(model, pattern, n, workers=workers)
    if method == "iid" and isinstance(model, IIDProcess):
        return _iid_value(model, pattern)
    if method == "finite" and isinstance(model, FiniteJoint):
        return _finite_value(model, pattern, n)
    if method == "stationary" and isinstance(model, GaussianStationary):
        return _stationary_value(model, pattern, n)
    raise ValueError(f"method {method!r} does not apply to {type(model).__name__}")


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass
class SymmetricMomentTable:
    """All symmetric moments of one group for a fixed ``n``."""

    n: int
    group: int
    entries: dict[ExponentPattern, float] = field(default_factory=dict)

    def __post_init__(self):
        expected = set(group_patterns(self.group))
        if set(self.entries) != expected:
            raise ValueError(f"group {self.group} table needs exactly {len(expected)} patterns")
        bad = [str(p) for p, v in self.entries.items() if not math.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite entries: {bad}")

    def __getitem__(self, pattern) -> float:
        return self.entries[_as_pattern(pattern)]

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "group": self.group,
            "entries": {str(p): self.entries[p] for p in group_patterns(self.group)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SymmetricMomentTable":
        entries = {ExponentPattern.parse(k): float(v) for k, v in data["entries"].items()}
        return cls(int(data["n"]), int(data["group"]), entries)


def build_tables(
    model: ProcessModel, n: int, max_group: int = 4, method: str = "auto", workers: int | None = None
) -> list[SymmetricMomentTable]:
    """Tables for groups ``1..max_group``; needs ``n >= 2 * max_group``."""
    if max_group not in (1, 2, 3, 4):
        raise ValueError("max_group must be 1..4")
    if n < 2 * max_group:
        raise InsufficientSampleSizeError(
            f"insufficient sample size: group {max_group} tables need n >= {2 * max_group}, got n = {n}"
        )
    tables = []
    for g in range(1, max_group + 1):
        entries = {p: symmetric_moment(model, p, n, method=method, workers=workers) for p in group_patterns(g)}
        tables.append(SymmetricMomentTable(n, g, entries))
    return tables


def table_lookup(tables: Sequence[SymmetricMomentTable], group: int) -> SymmetricMomentTable:
    for t in tables:
        if t.group == group:
            return t
    raise KeyError(f"no group {group} table supplied")
