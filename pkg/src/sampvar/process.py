"""Process descriptions and their joint raw-moment oracle.

Every downstream computation only ever asks one question of a process:
``E[X_{i1}^{a1} ... X_{ik}^{ak}]`` for distinct observation labels
``i1..ik`` in ``1..n``.  Three kinds of process answer it:

* :class:`IIDProcess` -- independent copies of one law given by its raw
  moments, so the answer factors into a product of raw moments.
* :class:`GaussianStationary` -- a zero-mean stationary Gaussian sequence
  given by its autocovariance; answered with Isserlis' pairing sum.
* :class:`FiniteJoint` -- an explicit joint law on finitely many paths,
  answered by a weighted sum over the atoms.  Markov chains are expanded
  into this form by :func:`markov_to_finite_joint`.

Observation labels are 1-based, matching ``X_1, ..., X_n``.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .summation import exact_dot

__all__ = [
    "MAX_ORDER",
    "MAX_FINITE_ATOMS",
    "IIDProcess",
    "GaussianStationary",
    "AR1Autocovariance",
    "FiniteJoint",
    "ProcessModel",
    "SupportExplosionError",
    "joint_moment",
    "markov_to_finite_joint",
    "iid_to_finite_joint",
    "stationary_distribution",
    "normal_raw_moments",
    "discrete_raw_moments",
    "shift_process",
    "scale_process",
    "is_degenerate",
    "covariance_matrix",
]

#: Highest total exponent any joint moment query may carry (E[s^8]).
MAX_ORDER = 8
#: Largest finite support we are willing to materialize.
MAX_FINITE_ATOMS = 10**7

_PROB_TOL = 1e-12


class SupportExplosionError(ValueError):
    """Raised when a finite joint law would exceed :data:`MAX_FINITE_ATOMS`."""


# ---------------------------------------------------------------------------
# Raw moment helpers
# ---------------------------------------------------------------------------


def normal_raw_moments(sigma: float = 1.0, mean: float = 0.0, order: int = MAX_ORDER) -> tuple[float, ...]:
    """Raw moments ``E[X^k]``, ``k = 1..order`` of ``N(mean, sigma^2)``."""
    out = []
    for k in range(1, order + 1):
        # E[(m + sZ)^k] = sum_j C(k, j) m^(k-j) s^j E[Z^j], E[Z^j] = (j-1)!! for even j
        terms = []
        for j in range(0, k + 1, 2):
            terms.append(math.comb(k, j) * mean ** (k - j) * sigma**j * math.prod(range(j - 1, 0, -2)))
        out.append(math.fsum(terms))
    return tuple(out)


def discrete_raw_moments(values: Sequence[float], probs: Sequence[float], order: int = MAX_ORDER) -> tuple[float, ...]:
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    return tuple(exact_dot(p, v**k) for k in range(1, order + 1))


def _check_probabilities(probs: np.ndarray) -> None:
    if probs.ndim != 1:
        raise ValueError("probabilities must be a 1-d array")
    if np.any(probs < 0):
        raise ValueError("probabilities must be non-negative")
    total = math.fsum(probs.tolist())
    if abs(total - 1.0) > _PROB_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1 within {_PROB_TOL:g}")


# ---------------------------------------------------------------------------
# Process kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IIDProcess:
    """Independent, identically distributed observations.

    Parameters
    ----------
    raw_moments : sequence of float
        ``mu_1, mu_2, ...`` -- raw moments of a single observation.  At
        least eight are needed for fourth-order cumulants of ``s^2``.
    support : optional (values, probs)
        When the marginal law is discrete, its atoms.  Only used to build
        exact-enumeration oracles; the moment computations never read it.
    """

    raw_moments: tuple[float, ...]
    support: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        mom = tuple(float(m) for m in self.raw_moments)
        object.__setattr__(self, "raw_moments", mom)
        if len(mom) < 2:
            raise ValueError("need at least mu_1 and mu_2")
        if not all(math.isfinite(m) for m in mom):
            raise ValueError("raw moments must be finite")
        if mom[1] < mom[0] ** 2 - 1e-15 * max(1.0, mom[0] ** 2):
            raise ValueError("mu_2 < mu_1^2: not a valid moment sequence")
        if self.support is not None:
            vals, probs = self.support
            object.__setattr__(self, "support", (tuple(map(float, vals)), tuple(map(float, probs))))
            _check_probabilities(np.asarray(self.support[1]))

    @classmethod
    def normal(cls, sigma: float = 1.0, mean: float = 0.0) -> "IIDProcess":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls(normal_raw_moments(sigma, mean))

    @classmethod
    def discrete(cls, values: Sequence[float], probs: Sequence[float]) -> "IIDProcess":
        _check_probabilities(np.asarray(probs, dtype=float))
        return cls(discrete_raw_moments(values, probs), support=(tuple(values), tuple(probs)))

    @classmethod
    def rademacher(cls) -> "IIDProcess":
        return cls.discrete([-1.0, 1.0], [0.5, 0.5])

    @classmethod
    def constant(cls, c: float) -> "IIDProcess":
        return cls.discrete([c], [1.0])

    @property
    def max_order(self) -> int:
        return len(self.raw_moments)

    @property
    def is_normal(self) -> bool:
        """Whether the supplied moments are those of a non-degenerate normal law."""
        if self.support is not None or len(self.raw_moments) < 4:
            return False
        mean = self.raw_moments[0]
        var = self.raw_moments[1] - mean * mean
        if not var > 0:
            return False
        ref = normal_raw_moments(math.sqrt(var), mean)[: len(self.raw_moments)]
        size = abs(mean) + math.sqrt(var)
        return all(
            math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-10 * size ** (k + 1))
            for k, (a, b) in enumerate(zip(self.raw_moments, ref))
        )

    def raw_moment(self, k: int) -> float:
        if k == 0:
            return 1.0
        if k > len(self.raw_moments):
            raise ValueError(f"raw moment of order {k} not supplied (have {len(self.raw_moments)})")
        return self.raw_moments[k - 1]


@dataclass(frozen=True)
class AR1Autocovariance:
    """``gamma(h) = variance * phi^|h|`` -- picklable, unlike a lambda."""

    phi: float
    variance: float

    def __call__(self, h: int) -> float:
        return self.variance * self.phi ** abs(int(h))


@dataclass(frozen=True)
class _TabulatedAutocovariance:
    values: tuple[float, ...]

    def __call__(self, h: int) -> float:
        h = abs(int(h))
        return self.values[h] if h < len(self.values) else 0.0


@dataclass(frozen=True, eq=False)
class GaussianStationary:
    """Zero-mean stationary Gaussian sequence.

    ``autocovariance`` maps a lag ``h`` to ``gamma(h)``; a sequence is read
    as ``gamma(0), gamma(1), ...`` with zeros beyond its end.
    """

    autocovariance: Union[Callable[[int], float], Sequence[float]]
    mean: float = 0.0
    _memo: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.mean != 0.0:
            # s^2 is location invariant, so nothing is lost by insisting on it
            raise ValueError("GaussianStationary supports mean 0 only")
        if not callable(self.autocovariance):
            object.__setattr__(
                self, "autocovariance", _TabulatedAutocovariance(tuple(float(g) for g in self.autocovariance))
            )
        if not self.gamma0 > 0:
            raise ValueError("gamma(0) must be positive")

    def __getstate__(self):
        return {"autocovariance": self.autocovariance, "mean": self.mean}

    def __setstate__(self, state):
        object.__setattr__(self, "autocovariance", state["autocovariance"])
        object.__setattr__(self, "mean", state["mean"])
        object.__setattr__(self, "_memo", {})
        object.__setattr__(self, "_lock", threading.Lock())

    @classmethod
    def ar1(cls, phi: float, innovation_sd: float = 1.0) -> "GaussianStationary":
        """Stationary Gaussian AR(1), ``X_t = phi X_{t-1} + e_t``."""
        if not -1.0 < phi < 1.0:
            raise ValueError("AR(1) requires |phi| < 1")
        return cls(AR1Autocovariance(phi, innovation_sd**2 / (1.0 - phi**2)))

    @property
    def gamma0(self) -> float:
        return float(self.autocovariance(0))

    def gamma(self, h: int) -> float:
        g = float(self.autocovariance(h))
        if abs(g) > self.gamma0 * (1 + 1e-12):
            raise ValueError(f"|gamma({h})| = {abs(g)!r} exceeds gamma(0) = {self.gamma0!r}")
        return g

    def covariance_matrix(self, n: int) -> np.ndarray:
        lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        g = np.array([self.gamma(h) for h in range(n)])
        return g[lags]

    def isserlis(self, times: Sequence[int]) -> float:
        """``E[prod X_t]`` over a multiset of time indices."""
        times = tuple(sorted(times))
        if len(times) % 2:
            return 0.0
        if not times:
            return 1.0
        key = tuple(t - times[0] for t in times)
        memo = self._memo
        if key in memo:
            return memo[key]
        value = self._pair_sum(key)
        with self._lock:
            memo[key] = value
        return value

    def _pair_sum(self, times: tuple[int, ...]) -> float:
        first, rest = times[0], times[1:]
        total = 0.0
        seen = set()
        for pos, t in enumerate(rest):
            if t in seen:
                continue
            seen.add(t)
            count = rest.count(t)
            remaining = rest[:pos] + rest[pos + 1 :]
            total += count * self.gamma(t - first) * self.isserlis(remaining)
        return total


@dataclass(frozen=True, eq=False)
class FiniteJoint:
    """An explicit joint law of ``(X_1, ..., X_n)`` on finitely many paths.

    Parameters
    ----------
    atoms : array_like, shape (m, n)
        One row per path.
    probs : array_like, shape (m,)
        Path probabilities, non-negative and summing to one.
    """

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float, ndmin=2)
        probs = np.array(self.probs, dtype=float, ndmin=1)
        if atoms.ndim != 2:
            raise ValueError("atoms must be a 2-d array (paths x n)")
        if atoms.shape[0] != probs.shape[0]:
            raise ValueError("one probability per atom required")
        if atoms.shape[0] > MAX_FINITE_ATOMS:
            raise SupportExplosionError(f"{atoms.shape[0]} atoms exceeds cap {MAX_FINITE_ATOMS}")
        _check_probabilities(probs)
        atoms.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    @classmethod
    def constant(cls, c: float, n: int) -> "FiniteJoint":
        return cls(np.full((1, n), float(c)), np.ones(1))

    def expectation(self, values: np.ndarray) -> float:
        """``E[f]`` for per-atom values ``f``; order independent."""
        return exact_dot(self.probs, values)


ProcessModel = Union[IIDProcess, GaussianStationary, FiniteJoint]


# ---------------------------------------------------------------------------
# Joint moment oracle
# ---------------------------------------------------------------------------


def _normalize_indices(indices) -> list[tuple[int, int]]:
    pairs = [(int(i), int(a)) for i, a in indices]
    labels = [i for i, _ in pairs]
    if len(set(labels)) != len(labels):
        raise ValueError("observation labels must be distinct")
    if any(a <= 0 for _, a in pairs):
        raise ValueError("exponents must be positive integers")
    total = sum(a for _, a in pairs)
    if total > MAX_ORDER:
        raise ValueError(f"total exponent {total} exceeds supported order {MAX_ORDER}")
    return pairs


def joint_moment(model: ProcessModel, indices, n: int | None = None) -> float:
    """``E[prod_j X_{i_j}^{a_j}]`` for distinct 1-based labels ``i_j``.

    Parameters
    ----------
    model : ProcessModel
    indices : iterable of (label, exponent)
    n : int, optional
        Sample length used for the range check.  Defaults to ``model.n``
        for :class:`FiniteJoint`; unchecked above for the others when
        omitted.

    Examples
    --------
    >>> joint_moment(IIDProcess.normal(), [(1, 2)])
    1.0
    >>> joint_moment(GaussianStationary(AR1Autocovariance(0.5, 1.0)), [(1, 2), (2, 2)])
    1.5
    """
    pairs = _normalize_indices(indices)
    if isinstance(model, FiniteJoint):
        n = model.n if n is None else n
        if n != model.n:
            raise ValueError(f"model has n={model.n}, query used n={n}")
    for i, _ in pairs:
        if i < 1 or (n is not None and i > n):
            raise ValueError(f"observation label {i} outside 1..{n}")
    if not pairs:
        return 1.0

    if isinstance(model, IIDProcess):
        return math.prod(model.raw_moment(a) for _, a in sorted(pairs, key=lambda p: p[1]))
    if isinstance(model, GaussianStationary):
        times = [i for i, a in pairs for _ in range(a)]
        return model.isserlis(times)
    if isinstance(model, FiniteJoint):
        vals = np.ones(model.atoms.shape[0])
        for i, a in sorted(pairs):
            vals = vals * model.atoms[:, i - 1] ** a
        return model.expectation(vals)
    raise TypeError(f"unsupported process model {type(model).__name__}")


# ---------------------------------------------------------------------------
# Finite joint laws
# ---------------------------------------------------------------------------


def stationary_distribution(transition) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix."""
    T = np.asarray(transition, dtype=float)
    k = T.shape[0]
    # solve pi (T - I) = 0 with sum(pi) = 1
    A = np.vstack([(T - np.eye(k)).T, np.ones(k)])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _check_support(k: int, n: int) -> None:
    if k**n > MAX_FINITE_ATOMS:
        raise SupportExplosionError(f"{k}^{n} paths exceeds cap {MAX_FINITE_ATOMS}")


def markov_to_finite_joint(states, transition, initial, n: int) -> FiniteJoint:
    """Expand a finite-state Markov chain of length ``n`` into its path law.

    Parameters
    ----------
    states : sequence of float
        Value emitted in each state.
    transition : (k, k) array_like
        Row-stochastic transition matrix.
    initial : (k,) array_like or ``"stationary"``
        Law of the first observation.
    n : int
        Number of observations.

    Notes
    -----
    Paths are enumerated in lexicographic order of state indices; paths of
    probability zero are dropped.
    """
    states = np.asarray(states, dtype=float)
    T = np.asarray(transition, dtype=float)
    k = states.shape[0]
    if T.shape != (k, k):
        raise ValueError("transition must be k x k for k states")
    if np.any(T < 0) or np.any(np.abs(T.sum(axis=1) - 1.0) > _PROB_TOL):
        raise ValueError("transition rows must be non-negative and sum to 1 within 1e-12")
    if isinstance(initial, str):
        if initial != "stationary":
            raise ValueError(f"unknown initial law {initial!r}")
        init = stationary_distribution(T)
    else:
        init = np.asarray(initial, dtype=float)
        _check_probabilities(init)
    if n < 1:
        raise ValueError("n must be positive")
    _check_support(k, n)

    paths = np.arange(k).reshape(k, 1)
    probs = init.copy()
    for _ in range(n):
        keep = probs > 0
        paths, probs = paths[keep], probs[keep]
        if paths.shape[1] == n:
            break
        last = paths[:, -1]
        probs = (probs[:, None] * T[last]).reshape(-1)
        paths = np.hstack([np.repeat(paths, k, axis=0), np.tile(np.arange(k), paths.shape[0])[:, None]])
    return FiniteJoint(states[paths], probs)


def iid_to_finite_joint(model: IIDProcess, n: int) -> FiniteJoint:
    """Product law of ``n`` independent copies of a discrete marginal."""
    if model.support is None:
        raise ValueError("IID model has no discrete support to enumerate")
    values, probs = (np.asarray(a, dtype=float) for a in model.support)
    k = values.shape[0]
    _check_support(k, n)
    idx = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.intp).reshape(-1, n)
    return FiniteJoint(values[idx], np.prod(probs[idx], axis=1))


def is_degenerate(model: ProcessModel) -> bool:
    """True when every realisable sample path is constant, so ``s^2 = 0`` surely.

    Decided from the discrete structure only (atoms of an IID support, rows
    of a finite joint law); moment sequences alone are never trusted here
    because ``mu_2 == mu_1**2`` is not reliable in floating point.
    """
    if isinstance(model, IIDProcess) and model.support is not None:
        vals, probs = model.support
        return len({v for v, p in zip(vals, probs) if p > 0}) == 1
    if isinstance(model, FiniteJoint):
        rows = model.atoms[model.probs > 0]
        return bool(np.all(rows == rows[:, :1]))
    return False


# ---------------------------------------------------------------------------
# Affine transforms (used by the invariance checks)
# ---------------------------------------------------------------------------


def shift_process(model: ProcessModel, c: float) -> ProcessModel:
    """Law of ``X_i + c``."""
    if isinstance(model, FiniteJoint):
        return FiniteJoint(model.atoms + c, model.probs)
    if isinstance(model, IIDProcess):
        mom = (1.0,) + model.raw_moments
        shifted = tuple(
            math.fsum(math.comb(k, j) * mom[j] * c ** (k - j) for j in range(k + 1)) for k in range(1, len(mom))
        )
        support = None
        if model.support is not None:
            support = (tuple(v + c for v in model.support[0]), model.support[1])
        return IIDProcess(shifted, support=support)
    if isinstance(model, GaussianStationary):
        raise ValueError("GaussianStationary supports mean 0 only; shift is not representable")
    raise TypeError(f"unsupported process model {type(model).__name__}")


def scale_process(model: ProcessModel, c: float) -> ProcessModel:
    """Law of ``c * X_i``."""
    if isinstance(model, FiniteJoint):
        return FiniteJoint(model.atoms * c, model.probs)
    if isinstance(model, IIDProcess):
        scaled = tuple(m * c ** (k + 1) for k, m in enumerate(model.raw_moments))
        support = None
        if model.support is not None:
            support = (tuple(v * c for v in model.support[0]), model.support[1])
        return IIDProcess(scaled, support=support)
    if isinstance(model, GaussianStationary):
        acov = model.autocovariance
        if isinstance(acov, AR1Autocovariance):
            return GaussianStationary(AR1Autocovariance(acov.phi, acov.variance * c * c))
        if isinstance(acov, _TabulatedAutocovariance):
            return GaussianStationary([g * c * c for g in acov.values])
        return GaussianStationary(lambda h: c * c * acov(h))
    raise TypeError(f"unsupported process model {type(model).__name__}")


def covariance_matrix(model: ProcessModel, n: int) -> np.ndarray:
    """Covariance of ``(X_1, ..., X_n)``."""
    if isinstance(model, GaussianStationary):
        return model.covariance_matrix(n)
    if isinstance(model, IIDProcess):
        var = model.raw_moment(2) - model.raw_moment(1) ** 2
        return var * np.eye(n)
    if isinstance(model, FiniteJoint):
        if n != model.n:
            raise ValueError(f"model has n={model.n}")
        p = model.probs
        mean = p @ model.atoms
        centered = model.atoms - mean
        return (centered * p[:, None]).T @ centered
    raise TypeError(f"unsupported process model {type(model).__name__}")
