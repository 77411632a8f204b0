"""Independent ground truth for the law of ``s^2``.

* :func:`exact_law` / :func:`exact_cumulants` enumerate a finite joint law.
* :func:`gaussian_quadratic_cumulants` uses ``s^2 = X' B X / (n-1)`` for
  ``X ~ N(0, Sigma)``: ``kappa_r = 2^{r-1} (r-1)! tr((B Sigma / (n-1))^r)``.
* :func:`gamma_reference` is the exact law for i.i.d. normal samples,
  ``s^2 ~ sigma^2 chi2_{n-1} / (n-1)``.
* :func:`simulate_ar1` is a reproducible Monte Carlo for Gaussian AR(1).

None of these touch the symmetric-moment machinery.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .cumulants import CumulantSet
from .process import MAX_FINITE_ATOMS, FiniteJoint, SupportExplosionError

__all__ = [
    "ExactLaw",
    "MCSummary",
    "exact_law",
    "exact_cumulants",
    "gaussian_quadratic_cumulants",
    "chisq_cumulants",
    "gamma_reference",
    "simulate_ar1",
    "simulate_ar1_s2",
    "kstatistics",
    "kstatistic_standard_errors",
    "sample_cumulants",
]

MERGE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExactLaw:
    """Law of ``s^2`` on finitely many values (sorted ascending)."""

    n: int
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ValueError("s^2 values must be non-negative")
        total = math.fsum(self.probs.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}")

    def __eq__(self, other):
        return (
            isinstance(other, ExactLaw)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.probs, other.probs)
        )

    def as_dict(self) -> dict[float, float]:
        return dict(zip(self.values.tolist(), self.probs.tolist()))

    def to_dict(self) -> dict:
        return {"n": self.n, "values": self.values.tolist(), "probs": self.probs.tolist()}

    def moment(self, k: int) -> float:
        return math.fsum((self.probs * self.values**k).tolist())


def _sample_variance_rows(atoms: np.ndarray) -> np.ndarray:
    n = atoms.shape[1]
    xbar = atoms.sum(axis=1) / n
    return ((atoms - xbar[:, None]) ** 2).sum(axis=1) / (n - 1)


def exact_law(model: FiniteJoint, tol: float = MERGE_TOL) -> ExactLaw:
    """Distribution of ``s^2`` over the atoms of a finite joint law.

    Values closer than ``tol`` to the smallest value of their run (after
    sorting) are merged; probabilities are summed exactly.
    """
    if not isinstance(model, FiniteJoint):
        raise TypeError("exact_law needs a FiniteJoint model")
    if model.atoms.shape[0] > MAX_FINITE_ATOMS:
        raise SupportExplosionError(f"more than {MAX_FINITE_ATOMS} atoms")
    if model.n < 2:
        raise ValueError("s^2 needs n >= 2")
    s2 = _sample_variance_rows(model.atoms)
    order = np.argsort(s2, kind="stable")
    s2, p = s2[order], model.probs[order]
    values, probs = [], []
    start = 0
    m = s2.shape[0]
    while start < m:
        # runs are contiguous in sorted order; find the end of this one
        stop = int(np.searchsorted(s2, s2[start] + tol, side="right"))
        values.append(float(s2[start]))
        probs.append(math.fsum(p[start:stop].tolist()))
        start = stop
    values_arr = np.maximum(np.array(values), 0.0)
    return ExactLaw(model.n, values_arr, np.array(probs))


def exact_cumulants(law: ExactLaw) -> CumulantSet:
    """kappa_1..kappa_4 of an enumerated law (central moments, exact sums)."""
    p = law.probs
    mean = math.fsum((p * law.values).tolist())
    c = law.values - mean
    m2 = math.fsum((p * c**2).tolist())
    m3 = math.fsum((p * c**3).tolist())
    m4 = math.fsum((p * c**4).tolist())
    return CumulantSet(law.n, mean, m2, m3, m4 - 3 * m2 * m2, engine="exact")


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def gaussian_quadratic_cumulants(covariance) -> CumulantSet:
    """Cumulants of ``s^2`` for ``X ~ N(0, Sigma)``, from traces."""
    cov = np.asarray(covariance, dtype=float)
    n = cov.shape[0]
    B = np.eye(n) - np.full((n, n), 1.0 / n)
    M = B @ cov / (n - 1)
    P = np.eye(n)
    ks = []
    for r in range(1, 5):
        P = P @ M
        ks.append(2 ** (r - 1) * math.factorial(r - 1) * float(np.trace(P)))
    return CumulantSet(n, *ks, engine="quadratic-form")


def chisq_cumulants(n: int, sigma: float = 1.0) -> CumulantSet:
    """``kappa_r = sigma^{2r} 2^{r-1} (r-1)! / (n-1)^{r-1}`` for i.i.d. normal."""
    ks = [sigma ** (2 * r) * 2 ** (r - 1) * math.factorial(r - 1) / (n - 1) ** (r - 1) for r in range(1, 5)]
    return CumulantSet(n, *ks, engine="chi-squared")


def gamma_reference(n: int, sigma: float, x) -> tuple:
    """Exact density and CDF of ``s^2`` for i.i.d. ``N(., sigma^2)`` samples.

    ``s^2 ~ Gamma(shape=(n-1)/2, scale=2 sigma^2/(n-1))``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("x must be non-negative")
    law = stats.gamma((n - 1) / 2, scale=2 * sigma**2 / (n - 1))
    pdf, cdf = law.pdf(xa), law.cdf(xa)
    if xa.ndim == 0:
        return float(pdf), float(cdf)
    return pdf, cdf


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def kstatistics(x) -> tuple[float, float, float, float]:
    """Unbiased estimators k_1..k_4 of the first four cumulants.

    Power sums are taken about the sample mean, which leaves k_2..k_4
    unchanged algebraically and avoids cancellation.
    """
    x = np.asarray(x, dtype=float)
    N = x.shape[0]
    if N < 4:
        raise ValueError("need at least 4 observations")
    mean = math.fsum(x.tolist()) / N
    d = x - mean
    S1, S2, S3, S4 = (math.fsum((d**r).tolist()) for r in range(1, 5))
    k1 = mean + S1 / N
    k2 = (N * S2 - S1**2) / (N * (N - 1))
    k3 = (2 * S1**3 - 3 * N * S1 * S2 + N**2 * S3) / (N * (N - 1) * (N - 2))
    k4 = (
        -6 * S1**4
        + 12 * N * S1**2 * S2
        - 3 * N * (N - 1) * S2**2
        - 4 * N * (N + 1) * S1 * S3
        + N**2 * (N + 1) * S4
    ) / (N * (N - 1) * (N - 2) * (N - 3))
    return k1, k2, k3, k4


def sample_cumulants(x, order: int = 8) -> list[float]:
    """Plug-in cumulants kappa_1..kappa_order from sample central moments."""
    x = np.asarray(x, dtype=float)
    mean = math.fsum(x.tolist()) / x.shape[0]
    d = x - mean
    m = [1.0, 0.0] + [math.fsum((d**r).tolist()) / x.shape[0] for r in range(2, order + 1)]
    kap = [0.0] * (order + 1)
    for r in range(2, order + 1):
        kap[r] = m[r] - math.fsum(math.comb(r - 1, j - 1) * kap[j] * m[r - j] for j in range(2, r - 1))
    kap[1] = mean
    return kap[1:]


def kstatistic_standard_errors(kappa, N: int) -> tuple[float, float, float, float]:
    """Standard errors of k_1..k_4 given cumulants kappa_1..kappa_8.

    Uses the classical sampling variances of k-statistics (Fisher):
    leading terms in ``1/N`` with the finite-``N`` factors kept.
    """
    k = [None, *kappa]
    v1 = k[2] / N
    v2 = k[4] / N + 2 * k[2] ** 2 / (N - 1)
    v3 = k[6] / N + 9 * k[2] * k[4] / (N - 1) + 9 * k[3] ** 2 / (N - 1) + 6 * N * k[2] ** 3 / ((N - 1) * (N - 2))
    v4 = (
        k[8] / N
        + 16 * k[2] * k[6] / (N - 1)
        + 48 * k[3] * k[5] / (N - 1)
        + 34 * k[4] ** 2 / (N - 1)
        + 72 * N * k[2] ** 2 * k[4] / ((N - 1) * (N - 2))
        + 144 * N * k[2] * k[3] ** 2 / ((N - 1) * (N - 2))
        + 24 * N * (N + 1) * k[2] ** 4 / ((N - 1) * (N - 2) * (N - 3))
    )
    return tuple(math.sqrt(max(v, 0.0)) for v in (v1, v2, v3, v4))


@dataclass(frozen=True, eq=False)
class MCSummary:
    """Summary of a Monte Carlo sample of ``s^2`` values."""

    draws: int
    n: int
    phi: float
    innovation_sd: float
    seed: int
    streams: int
    k: tuple[float, float, float, float]
    se: tuple[float, float, float, float]
    hist_edges: np.ndarray = field(repr=False)
    hist_masses: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not all(s > 0 for s in self.se):
            raise ValueError("standard errors must be positive")
        total = math.fsum(self.hist_masses.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"histogram masses sum to {total!r}")

    def to_dict(self) -> dict:
        return {
            "draws": self.draws,
            "n": self.n,
            "phi": self.phi,
            "innovation_sd": self.innovation_sd,
            "seed": self.seed,
            "streams": self.streams,
            "k1": self.k[0],
            "k2": self.k[1],
            "k3": self.k[2],
            "k4": self.k[3],
            "se": list(self.se),
            "histogram": {"edges": self.hist_edges.tolist(), "masses": self.hist_masses.tolist()},
        }

    def histogram_rows(self) -> list[tuple[float, float]]:
        """``(left edge, mass)`` per bin."""
        return list(zip(self.hist_edges[:-1].tolist(), self.hist_masses.tolist()))


_BLOCK = 1 << 16


def _stream_sizes(draws: int, streams: int) -> list[int]:
    base, extra = divmod(draws, streams)
    return [base + (1 if i < extra else 0) for i in range(streams)]


def _simulate_stream(phi: float, innovation_sd: float, n: int, size: int, seed: int, stream: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    rng = np.random.Generator(np.random.Philox(ss))
    sd0 = innovation_sd / math.sqrt(1.0 - phi * phi)
    out = np.empty(size)
    for lo in range(0, size, _BLOCK):
        b = min(_BLOCK, size - lo)
        eps = rng.standard_normal((b, n))
        x = np.empty((b, n))
        x[:, 0] = sd0 * eps[:, 0]
        for t in range(1, n):
            x[:, t] = phi * x[:, t - 1] + innovation_sd * eps[:, t]
        out[lo : lo + b] = _sample_variance_rows(x)
    return out


def simulate_ar1_s2(
    phi: float, innovation_sd: float, n: int, draws: int, seed: int, streams: int = 16, workers: int | None = None
) -> np.ndarray:
    """Simulated ``s^2`` values, concatenated in stream order.

    Stream ``i`` draws from Philox keyed by ``SeedSequence(seed, spawn_key=(i,))``,
    so the output depends on ``(seed, streams)`` but not on ``workers``.
    """
    if not -1.0 < phi < 1.0:
        raise ValueError("AR(1) requires |phi| < 1")
    if innovation_sd <= 0:
        raise ValueError("innovation_sd must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    sizes = _stream_sizes(draws, streams)
    args = [(phi, innovation_sd, n, size, int(seed), i) for i, size in enumerate(sizes)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_stream, *zip(*args)))
    else:
        parts = [_simulate_stream(*a) for a in args]
    return np.concatenate(parts)


def simulate_ar1(
    phi: float,
    innovation_sd: float,
    n: int,
    draws: int,
    seed: int,
    streams: int = 16,
    workers: int | None = None,
    bins: int = 100,
    min_draws: int = 10**4,
) -> MCSummary:
    """Monte Carlo summary of ``s^2`` for a stationary Gaussian AR(1).

    ``X_1 ~ N(0, innovation_sd^2 / (1 - phi^2))`` and
    ``X_t = phi X_{t-1} + innovation_sd * e_t``.
    """
    if draws < min_draws:
        raise ValueError(f"draws must be at least {min_draws}")
    s2 = simulate_ar1_s2(phi, innovation_sd, n, draws, seed, streams, workers)
    k = kstatistics(s2)
    se = kstatistic_standard_errors(sample_cumulants(s2, 8), draws)
    counts, edges = np.histogram(s2, bins=bins)
    return MCSummary(draws, n, phi, innovation_sd, int(seed), streams, k, se, edges, counts / draws)
