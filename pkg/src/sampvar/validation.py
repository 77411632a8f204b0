"""Oracle-equivalence checks for one configured process.

Each :class:`Check` compares an engine value against an independent
reference and records the measured error.  :func:`run_checks` picks the
checks that apply to the process:

* finite support: moment route against exact enumeration, and fast
  symmetric moments against brute-force enumeration;
* Gaussian: moment route against the quadratic-form traces, and for
  i.i.d. normal against the scaled chi-squared cumulants;
* always: the tabulated kappa_2 against the moment route, location-shift
  invariance and scale equivariance.

Cumulant-route kappa_3/kappa_4 residuals are recorded as information only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .cumulants import CumulantSet, cumulants_moment_route
from .oracles import chisq_cumulants, exact_cumulants, exact_law, gaussian_quadratic_cumulants
from .process import FiniteJoint, GaussianStationary, IIDProcess, covariance_matrix, scale_process, shift_process
from .symmetric import build_tables, enumerate_symmetric_moment, group_patterns, symmetric_moment

__all__ = ["Check", "ValidationReport", "close", "run_checks"]

#: brute-force enumeration of symmetric moments is only attempted up to this n
ENUMERATION_MAX_N = 10
SHIFT = 0.75
SCALE = 1.5


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    reference: float
    error: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: error {self.error:.3e} (tol {self.tolerance:.1e})"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]
    info: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "info": dict(sorted(self.info.items())),
        }


def close(value: float, reference: float, rel_tol: float, abs_tol: float) -> tuple[float, bool]:
    """Absolute error and whether it is within ``max(abs_tol, rel_tol * |reference|)``."""
    err = abs(value - reference)
    return err, err <= max(abs_tol, rel_tol * abs(reference))


def _compare(name: str, value: float, reference: float, rel_tol: float, abs_tol: float) -> Check:
    err, ok = close(value, reference, rel_tol, abs_tol)
    return Check(name, float(value), float(reference), float(err), max(abs_tol, rel_tol * abs(reference)), ok)


def _compare_sets(label: str, got: CumulantSet, ref: CumulantSet, rel_tol: float, abs_tol: float,
                  powers: Iterable[float] | None = None) -> list[Check]:
    powers = list(powers) if powers is not None else [1.0] * 4
    out = []
    for r in range(1, got.order + 1):
        out.append(_compare(f"{label} k{r}", got.kappa(r), ref.kappa(r) * powers[r - 1], rel_tol, abs_tol))
    return out


def _shiftable(model) -> bool:
    return isinstance(model, (IIDProcess, FiniteJoint))


def run_checks(model, n: int, *, rel_tol: float = 1e-10, abs_tol: float = 1e-12, shift_tol: float = 1e-9,
               workers: int | None = None) -> ValidationReport:
    """Run every applicable oracle comparison for ``model`` at sample length ``n``."""
    order = min(4, n // 2)
    tables = build_tables(model, n, order, workers=workers)
    cs = cumulants_moment_route(model, n, order, tables=tables)
    checks: list[Check] = []
    info: dict[str, float] = {f"moment_route_k{r}": cs.kappa(r) for r in range(1, order + 1)}
    info.update({f"residual_{k}": v for k, v in cs.residuals.items() if k not in ("r2",)})

    # cumulant route kappa_2
    if "r2" in cs.residuals:
        checks.append(_compare("cumulant-route k2 vs moment route", cs.k2 + cs.residuals["r2"], cs.k2, rel_tol, abs_tol))
    if isinstance(model, IIDProcess) and "rest2" in cs.residuals:
        checks.append(_compare("rest term R2 vanishes (iid)", cs.residuals["rest2"], 0.0, 0.0, abs_tol))

    # exact enumeration
    finite = model
    if isinstance(model, IIDProcess) and model.support is not None:
        from .process import MAX_FINITE_ATOMS, iid_to_finite_joint

        if len(model.support[0]) ** n <= MAX_FINITE_ATOMS:
            finite = iid_to_finite_joint(model, n)
    if isinstance(finite, FiniteJoint):
        ref = exact_cumulants(exact_law(finite))
        checks += _compare_sets("moment route vs exact enumeration", cs, ref, rel_tol, abs_tol)

    # Gaussian closed forms
    if isinstance(model, GaussianStationary) or (isinstance(model, IIDProcess) and model.is_normal):
        ref = gaussian_quadratic_cumulants(covariance_matrix(model, n))
        checks += _compare_sets("moment route vs quadratic-form traces", cs, ref, rel_tol, abs_tol)
    if isinstance(model, IIDProcess) and model.is_normal:
        sigma = math.sqrt(model.raw_moment(2) - model.raw_moment(1) ** 2)
        checks += _compare_sets("moment route vs chi-squared", cs, chisq_cumulants(n, sigma), rel_tol, abs_tol)

    # fast symmetric moments against brute force
    if n <= ENUMERATION_MAX_N and not (isinstance(model, IIDProcess) and model.support is None and not model.is_normal):
        worst, worst_ref = 0.0, 0.0
        ok = True
        for g in range(1, order + 1):
            for pat in group_patterns(g):
                fast = symmetric_moment(model, pat, n)
                slow = enumerate_symmetric_moment(model, pat, n, workers=workers)
                err, good = close(fast, slow, rel_tol, abs_tol)
                ok &= good
                if err >= worst:
                    worst, worst_ref = err, slow
        checks.append(Check("symmetric moments: fast path vs enumeration", worst_ref + worst, worst_ref, worst,
                            max(abs_tol, rel_tol * abs(worst_ref)), ok))

    # invariances
    if _shiftable(model):
        shifted = cumulants_moment_route(shift_process(model, SHIFT), n, order)
        checks += _compare_sets("location shift invariance", shifted, cs, shift_tol, shift_tol)
    scaled = cumulants_moment_route(scale_process(model, SCALE), n, order)
    checks += _compare_sets("scale equivariance", scaled, cs, rel_tol, abs_tol,
                            powers=[SCALE ** (2 * r) for r in range(1, 5)])

    return ValidationReport(tuple(checks), info)
